//! Cohomology rings of products of projective spaces.
//!
//! `H^*(P^{n_1} x ... x P^{n_k}) = Q[P_1, ..., P_k] / (P_1^{n_1+1}, ..., P_k^{n_k+1})`, with each
//! hyperplane generator in real degree 2. Elements are stored in the monomial basis; a
//! monomial is an exponent vector, and any exponent above its cap is zero.

/// Exponent vector over the ring generators.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientRing {
    names: Vec<String>,
    caps: Vec<u32>,
}

impl AmbientRing {
    pub fn new(names: Vec<String>, caps: Vec<u32>) -> Self {
        assert_eq!(names.len(), caps.len(), "one cap per generator");
        AmbientRing { names, caps }
    }

    /// The ring of `P^{n_1} x ... x P^{n_k}`. Generators are named `P` for a single factor
    /// and `P1, P2, ...` otherwise.
    pub fn projective_product(factors: &[u32]) -> Self {
        let names = if factors.len() == 1 {
            vec!["P".to_string()]
        } else {
            (1..=factors.len()).map(|k| format!("P{k}")).collect()
        };
        AmbientRing::new(names, factors.to_vec())
    }

    pub fn rank(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Complex dimension of the underlying space.
    pub fn dimension(&self) -> u32 {
        self.caps.iter().sum()
    }

    pub fn unit_monomial(&self) -> Monomial {
        vec![0; self.rank()]
    }

    /// The point class; integration picks out its coefficient.
    pub fn top_monomial(&self) -> Monomial {
        self.caps.clone()
    }

    pub fn generator(&self, k: usize) -> Monomial {
        let mut m = self.unit_monomial();
        m[k] = 1;
        m
    }

    pub fn within_caps(&self, m: &[u32]) -> bool {
        m.len() == self.rank() && m.iter().zip(&self.caps).all(|(e, c)| e <= c)
    }

    /// Product of two monomials, or `None` when it vanishes by nilpotency.
    pub fn multiply(&self, a: &[u32], b: &[u32]) -> Option<Monomial> {
        let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.within_caps(&m).then_some(m)
    }

    /// Poincaré dual of a basis monomial: the complementary monomial.
    pub fn dual_monomial(&self, m: &[u32]) -> Monomial {
        m.iter().zip(&self.caps).map(|(e, c)| c - e).collect()
    }

    /// Pairing of two basis monomials: 1 if complementary, else 0.
    pub fn pairing(&self, a: &[u32], b: &[u32]) -> u32 {
        match self.multiply(a, b) {
            Some(m) if m == self.caps => 1,
            _ => 0,
        }
    }

    pub fn degree(m: &[u32]) -> u32 {
        m.iter().sum()
    }

    /// All basis monomials in lexicographic order.
    pub fn basis(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::new()];
        for &c in &self.caps {
            out = out
                .into_iter()
                .flat_map(|prefix: Monomial| {
                    (0..=c).map(move |e| {
                        let mut m = prefix.clone();
                        m.push(e);
                        m
                    })
                })
                .collect();
        }
        out
    }

    pub fn format_monomial(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}
