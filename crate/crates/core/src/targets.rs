//! Target spaces, divisor arrangements, root data and base J-functions.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::One;

use crate::algebra::{int, AmbientRing, ExponentKey, GradedSeries, SeriesContext};
use crate::error::{Error, Result};

/// A product of projective spaces `P^{n_1} x ... x P^{n_k}`.
///
/// Curve classes are written in the basis dual to the hyperplane generators, so
/// `P_k . beta = beta_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TargetSpace {
    factors: Vec<u32>,
    ring: AmbientRing,
}

impl TargetSpace {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidTarget("no projective factors given".into()));
        }
        if let Some(k) = factors.iter().position(|n| *n == 0) {
            return Err(Error::InvalidTarget(format!("factor {} has dimension 0", k + 1)));
        }
        let ring = AmbientRing::projective_product(&factors);
        Ok(TargetSpace { factors, ring })
    }

    pub fn projective(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn ring(&self) -> &AmbientRing {
        &self.ring
    }

    /// Number of hyperplane generators, which is also the rank of the curve lattice.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn dimension(&self) -> u32 {
        self.ring.dimension()
    }

    /// Coefficients of `-K_X = sum_k (n_k + 1) P_k`.
    pub fn anticanonical(&self) -> Vec<u32> {
        self.factors.iter().map(|n| n + 1).collect()
    }

    pub fn anticanonical_degree(&self, beta: &[u32]) -> u32 {
        pairing(&self.anticanonical(), beta)
    }

    /// A series context truncated at anticanonical degree `cap`.
    pub fn context(&self, cap: u32, z_floor: Option<i32>) -> Arc<SeriesContext> {
        SeriesContext::new(self.ring.clone(), self.anticanonical(), cap, z_floor)
    }
}

/// `D . beta = sum_k c_k beta_k`.
pub fn pairing(coeffs: &[u32], beta: &[u32]) -> u32 {
    coeffs.iter().zip(beta).map(|(c, b)| c * b).sum()
}

/// Effective classes with `(-K_X) . beta <= cap`, in lexicographic order.
pub fn enumerate_curve_classes(x: &TargetSpace, cap: u32) -> Vec<Vec<u32>> {
    let weights = x.anticanonical();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(weights.len());
    fn walk(weights: &[u32], budget: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((w, rest)) = weights.split_first() else {
            out.push(current.clone());
            return;
        };
        for b in 0..=budget / w {
            current.push(b);
            walk(rest, budget - b * w, current, out);
            current.pop();
        }
    }
    walk(&weights, cap, &mut current, &mut out);
    out
}

/// The small J-function coefficient `J_{X,beta}(0, z) Q^beta`:
/// `z prod_k prod_{0<a<=beta_k} (P_k + a z)^{-(n_k+1)}`.
pub fn base_j_function(x: &TargetSpace, ctx: &Arc<SeriesContext>, beta: &[u32]) -> Result<GradedSeries> {
    if beta.len() != x.rank() {
        return Err(Error::Precondition(format!(
            "curve class {beta:?} has the wrong rank for this target"
        )));
    }
    let work = ctx.without_z_floor();
    let mut acc = GradedSeries::z_power(&work, 1, int(1));
    for (k, (&b, &n)) in beta.iter().zip(&x.factors).enumerate() {
        let p = GradedSeries::generator(&work, k);
        for a in 1..=b {
            let inv = GradedSeries::invert_z_linear(&int(a as i64), &p)?;
            acc = acc.checked_mul(&inv.pow(n + 1)?)?;
        }
    }
    let tagged = acc.shift(beta, &Default::default(), &[]);
    Ok(tagged.rehome(ctx))
}

/// A nef divisor class `sum_k c_k P_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    name: String,
    coeffs: Vec<u32>,
}

impl Divisor {
    /// Validates nefness (componentwise nonnegative) and rejects the zero class.
    pub fn new(name: impl Into<String>, coeffs: &[i64], x: &TargetSpace) -> Result<Self> {
        let name = name.into();
        if coeffs.len() != x.rank() {
            return Err(Error::InvalidArrangement(format!(
                "divisor {name} has {} coefficients, target has {} factors",
                coeffs.len(),
                x.rank()
            )));
        }
        if coeffs.iter().any(|c| *c < 0) {
            return Err(Error::NonNefDivisor { name });
        }
        if coeffs.iter().all(|c| *c == 0) {
            return Err(Error::InvalidArrangement(format!("divisor {name} is the zero class")));
        }
        let coeffs = coeffs
            .iter()
            .map(|c| {
                u32::try_from(*c).map_err(|_| Error::InvalidArrangement(format!("coefficient {c} of {name} too large")))
            })
            .collect::<Result<_>>()?;
        Ok(Divisor { name, coeffs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn degree(&self, beta: &[u32]) -> u32 {
        pairing(&self.coeffs, beta)
    }

    /// The class as a series in `ctx`.
    pub fn class(&self, ctx: &Arc<SeriesContext>) -> GradedSeries {
        let coeffs: Vec<_> = self.coeffs.iter().map(|c| int(*c as i64)).collect();
        GradedSeries::linear_class(ctx, &coeffs)
    }
}

/// Divisors `D_1, ..., D_n` on a fixed target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorArrangement {
    target: TargetSpace,
    divisors: Vec<Divisor>,
}

impl DivisorArrangement {
    pub fn new(target: TargetSpace, divisors: Vec<Divisor>) -> Result<Self> {
        if divisors.is_empty() {
            return Err(Error::InvalidArrangement("no divisors given".into()));
        }
        if let Some(d) = divisors.iter().find(|d| d.coeffs.len() != target.rank()) {
            return Err(Error::InvalidArrangement(format!(
                "divisor {} has the wrong rank",
                d.name
            )));
        }
        Ok(DivisorArrangement { target, divisors })
    }

    /// Builds an arrangement from `(name, coefficients)` pairs.
    pub fn from_coeffs(target: TargetSpace, divisors: &[(&str, Vec<i64>)]) -> Result<Self> {
        let divisors = divisors
            .iter()
            .map(|(n, c)| Divisor::new(*n, c, &target))
            .collect::<Result<_>>()?;
        Self::new(target, divisors)
    }

    pub fn target(&self) -> &TargetSpace {
        &self.target
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// `(d_1, ..., d_n)` with `d_i = D_i . beta`.
    pub fn degrees(&self, beta: &[u32]) -> Vec<u32> {
        self.divisors.iter().map(|d| d.degree(beta)).collect()
    }

    pub fn total_degree(&self, beta: &[u32]) -> u32 {
        self.degrees(beta).iter().sum()
    }

    /// Coefficients of `D = sum_i D_i`.
    pub fn total_class(&self) -> Vec<u32> {
        let mut total = vec![0; self.target.rank()];
        for d in &self.divisors {
            for (t, c) in total.iter_mut().zip(&d.coeffs) {
                *t += c;
            }
        }
        total
    }

    pub fn is_anticanonical(&self) -> bool {
        self.total_class() == self.target.anticanonical()
    }

    /// No two divisors share a class.
    pub fn pairwise_distinct(&self) -> bool {
        let n = self.divisors.len();
        (0..n).all(|i| (i + 1..n).all(|j| self.divisors[i].coeffs != self.divisors[j].coeffs))
    }

    /// `prod_{i in indices} D_i` in the cohomology ring. Generic members of nef classes on
    /// these targets meet exactly when this product is nonzero.
    pub fn intersection_class(&self, indices: &[usize]) -> Result<GradedSeries> {
        let ctx = self.target.context(0, None);
        let mut acc = GradedSeries::one(&ctx);
        for &i in indices {
            acc = acc.checked_mul(&self.divisors[i].class(&ctx))?;
        }
        Ok(acc)
    }

    pub fn intersection_empty(&self, indices: &[usize]) -> bool {
        self.intersection_class(indices).map_or(true, |c| c.is_zero())
    }

    /// Whether the sector with the given labels is zero, i.e. `cap_{i: s_i != 0} D_i` is empty.
    pub fn sector_vanishes(&self, sector: &[i64]) -> bool {
        let support: Vec<usize> = (0..self.len())
            .filter(|i| sector.get(*i).copied().unwrap_or(0) != 0)
            .collect();
        self.intersection_empty(&support)
    }
}

/// Outcome of scanning classes for the positivity condition
/// `#{i : D_i . beta > 0} >= 2` whenever `D . beta >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionReport {
    pub holds: bool,
    pub violations: Vec<Vec<u32>>,
    pub cap: u32,
}

pub fn check_assumption(d: &DivisorArrangement, cap: u32) -> AssumptionReport {
    let violations: Vec<Vec<u32>> = enumerate_curve_classes(d.target(), cap)
        .into_iter()
        .filter(|beta| {
            let deg = d.degrees(beta);
            deg.iter().sum::<u32>() >= 2 && deg.iter().filter(|x| **x > 0).count() < 2
        })
        .collect();
    AssumptionReport {
        holds: violations.is_empty(),
        violations,
        cap,
    }
}

pub fn check_coprime(roots: &[u32]) -> bool {
    let n = roots.len();
    (0..n).all(|i| (i + 1..n).all(|j| roots[i].gcd(&roots[j]).is_one()))
}

/// Root orders `r_1, ..., r_n`, positive and pairwise coprime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootData {
    roots: Vec<u32>,
}

impl RootData {
    pub fn new(roots: Vec<u32>) -> Result<Self> {
        if roots.contains(&0) {
            return Err(Error::InvalidArrangement(format!(
                "root orders must be positive: {roots:?}"
            )));
        }
        if !check_coprime(&roots) {
            return Err(Error::NonCoprimeRoots(roots));
        }
        Ok(RootData { roots })
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Checks that there is one root per divisor.
    pub fn fits(&self, d: &DivisorArrangement) -> Result<()> {
        if self.roots.len() == d.len() {
            Ok(())
        } else {
            Err(Error::InvalidArrangement(format!(
                "{} root orders for {} divisors",
                self.roots.len(),
                d.len()
            )))
        }
    }
}

/// The key of `Q^beta` with every other component neutral.
pub fn beta_key(ctx: &SeriesContext, beta: &[u32]) -> ExponentKey {
    ctx.unit_key().with_beta(beta.to_vec())
}
