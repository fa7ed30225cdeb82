use std::collections::BTreeMap;
use std::fmt;

use super::ring::{AmbientRing, Monomial};

/// Exponents of the extended variables: `(divisor index, contact order) -> k`.
/// Zero exponents are never stored.
pub type XMonomial = BTreeMap<(usize, u32), u32>;

/// One basis element of a graded series:
/// `Q^beta z^zpow prod x_{ij}^{k_ij} lambda^lambda_exp [coh]_{sector}`.
///
/// `sector` and `lambda` are stored with trailing zeros trimmed so that the
/// untwisted sector and the lambda-free part have a single representation no
/// matter how many divisors the producing construction had.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentKey {
    pub beta: Vec<u32>,
    pub zpow: i32,
    pub xexp: XMonomial,
    pub sector: Vec<i64>,
    pub coh: Monomial,
    pub lambda: Vec<u32>,
}

impl ExponentKey {
    /// The key of the constant `1` for a ring and curve-class lattice of the given rank.
    pub fn unit(ring_rank: usize, beta_rank: usize) -> Self {
        ExponentKey {
            beta: vec![0; beta_rank],
            zpow: 0,
            xexp: XMonomial::new(),
            sector: Vec::new(),
            coh: vec![0; ring_rank],
            lambda: Vec::new(),
        }
    }

    pub fn with_zpow(mut self, zpow: i32) -> Self {
        self.zpow = zpow;
        self
    }

    pub fn with_coh(mut self, coh: Monomial) -> Self {
        self.coh = coh;
        self
    }

    pub fn with_beta(mut self, beta: Vec<u32>) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_sector(mut self, sector: Vec<i64>) -> Self {
        self.sector = trim_i64(sector);
        self
    }

    pub fn with_lambda(mut self, lambda: Vec<u32>) -> Self {
        self.lambda = trim_u32(lambda);
        self
    }

    pub fn with_xexp(mut self, xexp: XMonomial) -> Self {
        self.xexp = xexp.into_iter().filter(|(_, k)| *k > 0).collect();
        self
    }

    /// Sector entry `i`, reading trimmed positions as zero.
    pub fn sector_at(&self, i: usize) -> i64 {
        self.sector.get(i).copied().unwrap_or(0)
    }

    pub fn lambda_at(&self, i: usize) -> u32 {
        self.lambda.get(i).copied().unwrap_or(0)
    }

    pub fn is_untwisted(&self) -> bool {
        self.sector.is_empty()
    }

    pub fn lambda_free(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Total number of extended insertions `sum k_ij`.
    pub fn x_degree(&self) -> u32 {
        self.xexp.values().sum()
    }

    /// Renders the key with the ring's generator names, for diagnostics.
    pub fn describe(&self, ring: &AmbientRing) -> String {
        format!(
            "Q^{:?} z^{} x[{}] sector{:?} {} lambda{:?}",
            self.beta,
            self.zpow,
            format_xexp(&self.xexp),
            self.sector,
            ring.format_monomial(&self.coh),
            self.lambda
        )
    }
}

impl fmt::Display for ExponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "beta={:?} z^{} x[{}] sector={:?} coh={:?} lambda={:?}",
            self.beta,
            self.zpow,
            format_xexp(&self.xexp),
            self.sector,
            self.coh,
            self.lambda
        )
    }
}

/// `x_{i,j}^k` factors joined by `*`, using 1-based divisor indices as written in formulas.
pub fn format_xexp(x: &XMonomial) -> String {
    x.iter()
        .map(|((i, j), k)| {
            if *k == 1 {
                format!("x{}_{}", i + 1, j)
            } else {
                format!("x{}_{}^{}", i + 1, j, k)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub(crate) fn trim_i64(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn trim_u32(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn add_i64(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len().max(b.len());
    let v = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim_i64(v)
}

pub(crate) fn add_u32(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let v = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim_u32(v)
}

pub(crate) fn add_xexp(a: &XMonomial, b: &XMonomial) -> XMonomial {
    let mut out = a.clone();
    for (v, k) in b {
        *out.entry(*v).or_insert(0) += k;
    }
    out
}
