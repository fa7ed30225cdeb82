//! Hypergeometric I-functions of root stacks, their infinite-root limits, and the
//! companion relative and local theories, all evaluated at `t = 0`.
//!
//! Every family is a sum over curve classes `beta` of `J_{X,beta} Q^beta` times a product
//! of linear factors in `D_i` and `z`. Slices are built independently (in parallel) and
//! merged in lexicographic order of `beta`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{factorial, int, GradedSeries, Rational, SeriesContext, XMonomial};
use crate::error::{Error, Result};
use crate::targets::{base_j_function, enumerate_curve_classes, DivisorArrangement, RootData};

/// Contact orders `j` carrying extended variables `x_{ij}`, per divisor, with `a_{ij} = j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedData {
    orders: Vec<BTreeSet<u32>>,
    m: u32,
    full: bool,
}

impl ExtendedData {
    /// Every order `1..=m` on each of `n` divisors.
    pub fn full(n: usize, m: u32) -> Self {
        ExtendedData {
            orders: vec![(1..=m).collect(); n],
            m,
            full: true,
        }
    }

    /// Only `x_{i1}` on each divisor.
    pub fn contact_order_one(n: usize) -> Self {
        ExtendedData {
            orders: vec![BTreeSet::from([1]); n],
            m: 1,
            full: false,
        }
    }

    pub fn from_orders(orders: Vec<Vec<u32>>) -> Result<Self> {
        if orders.iter().flatten().any(|j| *j == 0) {
            return Err(Error::UnsupportedExtendedData("contact orders must be positive".into()));
        }
        let orders: Vec<BTreeSet<u32>> = orders.into_iter().map(|o| o.into_iter().collect()).collect();
        let m = orders.iter().flatten().copied().max().unwrap_or(0);
        Ok(ExtendedData { orders, m, full: false })
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn orders(&self, i: usize) -> impl Iterator<Item = u32> + '_ {
        self.orders[i].iter().copied()
    }

    fn fits(&self, d: &DivisorArrangement) -> Result<()> {
        if self.orders.len() == d.len() {
            Ok(())
        } else {
            Err(Error::UnsupportedExtendedData(format!(
                "extended data for {} divisors, arrangement has {}",
                self.orders.len(),
                d.len()
            )))
        }
    }

    /// For data of the form `1..=m`, fails when a divisor degree at `beta` exceeds `m`, since
    /// partitions of that degree would be silently missing.
    pub fn ensure_covers(&self, beta: &[u32], degrees: &[u32]) -> Result<()> {
        if !self.full {
            return Ok(());
        }
        match degrees.iter().copied().max() {
            Some(needed) if needed > self.m => Err(Error::ExtendedDataIncomplete {
                beta: beta.to_vec(),
                needed,
                m: self.m,
            }),
            _ => Ok(()),
        }
    }

    /// Multiplicity vectors `(k_j)` over the orders of divisor `i` with `sum_j j k_j = target`.
    fn partitions(&self, i: usize, target: u32) -> Vec<Vec<(u32, u32)>> {
        let orders: Vec<u32> = self.orders(i).collect();
        let mut out = Vec::new();
        fn walk(orders: &[u32], left: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
            let Some((&j, rest)) = orders.split_first() else {
                if left == 0 {
                    out.push(acc.clone());
                }
                return;
            };
            for k in 0..=left / j {
                if k > 0 {
                    acc.push((j, k));
                }
                walk(rest, left - k * j, acc, out);
                if k > 0 {
                    acc.pop();
                }
            }
        }
        walk(&orders, target, &mut Vec::new(), &mut out);
        out
    }

    /// All exponent assignments `k_{ij}` with `sum k_{ij} <= k_cap`.
    fn bounded(&self, k_cap: u32) -> Vec<Vec<(usize, u32, u32)>> {
        let vars: Vec<(usize, u32)> = (0..self.len())
            .flat_map(|i| self.orders(i).map(move |j| (i, j)))
            .collect();
        let mut out = Vec::new();
        fn walk(
            vars: &[(usize, u32)],
            left: u32,
            acc: &mut Vec<(usize, u32, u32)>,
            out: &mut Vec<Vec<(usize, u32, u32)>>,
        ) {
            let Some((&(i, j), rest)) = vars.split_first() else {
                out.push(acc.clone());
                return;
            };
            for k in 0..=left {
                if k > 0 {
                    acc.push((i, j, k));
                }
                walk(rest, left - k, acc, out);
                if k > 0 {
                    acc.pop();
                }
            }
        }
        walk(&vars, k_cap, &mut Vec::new(), &mut out);
        out
    }
}

/// `x^k / (z^{|k|} prod k!)` as `(exponents, 1/prod k!, -|k|)`.
fn x_weight(ks: &[(usize, u32, u32)]) -> (XMonomial, Rational, i32) {
    let mut xexp = XMonomial::new();
    let mut denom = int(1);
    let mut total = 0;
    for &(i, j, k) in ks {
        *xexp.entry((i, j)).or_insert(0) += k;
        denom *= factorial(k);
        total += k as i32;
    }
    (xexp, denom.recip(), -total)
}

/// `sum_j j k_{ij}` for each divisor.
fn contact_sums(n: usize, ks: &[(usize, u32, u32)]) -> Vec<u32> {
    let mut s = vec![0; n];
    for &(i, j, k) in ks {
        s[i] += j * k;
    }
    s
}

/// `cls + c z`.
fn linear(cls: &GradedSeries, c: i64) -> Result<GradedSeries> {
    cls.checked_add(&GradedSeries::z_power(cls.context(), 1, int(c)))
}

/// `prod_{a in range} (cls + a z)`.
fn rising<I: IntoIterator<Item = i64>>(cls: &GradedSeries, range: I) -> Result<GradedSeries> {
    let mut acc = GradedSeries::one(cls.context());
    for a in range {
        acc = acc.checked_mul(&linear(cls, a)?)?;
    }
    Ok(acc)
}

/// `prod_{0<a<=d} (D + a z)`.
fn upper(cls: &GradedSeries, d: u32) -> Result<GradedSeries> {
    rising(cls, 1..=d as i64)
}

/// `r / (D + c z)`, i.e. the inverse of `D/r + (c/r) z`.
fn root_inverse(cls: &GradedSeries, c: i64, r: u32) -> Result<GradedSeries> {
    Ok(GradedSeries::invert_z_linear(&int(c), cls)?.scale(&int(r as i64)))
}

/// The finite-root factor for one divisor with shifted degree `e`:
/// divides by `D/r + a z` for `0 < a <= e/r` when `e > 0` and multiplies by it for
/// `e/r < a <= 0` when `e < 0`, with `a` in the class of `e/r` modulo 1.
fn root_correction(cls: &GradedSeries, e: i64, r: u32) -> Result<GradedSeries> {
    let r64 = r as i64;
    let mut acc = GradedSeries::one(cls.context());
    if e > 0 {
        let mut c = e;
        while c > 0 {
            acc = acc.checked_mul(&root_inverse(cls, c, r)?)?;
            c -= r64;
        }
    } else if e < 0 {
        let mut c = e + r64;
        let inv_r = Rational::new(1.into(), r64.into());
        while c <= 0 {
            acc = acc.checked_mul(&linear(cls, c)?.scale(&inv_r))?;
            c += r64;
        }
    }
    Ok(acc)
}

fn build_by_class<F>(d: &DivisorArrangement, ctx: &Arc<SeriesContext>, slice: F) -> Result<GradedSeries>
where
    F: Fn(&[u32], &Arc<SeriesContext>) -> Result<GradedSeries> + Sync,
{
    let classes = enumerate_curve_classes(d.target(), ctx.beta_cap());
    let work = ctx.without_z_floor();
    let slices: Vec<GradedSeries> = classes
        .par_iter()
        .map(|beta| slice(beta, &work).map(|s| s.rehome(ctx)))
        .collect::<Result<_>>()?;
    GradedSeries::sum(ctx, slices)
}

fn classes(d: &DivisorArrangement, work: &Arc<SeriesContext>) -> Vec<GradedSeries> {
    d.divisors().iter().map(|div| div.class(work)).collect()
}

fn check_roots(d: &DivisorArrangement, roots: &RootData) -> Result<()> {
    roots.fits(d)
}

/// Non-extended I-function of `X_{D,r}`. Sector units `1_{-<d/r>}` are keyed by the residues
/// `(-d_i) mod r_i`.
pub fn i_root_nonextended(d: &DivisorArrangement, roots: &RootData, ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    check_roots(d, roots)?;
    build_by_class(d, ctx, |beta, work| {
        let degs = d.degrees(beta);
        let sector: Vec<i64> = degs
            .iter()
            .zip(roots.roots())
            .map(|(di, ri)| (-(*di as i64)).rem_euclid(*ri as i64))
            .collect();
        if d.sector_vanishes(&sector) {
            return Ok(GradedSeries::zero(work));
        }
        let mut acc = base_j_function(d.target(), work, beta)?;
        for ((cls, di), ri) in classes(d, work).iter().zip(&degs).zip(roots.roots()) {
            let f = upper(cls, *di)?.checked_mul(&root_correction(cls, *di as i64, *ri)?)?;
            acc = acc.checked_mul(&f)?;
        }
        Ok(acc.shift(&vec![0; beta.len()], &XMonomial::new(), &sector))
    })
}

/// S-extended I-function of `X_{D,r}` with `a_{ij} = j`, keeping `x`-monomials of total
/// degree at most `k_cap`.
pub fn i_root_extended(
    d: &DivisorArrangement,
    roots: &RootData,
    s: &ExtendedData,
    k_cap: u32,
    ctx: &Arc<SeriesContext>,
) -> Result<GradedSeries> {
    check_roots(d, roots)?;
    s.fits(d)?;
    for (i, r) in roots.roots().iter().enumerate() {
        if let Some(j) = s.orders(i).find(|j| j >= r) {
            return Err(Error::UnsupportedExtendedData(format!(
                "age {j}/{r} of x_{}_{j} is not below 1",
                i + 1
            )));
        }
    }
    let assignments = s.bounded(k_cap);
    build_by_class(d, ctx, |beta, work| {
        let degs = d.degrees(beta);
        let cls = classes(d, work);
        let j = base_j_function(d.target(), work, beta)?;
        let mut base = j;
        for (c, di) in cls.iter().zip(&degs) {
            base = base.checked_mul(&upper(c, *di)?)?;
        }
        let mut parts = Vec::new();
        for ks in &assignments {
            let sums = contact_sums(d.len(), ks);
            let shifted: Vec<i64> = degs.iter().zip(&sums).map(|(a, b)| *a as i64 - *b as i64).collect();
            let sector: Vec<i64> = shifted
                .iter()
                .zip(roots.roots())
                .map(|(e, r)| (-e).rem_euclid(*r as i64))
                .collect();
            if d.sector_vanishes(&sector) {
                continue;
            }
            let (xexp, w, zs) = x_weight(ks);
            let mut term = base.scale(&w);
            for ((c, e), r) in cls.iter().zip(&shifted).zip(roots.roots()) {
                term = term.checked_mul(&root_correction(c, *e, *r)?)?;
            }
            let term = term.checked_mul(&GradedSeries::z_power(work, zs, int(1)))?;
            parts.push(term.shift(&vec![0; beta.len()], &xexp, &sector));
        }
        GradedSeries::sum(work, parts)
    })
}

/// The infinite-root limit `sum J Q^beta prod_i prod_{0<a<d_i} (D_i + a z) [1]_{-d}`.
pub fn i_infinity_nonextended(d: &DivisorArrangement, ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    build_by_class(d, ctx, |beta, work| {
        let degs = d.degrees(beta);
        let sector: Vec<i64> = degs.iter().map(|x| -(*x as i64)).collect();
        if d.sector_vanishes(&sector) {
            return Ok(GradedSeries::zero(work));
        }
        let mut acc = base_j_function(d.target(), work, beta)?;
        for (cls, di) in classes(d, work).iter().zip(&degs) {
            acc = acc.checked_mul(&rising(cls, 1..*di as i64)?)?;
        }
        Ok(acc.shift(&vec![0; beta.len()], &XMonomial::new(), &sector))
    })
}

/// Full infinite-root limit of the extended I-function, for `x`-degree at most `k_cap`.
///
/// With `e_i = d_i - sum_j j k_{ij}`, each divisor contributes `prod_{0<a<=d_i, a != e_i}`
/// `(D_i + a z)` and the sector is `[1]_{-e}`; the factor `prod_{e_i>0} r_i` of the finite
/// version is absorbed into the sector unit.
pub fn i_infinity_extended(
    d: &DivisorArrangement,
    s: &ExtendedData,
    k_cap: u32,
    ctx: &Arc<SeriesContext>,
) -> Result<GradedSeries> {
    s.fits(d)?;
    let assignments = s.bounded(k_cap);
    build_by_class(d, ctx, |beta, work| {
        let degs = d.degrees(beta);
        let cls = classes(d, work);
        let j = base_j_function(d.target(), work, beta)?;
        let mut parts = Vec::new();
        for ks in &assignments {
            let sums = contact_sums(d.len(), ks);
            let shifted: Vec<i64> = degs.iter().zip(&sums).map(|(a, b)| *a as i64 - *b as i64).collect();
            let sector: Vec<i64> = shifted.iter().map(|e| -e).collect();
            if d.sector_vanishes(&sector) {
                continue;
            }
            let (xexp, w, zs) = x_weight(ks);
            let mut term = j.scale(&w);
            for ((c, di), e) in cls.iter().zip(&degs).zip(&shifted) {
                let f = rising(c, (1..=*di as i64).filter(|a| a != e))?;
                term = term.checked_mul(&f)?;
            }
            let term = term.checked_mul(&GradedSeries::z_power(work, zs, int(1)))?;
            parts.push(term.shift(&vec![0; beta.len()], &xexp, &sector));
        }
        GradedSeries::sum(work, parts)
    })
}

/// The `H^*(X)`-valued part of the extended infinite-root I-function: `x`-monomials with
/// `sum_j j k_{ij} = d_i` for every `i`, and factors `prod_{0<a<=d_i} (D_i + a z)`.
pub fn i_infinity_extended_h0(
    d: &DivisorArrangement,
    s: &ExtendedData,
    ctx: &Arc<SeriesContext>,
) -> Result<GradedSeries> {
    s.fits(d)?;
    for beta in enumerate_curve_classes(d.target(), ctx.beta_cap()) {
        s.ensure_covers(&beta, &d.degrees(&beta))?;
    }
    build_by_class(d, ctx, |beta, work| {
        let degs = d.degrees(beta);
        let cls = classes(d, work);
        let mut base = base_j_function(d.target(), work, beta)?;
        for (c, di) in cls.iter().zip(&degs) {
            base = base.checked_mul(&upper(c, *di)?)?;
        }
        // cartesian product of per-divisor partitions
        let mut choices: Vec<Vec<(usize, u32, u32)>> = vec![Vec::new()];
        for (i, di) in degs.iter().enumerate() {
            let parts = s.partitions(i, *di);
            choices = choices
                .into_iter()
                .flat_map(|prefix| {
                    parts.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.extend(p.iter().map(|(j, k)| (i, *j, *k)));
                        v
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for ks in &choices {
            let (xexp, w, zs) = x_weight(ks);
            let term = base.scale(&w).checked_mul(&GradedSeries::z_power(work, zs, int(1)))?;
            out.push(term.shift(&vec![0; beta.len()], &xexp, &[]));
        }
        GradedSeries::sum(work, out)
    })
}

fn require_single(d: &DivisorArrangement) -> Result<()> {
    if d.len() == 1 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "the pair (X, D) needs one smooth divisor, got {}",
            d.len()
        )))
    }
}

/// I-function of the pair `(X, D)` for a smooth divisor:
/// `sum J Q^beta prod_{0<a<=d-1} (D + a z) [1]_{-d}`.
pub fn i_relative_smooth(d: &DivisorArrangement, ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    require_single(d)?;
    let div = &d.divisors()[0];
    build_by_class(d, ctx, |beta, work| {
        let deg = div.degree(beta) as i64;
        let j = base_j_function(d.target(), work, beta)?;
        let f = rising(&div.class(work), 1..=deg - 1)?;
        Ok(j.checked_mul(&f)?
            .shift(&vec![0; beta.len()], &XMonomial::new(), &[-deg]))
    })
}

/// The `H^*(X)`-valued extended I-function of the pair `(X, D)`.
pub fn i_relative_extended_h0(
    d: &DivisorArrangement,
    s: &ExtendedData,
    ctx: &Arc<SeriesContext>,
) -> Result<GradedSeries> {
    require_single(d)?;
    i_infinity_extended_h0(d, s, ctx)
}

/// Local I-function of `sum_i O_X(-D_i)`:
/// `sum J Q^beta prod_i prod_{0<=a<d_i} (-D_i + lambda_i - a z)`.
pub fn i_local(d: &DivisorArrangement, ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    build_by_class(d, ctx, |beta, work| {
        let mut acc = base_j_function(d.target(), work, beta)?;
        for (i, div) in d.divisors().iter().enumerate() {
            let base = GradedSeries::lambda(work, i).checked_sub(&div.class(work))?;
            for a in 0..div.degree(beta) as i64 {
                acc = acc.checked_mul(&linear(&base, -a)?)?;
            }
        }
        Ok(acc)
    })
}
