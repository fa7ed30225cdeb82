//! Mirror-map analysis, extraction of genus-zero invariants from I-functions with trivial
//! mirror map, and large-root stabilization checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{
    factorial, format_xexp, int, ExponentKey, GradedSeries, Monomial, Rational, SeriesContext, XMonomial,
};
use crate::error::{Error, Result};
use crate::ifunctions::{
    i_infinity_extended, i_infinity_extended_h0, i_infinity_nonextended, i_root_extended, i_root_nonextended,
    ExtendedData,
};
use crate::targets::{check_assumption, DivisorArrangement, RootData};

/// An I-function split by power of `z`.
#[derive(Clone, Debug)]
pub struct MirrorMapReport {
    /// Terms at `z^1`; equals `z` when trivial.
    pub z_linear: GradedSeries,
    /// Terms at `z^0`; only bare `x_{ij}` insertions when trivial.
    pub z_zero: GradedSeries,
    /// Terms at `z^k`, `k >= 2`.
    pub positive_tail: GradedSeries,
    pub trivial: bool,
    /// Human-readable descriptions of the terms that break triviality.
    pub offending: Vec<String>,
}

fn is_bare_insertion(k: &ExponentKey, c: &Rational) -> bool {
    c.is_one()
        && k.beta.iter().all(|b| *b == 0)
        && k.x_degree() == 1
        && k.coh.iter().all(|e| *e == 0)
        && k.lambda_free()
}

pub fn mirror_map(i: &GradedSeries) -> MirrorMapReport {
    let ctx = i.context();
    let z_linear = i.filter(|k| k.zpow == 1);
    let z_zero = i.filter(|k| k.zpow == 0);
    let positive_tail = i.filter(|k| k.zpow >= 2);
    let ring = i.ring();
    let mut offending = Vec::new();
    if z_linear != GradedSeries::z_power(ctx, 1, int(1)) {
        offending.push(format!("z-linear part is {z_linear}, not z"));
    }
    for (k, c) in z_zero.sorted_terms() {
        if !is_bare_insertion(k, c) {
            offending.push(format!(
                "z^0 term {} * {}",
                crate::algebra::format_rational(c),
                k.describe(ring)
            ));
        }
    }
    for (k, _) in positive_tail.sorted_terms() {
        offending.push(format!("positive z power at {}", k.describe(ring)));
    }
    MirrorMapReport {
        trivial: offending.is_empty(),
        z_linear,
        z_zero,
        positive_tail,
        offending,
    }
}

/// Index of an extracted invariant: curve class, extended insertions, interior insertion,
/// power of psi and sector of the distinguished marking.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKey {
    pub beta: Vec<u32>,
    pub xexp: XMonomial,
    pub insertion: Monomial,
    pub psi: u32,
    pub sector: Vec<i64>,
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "beta={:?} x=[{}] insertion={:?} psi^{} sector={:?}",
            self.beta,
            format_xexp(&self.xexp),
            self.insertion,
            self.psi,
            self.sector
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantTable {
    pub entries: BTreeMap<InvariantKey, Rational>,
    /// Entries whose distinguished marking lies in a twisted sector; their normalization
    /// depends on the sector pairing and they are reported for review only.
    pub flagged: BTreeSet<InvariantKey>,
}

impl InvariantTable {
    pub fn get(&self, key: &InvariantKey) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn x_factorials(x: &XMonomial) -> Rational {
    x.values().fold(Rational::one(), |acc, k| acc * factorial(*k))
}

/// Reads invariants off an I-function whose mirror map is trivial: the coefficient of
/// `z^{-a-1}` along the basis class `phi` is the invariant with `psi^a` and insertion dual to
/// `phi`, after multiplying back the factorials of the `x`-exponents.
pub fn extract_invariants(i: &GradedSeries) -> Result<InvariantTable> {
    if i.terms().keys().any(|k| !k.lambda_free()) {
        return Err(Error::Precondition(
            "extraction needs a series free of equivariant parameters".into(),
        ));
    }
    let report = mirror_map(i);
    if !report.trivial {
        return Err(Error::NontrivialMirrorMap(report.offending.join("; ")));
    }
    let ring = i.ring();
    let mut table = InvariantTable::default();
    for (k, c) in i.iter().filter(|(k, _)| k.zpow <= -1) {
        let key = InvariantKey {
            beta: k.beta.clone(),
            xexp: k.xexp.clone(),
            insertion: ring.dual_monomial(&k.coh),
            psi: (-k.zpow - 1) as u32,
            sector: k.sector.clone(),
        };
        if !k.is_untwisted() {
            table.flagged.insert(key.clone());
        }
        table.entries.insert(key, c * x_factorials(&k.xexp));
    }
    Ok(table)
}

/// Rebuilds the I-function from its non-negative `z` part and an extracted table.
pub fn reconstruct(table: &InvariantTable, mirror: &MirrorMapReport) -> Result<GradedSeries> {
    let ctx = mirror.z_linear.context();
    let ring = ctx.ring();
    let negative = GradedSeries::from_terms(
        ctx,
        table.entries.iter().map(|(k, v)| {
            let key = ctx
                .unit_key()
                .with_beta(k.beta.clone())
                .with_xexp(k.xexp.clone())
                .with_coh(ring.dual_monomial(&k.insertion))
                .with_zpow(-(k.psi as i32) - 1)
                .with_sector(k.sector.clone());
            (key, v / x_factorials(&k.xexp))
        }),
    );
    GradedSeries::sum(
        ctx,
        [
            mirror.z_linear.clone(),
            mirror.z_zero.clone(),
            mirror.positive_tail.clone(),
            negative,
        ],
    )
}

/// Key of `N^orb_beta`: `d_i` markings of contact order one on each `D_i` and one interior
/// point insertion with `psi^{d-2}`.
pub fn n_orb_key(d: &DivisorArrangement, beta: &[u32]) -> InvariantKey {
    let xexp: XMonomial = d
        .degrees(beta)
        .into_iter()
        .enumerate()
        .filter(|(_, di)| *di > 0)
        .map(|(i, di)| ((i, 1), di))
        .collect();
    InvariantKey {
        beta: beta.to_vec(),
        xexp,
        insertion: d.target().ring().top_monomial(),
        psi: d.total_degree(beta).saturating_sub(2),
        sector: Vec::new(),
    }
}

/// `N^orb_beta` for every class with `D . beta >= 2` and `(-K) . beta <= cap`.
pub fn n_orb_all(d: &DivisorArrangement, cap: u32) -> Result<BTreeMap<Vec<u32>, Rational>> {
    let assumption = check_assumption(d, cap);
    if !assumption.holds {
        return Err(Error::AssumptionViolated(assumption.violations));
    }
    let ctx = d.target().context(cap, None);
    let i = i_infinity_extended_h0(d, &ExtendedData::contact_order_one(d.len()), &ctx)?;
    let table = extract_invariants(&i)?;
    Ok(crate::targets::enumerate_curve_classes(d.target(), cap)
        .into_iter()
        .filter(|b| d.total_degree(b) >= 2)
        .map(|b| {
            let v = table.get(&n_orb_key(d, &b));
            (b, v)
        })
        .collect())
}

pub fn n_orb(d: &DivisorArrangement, beta: &[u32]) -> Result<Rational> {
    let deg = d.total_degree(beta);
    if deg < 2 {
        return Err(Error::DegreeTooSmall { d: deg });
    }
    let cap = d.target().anticanonical_degree(beta);
    Ok(n_orb_all(d, cap)?.remove(beta).unwrap_or_else(Rational::zero))
}

/// Re-keys finite-root sector residues to integer tangency using
/// `(prod_{e_i > 0} r_i) 1_{res} = [1]_{-e}`, where `e_i = d_i - sum_j j k_{ij}`; each
/// coefficient is therefore divided by that product. Requires `r_i > |e_i|`.
pub fn to_tangency(s: &GradedSeries, d: &DivisorArrangement, roots: &RootData) -> Result<GradedSeries> {
    let mut terms = Vec::with_capacity(s.len());
    for (k, c) in s.iter() {
        let degs = d.degrees(&k.beta);
        let mut sector = Vec::with_capacity(d.len());
        let mut factor = Rational::one();
        for (i, (di, ri)) in degs.iter().zip(roots.roots()).enumerate() {
            let used: u32 = k
                .xexp
                .iter()
                .filter(|((v, _), _)| *v == i)
                .map(|((_, j), e)| j * e)
                .sum();
            let e = *di as i64 - used as i64;
            let r = *ri as i64;
            if e.abs() >= r {
                return Err(Error::Precondition(format!(
                    "root order {r} does not exceed |{e}| for divisor {} at {}",
                    i + 1,
                    k.describe(s.ring())
                )));
            }
            if k.sector_at(i) != (-e).rem_euclid(r) {
                return Err(Error::Precondition(format!(
                    "unexpected sector at {}",
                    k.describe(s.ring())
                )));
            }
            if e > 0 {
                factor /= int(r);
            }
            sector.push(-e);
        }
        terms.push((k.clone().with_sector(sector), c * factor));
    }
    Ok(GradedSeries::from_terms(s.context(), terms))
}

/// One comparison of a rescaled finite-root slice against the infinite-root slice.
#[derive(Clone, Debug)]
pub struct StabilizationRow {
    pub roots: Vec<u32>,
    pub beta: Vec<u32>,
    pub pass: bool,
    pub first_mismatch: Option<String>,
}

#[derive(Clone, Debug)]
pub struct StabilizationReport {
    pub rows: Vec<StabilizationRow>,
    pub infinite: GradedSeries,
}

impl StabilizationReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn check_root_bounds(d: &DivisorArrangement, roots: &RootData, ctx: &SeriesContext, slack: u32) -> Result<()> {
    roots.fits(d)?;
    for beta in crate::targets::enumerate_curve_classes(d.target(), ctx.beta_cap()) {
        for (di, ri) in d.degrees(&beta).iter().zip(roots.roots()) {
            if *di > 0 && *ri <= di + slack {
                return Err(Error::Precondition(format!(
                    "root order {ri} must exceed {} at curve class {beta:?}",
                    di + slack
                )));
            }
        }
    }
    Ok(())
}

fn compare_slices(
    finite: &GradedSeries,
    infinite: &GradedSeries,
    roots: &RootData,
    classes: &[Vec<u32>],
) -> Vec<StabilizationRow> {
    classes
        .iter()
        .map(|beta| {
            let a = finite.beta_slice(beta);
            let b = infinite.beta_slice(beta);
            let diff = a.first_difference(&b);
            StabilizationRow {
                roots: roots.roots().to_vec(),
                beta: beta.clone(),
                pass: diff.is_none(),
                first_mismatch: diff.map(|k| k.describe(finite.ring())),
            }
        })
        .collect()
}

/// For every class within the cap of `ctx` and every root vector, checks that the
/// finite-root coefficient equals `prod_{d_i>0} r_i` times the infinite-root coefficient,
/// by re-keying the finite series to integer tangency with [`to_tangency`].
pub fn stabilization_check(
    d: &DivisorArrangement,
    roots_list: &[RootData],
    ctx: &Arc<SeriesContext>,
) -> Result<StabilizationReport> {
    for r in roots_list {
        check_root_bounds(d, r, ctx, 0)?;
    }
    let infinite = i_infinity_nonextended(d, ctx)?;
    let classes = crate::targets::enumerate_curve_classes(d.target(), ctx.beta_cap());
    let mut rows = Vec::new();
    for r in roots_list {
        let finite = to_tangency(&i_root_nonextended(d, r, ctx)?, d, r)?;
        rows.extend(compare_slices(&finite, &infinite, r, &classes));
    }
    Ok(StabilizationReport { rows, infinite })
}

/// Stabilization for a single class, with the cap set to its anticanonical degree.
pub fn stabilization_check_class(
    d: &DivisorArrangement,
    beta: &[u32],
    roots_list: &[RootData],
) -> Result<StabilizationReport> {
    let ctx = d.target().context(d.target().anticanonical_degree(beta), None);
    let mut report = stabilization_check(d, roots_list, &ctx)?;
    report.rows.retain(|r| r.beta == beta);
    report.infinite = report.infinite.beta_slice(beta);
    Ok(report)
}

/// The same comparison for the extended I-functions, up to `x`-degree `k_cap`.
pub fn stabilization_check_extended(
    d: &DivisorArrangement,
    s: &ExtendedData,
    k_cap: u32,
    roots_list: &[RootData],
    ctx: &Arc<SeriesContext>,
) -> Result<StabilizationReport> {
    for r in roots_list {
        check_root_bounds(d, r, ctx, s.m() * k_cap)?;
    }
    let infinite = i_infinity_extended(d, s, k_cap, ctx)?;
    let classes = crate::targets::enumerate_curve_classes(d.target(), ctx.beta_cap());
    let mut rows = Vec::new();
    for r in roots_list {
        let finite = to_tangency(&i_root_extended(d, r, s, k_cap, ctx)?, d, r)?;
        rows.extend(compare_slices(&finite, &infinite, r, &classes));
    }
    Ok(StabilizationReport { rows, infinite })
}
