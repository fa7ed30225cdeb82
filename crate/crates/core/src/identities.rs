//! Series-level checks of the identities linking relative, orbifold and local theories.
//!
//! Each check compares two exact series for one curve class. The local side is normalized by
//! the Euler class `prod_i (lambda_i - D_i)` of the bundle before restricting to
//! `lambda = 0`, which makes the sign `prod_i (-1)^{d_i - 1}` exact; the unnormalized form
//! is checked as well and holds with sign `prod_i (-1)^{d_i}`.

use std::sync::Arc;

use crate::algebra::{int, sign_power, GradedSeries, LinearFactor, Rational, Selector, SeriesContext, XMonomial};
use crate::error::{Error, Result};
use crate::ifunctions::{i_infinity_extended_h0, i_infinity_nonextended, i_local, i_relative_smooth, ExtendedData};
use crate::targets::DivisorArrangement;

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: &'static str,
    pub beta: Vec<u32>,
    pub left: GradedSeries,
    pub right: GradedSeries,
    pub sign: Rational,
    pub pass: bool,
    pub first_mismatch: Option<String>,
    /// The same identity against the unnormalized local series, with its own sign.
    pub raw_sign: Option<Rational>,
    pub raw_pass: Option<bool>,
    /// `(orbifold, local, factor)` point invariants for the extended identity.
    pub point: Option<PointRelation>,
}

/// `orbifold = factor * local` for the invariants with one interior point insertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRelation {
    pub orbifold: Rational,
    pub local: Rational,
    pub factor: Rational,
}

impl PointRelation {
    pub fn holds(&self) -> bool {
        self.orbifold == &self.factor * &self.local
    }
}

fn report(name: &'static str, beta: &[u32], left: GradedSeries, right: GradedSeries, sign: Rational) -> IdentityReport {
    let diff = left.first_difference(&right);
    IdentityReport {
        name,
        beta: beta.to_vec(),
        pass: diff.is_none(),
        first_mismatch: diff.map(|k| k.describe(left.ring())),
        left,
        right,
        sign,
        raw_sign: None,
        raw_pass: None,
        point: None,
    }
}

/// `[delta]_s -> delta * prod_{i: s_i != 0} D_i`.
pub fn pushforward_iota(s: &GradedSeries, d: &DivisorArrangement) -> Result<GradedSeries> {
    let ctx = s.context();
    let classes: Vec<GradedSeries> = d.divisors().iter().map(|x| x.class(ctx)).collect();
    let mut parts = Vec::new();
    let mut sectors: Vec<Vec<i64>> = s.terms().keys().map(|k| k.sector.clone()).collect();
    sectors.sort();
    sectors.dedup();
    for sector in sectors {
        if sector.len() > d.len() {
            return Err(Error::Precondition(format!(
                "sector {sector:?} has more entries than divisors"
            )));
        }
        let block = s
            .filter(|k| k.sector == sector)
            .map_keys(|k| k.clone().with_sector(Vec::new()));
        let mut acc = block;
        for (i, si) in sector.iter().enumerate() {
            if *si != 0 {
                acc = acc.checked_mul(&classes[i])?;
            }
        }
        parts.push(acc);
    }
    GradedSeries::sum(ctx, parts)
}

/// Multiplies each curve-class slice by `(D_i + d_i z) / z`, the action of the divisor
/// derivative on J-type series at `t = 0`.
pub fn divisor_derivative(s: &GradedSeries, d: &DivisorArrangement, i: usize) -> Result<GradedSeries> {
    let ctx = s.context();
    let div = &d.divisors()[i];
    let shifted = div.class(ctx).checked_mul(&GradedSeries::z_power(ctx, -1, int(1)))?;
    let parts = s
        .beta_slices()
        .into_iter()
        .map(|(beta, slice)| {
            let f = shifted.checked_add(&GradedSeries::constant(ctx, int(div.degree(&beta) as i64)))?;
            slice.checked_mul(&f)
        })
        .collect::<Result<Vec<_>>>()?;
    GradedSeries::sum(ctx, parts)
}

/// `[s / prod_i (lambda_i - D_i)]_{lambda=0}`, by exact division.
pub fn euler_normalized(s: &GradedSeries, d: &DivisorArrangement) -> Result<GradedSeries> {
    let ctx = s.context();
    let mut acc = s.clone();
    for (i, div) in d.divisors().iter().enumerate() {
        acc = acc.exact_divide_linear(&LinearFactor::new(div.class(ctx).neg(), i))?;
    }
    Ok(acc.set_lambda_zero())
}

fn local_slice(d: &DivisorArrangement, beta: &[u32], ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    Ok(i_local(d, ctx)?.beta_slice(beta))
}

fn product_of_classes(d: &DivisorArrangement, ctx: &Arc<SeriesContext>) -> Result<GradedSeries> {
    let mut acc = GradedSeries::one(ctx);
    for div in d.divisors() {
        acc = acc.checked_mul(&div.class(ctx))?;
    }
    Ok(acc)
}

fn signs(degs: &[u32]) -> (Rational, Rational) {
    let normalized: i64 = degs.iter().map(|x| *x as i64 - 1).sum();
    let raw: i64 = degs.iter().map(|x| *x as i64).sum();
    (sign_power(normalized), sign_power(raw))
}

fn class_context(d: &DivisorArrangement, beta: &[u32]) -> Arc<SeriesContext> {
    d.target().context(d.target().anticanonical_degree(beta), None)
}

/// Compares `iota_! I_{(X,D),beta}` with the normalized local series
/// `(-1)^{d-1} D [I_{O(-D),beta} / (lambda - D)]_{lambda=0}` for a single divisor.
pub fn check_local_relative_smooth(d: &DivisorArrangement, beta: &[u32]) -> Result<IdentityReport> {
    if d.len() != 1 {
        return Err(Error::Precondition("the pair (X, D) needs exactly one divisor".into()));
    }
    orbifold_nonextended("relative/local", d, beta, i_relative_smooth)
}

/// Compares `iota_! I_{X_{D,infinity},beta}` with
/// `prod_i (-1)^{d_i-1} prod_i D_i [I_{sum O(-D_i),beta} / e]_{lambda=0}`.
pub fn check_local_orbifold_nonextended(d: &DivisorArrangement, beta: &[u32]) -> Result<IdentityReport> {
    orbifold_nonextended("orbifold/local", d, beta, i_infinity_nonextended)
}

fn orbifold_nonextended(
    name: &'static str,
    d: &DivisorArrangement,
    beta: &[u32],
    build: fn(&DivisorArrangement, &Arc<SeriesContext>) -> Result<GradedSeries>,
) -> Result<IdentityReport> {
    let degs = d.degrees(beta);
    if degs.contains(&0) {
        return Err(Error::Precondition(format!(
            "every D_i . beta must be positive, got {degs:?}"
        )));
    }
    let all: Vec<usize> = (0..d.len()).collect();
    if d.intersection_empty(&all) {
        return Err(Error::EmptyIntersection(all));
    }
    let ctx = class_context(d, beta);
    let left = pushforward_iota(&build(d, &ctx)?.beta_slice(beta), d)?;
    let local = local_slice(d, beta, &ctx)?;
    let (sign, raw_sign) = signs(&degs);
    let right = euler_normalized(&local, d)?
        .checked_mul(&product_of_classes(d, &ctx)?)?
        .scale(&sign);
    let raw = local.set_lambda_zero().scale(&raw_sign);
    let mut rep = report(name, beta, left, right, sign);
    rep.raw_pass = Some(rep.left == raw);
    rep.raw_sign = Some(raw_sign);
    Ok(rep)
}

/// Compares the `prod_i x_{i,d_i}` coefficient of the `H^*(X)`-valued extended I-function
/// with `prod_i (-1)^{d_i-1} [prod_i (D_i + d_i z)/z I_{local,beta} / e]_{lambda=0}`, and
/// records the resulting relation between point invariants.
pub fn check_local_orbifold_extended(d: &DivisorArrangement, beta: &[u32]) -> Result<IdentityReport> {
    let degs = d.degrees(beta);
    if degs.contains(&0) {
        return Err(Error::Precondition(format!(
            "every D_i . beta must be positive, got {degs:?}"
        )));
    }
    let ctx = class_context(d, beta);
    let s = ExtendedData::from_orders(degs.iter().map(|x| vec![*x]).collect())?;
    let xexp: XMonomial = degs.iter().enumerate().map(|(i, x)| ((i, *x), 1)).collect();
    let left = i_infinity_extended_h0(d, &s, &ctx)?
        .coefficient(&Selector::new().beta(beta.to_vec()).xexp(xexp))
        .shift(beta, &XMonomial::new(), &[]);
    let local = local_slice(d, beta, &ctx)?;
    let mut derived = local.clone();
    for i in 0..d.len() {
        derived = divisor_derivative(&derived, d, i)?;
    }
    let (sign, _) = signs(&degs);
    let right = euler_normalized(&derived, d)?.scale(&sign);
    let mut rep = report("orbifold/local extended", beta, left, right, sign.clone());

    let point = Selector::new()
        .beta(beta.to_vec())
        .zpow(-1)
        .coh(d.target().ring().unit_monomial());
    let orbifold = rep.left.scalar(&point);
    let local_point = euler_normalized(&local, d)?.scalar(&point);
    let factor = degs.iter().fold(sign, |acc, x| acc * int(*x as i64));
    rep.point = Some(PointRelation {
        orbifold,
        local: local_point,
        factor,
    });
    Ok(rep)
}

/// `<[pt]>` of the local theory of `sum O(-D_i)` at `beta`.
pub fn local_point_invariant(d: &DivisorArrangement, beta: &[u32]) -> Result<Rational> {
    let ctx = class_context(d, beta);
    let point = Selector::new()
        .beta(beta.to_vec())
        .zpow(-1)
        .coh(d.target().ring().unit_monomial());
    Ok(euler_normalized(&local_slice(d, beta, &ctx)?, d)?.scalar(&point))
}

/// Returns whether every report passed, treating an empty list as passing.
pub fn all_pass(reports: &[IdentityReport]) -> bool {
    reports
        .iter()
        .all(|r| r.pass && r.raw_pass != Some(false) && r.point.as_ref().is_none_or(|p| p.holds()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{factorial, ratio};
    use crate::targets::{enumerate_curve_classes, TargetSpace};

    fn p2() -> TargetSpace {
        TargetSpace::projective(2).unwrap()
    }

    fn p1p1() -> TargetSpace {
        TargetSpace::new(vec![1, 1]).unwrap()
    }

    fn arr(x: TargetSpace, ds: &[(&str, Vec<i64>)]) -> DivisorArrangement {
        DivisorArrangement::from_coeffs(x, ds).unwrap()
    }

    fn line_conic() -> DivisorArrangement {
        arr(p2(), &[("L", vec![1]), ("C", vec![2])])
    }

    fn quadrics() -> DivisorArrangement {
        arr(p1p1(), &[("A", vec![1, 1]), ("B", vec![1, 1])])
    }

    #[test]
    fn pushforward_examples() {
        let d = line_conic();
        let ctx = p2().context(3, None);
        let k = |z: i32, p: u32| ctx.unit_key().with_zpow(z).with_coh(vec![p]).with_sector(vec![-1, -2]);
        let s = GradedSeries::from_terms(&ctx, [(k(-1, 0), int(1)), (k(-2, 1), int(-1))]);
        let expected = GradedSeries::monomial(&ctx, ctx.unit_key().with_zpow(-1).with_coh(vec![2]), int(2));
        assert_eq!(pushforward_iota(&s, &d).unwrap(), expected);
        let one = GradedSeries::one(&ctx);
        assert_eq!(pushforward_iota(&one, &d).unwrap(), one);
        let unit = GradedSeries::monomial(&ctx, ctx.unit_key().with_sector(vec![-1, -2]), int(1));
        assert_eq!(
            pushforward_iota(&unit, &d).unwrap(),
            GradedSeries::monomial(&ctx, ctx.unit_key().with_coh(vec![2]), int(2))
        );
    }

    #[test]
    fn pushforward_kills_empty_intersections() {
        let fibers = arr(p1p1(), &[("F", vec![1, 0]), ("G", vec![1, 0])]);
        let ctx = p1p1().context(2, None);
        let s = GradedSeries::monomial(&ctx, ctx.unit_key().with_sector(vec![-1, -1]), int(5));
        assert!(pushforward_iota(&s, &fibers).unwrap().is_zero());
    }

    #[test]
    fn divisor_derivative_examples() {
        let d = line_conic();
        let ctx = p2().context(6, None);
        let z_at = |beta: u32| GradedSeries::monomial(&ctx, ctx.unit_key().with_beta(vec![beta]).with_zpow(1), int(1));
        let p = GradedSeries::generator(&ctx, 0);
        // conic has d = 2 at beta = 1
        let got = divisor_derivative(&z_at(1), &d, 1).unwrap();
        let expected = p
            .scale(&int(2))
            .checked_add(&GradedSeries::z_power(&ctx, 1, int(2)))
            .unwrap()
            .shift(&[1], &XMonomial::new(), &[]);
        assert_eq!(got, expected);
        // beta = 0 only sees D/z
        let got = divisor_derivative(&GradedSeries::one(&ctx), &d, 0).unwrap();
        assert_eq!(got, p.checked_mul(&GradedSeries::z_power(&ctx, -1, int(1))).unwrap());
    }

    #[test]
    fn divisor_derivatives_commute() {
        let d = line_conic();
        let ctx = p2().context(6, None);
        let loc = i_local(&d, &ctx).unwrap();
        let a = divisor_derivative(&divisor_derivative(&loc, &d, 0).unwrap(), &d, 1).unwrap();
        let b = divisor_derivative(&divisor_derivative(&loc, &d, 1).unwrap(), &d, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relative_local_smooth() {
        for (coeff, beta, sign) in [
            (2i64, 1u32, -1i64),
            (3, 1, 1),
            (3, 2, -1),
            (3, 3, 1),
            (2, 2, -1),
            (2, 3, -1),
        ] {
            let d = arr(p2(), &[("D", vec![coeff])]);
            let rep = check_local_relative_smooth(&d, &[beta]).unwrap();
            assert!(rep.pass, "D={coeff}P beta={beta}: {:?}", rep.first_mismatch);
            assert_eq!(rep.raw_pass, Some(true));
            assert_eq!(rep.sign, int(sign));
        }
        let d = arr(p2(), &[("E", vec![3])]);
        let rep = check_local_relative_smooth(&d, &[1]).unwrap();
        let ctx = rep.left.context().clone();
        let k = |z: i32, p: u32| ctx.unit_key().with_beta(vec![1]).with_zpow(z).with_coh(vec![p]);
        assert_eq!(
            rep.left,
            GradedSeries::from_terms(&ctx, [(k(0, 1), int(6)), (k(-1, 2), int(9))])
        );
    }

    #[test]
    fn relative_degree_one() {
        let d = arr(p2(), &[("L", vec![1])]);
        let rep = check_local_relative_smooth(&d, &[1]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sign, int(1));
        let ctx = rep.left.context().clone();
        let j = crate::targets::base_j_function(&p2(), &ctx, &[1]).unwrap();
        assert_eq!(rep.left, j.checked_mul(&GradedSeries::generator(&ctx, 0)).unwrap());
    }

    #[test]
    fn orbifold_local_nonextended() {
        let rep = check_local_orbifold_nonextended(&line_conic(), &[1]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sign, int(-1));
        let ctx = rep.left.context().clone();
        assert_eq!(
            rep.left,
            GradedSeries::monomial(
                &ctx,
                ctx.unit_key().with_beta(vec![1]).with_zpow(-1).with_coh(vec![2]),
                int(2)
            )
        );
        let rep = check_local_orbifold_nonextended(&quadrics(), &[1, 0]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sign, int(1));
        for beta in enumerate_curve_classes(&p1p1(), 8).into_iter().filter(|b| b != &[0, 0]) {
            assert!(check_local_orbifold_nonextended(&quadrics(), &beta).unwrap().pass);
        }
    }

    #[test]
    fn single_divisor_reduction() {
        let d = arr(p2(), &[("C", vec![2])]);
        for beta in 1..=3u32 {
            let a = check_local_relative_smooth(&d, &[beta]).unwrap();
            let b = check_local_orbifold_nonextended(&d, &[beta]).unwrap();
            assert_eq!(a.left, b.left);
            assert_eq!(a.right, b.right);
        }
    }

    #[test]
    fn refusals() {
        let fibers = arr(p1p1(), &[("F", vec![1, 0]), ("G", vec![1, 0])]);
        assert!(matches!(
            check_local_orbifold_nonextended(&fibers, &[1, 0]),
            Err(Error::EmptyIntersection(_))
        ));
        assert!(matches!(
            check_local_orbifold_nonextended(&fibers, &[0, 1]),
            Err(Error::Precondition(_))
        ));
        assert!(check_local_relative_smooth(&line_conic(), &[1]).is_err());
    }

    #[test]
    fn extended_point_relation_on_the_plane() {
        for (d, local, orbifold) in [(1u32, ratio(-1, 1), 2i64), (2, ratio(3, 4), 6), (3, ratio(-10, 9), 20)] {
            let rep = check_local_orbifold_extended(&line_conic(), &[d]).unwrap();
            assert!(rep.pass, "{:?}", rep.first_mismatch);
            let p = rep.point.unwrap();
            assert_eq!(p.local, local);
            assert_eq!(p.orbifold, int(orbifold));
            let dd = d as i64;
            assert_eq!(p.factor, sign_power(dd) * int(2 * dd * dd));
            assert!(p.holds());
            // closed form (-1)^d (2d)! / (2 d^2 (d!)^2)
            let closed = sign_power(dd) * factorial(2 * d) / (int(2 * dd * dd) * factorial(d) * factorial(d));
            assert_eq!(local_point_invariant(&line_conic(), &[d]).unwrap(), closed);
        }
    }

    #[test]
    fn extended_point_relation_on_the_quadric() {
        for beta in [vec![1u32, 0u32], vec![1, 1], vec![2, 1], vec![0, 3]] {
            let rep = check_local_orbifold_extended(&quadrics(), &beta).unwrap();
            assert!(rep.pass);
            let p = rep.point.unwrap();
            let n = (beta[0] + beta[1]) as i64;
            assert_eq!(p.factor, int(n * n));
            assert!(p.holds());
        }
        let p = check_local_orbifold_extended(&quadrics(), &[1, 1])
            .unwrap()
            .point
            .unwrap();
        assert_eq!(p.local, int(1));
        assert_eq!(p.orbifold, int(4));
    }

    #[test]
    fn extended_single_divisor() {
        let d = arr(p2(), &[("C", vec![2])]);
        let rep = check_local_orbifold_extended(&d, &[1]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sign, int(-1));
    }

    #[test]
    fn sign_flips_with_parity() {
        // the conic's degree is always even, the line's alternates
        let d = line_conic();
        let signs: Vec<Rational> = (1..=3)
            .map(|b| check_local_orbifold_nonextended(&d, &[b]).unwrap().sign)
            .collect();
        assert_eq!(signs, vec![int(-1), int(1), int(-1)]);
    }
}
