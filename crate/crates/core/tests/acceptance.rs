//! Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero on failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootstack_core::algebra::{int, ExponentKey, GradedSeries, LinearFactor, Rational, SeriesContext, XMonomial};
use rootstack_core::identities::{
    check_local_orbifold_extended, check_local_orbifold_nonextended, check_local_relative_smooth,
};
use rootstack_core::ifunctions::{i_infinity_extended, i_infinity_extended_h0, ExtendedData};
use rootstack_core::invariants::{extract_invariants, mirror_map, stabilization_check, InvariantKey};
use rootstack_core::periods::{compare_periods, laurent_classical_period, LaurentPolynomial};
use rootstack_core::targets::{check_assumption, enumerate_curve_classes, DivisorArrangement, RootData, TargetSpace};
use rootstack_core::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fact(n: u32) -> Rational {
    (1..=n).fold(int(1), |acc, k| acc * int(i64::from(k)))
}

fn sign(k: i64) -> Rational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn p2() -> TargetSpace {
    TargetSpace::projective(2).unwrap()
}

fn p1p1() -> TargetSpace {
    TargetSpace::new(vec![1, 1]).unwrap()
}

fn line_conic() -> DivisorArrangement {
    DivisorArrangement::from_coeffs(p2(), &[("L", vec![1]), ("C", vec![2])]).unwrap()
}

fn quadrics() -> DivisorArrangement {
    DivisorArrangement::from_coeffs(p1p1(), &[("A", vec![1, 1]), ("B", vec![1, 1])]).unwrap()
}

fn cubic() -> DivisorArrangement {
    DivisorArrangement::from_coeffs(p2(), &[("E", vec![3])]).unwrap()
}

fn tangency_key(beta: Vec<u32>, orders: [u32; 2], point: Vec<u32>) -> InvariantKey {
    let xexp: XMonomial = [((0, orders[0]), 1), ((1, orders[1]), 1)].into_iter().collect();
    InvariantKey {
        beta,
        xexp,
        insertion: point,
        psi: 0,
        sector: vec![],
    }
}

fn a1() -> Outcome {
    let ctx = p2().context(15, None);
    let i = i_infinity_extended_h0(&line_conic(), &ExtendedData::full(2, 10), &ctx).map_err(|e| e.to_string())?;
    let table = extract_invariants(&i).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for d in 1..=5u32 {
        let v = table.get(&tangency_key(vec![d], [d, 2 * d], vec![2]));
        let oracle = fact(2 * d) / (fact(d) * fact(d));
        ensure(v == oracle, || format!("d={d}: got {v}, expected {oracle}"))?;
        got.push(v);
    }
    let literal: Vec<Rational> = [2, 6, 20, 70, 252].into_iter().map(int).collect();
    ensure(got == literal, || format!("values {got:?}"))?;
    Ok("2, 6, 20, 70, 252".into())
}

fn a2() -> Outcome {
    let ctx = p1p1().context(8, None);
    let i = i_infinity_extended_h0(&quadrics(), &ExtendedData::full(2, 4), &ctx).map_err(|e| e.to_string())?;
    let table = extract_invariants(&i).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for d1 in 0..=4u32 {
        for d2 in 0..=(4 - d1) {
            if d1 + d2 == 0 {
                continue;
            }
            let n = d1 + d2;
            let v = table.get(&tangency_key(vec![d1, d2], [n, n], vec![1, 1]));
            let oracle = fact(n) * fact(n) / (fact(d1) * fact(d1) * fact(d2) * fact(d2));
            ensure(v == oracle, || format!("beta=({d1},{d2}): got {v}, expected {oracle}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} classes"))
}

fn a3() -> Outcome {
    let cases: [(DivisorArrangement, [[u32; 2]; 3]); 2] = [
        (line_conic(), [[11, 13], [13, 17], [17, 19]]),
        (quadrics(), [[5, 7], [7, 11], [11, 13]]),
    ];
    let mut rows = 0;
    for (d, roots) in cases {
        let ctx = d.target().context(9, None);
        let roots: Vec<RootData> = roots.iter().map(|r| RootData::new(r.to_vec()).unwrap()).collect();
        let report = stabilization_check(&d, &roots, &ctx).map_err(|e| e.to_string())?;
        let classes = enumerate_curve_classes(d.target(), 9);
        ensure(report.rows.len() == classes.len() * roots.len(), || {
            format!("{} rows for {} classes", report.rows.len(), classes.len())
        })?;
        if let Some(bad) = report.rows.iter().find(|r| !r.pass) {
            return Err(format!(
                "roots {:?} beta {:?}: {:?}",
                bad.roots, bad.beta, bad.first_mismatch
            ));
        }
        rows += report.rows.len();
    }
    Ok(format!("{rows} (roots, class) pairs"))
}

fn a4() -> Outcome {
    // (a) single smooth divisor
    for coeff in [2i64, 3] {
        let d = DivisorArrangement::from_coeffs(p2(), &[("D", vec![coeff])]).unwrap();
        for b in 1..=3u32 {
            let rep = check_local_relative_smooth(&d, &[b]).map_err(|e| e.to_string())?;
            let deg = coeff * i64::from(b);
            ensure(rep.pass && rep.raw_pass == Some(true), || {
                format!("relative/local degree {coeff} beta {b}: {:?}", rep.first_mismatch)
            })?;
            ensure(rep.sign == sign(deg - 1), || {
                format!("sign {} at degree {deg}", rep.sign)
            })?;
            ensure(rep.raw_sign == Some(sign(deg)), || "raw sign".into())?;
        }
    }
    // (b) snc pairs, non-extended
    let mut count = 0;
    for (d, cap) in [(line_conic(), 9), (quadrics(), 8)] {
        for beta in enumerate_curve_classes(d.target(), cap) {
            let degs = d.degrees(&beta);
            if degs.contains(&0) {
                continue;
            }
            let rep = check_local_orbifold_nonextended(&d, &beta).map_err(|e| e.to_string())?;
            let oracle = degs.iter().fold(int(1), |acc, x| acc * sign(i64::from(*x) - 1));
            ensure(rep.pass && rep.raw_pass == Some(true) && rep.sign == oracle, || {
                format!("orbifold/local beta {beta:?}: {:?}", rep.first_mismatch)
            })?;
            count += 1;
        }
    }
    // (c) extended identity and point invariants
    let d = line_conic();
    let literal = [
        int(-1),
        Rational::new(3.into(), 4.into()),
        Rational::new((-10).into(), 9.into()),
    ];
    for k in 1..=3u32 {
        let rep = check_local_orbifold_extended(&d, &[k]).map_err(|e| e.to_string())?;
        let p = rep.point.clone().ok_or("no point relation")?;
        let kk = i64::from(k);
        let local = sign(kk) * fact(2 * k) / (int(2 * kk * kk) * fact(k) * fact(k));
        let orbifold = fact(2 * k) / (fact(k) * fact(k));
        let factor = sign(kk) * int(2 * kk * kk);
        ensure(rep.pass, || {
            format!("extended series at d={k}: {:?}", rep.first_mismatch)
        })?;
        ensure(p.local == local && p.local == literal[k as usize - 1], || {
            format!("local {} at d={k}", p.local)
        })?;
        ensure(p.orbifold == orbifold, || format!("orbifold {} at d={k}", p.orbifold))?;
        ensure(p.factor == factor && p.orbifold == &p.factor * &p.local, || {
            format!("factor {} at d={k}", p.factor)
        })?;
        count += 1;
    }
    let d = quadrics();
    for beta in enumerate_curve_classes(d.target(), 8) {
        if beta.iter().all(|b| *b == 0) {
            continue;
        }
        let rep = check_local_orbifold_extended(&d, &beta).map_err(|e| e.to_string())?;
        let p = rep.point.clone().ok_or("no point relation")?;
        let n = i64::from(beta[0] + beta[1]);
        ensure(rep.pass && p.holds() && p.factor == int(n * n), || {
            format!("beta {beta:?}: factor {} mismatch {:?}", p.factor, rep.first_mismatch)
        })?;
        count += 1;
    }
    Ok(format!("6 smooth, {count} snc checks"))
}

fn a5() -> Outcome {
    for (d, cap) in [(line_conic(), 9), (quadrics(), 8)] {
        let c = compare_periods(&d, cap).map_err(|e| e.to_string())?;
        ensure(c.pass && c.left.coeffs.len() == cap as usize + 1, || {
            format!(
                "mismatch at {:?}: {:?} vs {:?}",
                c.first_mismatch, c.left.coeffs, c.right.coeffs
            )
        })?;
    }
    let plane = compare_periods(&line_conic(), 9).map_err(|e| e.to_string())?;
    let f = LaurentPolynomial::parse("x + y + 1/(x*y)").map_err(|e| e.to_string())?;
    let laurent = laurent_classical_period(&f, 9);
    let oracle: Vec<Rational> = (0..=9u32)
        .map(|m| {
            if m % 3 == 0 {
                fact(m) / (fact(m / 3) * fact(m / 3) * fact(m / 3))
            } else {
                int(0)
            }
        })
        .collect();
    let literal: Vec<Rational> = [1, 0, 0, 6, 0, 0, 90, 0, 0, 1680].into_iter().map(int).collect();
    ensure(oracle == literal, || "oracle".into())?;
    ensure(laurent.coeffs == literal, || format!("laurent {:?}", laurent.coeffs))?;
    ensure(plane.left.coeffs == literal && plane.right.coeffs == literal, || {
        "three-way".into()
    })?;
    Ok("P2 to degree 9, P1xP1 to degree 8, three-way".into())
}

fn random_series(rng: &mut ChaCha8Rng, ctx: &Arc<SeriesContext>, classes: &[Vec<u32>], lambdas: usize) -> GradedSeries {
    let basis = ctx.ring().basis();
    let n = rng.gen_range(0..5);
    let terms = (0..n).map(|_| {
        let mut key = ExponentKey::unit(ctx.ring().rank(), classes[0].len())
            .with_beta(classes[rng.gen_range(0..classes.len())].clone())
            .with_zpow(rng.gen_range(-2..=2))
            .with_coh(basis[rng.gen_range(0..basis.len())].clone());
        if rng.gen_bool(0.3) {
            key = key.with_xexp([((0usize, 1u32), rng.gen_range(1..=2u32))].into_iter().collect());
        }
        if lambdas > 0 && rng.gen_bool(0.4) {
            key = key.with_lambda((0..lambdas).map(|_| rng.gen_range(0..=1)).collect());
        }
        (
            key,
            Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into()),
        )
    });
    GradedSeries::from_terms(ctx, terms)
}

fn random_class(rng: &mut ChaCha8Rng, ctx: &Arc<SeriesContext>) -> GradedSeries {
    let rank = ctx.ring().rank();
    let coeffs: Vec<Rational> = (0..rank).map(|_| int(rng.gen_range(-3..=3))).collect();
    GradedSeries::linear_class(ctx, &coeffs)
}

fn a6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let x = p1p1();
    let ctx = x.context(2, None);
    let classes = enumerate_curve_classes(&x, 2);
    let one = GradedSeries::one(&ctx);
    let zero = GradedSeries::zero(&ctx);
    let e = |r: rootstack_core::Result<GradedSeries>| r.map_err(|e| e.to_string());
    for round in 0..1000 {
        let a = random_series(&mut rng, &ctx, &classes, 0);
        let b = random_series(&mut rng, &ctx, &classes, 0);
        let c = random_series(&mut rng, &ctx, &classes, 0);
        let ab = e(a.checked_mul(&b))?;
        ensure(e(a.checked_add(&b))? == e(b.checked_add(&a))?, || {
            format!("round {round}: a+b")
        })?;
        ensure(ab == e(b.checked_mul(&a))?, || format!("round {round}: ab"))?;
        ensure(
            e(ab.checked_mul(&c))? == e(a.checked_mul(&e(b.checked_mul(&c))?))?,
            || format!("round {round}: (ab)c"),
        )?;
        ensure(
            e(a.checked_mul(&e(b.checked_add(&c))?))? == e(ab.checked_add(&e(a.checked_mul(&c))?))?,
            || format!("round {round}: a(b+c)"),
        )?;
        ensure(e(a.checked_mul(&one))? == a && e(a.checked_add(&zero))? == a, || {
            format!("round {round}: units")
        })?;
        ensure(e(a.checked_sub(&a))?.is_zero(), || format!("round {round}: a-a"))?;

        let cz = int(rng.gen_range(1..=4)) * sign(rng.gen_range(0..2));
        let cls = random_class(&mut rng, &ctx);
        let factor = e(GradedSeries::z_power(&ctx, 1, cz.clone()).checked_add(&cls))?;
        let inv = if cls.is_zero() {
            GradedSeries::z_power(&ctx, -1, cz.recip())
        } else {
            e(GradedSeries::invert_z_linear(&cz, &cls))?
        };
        ensure(e(inv.checked_mul(&factor))? == one, || {
            format!("round {round}: inverse")
        })?;

        let lctx = x.context(2, None);
        let num = random_series(&mut rng, &lctx, &classes, 2);
        let lin =
            e(random_class(&mut rng, &lctx).checked_add(&GradedSeries::z_power(&lctx, 1, int(rng.gen_range(-2..=2)))))?;
        let idx = rng.gen_range(0..2);
        let divisor = e(lin.checked_add(&GradedSeries::lambda(&lctx, idx)))?;
        let prod = e(num.checked_mul(&divisor))?;
        let back = e(prod.exact_divide_linear(&LinearFactor::new(lin, idx)))?;
        ensure(back == num, || format!("round {round}: division round trip"))?;
    }

    // Sector vanishing against closed-form intersection numbers.
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4usize);
        let plane = rng.gen_bool(0.5);
        let (target, coeffs): (TargetSpace, Vec<Vec<i64>>) = if plane {
            (p2(), (0..n).map(|_| vec![rng.gen_range(1..=3)]).collect())
        } else {
            let draw = |rng: &mut ChaCha8Rng| loop {
                let c = vec![rng.gen_range(0..=2), rng.gen_range(0..=2)];
                if c != [0, 0] {
                    return c;
                }
            };
            (p1p1(), (0..n).map(|_| draw(&mut rng)).collect())
        };
        let named: Vec<(String, Vec<i64>)> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("D{i}"), c.clone()))
            .collect();
        let refs: Vec<(&str, Vec<i64>)> = named.iter().map(|(s, c)| (s.as_str(), c.clone())).collect();
        let d = DivisorArrangement::from_coeffs(target, &refs).map_err(|e| e.to_string())?;
        let sector: Vec<i64> = (0..n).map(|_| -rng.gen_range(0..=2)).collect();
        let support: Vec<&Vec<i64>> = coeffs
            .iter()
            .zip(&sector)
            .filter(|(_, s)| **s != 0)
            .map(|(c, _)| c)
            .collect();
        let oracle = if plane {
            support.len() > 2
        } else {
            match support.len() {
                0 | 1 => false,
                2 => support[0][0] * support[1][1] + support[0][1] * support[1][0] == 0,
                _ => true,
            }
        };
        ensure(d.sector_vanishes(&sector) == oracle, || {
            format!("sector {sector:?} on {coeffs:?}")
        })?;
    }

    // Mirror map lemma instances and the refusal for the cubic.
    for (d, cap, m) in [(line_conic(), 6, 2), (quadrics(), 6, 3)] {
        ensure(check_assumption(&d, cap).holds, || "assumption".into())?;
        let ctx = d.target().context(cap, None);
        let s = ExtendedData::full(d.len(), m);
        let i = i_infinity_extended(&d, &s, 2, &ctx).map_err(|e| e.to_string())?;
        let rep = mirror_map(&i);
        let bare: BTreeMap<ExponentKey, Rational> = (0..d.len())
            .flat_map(|i| (1..=m).map(move |j| (i, j)))
            .map(|(i, j)| {
                let key = ctx
                    .unit_key()
                    .with_xexp([((i, j), 1)].into_iter().collect())
                    .with_sector((0..d.len()).map(|k| if k == i { i64::from(j) } else { 0 }).collect());
                (key, int(1))
            })
            .collect();
        ensure(rep.trivial && rep.positive_tail.is_zero(), || {
            format!("{:?}", rep.offending)
        })?;
        ensure(rep.z_linear == GradedSeries::z_power(&ctx, 1, int(1)), || {
            "z part".into()
        })?;
        ensure(rep.z_zero.terms() == &bare, || format!("z^0 part {}", rep.z_zero))?;
    }
    let ctx = p2().context(6, None);
    ensure(!check_assumption(&cubic(), 6).holds, || {
        "cubic satisfies the assumption".into()
    })?;
    let i = i_infinity_extended_h0(&cubic(), &ExtendedData::full(1, 6), &ctx).map_err(|e| e.to_string())?;
    match extract_invariants(&i) {
        Err(Error::NontrivialMirrorMap(_)) => {}
        other => return Err(format!("cubic extraction not refused: {other:?}")),
    }
    Ok("1000 rounds, 1000 sectors, 3 mirror maps".into())
}

fn main() {
    let criteria: [Criterion; 6] = [("A1", a1), ("A2", a2), ("A3", a3), ("A4", a4), ("A5", a5), ("A6", a6)];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{name} PASS ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL ({detail}; {secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
