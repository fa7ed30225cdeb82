use rootstack_core::algebra::{format_xexp, int, ExponentKey, GradedSeries, Rational};
use rootstack_core::identities::{
    check_local_orbifold_extended, check_local_orbifold_nonextended, check_local_relative_smooth, IdentityReport,
};
use rootstack_core::ifunctions::{
    i_infinity_extended, i_infinity_extended_h0, i_infinity_nonextended, i_local, i_relative_extended_h0,
    i_relative_smooth, i_root_extended, i_root_nonextended,
};
use rootstack_core::invariants::{extract_invariants, stabilization_check};
use rootstack_core::periods::{
    compare_periods, laurent_classical_period, quantum_period, regularize, LaurentPolynomial, PeriodSequence,
};
use rootstack_core::targets::enumerate_curve_classes;
use rootstack_core::Error;

use crate::config::{Command, Family, JobConfig, JobSpec};
use crate::records::Report;
use crate::CliError;

/// Runs one job. A report with `pass == false` maps to exit status 1.
pub fn run(job: &JobConfig) -> Result<Report, CliError> {
    if job.command == Command::LaurentPeriod {
        return laurent_period(job);
    }
    let spec = job
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{} needs a job configuration", job.command)))?;
    match job.command {
        Command::IFunction => ifunction(job, spec),
        Command::Invariants => invariants(job, spec),
        Command::Stabilize => stabilize(spec),
        Command::CheckIdentity => check_identity(spec),
        Command::Period => period(spec),
        Command::ComparePeriods => compare(spec),
        Command::LaurentPeriod => unreachable!("handled above"),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn padded(v: &[i64], n: usize) -> String {
    let mut p = v.to_vec();
    p.resize(n.max(v.len()), 0);
    join(&p)
}

fn xexp_field(key: &ExponentKey) -> String {
    if key.xexp.is_empty() {
        "1".into()
    } else {
        format_xexp(&key.xexp)
    }
}

fn build_series(job: &JobConfig, spec: &JobSpec, family: Family) -> Result<GradedSeries, CliError> {
    let d = &spec.arrangement;
    let ctx = spec.target().context(spec.cap, None);
    let xdeg = job.xdeg.unwrap_or(d.len() as u32);
    let first_roots = || {
        spec.roots
            .first()
            .ok_or_else(|| CliError::Config(format!("family {} needs root orders", family.name())))
    };
    let series = match family {
        Family::Root => i_root_nonextended(d, first_roots()?, &ctx)?,
        Family::RootExtended => i_root_extended(d, first_roots()?, &spec.extended_data(), xdeg, &ctx)?,
        Family::Infinity => i_infinity_nonextended(d, &ctx)?,
        Family::InfinityExtended => i_infinity_extended(d, &spec.extended_data(), xdeg, &ctx)?,
        Family::InfinityExtendedH0 => i_infinity_extended_h0(d, &spec.extended_data(), &ctx)?,
        Family::Relative => i_relative_smooth(d, &ctx)?,
        Family::RelativeExtendedH0 => i_relative_extended_h0(d, &spec.extended_data(), &ctx)?,
        Family::Local => i_local(d, &ctx)?,
    };
    Ok(series)
}

fn ifunction(job: &JobConfig, spec: &JobSpec) -> Result<Report, CliError> {
    let family = job.family.unwrap_or(Family::Infinity);
    let series = build_series(job, spec, family)?;
    let ring = series.ring().clone();
    let n = spec.arrangement.len();
    let mut report = Report::new(
        format!("I-function ({}), cap {}", family.name(), spec.cap),
        vec!["kind", "beta", "z", "x", "sector", "class", "lambda", "coefficient"],
    );
    for (key, c) in series.sorted_terms() {
        let lambda: Vec<i64> = key.lambda.iter().map(|l| i64::from(*l)).collect();
        report.push(
            [
                "term".to_string(),
                join(&key.beta),
                key.zpow.to_string(),
                xexp_field(key),
                padded(&key.sector, n),
                ring.format_monomial(&key.coh),
                padded(&lambda, n),
            ],
            c.clone(),
        );
    }
    Ok(report)
}

fn invariants(job: &JobConfig, spec: &JobSpec) -> Result<Report, CliError> {
    let family = job.family.unwrap_or(Family::InfinityExtendedH0);
    let series = build_series(job, spec, family)?;
    let table = extract_invariants(&series)?;
    let ring = spec.target().ring();
    let n = spec.arrangement.len();
    let mut report = Report::new(
        format!("invariants ({}), cap {}", family.name(), spec.cap),
        vec!["kind", "beta", "x", "insertion", "psi", "sector", "marking", "value"],
    );
    for (key, value) in &table.entries {
        let xexp = if key.xexp.is_empty() {
            "1".to_string()
        } else {
            format_xexp(&key.xexp)
        };
        let marking = if table.flagged.contains(key) {
            "twisted"
        } else {
            "untwisted"
        };
        report.push(
            [
                "invariant".to_string(),
                join(&key.beta),
                xexp,
                ring.format_monomial(&key.insertion),
                key.psi.to_string(),
                padded(&key.sector, n),
                marking.to_string(),
            ],
            value.clone(),
        );
    }
    if !table.flagged.is_empty() {
        report.notes.push(format!(
            "{} entries have a twisted distinguished marking",
            table.flagged.len()
        ));
    }
    Ok(report)
}

fn stabilize(spec: &JobSpec) -> Result<Report, CliError> {
    if spec.roots.is_empty() {
        return Err(CliError::Config(
            "stabilize needs root orders (config \"roots\" or --roots)".into(),
        ));
    }
    let ctx = spec.target().context(spec.cap, None);
    let check = stabilization_check(&spec.arrangement, &spec.roots, &ctx)?;
    let mut report = Report::new(
        format!("stabilization, cap {}", spec.cap),
        vec!["kind", "roots", "beta", "status", "scale"],
    );
    for row in &check.rows {
        let degs = spec.arrangement.degrees(&row.beta);
        let scale = row
            .roots
            .iter()
            .zip(&degs)
            .filter(|(_, d)| **d > 0)
            .fold(Rational::from_integer(1.into()), |acc, (r, _)| acc * int(i64::from(*r)));
        report.push(
            [
                "stabilize".to_string(),
                join(&row.roots),
                join(&row.beta),
                status(row.pass).to_string(),
            ],
            scale,
        );
        if let Some(m) = &row.first_mismatch {
            report.notes.push(format!(
                "roots {:?} beta {:?}: first mismatch at {m}",
                row.roots, row.beta
            ));
        }
    }
    report.pass = check.pass();
    Ok(report)
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn push_identity(report: &mut Report, rep: &IdentityReport) {
    let beta = join(&rep.beta);
    report.push(
        ["identity", rep.name, &beta, status(rep.pass), "sign"],
        rep.sign.clone(),
    );
    if let (Some(raw_sign), Some(raw_pass)) = (&rep.raw_sign, rep.raw_pass) {
        report.push(
            ["identity", rep.name, &beta, status(raw_pass), "raw-sign"],
            raw_sign.clone(),
        );
        report.pass &= raw_pass;
    }
    if let Some(p) = &rep.point {
        let ok = status(p.holds());
        report.push(["point", rep.name, &beta, ok, "orbifold"], p.orbifold.clone());
        report.push(["point", rep.name, &beta, ok, "local"], p.local.clone());
        report.push(["point", rep.name, &beta, ok, "factor"], p.factor.clone());
        report.pass &= p.holds();
    }
    if let Some(m) = &rep.first_mismatch {
        report
            .notes
            .push(format!("{} at beta {:?}: first mismatch at {m}", rep.name, rep.beta));
    }
    report.pass &= rep.pass;
}

fn check_identity(spec: &JobSpec) -> Result<Report, CliError> {
    let d = &spec.arrangement;
    let mut report = Report::new(
        format!("local/log-orbifold identities, cap {}", spec.cap),
        vec!["kind", "identity", "beta", "status", "quantity", "value"],
    );
    let all: Vec<usize> = (0..d.len()).collect();
    let meets = !d.intersection_empty(&all);
    if !meets {
        report
            .notes
            .push("the divisors do not meet; orbifold identities skipped".into());
    }
    let mut checked = 0usize;
    for beta in enumerate_curve_classes(spec.target(), spec.cap) {
        if d.degrees(&beta).contains(&0) {
            continue;
        }
        if d.len() == 1 {
            push_identity(&mut report, &check_local_relative_smooth(d, &beta)?);
            checked += 1;
        }
        if meets {
            push_identity(&mut report, &check_local_orbifold_nonextended(d, &beta)?);
            push_identity(&mut report, &check_local_orbifold_extended(d, &beta)?);
            checked += 2;
        }
    }
    if checked == 0 {
        report
            .notes
            .push("no curve class in the cap meets every divisor positively".into());
    }
    Ok(report)
}

fn push_sequence(report: &mut Report, p: &PeriodSequence) {
    for (m, c) in p.coeffs.iter().enumerate() {
        report.push(["period".to_string(), p.kind.to_string(), m.to_string()], c.clone());
    }
}

fn period(spec: &JobSpec) -> Result<Report, CliError> {
    let q = quantum_period(spec.target(), spec.cap)?;
    let r = regularize(&q)?;
    let mut report = Report::new(
        format!("quantum period, cap {}", spec.cap),
        vec!["kind", "series", "m", "value"],
    );
    push_sequence(&mut report, &q);
    push_sequence(&mut report, &r);
    Ok(report)
}

fn compare(spec: &JobSpec) -> Result<Report, CliError> {
    let c = compare_periods(&spec.arrangement, spec.cap)?;
    let mut report = Report::new(
        format!("regularized quantum period against classical period, cap {}", spec.cap),
        vec!["kind", "m", "status", "regularized", "classical"],
    );
    let zero = Rational::from_integer(0.into());
    for m in 0..c.left.coeffs.len().max(c.right.coeffs.len()) {
        let l = c.left.coeffs.get(m).unwrap_or(&zero);
        let r = c.right.coeffs.get(m).unwrap_or(&zero);
        let shown = rootstack_core::algebra::format_rational(l);
        report.push(
            ["compare".to_string(), m.to_string(), status(l == r).to_string(), shown],
            r.clone(),
        );
    }
    if let Some(m) = c.first_mismatch {
        report.notes.push(format!("first mismatch at degree {m}"));
    }
    report.pass = c.pass;
    Ok(report)
}

fn laurent_period(job: &JobConfig) -> Result<Report, CliError> {
    let text = job
        .laurent
        .as_deref()
        .ok_or_else(|| CliError::Usage("laurent-period needs --laurent \"<polynomial>\"".into()))?;
    let f = LaurentPolynomial::parse(text).map_err(|e| match e {
        Error::Precondition(m) => CliError::Usage(m),
        other => CliError::Core(other),
    })?;
    let p = laurent_classical_period(&f, job.cap);
    let mut report = Report::new(
        format!("constant terms of powers of {f}, cap {}", job.cap),
        vec!["kind", "series", "m", "value"],
    );
    push_sequence(&mut report, &p);
    Ok(report)
}
