use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rootstack_core::ifunctions::ExtendedData;
use rootstack_core::targets::{enumerate_curve_classes, Divisor, DivisorArrangement, RootData, TargetSpace};
use serde::Deserialize;

use crate::CliError;

pub const MAX_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    IFunction,
    Invariants,
    Stabilize,
    CheckIdentity,
    Period,
    ComparePeriods,
    LaurentPeriod,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::IFunction,
        Command::Invariants,
        Command::Stabilize,
        Command::CheckIdentity,
        Command::Period,
        Command::ComparePeriods,
        Command::LaurentPeriod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::IFunction => "ifunction",
            Command::Invariants => "invariants",
            Command::Stabilize => "stabilize",
            Command::CheckIdentity => "check-identity",
            Command::Period => "period",
            Command::ComparePeriods => "compare-periods",
            Command::LaurentPeriod => "laurent-period",
        }
    }

    pub fn needs_target(self) -> bool {
        self != Command::LaurentPeriod
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Table,
    Records,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "table" => Ok(Format::Table),
            "records" => Ok(Format::Records),
            _ => Err(CliError::Usage(format!(
                "unknown format {s:?}; expected table or records"
            ))),
        }
    }
}

/// Which I-function the `ifunction` and `invariants` commands build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Root,
    RootExtended,
    Infinity,
    InfinityExtended,
    InfinityExtendedH0,
    Relative,
    RelativeExtendedH0,
    Local,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Root,
        Family::RootExtended,
        Family::Infinity,
        Family::InfinityExtended,
        Family::InfinityExtendedH0,
        Family::Relative,
        Family::RelativeExtendedH0,
        Family::Local,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Root => "root",
            Family::RootExtended => "root-extended",
            Family::Infinity => "infinity",
            Family::InfinityExtended => "infinity-extended",
            Family::InfinityExtendedH0 => "infinity-extended-h0",
            Family::Relative => "relative",
            Family::RelativeExtendedH0 => "relative-extended-h0",
            Family::Local => "local",
        }
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            CliError::Usage(format!("unknown family {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    factors: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDivisor {
    name: String,
    coeffs: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    target: RawTarget,
    divisors: Vec<RawDivisor>,
    roots: Option<Vec<u32>>,
    cap: u32,
    m: Option<u32>,
}

/// The geometric part of a job as read from the JSON document.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub arrangement: DivisorArrangement,
    pub roots: Vec<RootData>,
    pub cap: u32,
    pub m: Option<u32>,
}

impl JobSpec {
    pub fn target(&self) -> &TargetSpace {
        self.arrangement.target()
    }

    /// Extended data with every contact order up to `m`; by default `m` is the largest
    /// `D_i.beta` over the classes within the cap.
    pub fn extended_data(&self) -> ExtendedData {
        let m = self.m.unwrap_or_else(|| {
            enumerate_curve_classes(self.target(), self.cap)
                .iter()
                .flat_map(|b| self.arrangement.degrees(b))
                .max()
                .unwrap_or(0)
                .max(1)
        });
        ExtendedData::full(self.arrangement.len(), m)
    }
}

/// A fully validated job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub spec: Option<JobSpec>,
    pub command: Command,
    pub format: Format,
    pub family: Option<Family>,
    pub laurent: Option<String>,
    pub xdeg: Option<u32>,
    pub cap: u32,
}

fn field_error(field: impl Into<String>, message: impl fmt::Display) -> CliError {
    CliError::Config(format!("{}: {message}", field.into()))
}

/// Parses and validates a job document given inline.
pub fn parse_config_text(text: &str) -> Result<JobSpec, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let target = TargetSpace::new(raw.target.factors).map_err(|e| field_error("target.factors", e))?;
    let mut divisors = Vec::with_capacity(raw.divisors.len());
    for (n, d) in raw.divisors.iter().enumerate() {
        let div = Divisor::new(d.name.clone(), &d.coeffs, &target)
            .map_err(|e| field_error(format!("divisors[{n}].coeffs"), e))?;
        divisors.push(div);
    }
    let arrangement = DivisorArrangement::new(target, divisors).map_err(|e| field_error("divisors", e))?;
    let roots = match raw.roots {
        Some(r) => vec![validate_roots(r, &arrangement).map_err(|e| field_error("roots", e))?],
        None => Vec::new(),
    };
    check_cap(raw.cap).map_err(|e| field_error("cap", e))?;
    if raw.m == Some(0) {
        return Err(field_error("m", "must be positive"));
    }
    Ok(JobSpec {
        arrangement,
        roots,
        cap: raw.cap,
        m: raw.m,
    })
}

/// Reads a job document from a file.
pub fn parse_config_file(path: &Path) -> Result<JobSpec, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn check_cap(cap: u32) -> Result<(), String> {
    if cap > MAX_CAP {
        Err(format!("cap {cap} out of range (at most {MAX_CAP})"))
    } else {
        Ok(())
    }
}

fn validate_roots(r: Vec<u32>, d: &DivisorArrangement) -> Result<RootData, String> {
    let roots = RootData::new(r).map_err(|e| e.to_string())?;
    roots.fits(d).map_err(|e| e.to_string())?;
    Ok(roots)
}

/// Parses `--roots "r1,r2;r3,r4"` into one root vector per `;`-separated group.
pub fn parse_roots(text: &str, d: &DivisorArrangement) -> Result<Vec<RootData>, CliError> {
    text.split(';')
        .map(|group| {
            let values = group
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("invalid root order {:?}", v.trim()))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| field_error("--roots", e))?;
            validate_roots(values, d).map_err(|e| field_error("--roots", e))
        })
        .collect()
}
