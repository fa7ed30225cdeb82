//! Command-line front end: reads a JSON job, runs one command from `rootstack-core`, and
//! prints either an aligned table or tab-separated records.

pub mod commands;
pub mod config;
pub mod records;

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use commands::run;
pub use config::{parse_config_file, parse_config_text, Command, Family, Format, JobConfig, JobSpec};
pub use records::{parse_records, render_records, Record, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_MIRROR_MAP: i32 = 2;
pub const EXIT_DIVISIBILITY: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_CONFIG: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rootstack_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(rootstack_core::Error::NontrivialMirrorMap(_)) => EXIT_MIRROR_MAP,
            CliError::Core(rootstack_core::Error::NotDivisible { .. }) => EXIT_DIVISIBILITY,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Genus-zero invariants of root stacks, local and log theories, and quantum periods.
#[derive(Debug, Parser)]
#[command(name = "rootstack-gw", version)]
pub struct Args {
    /// Path to the JSON job file.
    #[arg(long, value_name = "PATH", conflicts_with = "inline")]
    pub config: Option<PathBuf>,

    /// The JSON job given directly on the command line.
    #[arg(long, value_name = "JSON")]
    pub inline: Option<String>,

    /// ifunction, invariants, stabilize, check-identity, period, compare-periods or laurent-period.
    #[arg(long, value_name = "NAME")]
    pub command: String,

    /// Overrides the degree cap of the job.
    #[arg(long, value_name = "N")]
    pub cap: Option<u32>,

    /// Root orders, comma separated; several vectors are separated by ';'.
    #[arg(long, value_name = "R1,R2,...")]
    pub roots: Option<String>,

    /// table or records.
    #[arg(long, default_value = "table")]
    pub format: String,

    /// Writes the report to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// I-function family for ifunction and invariants.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,

    /// Bound on the x-degree for the extended families that need one.
    #[arg(long, value_name = "N")]
    pub xdeg: Option<u32>,

    /// Laurent polynomial for laurent-period, e.g. "x + y + 1/(x*y)".
    #[arg(long, value_name = "POLY")]
    pub laurent: Option<String>,
}

/// Validates the arguments and the job document into a [`JobConfig`].
pub fn build_job(args: &Args) -> Result<JobConfig, CliError> {
    let command: Command = args.command.parse()?;
    let format: Format = args.format.parse()?;
    let family = args.family.as_deref().map(str::parse::<Family>).transpose()?;
    let mut spec = match (&args.config, &args.inline) {
        (Some(path), _) => Some(parse_config_file(path)?),
        (None, Some(text)) => Some(parse_config_text(text)?),
        (None, None) if command.needs_target() => {
            return Err(CliError::Usage(format!("{command} needs --config or --inline")));
        }
        (None, None) => None,
    };
    if let Some(cap) = args.cap {
        config::check_cap(cap).map_err(|e| CliError::Config(format!("--cap: {e}")))?;
        if let Some(s) = spec.as_mut() {
            s.cap = cap;
        }
    }
    if let (Some(text), Some(s)) = (&args.roots, spec.as_mut()) {
        s.roots = config::parse_roots(text, &s.arrangement)?;
    }
    let cap = match (&spec, args.cap) {
        (_, Some(c)) => c,
        (Some(s), None) => s.cap,
        (None, None) => return Err(CliError::Usage(format!("{command} needs --cap"))),
    };
    Ok(JobConfig {
        spec,
        command,
        format,
        family,
        laurent: args.laurent.clone(),
        xdeg: args.xdeg,
        cap,
    })
}

/// Sizes the global thread pool from `ROOTSTACK_GW_THREADS`, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ROOTSTACK_GW_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "ROOTSTACK_GW_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

/// Runs a parsed invocation and returns the process exit status.
pub fn execute(args: &Args) -> i32 {
    match try_execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rootstack-gw: {e}");
            e.exit_code()
        }
    }
}

fn try_execute(args: &Args) -> Result<i32, CliError> {
    configure_threads()?;
    let job = build_job(args)?;
    log::info!("running {} with cap {}", job.command, job.cap);
    let report = run(&job)?;
    let text = report.render(job.format);
    match &args.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}
