//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 unparseable arguments or
//! configuration, 3 invalid system, 4 solver failure.

pub mod config;
mod run;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigError, ConfigFile, GridSpec, SpeciesSpec, SweepSpec, SweepVariable};
pub use run::{execute, Table};

use crate::error::Error;

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Anything that stops a run, mapped onto a stable exit code.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Model(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Model(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Model(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Model(e) if e.is_validation() => write!(f, "invalid system: {e}"),
            CliError::Model(e) => write!(f, "solver failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Eos,
    Mix,
    Msa,
    OzSolve,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Percus–Yevick and Carnahan–Starling equations of state for one component.
    Eos,
    /// BMCSL thermodynamics of a hard-sphere mixture.
    Mix,
    /// MSA electrolyte solution.
    Msa,
    /// Numerical OZ/PY solve compared against the closed forms.
    OzSolve,
    /// Repeat another command over a range of eta or alpha_sq.
    Sweep {
        #[arg(value_enum)]
        target: SweepTarget,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "oz-thermo",
    version,
    about = "Hard-sphere and MSA electrolyte thermodynamics"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// System definition (key = value sections, or JSON with --json).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Packing fraction; for mixtures the densities are rescaled to it.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Number of points for an eos table or a sweep.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long = "grid-dr", global = true)]
    pub grid_dr: Option<f64>,
    /// Solver tolerance (Picard change for oz-solve, relative residual for msa).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Let msa run on an uncharged system and report zeros.
    #[arg(long = "allow-neutral", global = true)]
    pub allow_neutral: bool,
    /// Read the config file as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Sweep variable (eta or alpha_sq), overriding the config.
    #[arg(long, global = true)]
    pub var: Option<String>,
    #[arg(long, global = true)]
    pub start: Option<f64>,
    #[arg(long, global = true)]
    pub stop: Option<f64>,
    /// oz-solve: also write the r,c,h,g table to this path.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
}

/// Everything one invocation needs, after the config file has been read.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub system: ConfigFile,
    pub sweep: Option<SweepSpec>,
    pub output: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub grid: GridSpec,
    pub eta: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub allow_neutral: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            system: ConfigFile::default(),
            sweep: None,
            output: None,
            table: None,
            grid: GridSpec::default(),
            eta: None,
            steps: None,
            tol: None,
            allow_neutral: false,
        }
    }

    /// Merge parsed arguments with the config file they point to.
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let system = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    ConfigError::new(format!("cannot read {}: {e}", path.display()))
                })?;
                let is_json = args.json || path.extension().is_some_and(|e| e == "json");
                if is_json {
                    ConfigFile::from_json(&text)?
                } else {
                    ConfigFile::from_kv(&text)?
                }
            }
            None => ConfigFile::default(),
        };
        let mut grid = system.grid.unwrap_or_default();
        grid.n = args.grid_n.or(grid.n);
        grid.dr = args.grid_dr.or(grid.dr);

        let mut sweep = system.sweep;
        if args.var.is_some() || args.start.is_some() || args.stop.is_some() {
            let base = sweep;
            let variable = match &args.var {
                Some(v) => v.parse()?,
                None => base
                    .map(|s| s.variable)
                    .ok_or_else(|| ConfigError::new("sweep needs --var or a [sweep] section"))?,
            };
            let pick = |flag: Option<f64>, cfg: Option<f64>, name: &str| {
                flag.or(cfg)
                    .ok_or_else(|| ConfigError::new(format!("sweep needs --{name}")))
            };
            sweep = Some(SweepSpec {
                variable,
                start: pick(args.start, base.map(|s| s.start), "start")?,
                stop: pick(args.stop, base.map(|s| s.stop), "stop")?,
                steps: args.steps.or(base.map(|s| s.steps)).unwrap_or(11),
            });
        } else if let (Some(s), Some(steps)) = (sweep.as_mut(), args.steps) {
            s.steps = steps;
        }

        Ok(Self {
            command: args.command,
            eta: args.eta.or(system.eta),
            system,
            sweep,
            output: args.out,
            table: args.table,
            grid,
            steps: args.steps,
            tol: args.tol,
            allow_neutral: args.allow_neutral,
        })
    }
}

/// Run one invocation and write its CSV.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let table = execute(config)?;
    let text = table.to_csv();
    match &config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Parse `argv`, run, and return the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_args(args).and_then(|cfg| run(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("oz-thermo: {e}");
            e.exit_code()
        }
    }
}
