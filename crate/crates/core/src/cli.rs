//! Command-line front end. Kept in the library so it can be driven from
//! tests without spawning a process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constants::{load_constants, ConstantsSet, ConstantsSource};
use crate::error::{Error, Result};
use crate::perturbation::Branch;
use crate::report::{
    historical_rows, historical_table, sensitivity, species_csv, species_rows, species_table,
    to_csv, verify_table, CheckRow, PredictionDocument,
};
use crate::species::{SpeciesCatalog, WidthChoice};
use crate::vacuum::{epsilon0_self_consistent, predict_closed_form};
use crate::verify::{run_checks, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-13;
pub const MAX_FIXED_POINT_ITER: usize = 100;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "vacuum",
    version,
    about = "Vacuum permittivity, speed of light and 1/alpha from a vacuum-fluctuation dielectric model"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Constants file (TOML); defaults to $VACUUM_DATA_DIR/constants.toml, then the bundled set
    #[arg(long, global = true, value_name = "PATH")]
    pub constants: Option<PathBuf>,

    /// Add the eta_c and eta_b quarkonium terms to the self-consistent sum
    #[arg(long, global = true)]
    pub include_quarks: bool,

    /// Which tabulated two-photon width to use where a range is given
    #[arg(long, global = true, value_enum, default_value_t = WidthArg::Max)]
    pub width: WidthArg,

    /// First-order amplitude convention
    #[arg(long, global = true, value_enum, default_value_t = BranchArg::Particular)]
    pub branch: BranchArg,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Significant figures in table output
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// predict: fixed-point tolerance. verify: replaces every check tolerance
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Predict epsilon0, c and 1/alpha
    Predict,
    /// Per-species lifetimes, densities, frequencies and rates
    Species,
    /// Run the internal consistency checks
    Verify,
    /// Sweep the species count and the perturbation coupling
    Sensitivity,
    /// Numerological formulas for alpha, for comparison only
    Historical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WidthArg {
    Min,
    Max,
}

impl From<WidthArg> for WidthChoice {
    fn from(w: WidthArg) -> Self {
        match w {
            WidthArg::Min => WidthChoice::Min,
            WidthArg::Max => WidthChoice::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    #[value(name = "paper", alias = "particular")]
    Particular,
    Literal,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Particular => Branch::Particular,
            BranchArg::Literal => Branch::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cfg) {
        Ok((text, code)) => {
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::InvalidArgument(format!("json: {e}")))
}

fn load(cfg: &RunConfig) -> Result<ConstantsSet> {
    load_constants(&ConstantsSource::resolve(cfg.constants.as_deref()))
}

/// Runs the configured command, returning its rendered output and exit code.
pub fn execute(cfg: &RunConfig) -> Result<(String, i32)> {
    let k = load(cfg)?;
    let digits = cfg.precision as usize;
    match cfg.command {
        Command::Predict => {
            let doc = predict(cfg, &k)?;
            let text = match cfg.format {
                Format::Table => doc.to_table(digits),
                Format::Json => json(&doc)?,
                Format::Csv => doc.to_csv()?,
            };
            Ok((text, EXIT_OK))
        }
        Command::Species => {
            let rows = species_rows(&k, cfg.width.into())?;
            let text = match cfg.format {
                Format::Table => species_table(&rows, digits),
                Format::Json => json(&rows)?,
                Format::Csv => species_csv(&rows)?,
            };
            Ok((text, EXIT_OK))
        }
        Command::Verify => {
            let outcomes = run_checks(
                &k,
                VerifyOptions {
                    tolerance: cfg.tolerance,
                    branch: cfg.branch.into(),
                },
            )?;
            let rows: Vec<CheckRow> = outcomes.iter().map(CheckRow::from).collect();
            let code = if rows.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            };
            let text = match cfg.format {
                Format::Table => verify_table(&rows, digits),
                Format::Json => json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            };
            Ok((text, code))
        }
        Command::Sensitivity => {
            let doc = sensitivity(&k, cfg.branch.into())?;
            let text = match cfg.format {
                Format::Table => doc.to_table(digits),
                Format::Json => json(&doc)?,
                Format::Csv => doc.to_csv()?,
            };
            Ok((text, EXIT_OK))
        }
        Command::Historical => {
            let rows = historical_rows(&k)?;
            let text = match cfg.format {
                Format::Table => historical_table(&rows, digits),
                Format::Json => json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            };
            Ok((text, EXIT_OK))
        }
    }
}

/// Self-consistent prediction with the lepton-only closed form alongside.
pub fn predict(cfg: &RunConfig, k: &ConstantsSet) -> Result<PredictionDocument> {
    let cat = SpeciesCatalog::new(k)?;
    let mut species = cat.leptons()?;
    if cfg.include_quarks {
        species.extend(cat.quarkonia()?);
    }
    let tol = cfg.tolerance.unwrap_or(DEFAULT_FIXED_POINT_TOL);
    let report =
        epsilon0_self_consistent(&species, k, tol, MAX_FIXED_POINT_ITER, cfg.width.into())?;
    let closed = predict_closed_form(&species, k)?;
    Ok(PredictionDocument::new(&report, Some(&closed), k))
}
