use std::path::PathBuf;

use crate::quantity::Dimension;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite result in {op}")]
    NonFinite { op: &'static str },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        left: Box<Dimension>,
        right: Box<Dimension>,
    },

    #[error("{what}: expected dimension {expected}, got {found}")]
    WrongDimension {
        what: String,
        expected: Box<Dimension>,
        found: Box<Dimension>,
    },

    #[error("negative base {base} raised to fractional power {power}")]
    NegativeFractionalPower { base: f64, power: String },

    #[error("unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse constants data ({origin}): {message}")]
    Parse { origin: String, message: String },

    #[error("missing required constant `{0}`")]
    MissingConstant(String),

    #[error("duplicate constant `{0}`")]
    DuplicateConstant(String),

    #[error("unknown constant `{0}`")]
    UnknownConstant(String),

    #[error("invalid constant `{key}`: {reason}")]
    InvalidConstant { key: String, reason: String },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unsupported species `{name}`: {reason}")]
    UnsupportedSpecies { name: String, reason: String },

    #[error("invalid species `{name}`: {reason}")]
    InvalidSpecies { name: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimated error {estimate:e} above {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("no interior minimum in [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("degenerate minimum at x = {x_e}: spring constant {k_spring:e} is not positive")]
    DegenerateMinimum { x_e: f64, k_spring: f64 },

    #[error("step size collapsed to {step:e} at tau = {tau}")]
    StepSizeCollapse { step: f64, tau: f64 },

    #[error("degenerate lambda grid: {0}")]
    DegenerateGrid(String),

    #[error("fixed point did not converge after {iterations} iterations (last relative change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },

    #[error("routes disagree for {what}: {first:e} vs {second:e}")]
    RouteMismatch {
        what: String,
        first: f64,
        second: f64,
    },
}
