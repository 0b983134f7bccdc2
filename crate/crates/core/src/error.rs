use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants are grouped by the exit code the command-line front end maps them to:
/// input problems (2), numeric failures (3) and resource caps (4).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operation requires a polynomial of degree >= 1")]
    DegreeZero,

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("t = {t} lies outside the series domain (|t|*M = {ratio:.6}, limit {limit:.6})")]
    Domain {
        t: Complex64,
        ratio: f64,
        limit: f64,
    },

    #[error("1/t = {tau} is within {distance:e} of the singular set")]
    SingularParameter { tau: Complex64, distance: f64 },

    #[error("integrand 1/(1 - t f(x)) has a pole on [0,1] near x = {x}")]
    PoleOnContour { x: f64 },

    #[error("target {tau} lies within clearance {clearance:e} of singular value {obstacle}")]
    Blocked {
        tau: Complex64,
        obstacle: Complex64,
        clearance: f64,
    },

    #[error("path violates its clearance: {0}")]
    InvalidPath(String),

    #[error("step size underflow at tau = {tau} (step {step:e})")]
    StepUnderflow { tau: Complex64, step: f64 },

    #[error("Newton corrector failed at tau = {tau} (residual {residual:e})")]
    RootResidual { tau: Complex64, residual: f64 },

    #[error("coincident roots: minimum separation {separation:e}")]
    CoincidentRoots { separation: f64 },

    #[error("insufficient data: {method} needs {needed} non-zero moments, found {found}")]
    InsufficientData {
        method: String,
        needed: usize,
        found: usize,
    },

    #[error("fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("coefficient size {bits} bits exceeds cap of {cap} bits at n = {n}")]
    ResourceLimit { bits: u64, cap: u64, n: usize },
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::InvalidInput(_)
            | Error::DegreeZero
            | Error::UnknownStrategy { .. }
            | Error::Blocked { .. }
            | Error::InvalidPath(_)
            | Error::Domain { .. } => 2,
            Error::ResourceLimit { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
