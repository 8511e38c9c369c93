use thiserror::Error;

use crate::minimiser::SolveResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("profile value {value} at node {node} is not positive")]
    NonPositiveProfile { node: usize, value: f64 },

    #[error("invalid grid: {0}")]
    BadGrid(String),

    #[error("evaluation point {x} lies outside [-1, 1]")]
    OutOfDomain { x: f64 },

    #[error("root not bracketed on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    RootNotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("c cosh(1/c) = {alpha} has no solution (requires alpha >= {alpha0})")]
    NoSolution { alpha: f64, alpha0: f64 },

    #[error("coefficients A and B vanish simultaneously")]
    DegenerateCoefficients,

    #[error("phase function undefined: {0}")]
    PhaseUndefined(&'static str),

    #[error("tanh(x)/tan(x) has a pole at x = {x}")]
    PoleAtMultipleOfPi { x: f64 },

    #[error("construction not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("solver stopped after {} iterations with gradient norm {:.3e}", .0.iterations, .0.gradient_norm)]
    DidNotConverge(Box<SolveResult>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag, used for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveProfile { .. } => "NonPositiveProfile",
            Error::BadGrid(_) => "BadGrid",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::RootNotBracketed { .. } => "RootNotBracketed",
            Error::NoSolution { .. } => "NoSolution",
            Error::DegenerateCoefficients => "DegenerateCoefficients",
            Error::PhaseUndefined(_) => "PhaseUndefined",
            Error::PoleAtMultipleOfPi { .. } => "PoleAtMultipleOfPi",
            Error::NotApplicable(_) => "NotApplicable",
            Error::DidNotConverge(_) => "DidNotConverge",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
