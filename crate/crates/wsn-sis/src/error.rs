//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({i}, {j}) out of range for a graph on {n} nodes")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },

    #[error("self-loop ({0}, {0}) not allowed")]
    SelfLoop(usize),

    #[error("preferential attachment needs n > m >= 1, got n = {n}, m = {m}")]
    BadGeneratorParams { n: usize, m: usize },

    /// Power iteration ran out of iterations. The last iterate and its
    /// residual are kept so the caller can retry with a larger cap.
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:.3e})")]
    PowerIterationDiverged {
        iterations: usize,
        residual: f64,
        last_lambda: f64,
        last_vector: Vec<f64>,
    },

    /// Equilibrium fixed-point iteration ran out of iterations.
    #[error("equilibrium fixed point did not converge in {iterations} iterations (delta {delta:.3e})")]
    FixedPointDiverged {
        iterations: usize,
        delta: f64,
        last_p_ai: Vec<f64>,
    },

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamRange { name: &'static str, value: f64 },

    /// u = v = 0 (no duty cycle at all) or v = 0 where waking is required.
    #[error("degenerate sleep scheduling: {0}")]
    DegenerateScheduling(&'static str),

    #[error("seed count {seed_count} exceeds node count {n}")]
    TooManySeeds { seed_count: usize, n: usize },

    #[error("{0}")]
    Config(String),

    #[error("cannot read edge list {path}: {source}")]
    EdgeListRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad edge list line {line} in {path}: {reason}")]
    EdgeListParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 for validation problems,
    /// 2 for runtime/convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EdgeOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::BadGeneratorParams { .. }
            | Error::ParamRange { .. }
            | Error::DegenerateScheduling(_)
            | Error::TooManySeeds { .. }
            | Error::Config(_)
            | Error::EdgeListParse { .. } => 1,
            Error::PowerIterationDiverged { .. }
            | Error::FixedPointDiverged { .. }
            | Error::EdgeListRead { .. }
            | Error::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
