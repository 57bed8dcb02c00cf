use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("label error: {0}")]
    Label(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e}, tol {tol:.1e})")]
    NotConverged { iterations: usize, residual: f64, tol: f64 },

    #[error("switching cycled: state at iteration {iteration} repeats iteration {first_seen} ({summary})")]
    Cycle {
        iteration: usize,
        first_seen: usize,
        summary: String,
    },

    #[error("step size error: {0}")]
    Step(String),

    #[error("flux recovery refused: interior residual {residual:.3e} exceeds {tol:.1e}")]
    FluxResidual { residual: f64, tol: f64 },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
