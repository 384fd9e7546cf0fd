pub mod commands;
pub mod config;
pub mod suites;

use lightray::fourier_slice::SliceError;
use lightray::phantom::PhantomError;
use lightray::ray_transform::TransformError;
use lightray::reconstruction::ReconError;
use lightray::tensor_algebra::TensorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    /// 2 for usage, schema and I/O problems, 1 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

macro_rules! compute_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        })*
    };
}

compute_error!(TensorError, PhantomError, TransformError, SliceError, ReconError, csv::Error);
