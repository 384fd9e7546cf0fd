//! Symmetric tensor algebra over ℝ^{1+n} with the Minkowski metric family
//! g_{1/c}: symmetric products, contractions, the J operator and the
//! decomposition u = A + i_{g_{1/c}} f with J A = 0.

mod decompose;
mod json;
mod metric;
mod multi_index;
mod ops;
mod scalar;
mod sym_tensor;

pub use decompose::{commutator_constants, decompose, decompose_with, CommutatorConstants, Decomposition};
pub use json::{tensor_from_json, tensor_to_json, JsonScalar};
pub use metric::MinkowskiMetric;
pub use multi_index::{dim_sym, multiset_count, CanonicalIter, FullIter, MultiIndex};
pub use ops::{i_delta, i_v, j_delta, j_op, j_v, symmetrize};
pub use scalar::Scalar;
pub use sym_tensor::{ComplexTensor, SymTensor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("rank {rank} is too small, operation needs at least {needed}")]
    RankUnderflow { rank: usize, needed: usize },
    #[error("expected {expected} entries, found {found}")]
    InvalidLength { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("speed c must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("singular elimination step")]
    Singular,
    #[error("tensor literal: {0}")]
    Parse(String),
}

/// Matrix of u ↦ i_{g_{1/c}} u between canonical component bases of
/// S^{m−2} and S^m (rows: output components, columns: input components).
pub fn i_g_matrix(n: usize, m: usize, c: f64) -> Result<nalgebra::DMatrix<f64>, TensorError> {
    if m < 2 {
        return Err(TensorError::RankUnderflow { rank: m, needed: 2 });
    }
    let g = MinkowskiMetric::new(c, n)?.tensor();
    let cols = dim_sym(n, m - 2);
    let rows = dim_sym(n, m);
    let mut mat = nalgebra::DMatrix::zeros(rows, cols);
    for j in 0..cols {
        let mut basis = vec![0.0; cols];
        basis[j] = 1.0;
        let e = SymTensor::from_canonical(n + 1, m - 2, basis)?;
        for (i, v) in i_v(&g, &e)?.as_slice().iter().enumerate() {
            mat[(i, j)] = *v;
        }
    }
    Ok(mat)
}
