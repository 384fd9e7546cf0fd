//! Restricted-aperture reconstruction (speed c = 1, n ≥ 3).
//!
//! For a vector field, f̂ is recovered on the spacelike set
//! H_n = {ζ : ζ ⊥ (1,ω) for some ω ∈ B_n(ω₀, δ)} from the k = 0, 1 data on
//! the aperture: f̂(ζ) = c₀ζ + s·M⁻¹Φ₃ with c₀ = ½(Φ₂ − Φ₄). Trace-free
//! tensor fields of rank m are first reduced to column data of rank m − 1
//! through the Ψ₁/Ψ₂ relations, recursively down to vector fields.

mod config;
mod export;
mod geometry;
mod rank;
mod tensor;
mod vector;

pub use config::ReconConfig;
pub use export::{report_json, write_recon_csv, REPORT_SCHEMA_VERSION};
pub use geometry::{
    direction_family, geometry, gram_schmidt_basis, omega_for_zeta, rotation_m, Family, Geometry, Orthonormalized, Rotation,
};
pub use rank::{psi1, psi1_all, psi2_column0, reduce_rank, resolve_psi_sign, ReducedColumns};
pub use tensor::{reconstruct, sample_zetas, Failure, FrequencyPoint, ReconReport};
pub use vector::{
    assemble_phi3, calibration_phantom, phi3, phi4, reconstruct_vector, resolve_sign, SignResolution, VectorEstimate,
};

use crate::fourier_slice::SliceError;
use crate::phantom::PhantomError;
use crate::ray_transform::TransformError;
use crate::tensor_algebra::TensorError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("zeta is not spacelike: |zeta_0| = {time} >= |zeta'| = {space}")]
    NotSpacelike { time: f64, space: f64 },
    #[error("omega0 is parallel to zeta'; the closest admissible direction is not unique")]
    DegenerateAxis,
    #[error("direction lies outside the aperture: |omega - omega0| = {distance} >= delta = {delta}")]
    OutsidePatch { distance: f64, delta: f64 },
    #[error("omega is parallel to zeta'; rotation is undefined")]
    ParallelDirection,
    #[error("direction family is degenerate: Gram condition number {condition:e}")]
    DegenerateFamily { condition: f64 },
    #[error("the reconstruction needs n >= 3; it does not hold in two dimensions (n = {0})")]
    TwoDimensional(usize),
    #[error("reconstruction config: {0}")]
    Config(String),
    #[error("zeta sampling: {0}")]
    Sampling(String),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Phantom(#[from] PhantomError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
