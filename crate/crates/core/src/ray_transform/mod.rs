//! Forward momentum light ray transform
//!
//! L^{m,k}f((t,x),ω) = Σ ω̃_{i₁}⋯ω̃_{i_m} ∫ s^k f_{i₁…i_m}((t,x) + sω̃) ds, ω̃ = (c, ω),
//!
//! evaluated by line quadrature, together with the finite-difference
//! operators acting on data (∂_t, ∂_x, ∂_ω, the tangential gradient on the
//! sphere) and residual checks for the identities those operators satisfy.

mod checks;
mod derivatives;
mod export;
mod oracle;

pub use checks::{check_column_identity, check_moment_descent, check_rank_reducer};
pub use derivatives::{
    central, directional_derivative, mlrt_domega, mlrt_dt, mlrt_dx, nth_central, sphere_gradient,
    tangential_gradient, FdSteps,
};
pub use export::{write_data_csv, DataRow};
pub use oracle::{mlrt_eval, DataOracle, QuadratureSpec, Rule};

use crate::numerics::norm;
use crate::phantom::PhantomError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("direction omega must be nonzero")]
    ZeroOmega,
    #[error("direction omega must have unit length, |omega| = {0}")]
    NonUnitOmega(f64),
    #[error("ray has {found} spacetime coordinates, data expects {expected}")]
    RayDimension { expected: usize, found: usize },
    #[error("derivative order p = {p} exceeds moment k = {k}")]
    OrderExceedsMoment { p: usize, k: usize },
    #[error("spatial index {0} outside 1..=n")]
    SpatialIndex(usize),
    #[error("operation needs rank {needed}, data has rank {rank}")]
    Rank { rank: usize, needed: usize },
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Phantom(#[from] PhantomError),
}

/// Line (t,x) + s(c, ω) in ℝ^{1+n}.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    pub base: Vec<f64>,
    pub omega: Vec<f64>,
    pub c: f64,
}

impl Ray {
    pub fn new(base: Vec<f64>, omega: Vec<f64>, c: f64) -> Result<Self, TransformError> {
        if base.len() != omega.len() + 1 {
            return Err(TransformError::RayDimension { expected: omega.len() + 1, found: base.len() });
        }
        if norm(&omega) == 0.0 {
            return Err(TransformError::ZeroOmega);
        }
        Ok(Ray { base, omega, c })
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    /// ω̃ = (c, ω).
    pub fn direction(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.omega.len() + 1);
        d.push(self.c);
        d.extend_from_slice(&self.omega);
        d
    }

    pub fn with_base(&self, base: Vec<f64>) -> Ray {
        Ray { base, ..self.clone() }
    }

    pub fn with_omega(&self, omega: Vec<f64>) -> Ray {
        Ray { omega, ..self.clone() }
    }

    /// Base point moved by `eps` along spacetime axis `axis` (0 = t).
    pub fn shift_base(&self, axis: usize, eps: f64) -> Ray {
        let mut base = self.base.clone();
        base[axis] += eps;
        self.with_base(base)
    }

    /// ω_p moved by `eps`, p spatial in 1..=n.
    pub fn shift_omega(&self, p: usize, eps: f64) -> Ray {
        let mut omega = self.omega.clone();
        omega[p - 1] += eps;
        self.with_omega(omega)
    }

    /// Same ray with ω projected radially onto the unit sphere.
    pub fn normalized(&self) -> Ray {
        let r = norm(&self.omega);
        self.with_omega(self.omega.iter().map(|w| w / r).collect())
    }

    pub fn require_unit(&self, tol: f64) -> Result<(), TransformError> {
        let r = norm(&self.omega);
        if (r - 1.0).abs() > tol {
            return Err(TransformError::NonUnitOmega(r));
        }
        Ok(())
    }
}

/// Gaussian envelope of a data source: center and width in spacetime units.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub center: Vec<f64>,
    pub sigma: f64,
}

/// Anything that produces MLRT-type data at arbitrary rays: the phantom
/// oracle itself or data derived from it (rank-reduced columns). A source
/// may carry several channels evaluated together.
pub trait RayData: Send + Sync {
    fn n(&self) -> usize;
    fn rank(&self) -> usize;
    fn channels(&self) -> usize {
        1
    }
    fn eval(&self, ray: &Ray, k: usize) -> Result<Vec<f64>, TransformError>;
    /// Envelopes of the underlying field, used to size integration grids.
    fn envelopes(&self) -> Vec<Envelope>;
}

/// Spatial slot indices run over 1..=n.
pub fn check_spatial(p: usize, n: usize) -> Result<(), TransformError> {
    if p == 0 || p > n {
        return Err(TransformError::SpatialIndex(p));
    }
    Ok(())
}
