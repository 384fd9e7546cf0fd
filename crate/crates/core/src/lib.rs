//! Momentum light ray transform (MLRT) of symmetric tensor fields on
//! ℝ^{1+n}: Minkowski tensor algebra, analytic phantoms, the forward
//! transform with its derivative identities, Fourier slice quantities and
//! the restricted-aperture reconstruction pipeline.

pub mod fourier_slice;
pub mod numerics;
pub mod phantom;
pub mod ray_transform;
pub mod reconstruction;
pub mod tensor_algebra;

pub use num_complex::Complex64;
