use super::geometry::{geometry, Geometry};
use super::{sample_zetas, ReconConfig, ReconError};
use crate::fourier_slice::{partial_ft, HyperplaneFrame};
use crate::phantom::PhantomField;
use crate::ray_transform::{DataOracle, QuadratureSpec, RayData};
use crate::tensor_algebra::SymTensor;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::SQRT_2;

type CVec = Vec<Complex64>;

/// Φ₃ from the n values Φ₁(R⁻¹w_j, ζ): Σ_{j,k} Φ₁_j [AᵀA]_{kj} (1, w_k).
pub fn assemble_phi3(geom: &Geometry, phi1: &[Complex64]) -> CVec {
    let lifted = geom.family.lifted();
    let ata = geom.ata();
    let mut out = vec![Complex64::new(0.0, 0.0); lifted[0].len()];
    for (k, lk) in lifted.iter().enumerate() {
        let coef: Complex64 = phi1.iter().enumerate().map(|(j, p)| p * ata[k][j]).sum();
        out.iter_mut().zip(lk).for_each(|(o, l)| *o += coef * l);
    }
    out
}

/// M⁻¹v = (v₀, Rᵀv′) for complex v.
fn pull_back(geom: &Geometry, v: &[Complex64]) -> CVec {
    let re: Vec<f64> = v[1..].iter().map(|z| z.re).collect();
    let im: Vec<f64> = v[1..].iter().map(|z| z.im).collect();
    let (re, im) = (geom.rotation.apply_inverse(&re), geom.rotation.apply_inverse(&im));
    std::iter::once(v[0]).chain(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b))).collect()
}

/// Φ₃ per channel, with the geometry it was built on.
pub fn phi3(data: &dyn RayData, zeta: &[f64], config: &ReconConfig) -> Result<(Geometry, Vec<CVec>), ReconError> {
    let geom = geometry(zeta, config)?;
    let channels = data.channels();
    let mut phi1 = vec![Vec::with_capacity(config.n); channels];
    for dir in geom.directions() {
        let frame = HyperplaneFrame::for_data(data, &dir, &config.slice)?;
        for (ch, v) in partial_ft(data, &frame, 0, zeta)?.into_iter().enumerate() {
            phi1[ch].push(v * SQRT_2);
        }
    }
    let out = phi1.iter().map(|p| assemble_phi3(&geom, p)).collect();
    Ok((geom, out))
}

/// G(ζ) = M(ζ)⁻¹Φ₃(ζ) per channel.
fn g_map(data: &dyn RayData, zeta: &[f64], config: &ReconConfig) -> Result<(Geometry, Vec<CVec>), ReconError> {
    let (geom, p3) = phi3(data, zeta, config)?;
    let g = p3.iter().map(|v| pull_back(&geom, v)).collect();
    Ok((geom, g))
}

fn shifted(zeta: &[f64], dir: &[f64], eps: f64) -> Vec<f64> {
    zeta.iter().zip(dir).map(|(z, d)| z + eps * d).collect()
}

/// Φ₄ = Σ_i ω̃_i [G(ζ + εω̃) − G(ζ − εω̃)]_i / 2ε per channel, ω̃ = (1, ω(ζ)).
pub fn phi4(data: &dyn RayData, zeta: &[f64], config: &ReconConfig) -> Result<CVec, ReconError> {
    let omega = geometry(zeta, config)?.omega;
    phi4_along(data, zeta, &omega, config)
}

fn phi4_along(data: &dyn RayData, zeta: &[f64], omega: &[f64], config: &ReconConfig) -> Result<CVec, ReconError> {
    let light: Vec<f64> = std::iter::once(1.0).chain(omega.iter().copied()).collect();
    let eps = config.fd_eps;
    let (_, plus) = g_map(data, &shifted(zeta, &light, eps), config)?;
    let (_, minus) = g_map(data, &shifted(zeta, &light, -eps), config)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| p.iter().zip(m).zip(&light).map(|((a, b), l)| (a - b) * (l / (2.0 * eps))).sum())
        .collect())
}

/// Recovered f̂(ζ) for every channel plus the pieces it was assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorEstimate {
    pub geometry: Geometry,
    pub c0: CVec,
    /// M⁻¹Φ₃ per channel.
    pub projected: Vec<CVec>,
}

impl VectorEstimate {
    /// c₀ζ + s·M⁻¹Φ₃ per channel.
    pub fn combine(&self, sign: f64) -> Vec<CVec> {
        self.c0
            .iter()
            .zip(&self.projected)
            .map(|(c0, g)| self.geometry.zeta.iter().zip(g).map(|(z, gi)| c0 * z + gi * sign).collect())
            .collect()
    }
}

pub fn reconstruct_vector(data: &dyn RayData, zeta: &[f64], config: &ReconConfig) -> Result<VectorEstimate, ReconError> {
    if data.rank() != 1 {
        return Err(ReconError::Config(format!("vector reconstruction needs rank-1 data, got rank {}", data.rank())));
    }
    let (geom, projected) = g_map(data, zeta, config)?;
    let p4 = phi4_along(data, zeta, &geom.omega, config)?;
    let frame = HyperplaneFrame::for_data(data, &geom.omega, &config.slice)?;
    let scale = Complex64::new(0.0, -2.0 * SQRT_2);
    let p2: CVec = partial_ft(data, &frame, 1, zeta)?.into_iter().map(|v| v * scale).collect();
    let c0 = p2.iter().zip(&p4).map(|(a, b)| (a - b) * 0.5).collect();
    Ok(VectorEstimate { geometry: geom, c0, projected })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignResolution {
    pub sign: i32,
    pub error_plus: f64,
    pub error_minus: f64,
}

/// Choose s ∈ {±1} in f̂ = c₀ζ + s·M⁻¹Φ₃ by comparing both against the
/// closed-form transform of a rank-1 phantom on probe points.
pub fn resolve_sign(oracle: &DataOracle, config: &ReconConfig) -> Result<SignResolution, ReconError> {
    let probe = ReconConfig { zeta_count: config.sign_probes, seed: config.seed ^ 0x5167_4e00, ..config.clone() };
    let zetas = sample_zetas(&probe)?;
    let (mut plus, mut minus) = (0.0, 0.0);
    for zeta in &zetas {
        let est = reconstruct_vector(oracle, zeta, config)?;
        let reference = oracle.phantom().fourier_ref(zeta);
        for (sign, acc) in [(1.0, &mut plus), (-1.0, &mut minus)] {
            let got = &est.combine(sign)[0];
            *acc += got.iter().enumerate().map(|(i, v)| (v - reference.get(&[i])).norm_sqr()).sum::<f64>();
        }
    }
    let sign = if plus <= minus { 1 } else { -1 };
    Ok(SignResolution { sign, error_plus: plus.sqrt(), error_minus: minus.sqrt() })
}

/// Fixed rank-1 phantom used to resolve the sign before a run.
pub fn calibration_phantom(n: usize) -> PhantomField {
    let mut coeff = vec![0.0; n + 1];
    coeff[0] = 0.7;
    coeff[1] = -0.4;
    coeff[2] = 0.5;
    let mut center = vec![0.0; n + 1];
    center[0] = 0.2;
    center[1] = -0.3;
    PhantomField::single(SymTensor::vector(&coeff), center, 1.0, 1.0).expect("valid calibration phantom")
}

pub(crate) fn calibration_oracle(n: usize) -> DataOracle {
    DataOracle::new(calibration_phantom(n), QuadratureSpec::default()).expect("default quadrature")
}

