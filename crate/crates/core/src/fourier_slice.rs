//! Partial Fourier transforms of ray data over the hyperplane (1,ω)^⊥ and the
//! slice quantities Φ₁, Φ₂ (speed c = 1).
//!
//! With the convention f̂(ζ) = ∫ f(z) e^{−iz·ζ} dz and ζ ⊥ (1,ω):
//!
//! - Φ₁ = √2 𝓕(L^{1,0}f) satisfies Φ₁ = (1,ω)·f̂(ζ);
//! - Φ₂ = −i 2√2 𝓕(L^{1,1}f) satisfies Φ₂ = Σ_j ω̃_j (ω̃·∇_ζ) f̂_j(ζ).

use crate::numerics::{dot, norm, pairwise_sum};
use crate::ray_transform::{Ray, RayData, TransformError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliceError {
    #[error("omega must be a unit vector, |omega| = {0}")]
    NonUnitOmega(f64),
    #[error("zeta is not in the hyperplane (1,omega)^perp: |zeta·(1,omega)| = {residual}")]
    NotInHyperplane { residual: f64 },
    #[error("slice grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Hyperplane quadrature settings: `nodes` trapezoid nodes per frame axis on
/// [−Y, Y], Y = margin·σ + |projected center| maximized over envelopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub nodes: usize,
    pub margin: f64,
}

impl Default for SliceSpec {
    fn default() -> Self {
        SliceSpec { nodes: 24, margin: 8.0 }
    }
}

/// Orthonormal basis of (1,ω)^⊥ ⊂ ℝ^{1+n} with a trapezoid grid on it.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneFrame {
    pub omega: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub extent: f64,
    pub nodes: usize,
}

pub fn hyperplane_frame(omega: &[f64], extent: f64, nodes: usize) -> Result<HyperplaneFrame, SliceError> {
    let r = norm(omega);
    if (r - 1.0).abs() > 1e-12 {
        return Err(SliceError::NonUnitOmega(r));
    }
    if nodes < 2 || !(extent > 0.0) {
        return Err(SliceError::Grid(format!("need nodes >= 2 and extent > 0, got {nodes}, {extent}")));
    }
    let dim = omega.len() + 1;
    let mut nu = vec![1.0 / SQRT_2];
    nu.extend(omega.iter().map(|w| w / SQRT_2));
    let candidates: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| (i == j) as u8 as f64 - nu[i] * nu[j]).collect())
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| norm(&candidates[b]).total_cmp(&norm(&candidates[a])));
    let mut chosen: Vec<(usize, Vec<f64>)> = Vec::with_capacity(dim - 1);
    for &i in order.iter().take(dim - 1) {
        let mut v = candidates[i].clone();
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for q in std::iter::once(&nu).chain(chosen.iter().map(|(_, q)| q)) {
                let p = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
            }
        }
        let len = norm(&v);
        chosen.push((i, v.iter().map(|x| x / len).collect()));
    }
    chosen.sort_by_key(|(i, _)| *i);
    Ok(HyperplaneFrame {
        omega: omega.to_vec(),
        basis: chosen.into_iter().map(|(_, v)| v).collect(),
        extent,
        nodes,
    })
}

impl HyperplaneFrame {
    /// Frame sized for the envelopes of `data`.
    pub fn for_data(data: &dyn RayData, omega: &[f64], spec: &SliceSpec) -> Result<Self, SliceError> {
        let mut nu = vec![1.0];
        nu.extend_from_slice(omega);
        let nu2 = dot(&nu, &nu);
        let extent = data
            .envelopes()
            .iter()
            .map(|e| {
                let a = dot(&e.center, &nu) / nu2;
                let projected: Vec<f64> = e.center.iter().zip(&nu).map(|(c, v)| c - a * v).collect();
                spec.margin * e.sigma + norm(&projected)
            })
            .fold(0.0, f64::max);
        hyperplane_frame(omega, if extent > 0.0 { extent } else { spec.margin }, spec.nodes)
    }

    /// Grid points on the hyperplane and their tensor-product trapezoid weights.
    pub fn grid(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.basis.len();
        let h = 2.0 * self.extent / (self.nodes - 1) as f64;
        let axis_w = |i: usize| if i == 0 || i == self.nodes - 1 { h / 2.0 } else { h };
        let total = self.nodes.pow(n as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let mut p = vec![0.0; n + 1];
            let mut w = 1.0;
            for (a, &i) in idx.iter().enumerate() {
                let u = -self.extent + i as f64 * h;
                p.iter_mut().zip(&self.basis[a]).for_each(|(x, b)| *x += u * b);
                w *= axis_w(i);
            }
            points.push(p);
            weights.push(w);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < self.nodes {
                    break;
                }
                *slot = 0;
            }
        }
        (points, weights)
    }

    fn check_zeta(&self, zeta: &[f64]) -> Result<(), SliceError> {
        let residual = (zeta[0] + dot(&zeta[1..], &self.omega)).abs();
        if residual > 1e-10 * norm(zeta).max(1e-300) && residual > 0.0 {
            return Err(SliceError::NotInHyperplane { residual });
        }
        Ok(())
    }
}

/// ∫_{(1,ω)^⊥} g(l) e^{−il·ζ} dH(l) for each ζ, where g(l) = L^{m,k}f(l, ω);
/// result indexed [ζ][channel].
pub fn partial_ft_many(
    data: &dyn RayData,
    frame: &HyperplaneFrame,
    k: usize,
    zetas: &[Vec<f64>],
) -> Result<Vec<Vec<Complex64>>, SliceError> {
    for z in zetas {
        frame.check_zeta(z)?;
    }
    let (points, weights) = frame.grid();
    let samples: Vec<Vec<f64>> = points
        .par_iter()
        .zip(weights.par_iter())
        .map(|(p, &w)| {
            let ray = Ray { base: p.clone(), omega: frame.omega.clone(), c: 1.0 };
            data.eval(&ray, k).map(|v| v.into_iter().map(|x| x * w).collect())
        })
        .collect::<Result<_, _>>()?;
    let channels = data.channels();
    Ok(zetas
        .iter()
        .map(|zeta| {
            let phases: Vec<Complex64> = points.iter().map(|p| Complex64::from_polar(1.0, -dot(p, zeta))).collect();
            (0..channels)
                .map(|ch| {
                    let terms: Vec<Complex64> = samples.iter().zip(&phases).map(|(s, e)| e * s[ch]).collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect())
}

pub fn partial_ft(data: &dyn RayData, frame: &HyperplaneFrame, k: usize, zeta: &[f64]) -> Result<Vec<Complex64>, SliceError> {
    Ok(partial_ft_many(data, frame, k, &[zeta.to_vec()])?.remove(0))
}

/// Φ₁ per channel.
pub fn phi1(data: &dyn RayData, omega: &[f64], zeta: &[f64], spec: &SliceSpec) -> Result<Vec<Complex64>, SliceError> {
    let frame = HyperplaneFrame::for_data(data, omega, spec)?;
    Ok(partial_ft(data, &frame, 0, zeta)?.into_iter().map(|v| v * SQRT_2).collect())
}

/// Φ₂ per channel.
pub fn phi2(data: &dyn RayData, omega: &[f64], zeta: &[f64], spec: &SliceSpec) -> Result<Vec<Complex64>, SliceError> {
    let frame = HyperplaneFrame::for_data(data, omega, spec)?;
    let scale = Complex64::new(0.0, -2.0 * SQRT_2);
    Ok(partial_ft(data, &frame, 1, zeta)?.into_iter().map(|v| v * scale).collect())
}

pub struct SliceRow {
    pub zeta: Vec<f64>,
    pub omega: Vec<f64>,
    pub phi1: Complex64,
    pub phi2: Complex64,
}

/// CSV with columns zeta0..zetan, re/im of Φ₁ and Φ₂, omega1..omegan.
pub fn write_slice_csv<W: Write>(out: W, n: usize, rows: &[SliceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..=n).map(|i| format!("zeta{i}")).collect();
    header.extend(["re_phi1", "im_phi1", "re_phi2", "im_phi2"].map(String::from));
    header.extend((1..=n).map(|i| format!("omega{i}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.zeta.iter().map(f64::to_string).collect();
        rec.extend([r.phi1.re, r.phi1.im, r.phi2.re, r.phi2.im].map(|v| v.to_string()));
        rec.extend(r.omega.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
