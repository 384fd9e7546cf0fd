use super::vector::SignResolution;
use super::ReconError;
use crate::phantom::PhantomField;
use crate::ray_transform::{central, check_spatial, sphere_gradient, DataOracle, Envelope, FdSteps, Ray, RayData, TransformError};
use crate::tensor_algebra::SymTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type Channels = Vec<f64>;

/// Ψ₁^{(i)} for i = 1..=n at a unit-ω ray, each entry holding all channels:
///
/// Ψ₁ᵢ = (1/m)[(∇_S L^{m,k})ᵢ − ∂_{x_i}L^{m,k+1} + ωᵢ(ω·∇_x)L^{m,k+1}] + ωᵢ L^{m,k},
///
/// so that L^{m−1,k}(f_i) = −ωᵢ L^{m−1,k}(f_0) + Ψ₁ᵢ.
pub fn psi1_all(data: &dyn RayData, k: usize, ray: &Ray, h: f64) -> Result<Vec<Channels>, TransformError> {
    let m = data.rank();
    if m == 0 {
        return Err(TransformError::Rank { rank: 0, needed: 1 });
    }
    let n = ray.n();
    let value = data.eval(ray, k)?;
    let grad_s = sphere_gradient(|r| data.eval(r, k), ray, h)?;
    let dx: Vec<Channels> = (1..=n)
        .map(|p| central(|e| data.eval(&ray.shift_base(p, e), k + 1), h))
        .collect::<Result<_, _>>()?;
    let channels = value.len();
    let w_dx: Channels = (0..channels).map(|ch| (0..n).map(|p| ray.omega[p] * dx[p][ch]).sum()).collect();
    let inv_m = 1.0 / m as f64;
    Ok((0..n)
        .map(|i| {
            let wi = ray.omega[i];
            (0..channels)
                .map(|ch| inv_m * (grad_s[i][ch] - dx[i][ch] + wi * w_dx[ch]) + wi * value[ch])
                .collect()
        })
        .collect())
}

/// Single-channel Ψ₁^{(i)}, i spatial in 1..=n.
pub fn psi1(data: &dyn RayData, k: usize, i: usize, ray: &Ray, h: f64) -> Result<f64, TransformError> {
    check_spatial(i, ray.n())?;
    Ok(psi1_all(data, k, ray, h)?[i - 1][0])
}

/// L^{m−1,k}(f_0) for trace-free data (c = 1):
///
/// [Σᵢ(∇_S Ψ₁ᵢ)ᵢ − Σᵢ ∂_{x_i}Ψ₁ᵢ^{(k+1)} + Σᵢⱼ ωᵢωⱼ ∂_{x_j}Ψ₁ᵢ^{(k+1)} + (m−1)L^{m,k}] / (2m+n−3).
pub fn psi2_column0(data: &dyn RayData, k: usize, ray: &Ray, steps: FdSteps) -> Result<Channels, TransformError> {
    let m = data.rank();
    if m < 2 {
        return Err(TransformError::Rank { rank: m, needed: 2 });
    }
    let ray = ray.normalized();
    let n = ray.n();
    let channels = data.channels();
    let flat = |r: &Ray, kk: usize| -> Result<Channels, TransformError> {
        Ok(psi1_all(data, kk, r, steps.first)?.concat())
    };
    let mut total = vec![0.0; channels];
    for p in 1..=n {
        // ∂_{ω_p} of the 0-homogeneous extension is the tangential derivative
        let tangential = central(|e| flat(&ray.shift_omega(p, e).normalized(), k), steps.nested)?;
        let spatial = central(|e| flat(&ray.shift_base(p, e), k + 1), steps.nested)?;
        let wp = ray.omega[p - 1];
        for ch in 0..channels {
            total[ch] += tangential[(p - 1) * channels + ch] - spatial[(p - 1) * channels + ch];
            let along: f64 = (0..n).map(|i| ray.omega[i] * spatial[i * channels + ch]).sum();
            total[ch] += wp * along;
        }
    }
    let value = data.eval(&ray, k)?;
    let denom = (2 * m + n - 3) as f64;
    Ok(total.iter().zip(&value).map(|(t, v)| (t + (m as f64 - 1.0) * v) / denom).collect())
}

/// Column data of a trace-free rank-m source, rank m − 1. Channel
/// `parent_channel·(n+1) + p` carries L^{m−1,k}(f_p) of that parent channel.
pub struct ReducedColumns {
    parent: Arc<dyn RayData>,
    steps: FdSteps,
    psi_sign: f64,
}

pub fn reduce_rank(parent: Arc<dyn RayData>, steps: FdSteps, psi_sign: f64) -> Result<ReducedColumns, ReconError> {
    if parent.rank() < 2 {
        return Err(TransformError::Rank { rank: parent.rank(), needed: 2 }.into());
    }
    Ok(ReducedColumns { parent, steps, psi_sign })
}

impl RayData for ReducedColumns {
    fn n(&self) -> usize {
        self.parent.n()
    }

    fn rank(&self) -> usize {
        self.parent.rank() - 1
    }

    fn channels(&self) -> usize {
        self.parent.channels() * (self.n() + 1)
    }

    fn eval(&self, ray: &Ray, k: usize) -> Result<Channels, TransformError> {
        let ray = ray.normalized();
        let n = self.n();
        let col0 = psi2_column0(self.parent.as_ref(), k, &ray, self.steps)?;
        let psi = psi1_all(self.parent.as_ref(), k, &ray, self.steps.first)?;
        let mut out = Vec::with_capacity(self.channels());
        for (ch, c0) in col0.iter().enumerate() {
            out.push(*c0);
            for i in 0..n {
                out.push(-ray.omega[i] * c0 + self.psi_sign * psi[i][ch]);
            }
        }
        Ok(out)
    }

    fn envelopes(&self) -> Vec<Envelope> {
        self.parent.envelopes()
    }
}

/// Choose the sign in L^{m−1,k}(f_i) + ωᵢL^{m−1,k}(f_0) = ±Ψ₁ᵢ by comparing
/// against direct column transforms of a trace-free phantom.
pub fn resolve_psi_sign(oracle: &DataOracle, steps: FdSteps, rays: usize, seed: u64) -> Result<SignResolution, ReconError> {
    let f = oracle.phantom();
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<DataOracle> = (0..=n).map(|p| oracle.column(p)).collect::<Result<_, _>>()?;
    let (mut plus, mut minus) = (0.0, 0.0);
    for _ in 0..rays {
        let base: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut omega: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
        omega.iter_mut().for_each(|x| *x /= r);
        let ray = Ray::new(base, omega, 1.0)?;
        for k in 0..f.rank() {
            let psi = psi1_all(oracle, k, &ray, steps.first)?;
            let l0 = columns[0].value(&ray, k)?;
            for i in 1..=n {
                let lhs = columns[i].value(&ray, k)? + ray.omega[i - 1] * l0;
                plus += (lhs - psi[i - 1][0]).powi(2);
                minus += (lhs + psi[i - 1][0]).powi(2);
            }
        }
    }
    let sign = if plus <= minus { 1 } else { -1 };
    Ok(SignResolution { sign, error_plus: plus.sqrt(), error_minus: minus.sqrt() })
}

/// Fixed trace-free rank-2 phantom used to resolve the Ψ₁ sign.
pub(crate) fn psi_calibration_phantom(n: usize) -> PhantomField {
    let coeff = SymTensor::from_fn(n + 1, 2, |i| 0.3 + 0.25 * i[0] as f64 - 0.4 * i[1] as f64 + 0.1 * (i[0] * i[1]) as f64);
    let mut center = vec![0.0; n + 1];
    center[1] = 0.25;
    PhantomField::single(coeff, center, 1.0, 1.0)
        .and_then(|f| f.make_tracefree())
        .expect("valid calibration phantom")
}
