use super::geometry::geometry;
use super::rank::{psi_calibration_phantom, reduce_rank, resolve_psi_sign};
use super::vector::{calibration_oracle, reconstruct_vector, resolve_sign, SignResolution};
use super::{ReconConfig, ReconError};
use crate::numerics::norm;
use crate::ray_transform::{DataOracle, RayData};
use crate::tensor_algebra::{j_op, ComplexTensor, MultiIndex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

const MAX_SAMPLING_ATTEMPTS: usize = 1_000_000;

/// Rejection sampling of H_n: ζ uniform in the annulus r₀ ≤ |ζ| ≤ r₁, kept
/// when ζ and both Φ₄ stencil points ζ ± εω̃ have a valid geometry with
/// |ω − ω₀| ≤ rim·δ.
pub fn sample_zetas(config: &ReconConfig) -> Result<Vec<Vec<f64>>, ReconError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = config.n + 1;
    let [r0, r1] = config.zeta_radius;
    let (lo, hi) = (r0.powi(dim as i32), r1.powi(dim as i32));
    let mut out = Vec::with_capacity(config.zeta_count);
    let mut attempts = 0;
    while out.len() < config.zeta_count {
        attempts += 1;
        if attempts > MAX_SAMPLING_ATTEMPTS {
            return Err(ReconError::Sampling(format!(
                "only {} of {} admissible points after {MAX_SAMPLING_ATTEMPTS} draws",
                out.len(),
                config.zeta_count
            )));
        }
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = norm(&dir);
        let radius = (lo + rng.gen::<f64>() * (hi - lo)).powf(1.0 / dim as f64);
        let zeta: Vec<f64> = dir.iter().map(|d| d * radius / len).collect();
        if admissible(&zeta, config) {
            out.push(zeta);
        }
    }
    Ok(out)
}

fn admissible(zeta: &[f64], config: &ReconConfig) -> bool {
    let Ok(geom) = geometry(zeta, config) else { return false };
    let near = |omega: &[f64]| {
        let d: Vec<f64> = omega.iter().zip(&config.omega0).map(|(a, b)| a - b).collect();
        norm(&d) <= config.rim * config.delta
    };
    if !near(&geom.omega) {
        return false;
    }
    let light: Vec<f64> = std::iter::once(1.0).chain(geom.omega.iter().copied()).collect();
    [-1.0, 1.0].iter().all(|s| {
        let z: Vec<f64> = zeta.iter().zip(&light).map(|(a, l)| a + s * config.fd_eps * l).collect();
        geometry(&z, config).map(|g| near(&g.omega)).unwrap_or(false)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyPoint {
    pub zeta: Vec<f64>,
    pub omega: Vec<f64>,
    /// Canonical-order components.
    pub recovered: Vec<Complex64>,
    pub reference: Vec<Complex64>,
    pub rel_error: f64,
    pub family_cond: f64,
    /// Largest disagreement between estimates of one component reached
    /// through different column paths.
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub index: usize,
    pub zeta: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconReport {
    pub n: usize,
    pub rank: usize,
    pub sign: SignResolution,
    pub psi_sign: Option<SignResolution>,
    /// Whether every phantom coefficient satisfied J A = 0; the reference is
    /// always the transform of the trace-free part.
    pub input_trace_free: bool,
    pub points: Vec<FrequencyPoint>,
    pub failures: Vec<Failure>,
    /// RMS of the per-point relative errors.
    pub aggregate_rel_error: f64,
    pub max_family_cond: f64,
    pub max_spread: f64,
    pub max_recovered_abs: f64,
}

fn frobenius_c(t: &ComplexTensor) -> f64 {
    t.frobenius()
}

/// Full pipeline for a rank-m phantom (m ≥ 1): resolve signs, reduce to
/// vector data, recover f̂ on sampled ζ ∈ H_n and compare with the
/// closed-form transform of the trace-free part.
pub fn reconstruct(oracle: &DataOracle, config: &ReconConfig) -> Result<ReconReport, ReconError> {
    config.validate()?;
    let phantom = oracle.phantom();
    let (n, m) = (phantom.n(), phantom.rank());
    if n != config.n {
        return Err(ReconError::Config(format!("phantom has n = {n}, config has n = {}", config.n)));
    }
    if n < 3 {
        return Err(ReconError::TwoDimensional(n));
    }
    if m == 0 {
        return Err(ReconError::Config("rank-0 data has no reconstruction pipeline here".into()));
    }
    if phantom.c() != 1.0 {
        return Err(ReconError::Config(format!("reconstruction needs c = 1, phantom has c = {}", phantom.c())));
    }

    let sign = resolve_sign(&calibration_oracle(n), config)?;
    let mut psi_sign = None;
    let mut data: Arc<dyn RayData> = Arc::new(oracle.clone());
    let reference_phantom = if m >= 2 {
        let calib = oracle.with_phantom(psi_calibration_phantom(n));
        let resolved = resolve_psi_sign(&calib, config.steps, 5, config.seed ^ 0x7073_6931)?;
        for _ in 0..m - 1 {
            data = Arc::new(reduce_rank(data, config.steps, resolved.sign as f64)?);
        }
        psi_sign = Some(resolved);
        phantom.make_tracefree()?
    } else {
        phantom.clone()
    };
    let input_trace_free = m < 2
        || phantom
            .terms()
            .iter()
            .all(|t| j_op(&t.coeff, 1.0).map(|j| j.max_abs() <= 1e-12 * t.coeff.max_abs().max(1e-300)).unwrap_or(false));
    let fourier_scale: f64 = reference_phantom
        .terms()
        .iter()
        .map(|t| t.coeff.frobenius() * (t.sigma * std::f64::consts::PI.sqrt()).powi(n as i32 + 1))
        .sum();

    let zetas = sample_zetas(config)?;
    let results: Vec<Result<FrequencyPoint, ReconError>> = zetas
        .par_iter()
        .map(|zeta| {
            let est = reconstruct_vector(data.as_ref(), zeta, config)?;
            let per_channel = est.combine(sign.sign as f64);
            let (recovered, spread) = assemble(n, m, &per_channel);
            let reference = reference_phantom.fourier_ref(zeta);
            let diff = recovered.try_sub(&reference)?;
            let denom = frobenius_c(&reference).max(1e-3 * fourier_scale);
            let rel_error = if denom > 0.0 { frobenius_c(&diff) / denom } else { frobenius_c(&diff) };
            Ok(FrequencyPoint {
                zeta: zeta.clone(),
                omega: est.geometry.omega.clone(),
                recovered: recovered.as_slice().to_vec(),
                reference: reference.as_slice().to_vec(),
                rel_error,
                family_cond: est.geometry.family.condition,
                spread,
            })
        })
        .collect();

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (index, (zeta, r)) in zetas.iter().zip(results).enumerate() {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push(Failure { index, zeta: zeta.clone(), reason: e.to_string() }),
        }
    }
    let aggregate_rel_error = if points.is_empty() {
        f64::NAN
    } else {
        (points.iter().map(|p| p.rel_error * p.rel_error).sum::<f64>() / points.len() as f64).sqrt()
    };
    let max_of = |f: &dyn Fn(&FrequencyPoint) -> f64| points.iter().map(f).fold(0.0, f64::max);
    Ok(ReconReport {
        n,
        rank: m,
        sign,
        psi_sign,
        input_trace_free,
        aggregate_rel_error,
        max_family_cond: max_of(&|p| p.family_cond),
        max_spread: max_of(&|p| p.spread),
        max_recovered_abs: max_of(&|p| p.recovered.iter().map(|v| v.norm()).fold(0.0, f64::max)),
        points,
        failures,
    })
}

/// Average the per-path estimates into one symmetric tensor. Channel
/// `c = ((p₁(n+1) + p₂)(n+1) + …)` carries the vector f_{· p_{m−1} … p₁}.
fn assemble(n: usize, m: usize, per_channel: &[Vec<Complex64>]) -> (ComplexTensor, f64) {
    let dim = n + 1;
    let mut sums = ComplexTensor::spacetime(n, m);
    let mut counts = vec![0usize; sums.len()];
    let mut samples: Vec<Vec<Complex64>> = vec![Vec::new(); sums.len()];
    for (c, vector) in per_channel.iter().enumerate() {
        let mut path = Vec::with_capacity(m - 1);
        let mut rest = c;
        for _ in 0..m - 1 {
            path.push(rest % dim);
            rest /= dim;
        }
        for (i, v) in vector.iter().enumerate() {
            let mut idx = path.clone();
            idx.push(i);
            let pos = sums.position(&idx);
            let key = MultiIndex::new(idx.clone());
            let current = sums.get(key.entries());
            sums.set(key.entries(), current + v);
            counts[pos] += 1;
            samples[pos].push(*v);
        }
    }
    let mut spread = 0.0f64;
    for s in &samples {
        for a in s {
            for b in s {
                spread = spread.max((a - b).norm());
            }
        }
    }
    let averaged = ComplexTensor::from_canonical(
        dim,
        m,
        sums.as_slice().iter().zip(&counts).map(|(s, c)| s / *c as f64).collect(),
    )
    .expect("shape preserved");
    (averaged, spread)
}
