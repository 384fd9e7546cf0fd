use super::{Envelope, Ray, RayData, TransformError};
use crate::numerics::{dot, gauss_legendre, pairwise_sum};
use crate::phantom::PhantomField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    GaussLegendre,
    Trapezoid,
}

/// Line quadrature. Each Gaussian term is integrated over its own window
/// s* ± halfwidth·σ/|ω̃| around the point of closest approach s*.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub nodes: usize,
    /// Window half-width in units of the term width σ.
    pub halfwidth: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: Rule::GaussLegendre, nodes: 64, halfwidth: 6.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), TransformError> {
        if self.nodes < 16 {
            return Err(TransformError::Quadrature(format!("nodes must be at least 16, got {}", self.nodes)));
        }
        if !(self.halfwidth >= 6.0 && self.halfwidth.is_finite()) {
            return Err(TransformError::Quadrature(format!(
                "halfwidth must cover 6 sigma, got {}",
                self.halfwidth
            )));
        }
        Ok(())
    }

    /// Nodes and weights on [−1, 1].
    fn reference_rule(&self) -> (Vec<f64>, Vec<f64>) {
        match self.rule {
            Rule::GaussLegendre => gauss_legendre(self.nodes),
            Rule::Trapezoid => {
                let h = 2.0 / (self.nodes - 1) as f64;
                let x = (0..self.nodes).map(|i| -1.0 + i as f64 * h).collect();
                let w = (0..self.nodes)
                    .map(|i| if i == 0 || i == self.nodes - 1 { h / 2.0 } else { h })
                    .collect();
                (x, w)
            }
        }
    }
}

/// Phantom plus quadrature: the evaluable forward model.
#[derive(Clone, Debug)]
pub struct DataOracle {
    phantom: PhantomField,
    quad: QuadratureSpec,
    noise_sigma: f64,
    seed: u64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DataOracle {
    pub fn new(phantom: PhantomField, quad: QuadratureSpec) -> Result<Self, TransformError> {
        quad.validate()?;
        let (nodes, weights) = quad.reference_rule();
        Ok(DataOracle { phantom, quad, noise_sigma: 0.0, seed: 0, nodes, weights })
    }

    pub fn with_noise(mut self, noise_sigma: f64, seed: u64) -> Self {
        self.noise_sigma = noise_sigma;
        self.seed = seed;
        self
    }

    pub fn phantom(&self) -> &PhantomField {
        &self.phantom
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Same quadrature and noise applied to another phantom.
    pub fn with_phantom(&self, phantom: PhantomField) -> DataOracle {
        DataOracle { phantom, ..self.clone() }
    }

    pub fn column(&self, p: usize) -> Result<DataOracle, TransformError> {
        Ok(self.with_phantom(self.phantom.column(p)?))
    }

    pub fn value(&self, ray: &Ray, k: usize) -> Result<f64, TransformError> {
        let n = self.phantom.n();
        if ray.base.len() != n + 1 || ray.omega.len() != n {
            return Err(TransformError::RayDimension { expected: n + 1, found: ray.base.len() });
        }
        if ray.omega.iter().all(|&w| w == 0.0) {
            return Err(TransformError::ZeroOmega);
        }
        let dir = ray.direction();
        let dir2 = dot(&dir, &dir);
        let dir_len = dir2.sqrt();
        let mut per_term = Vec::with_capacity(self.phantom.terms().len());
        let mut samples = vec![0.0; self.nodes.len()];
        for term in self.phantom.terms() {
            let weight = term.coeff.contract_all(&dir);
            if weight == 0.0 {
                per_term.push(0.0);
                continue;
            }
            let d: Vec<f64> = ray.base.iter().zip(&term.center).map(|(b, c)| b - c).collect();
            let d_dir = dot(&d, &dir);
            let d2 = dot(&d, &d);
            let s_star = -d_dir / dir2;
            let half = self.quad.halfwidth * term.sigma / dir_len;
            let inv_s2 = 1.0 / (term.sigma * term.sigma);
            for (slot, (&x, &w)) in samples.iter_mut().zip(self.nodes.iter().zip(&self.weights)) {
                let s = s_star + half * x;
                let r2 = d2 + 2.0 * s * d_dir + s * s * dir2;
                *slot = w * s.powi(k as i32) * (-r2 * inv_s2).exp();
            }
            per_term.push(weight * half * pairwise_sum(&samples));
        }
        let mut value = pairwise_sum(&per_term);
        if self.noise_sigma > 0.0 {
            value += self.noise_sigma * self.noise_sample(ray, k);
        }
        Ok(value)
    }

    fn noise_sample(&self, ray: &Ray, k: usize) -> f64 {
        let mut h = splitmix(self.seed ^ 0x6c69_6768_7472_6179);
        for v in ray.base.iter().chain(&ray.omega).chain(std::iter::once(&ray.c)) {
            h = splitmix(h ^ v.to_bits());
        }
        h = splitmix(h ^ k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        StandardNormal.sample(&mut rng)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// L^{m,k}f at one ray.
pub fn mlrt_eval(oracle: &DataOracle, ray: &Ray, k: usize) -> Result<f64, TransformError> {
    oracle.value(ray, k)
}

impl RayData for DataOracle {
    fn n(&self) -> usize {
        self.phantom.n()
    }

    fn rank(&self) -> usize {
        self.phantom.rank()
    }

    fn eval(&self, ray: &Ray, k: usize) -> Result<Vec<f64>, TransformError> {
        Ok(vec![self.value(ray, k)?])
    }

    fn envelopes(&self) -> Vec<Envelope> {
        self.phantom
            .terms()
            .iter()
            .map(|t| Envelope { center: t.center.clone(), sigma: t.sigma })
            .collect()
    }
}
