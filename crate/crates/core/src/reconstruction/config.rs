use super::ReconError;
use crate::fourier_slice::SliceSpec;
use crate::numerics::norm;
use crate::ray_transform::FdSteps;
use serde::{Deserialize, Serialize};

/// Reconstruction settings.
///
/// `phis` are fractions of δ′ = ½(δ − |ω − ω₀|). For n = 3 they are the three
/// angles (φ₁ = 0, φ₂, φ₃); for n ≥ 4 they are φ₁…φ_{n−1}, where only φ₁ is
/// scaled by δ′ and the others are absolute angles (|w_i − b| depends on φ₁
/// alone).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconConfig {
    pub n: usize,
    pub omega0: Vec<f64>,
    pub delta: f64,
    pub phis: Vec<f64>,
    pub fd_eps: f64,
    pub zeta_count: usize,
    pub zeta_radius: [f64; 2],
    /// Sampled ζ keep |ω − ω₀| ≤ rim·δ so that δ′ stays bounded below.
    pub rim: f64,
    pub seed: u64,
    pub slice: SliceSpec,
    pub steps: FdSteps,
    pub max_condition: f64,
    pub sign_probes: usize,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            n: 3,
            omega0: vec![1.0, 0.0, 0.0],
            delta: 0.2,
            phis: vec![0.0, 0.6, -0.6],
            fd_eps: 0.02,
            zeta_count: 50,
            zeta_radius: [0.5, 2.0],
            rim: 0.5,
            seed: 0,
            slice: SliceSpec::default(),
            steps: FdSteps::default(),
            max_condition: 1e8,
            sign_probes: 5,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<(), ReconError> {
        let bad = |msg: String| Err(ReconError::Config(msg));
        if self.n < 3 {
            return Err(ReconError::TwoDimensional(self.n));
        }
        if self.omega0.len() != self.n {
            return bad(format!("omega0 has {} entries, expected n = {}", self.omega0.len(), self.n));
        }
        if (norm(&self.omega0) - 1.0).abs() > 1e-12 {
            return bad("omega0 must be a unit vector".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        let expected = if self.n == 3 { 3 } else { self.n - 1 };
        if self.phis.len() != expected {
            return bad(format!("phis needs {expected} angles for n = {}, got {}", self.n, self.phis.len()));
        }
        if self.n == 3 {
            if self.phis[0] != 0.0 {
                return bad("phis[0] must be 0 for n = 3".into());
            }
            if self.phis[1..].iter().any(|p| *p == 0.0 || p.abs() >= 1.0) || self.phis[1] == self.phis[2] {
                return bad("phis[1], phis[2] must be distinct nonzero fractions in (-1, 1)".into());
            }
        } else {
            if self.phis[0] == 0.0 || self.phis[0].abs() >= 1.0 {
                return bad("phis[0] must be a nonzero fraction in (-1, 1)".into());
            }
            if self.phis.iter().any(|p| *p == 0.0) || self.phis[self.n - 2] == self.phis[self.n - 3] {
                return bad("phis must be nonzero and the last two must differ".into());
            }
        }
        if !(self.fd_eps > 0.0) {
            return bad("fd_eps must be positive".into());
        }
        let [r0, r1] = self.zeta_radius;
        if !(r0 >= 0.0 && r1 > r0) {
            return bad("zeta_radius must satisfy 0 <= r0 < r1".into());
        }
        if !(self.rim > 0.0 && self.rim <= 1.0) {
            return bad("rim must lie in (0, 1]".into());
        }
        if self.slice.nodes < 2 || !(self.slice.margin > 0.0) {
            return bad("slice needs nodes >= 2 and margin > 0".into());
        }
        if !(self.steps.first > 0.0 && self.steps.nested > 0.0) {
            return bad("finite-difference steps must be positive".into());
        }
        if self.sign_probes == 0 {
            return bad("sign_probes must be at least 1".into());
        }
        Ok(())
    }

    /// Absolute angles for a given δ′.
    pub fn angles(&self, delta_prime: f64) -> Vec<f64> {
        if self.n == 3 {
            self.phis.iter().map(|p| p * delta_prime).collect()
        } else {
            let mut a = self.phis.clone();
            a[0] *= delta_prime;
            a
        }
    }
}
