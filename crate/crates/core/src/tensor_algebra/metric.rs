use super::sym_tensor::SymTensor;
use super::TensorError;

/// The reciprocal-speed Minkowski metric g_{1/c} = diag(−1/c², 1, …, 1) on ℝ^{1+n}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinkowskiMetric {
    c: f64,
    n: usize,
}

impl MinkowskiMetric {
    pub fn new(c: f64, n: usize) -> Result<Self, TensorError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(TensorError::InvalidSpeed(c));
        }
        if n == 0 {
            return Err(TensorError::DimensionMismatch { left: 0, right: 1 });
        }
        Ok(MinkowskiMetric { c, n })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tensor(&self) -> SymTensor<f64> {
        let c2 = self.c * self.c;
        SymTensor::from_fn(self.n + 1, 2, |idx| match (idx[0], idx[1]) {
            (0, 0) => -1.0 / c2,
            (a, b) if a == b => 1.0,
            _ => 0.0,
        })
    }

    /// ⟨a, g b⟩.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let c2 = self.c * self.c;
        -a[0] * b[0] / c2 + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
    }

    /// Light-ray direction ω̃ = (c, ω).
    pub fn null_direction(&self, omega: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(omega.len() + 1);
        out.push(self.c);
        out.extend_from_slice(omega);
        out
    }
}
