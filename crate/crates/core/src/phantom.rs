//! Analytic phantoms: sums of isotropic Gaussian envelopes with constant
//! symmetric tensor coefficients. Values, columns and Fourier transforms are
//! available in closed form.

use crate::numerics::dot;
use crate::tensor_algebra::{decompose, i_v, tensor_from_json, tensor_to_json, ComplexTensor, MinkowskiMetric, SymTensor, TensorError};
use num_complex::Complex64;
use serde_json::{Map, Value};
use std::f64::consts::PI;
use thiserror::Error;

pub const PHANTOM_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhantomError {
    #[error("term {term}: sigma must be positive and finite, got {sigma}")]
    InvalidSigma { term: usize, sigma: f64 },
    #[error("term {term}: center has {found} entries, expected {expected}")]
    CenterLength { term: usize, expected: usize, found: usize },
    #[error("term {term}: coefficient is rank {rank} over dimension {dim}, expected rank {m} over dimension {expected_dim}")]
    CoeffShape { term: usize, rank: usize, dim: usize, m: usize, expected_dim: usize },
    #[error("operation needs rank at least {needed}, phantom has rank {rank}")]
    RankTooLow { rank: usize, needed: usize },
    #[error("trace-free projection is only defined here for c = 1, got c = {0}")]
    SpeedNotUnit(f64),
    #[error("phantom spec: {0}")]
    Schema(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTerm {
    pub coeff: SymTensor,
    pub center: Vec<f64>,
    pub sigma: f64,
}

impl GaussianTerm {
    pub fn envelope(&self, point: &[f64]) -> f64 {
        let r2: f64 = point.iter().zip(&self.center).map(|(p, c)| (p - c) * (p - c)).sum();
        (-r2 / (self.sigma * self.sigma)).exp()
    }
}

/// f(z) = Σ_terms coeff · exp(−|z − center|²/σ²) on ℝ^{1+n}.
#[derive(Clone, Debug, PartialEq)]
pub struct PhantomField {
    n: usize,
    m: usize,
    c: f64,
    terms: Vec<GaussianTerm>,
}

impl PhantomField {
    pub fn new(n: usize, m: usize, c: f64, terms: Vec<GaussianTerm>) -> Result<Self, PhantomError> {
        MinkowskiMetric::new(c, n)?;
        for (t, term) in terms.iter().enumerate() {
            if !(term.sigma > 0.0 && term.sigma.is_finite()) {
                return Err(PhantomError::InvalidSigma { term: t, sigma: term.sigma });
            }
            if term.center.len() != n + 1 {
                return Err(PhantomError::CenterLength { term: t, expected: n + 1, found: term.center.len() });
            }
            if term.coeff.rank() != m || term.coeff.dim() != n + 1 {
                return Err(PhantomError::CoeffShape {
                    term: t,
                    rank: term.coeff.rank(),
                    dim: term.coeff.dim(),
                    m,
                    expected_dim: n + 1,
                });
            }
        }
        Ok(PhantomField { n, m, c, terms })
    }

    /// One origin-free Gaussian with the given coefficient.
    pub fn single(coeff: SymTensor, center: Vec<f64>, sigma: f64, c: f64) -> Result<Self, PhantomError> {
        let n = coeff.n();
        let m = coeff.rank();
        Self::new(n, m, c, vec![GaussianTerm { coeff, center, sigma }])
    }

    pub fn zero(n: usize, m: usize, c: f64) -> Self {
        PhantomField { n, m, c, terms: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    /// Largest absolute coefficient entry over all terms.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.max_abs()).fold(0.0, f64::max)
    }

    pub fn eval_field(&self, point: &[f64]) -> SymTensor {
        let mut out = SymTensor::spacetime(self.n, self.m);
        for term in &self.terms {
            out = out.try_add(&term.coeff.scale(term.envelope(point))).expect("shapes validated");
        }
        out
    }

    /// f̂(ζ) = ∫ f(z) e^{−i z·ζ} dz.
    pub fn fourier_ref(&self, zeta: &[f64]) -> ComplexTensor {
        let mut out = ComplexTensor::spacetime(self.n, self.m);
        let dims = (self.n + 1) as i32;
        let z2 = dot(zeta, zeta);
        for term in &self.terms {
            let s = term.sigma;
            let amp = (s * PI.sqrt()).powi(dims) * (-s * s * z2 / 4.0).exp();
            let phase = Complex64::from_polar(amp, -dot(zeta, &term.center));
            out = out.try_add(&term.coeff.to_complex().scale_by(phase)).expect("shapes validated");
        }
        out
    }

    pub fn column(&self, p: usize) -> Result<PhantomField, PhantomError> {
        if self.m == 0 {
            return Err(PhantomError::RankTooLow { rank: 0, needed: 1 });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(GaussianTerm { coeff: t.coeff.column(p)?, center: t.center.clone(), sigma: t.sigma }))
            .collect::<Result<Vec<_>, TensorError>>()?;
        Ok(PhantomField { n: self.n, m: self.m - 1, c: self.c, terms })
    }

    /// Scalar phantom of the single component f_{index}.
    pub fn component(&self, index: &[usize]) -> Result<PhantomField, PhantomError> {
        let mut f = self.clone();
        for &p in index.iter().rev() {
            f = f.column(p)?;
        }
        Ok(f)
    }

    /// Replace every coefficient by its trace-free part (J A = 0, c = 1).
    pub fn make_tracefree(&self) -> Result<PhantomField, PhantomError> {
        if self.m < 2 {
            return Err(PhantomError::RankTooLow { rank: self.m, needed: 2 });
        }
        if self.c != 1.0 {
            return Err(PhantomError::SpeedNotUnit(self.c));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(GaussianTerm { coeff: decompose(&t.coeff, 1.0)?.trace_free, center: t.center.clone(), sigma: t.sigma }))
            .collect::<Result<Vec<_>, TensorError>>()?;
        Ok(PhantomField { terms, ..self.clone() })
    }

    /// The field i_{g_{1/c}} h for a rank m−2 phantom h (kernel of the MLRT).
    pub fn i_g(h: &PhantomField) -> Result<PhantomField, PhantomError> {
        let g = MinkowskiMetric::new(h.c, h.n)?.tensor();
        let terms = h
            .terms
            .iter()
            .map(|t| Ok(GaussianTerm { coeff: i_v(&g, &t.coeff)?, center: t.center.clone(), sigma: t.sigma }))
            .collect::<Result<Vec<_>, TensorError>>()?;
        Ok(PhantomField { n: h.n, m: h.m + 2, c: h.c, terms })
    }

    /// α·self + other, as a concatenation of terms.
    pub fn axpy(&self, alpha: f64, other: &PhantomField) -> Result<PhantomField, PhantomError> {
        if self.n != other.n || self.m != other.m {
            return Err(TensorError::RankMismatch { expected: self.m, found: other.m }.into());
        }
        let mut terms: Vec<GaussianTerm> = self
            .terms
            .iter()
            .map(|t| GaussianTerm { coeff: t.coeff.scale(alpha), ..t.clone() })
            .collect();
        terms.extend(other.terms.iter().cloned());
        Ok(PhantomField { terms, ..self.clone() })
    }

    pub fn to_json(&self) -> Value {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut obj = Map::new();
                obj.insert("coeff".into(), tensor_to_json(&t.coeff));
                obj.insert("center".into(), Value::from(t.center.clone()));
                obj.insert("sigma".into(), Value::from(t.sigma));
                Value::Object(obj)
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("version".into(), Value::from(PHANTOM_SCHEMA_VERSION));
        obj.insert("n".into(), Value::from(self.n));
        obj.insert("m".into(), Value::from(self.m));
        obj.insert("c".into(), Value::from(self.c));
        obj.insert("terms".into(), Value::Array(terms));
        Value::Object(obj)
    }

    pub fn from_json(value: &Value) -> Result<PhantomField, PhantomError> {
        let obj = value.as_object().ok_or_else(|| schema("top level must be an object"))?;
        reject_unknown(obj, &["version", "n", "m", "c", "terms"], "phantom")?;
        if let Some(v) = obj.get("version") {
            if v.as_u64() != Some(PHANTOM_SCHEMA_VERSION) {
                return Err(schema(format!("version: unsupported value {v}, expected {PHANTOM_SCHEMA_VERSION}")));
            }
        }
        let n = get_usize(obj, "n")?;
        let m = get_usize(obj, "m")?;
        let c = match obj.get("c") {
            None => 1.0,
            Some(v) => v.as_f64().ok_or_else(|| schema("c: expected a number"))?,
        };
        if n < 1 {
            return Err(schema("n: must be at least 1"));
        }
        let raw_terms = obj
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("terms: expected an array"))?;
        let mut terms = Vec::with_capacity(raw_terms.len());
        for (t, raw) in raw_terms.iter().enumerate() {
            let tobj = raw.as_object().ok_or_else(|| schema(format!("terms[{t}]: expected an object")))?;
            reject_unknown(tobj, &["coeff", "center", "sigma"], &format!("terms[{t}]"))?;
            let coeff_v = tobj.get("coeff").ok_or_else(|| schema(format!("terms[{t}].coeff: missing")))?;
            let coeff = tensor_from_json::<f64>(coeff_v, Some((n, m)))
                .map_err(|e| schema(format!("terms[{t}].coeff: {e}")))?;
            let center = match tobj.get("center") {
                None => vec![0.0; n + 1],
                Some(v) => v
                    .as_array()
                    .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| schema(format!("terms[{t}].center: expected an array of numbers")))?,
            };
            let sigma = tobj
                .get("sigma")
                .and_then(Value::as_f64)
                .ok_or_else(|| schema(format!("terms[{t}].sigma: expected a number")))?;
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(schema(format!("terms[{t}].sigma: must be positive, got {sigma}")));
            }
            terms.push(GaussianTerm { coeff, center, sigma });
        }
        PhantomField::new(n, m, c, terms)
    }
}

fn schema(msg: impl Into<String>) -> PhantomError {
    PhantomError::Schema(msg.into())
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], at: &str) -> Result<(), PhantomError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("{at}: unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize, PhantomError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| schema(format!("{key}: expected a non-negative integer")))
}
