//! Tensor literal JSON: `{"n": …, "m": …, "components": {"0,1,1": value, …}}`.
//! Keys may be given in any order and are canonicalized; complex values are
//! `[re, im]` pairs.

use super::multi_index::MultiIndex;
use super::scalar::Scalar;
use super::sym_tensor::SymTensor;
use super::TensorError;
use num_complex::Complex64;
use serde_json::{Map, Value};

pub trait JsonScalar: Scalar {
    fn to_json(self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl JsonScalar for f64 {
    fn to_json(self) -> Value {
        Value::from(self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64()
    }
}

impl JsonScalar for Complex64 {
    fn to_json(self) -> Value {
        Value::Array(vec![Value::from(self.re), Value::from(self.im)])
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Array(pair) if pair.len() == 2 => Some(Complex64::new(pair[0].as_f64()?, pair[1].as_f64()?)),
            other => other.as_f64().map(|re| Complex64::new(re, 0.0)),
        }
    }
}

/// Serialize with every component listed under its canonical key.
pub fn tensor_to_json<T: JsonScalar>(t: &SymTensor<T>) -> Value {
    let mut components = Map::new();
    for (idx, v) in t.iter() {
        components.insert(idx.key(), v.to_json());
    }
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(t.n()));
    obj.insert("m".into(), Value::from(t.rank()));
    obj.insert("components".into(), Value::Object(components));
    Value::Object(obj)
}

/// Parse a tensor literal. `expect` optionally pins (n, m); when the literal
/// omits `n` or `m` the expected values are used.
pub fn tensor_from_json<T: JsonScalar>(
    value: &Value,
    expect: Option<(usize, usize)>,
) -> Result<SymTensor<T>, TensorError> {
    let obj = value.as_object().ok_or_else(|| TensorError::Parse("tensor literal must be an object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "n" | "m" | "components") {
            return Err(TensorError::Parse(format!("unknown field `{key}` in tensor literal")));
        }
    }
    let read = |name: &str| -> Result<Option<usize>, TensorError> {
        match obj.get(name) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| TensorError::Parse(format!("`{name}` must be a non-negative integer"))),
        }
    };
    let n = match (read("n")?, expect) {
        (Some(n), Some((en, _))) if n != en => {
            return Err(TensorError::Parse(format!("tensor n = {n} does not match expected {en}")))
        }
        (Some(n), _) => n,
        (None, Some((en, _))) => en,
        (None, None) => return Err(TensorError::Parse("missing field `n`".into())),
    };
    let m = match (read("m")?, expect) {
        (Some(m), Some((_, em))) if m != em => {
            return Err(TensorError::Parse(format!("tensor m = {m} does not match expected {em}")))
        }
        (Some(m), _) => m,
        (None, Some((_, em))) => em,
        (None, None) => return Err(TensorError::Parse("missing field `m`".into())),
    };
    if n == 0 {
        return Err(TensorError::Parse("`n` must be at least 1".into()));
    }
    let mut out = SymTensor::<T>::spacetime(n, m);
    let mut seen = vec![false; out.len()];
    let components = match obj.get("components") {
        None => return Ok(out),
        Some(Value::Object(c)) => c,
        Some(_) => return Err(TensorError::Parse("`components` must be an object".into())),
    };
    for (key, raw) in components {
        let entries = parse_key(key, m, n)?;
        let idx = MultiIndex::new(entries);
        let value = T::from_json(raw)
            .ok_or_else(|| TensorError::Parse(format!("component `{key}` has an invalid value")))?;
        let pos = out.position(idx.entries());
        if seen[pos] && out.as_slice()[pos] != value {
            return Err(TensorError::Parse(format!(
                "component `{}` given twice with different values",
                idx.key()
            )));
        }
        seen[pos] = true;
        out.set(idx.entries(), value);
    }
    Ok(out)
}

fn parse_key(key: &str, m: usize, n: usize) -> Result<Vec<usize>, TensorError> {
    let entries: Vec<usize> = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| TensorError::Parse(format!("component key `{key}` is not a comma-separated index list")))?
    };
    if entries.len() != m {
        return Err(TensorError::Parse(format!("component key `{key}` has {} indices, rank is {m}", entries.len())));
    }
    if let Some(&bad) = entries.iter().find(|&&i| i > n) {
        return Err(TensorError::Parse(format!("index {bad} in key `{key}` exceeds n = {n}")));
    }
    Ok(entries)
}
