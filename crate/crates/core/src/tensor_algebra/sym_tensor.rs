use super::multi_index::{multiset_count, rank_sorted, CanonicalIter, FullIter, MultiIndex};
use super::scalar::Scalar;
use super::TensorError;
use num_complex::Complex64;

/// Dense symmetric tensor stored by canonical (sorted) multi-index.
///
/// `dim` is the number of values each slot ranges over: `n + 1` for
/// spacetime tensors on ℝ^{1+n}, `n` for purely spatial ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<T: Scalar = f64> {
    dim: usize,
    rank: usize,
    data: Vec<T>,
}

pub type ComplexTensor = SymTensor<Complex64>;

impl<T: Scalar> SymTensor<T> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        SymTensor { dim, rank, data: vec![T::default(); multiset_count(dim, rank)] }
    }

    /// Zero tensor of rank `m` over ℝ^{1+n}.
    pub fn spacetime(n: usize, m: usize) -> Self {
        Self::zeros(n + 1, m)
    }

    pub fn scalar(dim: usize, value: T) -> Self {
        SymTensor { dim, rank: 0, data: vec![value] }
    }

    /// Vector (rank 1) from its components.
    pub fn vector(values: &[T]) -> Self {
        SymTensor { dim: values.len(), rank: 1, data: values.to_vec() }
    }

    /// Build from canonical-order component values.
    pub fn from_canonical(dim: usize, rank: usize, data: Vec<T>) -> Result<Self, TensorError> {
        let expected = multiset_count(dim, rank);
        if data.len() != expected {
            return Err(TensorError::InvalidLength { expected, found: data.len() });
        }
        Ok(SymTensor { dim, rank, data })
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let data = CanonicalIter::new(dim, rank).map(|idx| f(&idx)).collect();
        SymTensor { dim, rank, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spatial dimension when this is a spacetime tensor.
    pub fn n(&self) -> usize {
        self.dim - 1
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn position(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.rank);
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        rank_sorted(self.dim, &sorted)
    }

    /// Component lookup with any ordering of the index.
    pub fn get(&self, index: &[usize]) -> T {
        self.data[self.position(index)]
    }

    pub fn set(&mut self, index: &[usize], value: T) {
        let p = self.position(index);
        self.data[p] = value;
    }

    /// Canonical multi-indices paired with component values.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, T)> + '_ {
        CanonicalIter::new(self.dim, self.rank)
            .zip(self.data.iter().copied())
            .map(|(idx, v)| (MultiIndex::new(idx), v))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SymTensor<U> {
        SymTensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn scale_by(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.rank != other.rank {
            return Err(TensorError::RankMismatch { expected: self.rank, found: other.rank });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(SymTensor { dim: self.dim, rank: self.rank, data })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(SymTensor { dim: self.dim, rank: self.rank, data })
    }

    /// Max-modulus norm ‖·‖∞ over components.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Frobenius norm over the full (unsymmetrized) index set.
    pub fn frobenius(&self) -> f64 {
        self.iter()
            .map(|(idx, v)| idx.multiplicity() as f64 * v.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Full contraction Σ_{i₁…i_m} v_{i₁}⋯v_{i_m} T_{i₁…i_m}, summed over canonical
    /// indices with multinomial weights.
    pub fn contract_all(&self, v: &[f64]) -> T {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc = T::default();
        for (idx, value) in self.iter() {
            let w: f64 = idx.entries().iter().map(|&i| v[i]).product();
            acc += value * (w * idx.multiplicity() as f64);
        }
        acc
    }

    /// Fix the last slot to `p`: (T_p)_{i₁…i_{m−1}} = T_{i₁…i_{m−1} p}.
    pub fn column(&self, p: usize) -> Result<Self, TensorError> {
        if self.rank == 0 {
            return Err(TensorError::RankUnderflow { rank: 0, needed: 1 });
        }
        if p >= self.dim {
            return Err(TensorError::IndexOutOfRange { index: p, dim: self.dim });
        }
        Ok(Self::from_fn(self.dim, self.rank - 1, |idx| {
            let mut full = idx.to_vec();
            full.push(p);
            self.get(&full)
        }))
    }

    /// Expand to all dim^rank entries in row-major order.
    pub fn to_full(&self) -> Vec<T> {
        FullIter::new(self.dim, self.rank).map(|idx| self.get(&idx)).collect()
    }
}

impl SymTensor<f64> {
    pub fn to_complex(&self) -> ComplexTensor {
        self.map(|v| Complex64::new(v, 0.0))
    }
}
