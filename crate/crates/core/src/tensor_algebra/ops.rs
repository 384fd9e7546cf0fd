use super::multi_index::{multiset_count, rank_sorted, FullIter};
use super::scalar::Scalar;
use super::sym_tensor::SymTensor;
use super::TensorError;
use crate::numerics::binom;

/// Average a full dim^rank array over index permutations.
pub fn symmetrize<T: Scalar>(dim: usize, rank: usize, raw: &[T]) -> Result<SymTensor<T>, TensorError> {
    let expected = dim.pow(rank as u32);
    if raw.len() != expected {
        return Err(TensorError::InvalidLength { expected, found: raw.len() });
    }
    let slots = multiset_count(dim, rank);
    let mut sums = vec![T::default(); slots];
    let mut counts = vec![0usize; slots];
    for (idx, &v) in FullIter::new(dim, rank).zip(raw) {
        let mut sorted = idx;
        sorted.sort_unstable();
        let p = rank_sorted(dim, &sorted);
        sums[p] += v;
        counts[p] += 1;
    }
    let data = sums.into_iter().zip(counts).map(|(s, c)| s / c as f64).collect();
    SymTensor::from_canonical(dim, rank, data)
}

/// Symmetric product with a rank-2 tensor: (v ⊙ u), averaging the position
/// of the `v` pair over all slot pairs.
pub fn i_v<T: Scalar>(v: &SymTensor<T>, u: &SymTensor<T>) -> Result<SymTensor<T>, TensorError> {
    if v.rank() != 2 {
        return Err(TensorError::RankMismatch { expected: 2, found: v.rank() });
    }
    if v.dim() != u.dim() {
        return Err(TensorError::DimensionMismatch { left: v.dim(), right: u.dim() });
    }
    let m = u.rank() + 2;
    let pairs = binom(m, 2) as f64;
    Ok(SymTensor::from_fn(u.dim(), m, |idx| {
        let mut acc = T::default();
        let mut rest = Vec::with_capacity(m - 2);
        for a in 0..m {
            for b in (a + 1)..m {
                rest.clear();
                rest.extend(idx.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, &i)| i));
                acc += v.get(&[idx[a], idx[b]]) * u.get(&rest);
            }
        }
        acc / pairs
    }))
}

/// Contraction of the last two slots against a rank-2 tensor.
pub fn j_v<T: Scalar>(v: &SymTensor<T>, u: &SymTensor<T>) -> Result<SymTensor<T>, TensorError> {
    if v.rank() != 2 {
        return Err(TensorError::RankMismatch { expected: 2, found: v.rank() });
    }
    if u.rank() < 2 {
        return Err(TensorError::RankUnderflow { rank: u.rank(), needed: 2 });
    }
    if v.dim() != u.dim() {
        return Err(TensorError::DimensionMismatch { left: v.dim(), right: u.dim() });
    }
    let dim = u.dim();
    Ok(SymTensor::from_fn(dim, u.rank() - 2, |idx| {
        let mut acc = T::default();
        let mut full = idx.to_vec();
        full.extend([0, 0]);
        let last = full.len() - 1;
        for p in 0..dim {
            for q in 0..dim {
                let vpq = v.get(&[p, q]);
                if vpq == T::default() {
                    continue;
                }
                full[last - 1] = p;
                full[last] = q;
                acc += u.get(&full) * vpq;
            }
        }
        acc
    }))
}

/// The trace-like map J: −c²·u_{…00} + Σ_{p≥1} u_{…pp}.
pub fn j_op<T: Scalar>(u: &SymTensor<T>, c: f64) -> Result<SymTensor<T>, TensorError> {
    if u.rank() < 2 {
        return Err(TensorError::RankUnderflow { rank: u.rank(), needed: 2 });
    }
    let dim = u.dim();
    Ok(SymTensor::from_fn(dim, u.rank() - 2, |idx| {
        let mut full = idx.to_vec();
        full.extend([0, 0]);
        let last = full.len() - 1;
        let mut acc = u.get(&full) * (-c * c);
        for p in 1..dim {
            full[last - 1] = p;
            full[last] = p;
            acc += u.get(&full);
        }
        acc
    }))
}

/// σ(u ⊗ δ) with δ the identity over every slot value of `u`.
pub fn i_delta<T: Scalar>(u: &SymTensor<T>) -> SymTensor<T> {
    let delta = SymTensor::from_fn(u.dim(), 2, |idx| T::from_real(if idx[0] == idx[1] { 1.0 } else { 0.0 }));
    i_v(&delta, u).expect("identity tensor has rank 2 and matching dimension")
}

/// Contract the last two slots against δ.
pub fn j_delta<T: Scalar>(u: &SymTensor<T>) -> Result<SymTensor<T>, TensorError> {
    if u.rank() < 2 {
        return Err(TensorError::RankUnderflow { rank: u.rank(), needed: 2 });
    }
    let dim = u.dim();
    Ok(SymTensor::from_fn(dim, u.rank() - 2, |idx| {
        let mut full = idx.to_vec();
        full.extend([0, 0]);
        let last = full.len() - 1;
        let mut acc = T::default();
        for p in 0..dim {
            full[last - 1] = p;
            full[last] = p;
            acc += u.get(&full);
        }
        acc
    }))
}
