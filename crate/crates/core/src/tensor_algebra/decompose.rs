use super::metric::MinkowskiMetric;
use super::ops::{i_v, j_op};
use super::scalar::Scalar;
use super::sym_tensor::SymTensor;
use super::TensorError;
use crate::numerics::binom;

/// Constants in J i_g u = D·i_g J u + C·u for u of rank m − 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorConstants {
    pub d: f64,
    pub c: f64,
}

/// D_m = binom(m−2,2)/binom(m,2) and C_m = (n + 2m − 3)/binom(m,2).
///
/// Contracting the metric's own slot pair yields n+1; each of the 2(m−2)
/// placements straddling a free slot yields u once more, hence n + 2m − 3.
/// binom(k, 2) = 0 for k < 2, so D vanishes for m ∈ {2, 3}.
pub fn commutator_constants(m: usize, n: usize) -> CommutatorConstants {
    assert!(m >= 2, "commutator constants need m >= 2");
    let pairs = binom(m, 2) as f64;
    CommutatorConstants {
        d: binom(m - 2, 2) as f64 / pairs,
        c: (n + 2 * m - 3) as f64 / pairs,
    }
}

/// u = trace_free + i_{g_{1/c}}(lower) with J(trace_free) = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T: Scalar> {
    pub trace_free: SymTensor<T>,
    pub lower: SymTensor<T>,
}

pub fn decompose<T: Scalar>(u: &SymTensor<T>, c: f64) -> Result<Decomposition<T>, TensorError> {
    decompose_with(u, c, commutator_constants)
}

/// Decomposition with caller-supplied commutator constants (used to
/// exercise the verification suites against corrupted constants).
pub fn decompose_with<T: Scalar>(
    u: &SymTensor<T>,
    c: f64,
    constants: impl Fn(usize, usize) -> CommutatorConstants,
) -> Result<Decomposition<T>, TensorError> {
    let m = u.rank();
    if m < 2 {
        return Err(TensorError::RankUnderflow { rank: m, needed: 2 });
    }
    let n = u.n();
    let g = MinkowskiMetric::new(c, n)?.tensor().map(T::from_real);
    // J u = (J∘i_g) f_low; solve (α + β J∘i_g) w = b level by level.
    let rhs = j_op(u, c)?;
    let lower = solve_shifted(&rhs, m, 0.0, 1.0, &g, c, &constants)?;
    let trace_free = u.try_sub(&i_v(&g, &lower)?)?;
    Ok(Decomposition { trace_free, lower })
}

/// Solve (α·I + β·J∘i_g) w = b for w of rank m − 2.
///
/// J∘i_g = C_m + D_m·i_g∘J, so applying J to both sides gives an equation of
/// the same shape for J w at rank m − 4 with α' = α + βC_m, β' = βD_m.
fn solve_shifted<T: Scalar>(
    b: &SymTensor<T>,
    m: usize,
    alpha: f64,
    beta: f64,
    g: &SymTensor<T>,
    c: f64,
    constants: &impl Fn(usize, usize) -> CommutatorConstants,
) -> Result<SymTensor<T>, TensorError> {
    let k = constants(m, b.n());
    let diag = alpha + beta * k.c;
    if diag == 0.0 {
        return Err(TensorError::Singular);
    }
    if m < 4 || k.d == 0.0 {
        return Ok(b.scale(1.0 / diag));
    }
    let jb = j_op(b, c)?;
    let jw = solve_shifted(&jb, m - 2, diag, beta * k.d, g, c, constants)?;
    let correction = i_v(g, &jw)?.scale(beta * k.d);
    Ok(b.try_sub(&correction)?.scale(1.0 / diag))
}
