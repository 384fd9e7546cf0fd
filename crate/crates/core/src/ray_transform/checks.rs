use super::{check_spatial, directional_derivative, mlrt_domega, mlrt_dx, DataOracle, FdSteps, Ray, TransformError};

fn falling_factorial(k: usize, p: usize) -> f64 {
    (k - p + 1..=k).map(|v| v as f64).product()
}

/// |(ω̃·∇_{t,x})^p L^{m,k}f − (−1)^p k!/(k−p)! L^{m,k−p}f|.
pub fn check_moment_descent(oracle: &DataOracle, ray: &Ray, k: usize, p: usize, steps: FdSteps) -> Result<f64, TransformError> {
    if p > k {
        return Err(TransformError::OrderExceedsMoment { p, k });
    }
    if p == 0 {
        return Ok(0.0);
    }
    let h = if p == 1 { steps.first } else { steps.nested };
    let lhs = directional_derivative(oracle, ray, k, p, h)?[0];
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign * falling_factorial(k, p) * oracle.value(ray, k - p)?;
    Ok((lhs - rhs).abs())
}

/// |m L^{m−1,k}(f_p) − ∂_{ω_p}L^{m,k}f + ∂_{x_p}L^{m,k+1}f| for spatial p.
pub fn check_rank_reducer(oracle: &DataOracle, ray: &Ray, k: usize, p: usize, steps: FdSteps) -> Result<f64, TransformError> {
    let m = oracle.phantom().rank();
    if m == 0 {
        return Err(TransformError::Rank { rank: 0, needed: 1 });
    }
    check_spatial(p, ray.n())?;
    let lhs = m as f64 * oracle.column(p)?.value(ray, k)?;
    let d_omega = mlrt_domega(oracle, ray, k, p, steps.first)?[0];
    let d_x = mlrt_dx(oracle, ray, k + 1, p, steps.first)?[0];
    Ok((lhs - (d_omega - d_x)).abs())
}

/// Residual of Σ_{i,j≥1} ω_iω_j L^{0,k}(f_ij) − c² L^{0,k}(f_00) = L^{2,k}f − 2c L^{1,k}(f_0)
/// for a rank-2 phantom.
pub fn check_column_identity(oracle: &DataOracle, ray: &Ray, k: usize) -> Result<f64, TransformError> {
    let f = oracle.phantom();
    if f.rank() != 2 {
        return Err(TransformError::Rank { rank: f.rank(), needed: 2 });
    }
    let n = f.n();
    let c = ray.c;
    let mut lhs = -c * c * oracle.with_phantom(f.component(&[0, 0])?).value(ray, k)?;
    for i in 1..=n {
        for j in 1..=n {
            let wij = ray.omega[i - 1] * ray.omega[j - 1];
            if wij != 0.0 {
                lhs += wij * oracle.with_phantom(f.component(&[i, j])?).value(ray, k)?;
            }
        }
    }
    let rhs = oracle.value(ray, k)? - 2.0 * c * oracle.column(0)?.value(ray, k)?;
    Ok((lhs - rhs).abs())
}
