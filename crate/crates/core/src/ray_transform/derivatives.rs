use super::{check_spatial, Ray, RayData, TransformError};
use crate::numerics::binom;
use serde::{Deserialize, Serialize};

/// Finite-difference steps: `first` for single derivatives, `nested` for the
/// outer level of nested or higher-order differences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSteps {
    pub first: f64,
    pub nested: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps { first: 1e-4, nested: 1e-3 }
    }
}

type Channels = Vec<f64>;

fn combine(a: &[f64], b: &[f64], scale: f64) -> Channels {
    a.iter().zip(b).map(|(x, y)| (x - y) * scale).collect()
}

/// (g(h) − g(−h)) / 2h.
pub fn central<E>(g: impl Fn(f64) -> Result<Channels, E>, h: f64) -> Result<Channels, E> {
    let plus = g(h)?;
    let minus = g(-h)?;
    Ok(combine(&plus, &minus, 0.5 / h))
}

/// p-th derivative at 0 by the central stencil Σ_j (−1)^j C(p,j) g((p/2 − j)h) / h^p.
pub fn nth_central<E>(g: impl Fn(f64) -> Result<Channels, E>, p: usize, h: f64) -> Result<Channels, E> {
    let mut acc: Option<Channels> = None;
    for j in 0..=p {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign * binom(p, j) as f64 / h.powi(p as i32);
        let v = g((p as f64 / 2.0 - j as f64) * h)?;
        acc = Some(match acc {
            None => v.iter().map(|x| coef * x).collect(),
            Some(a) => a.iter().zip(&v).map(|(s, x)| s + coef * x).collect(),
        });
    }
    Ok(acc.unwrap_or_default())
}

/// ∂_{x_p} of the data, p in 1..=n.
pub fn mlrt_dx(data: &dyn RayData, ray: &Ray, k: usize, p: usize, h: f64) -> Result<Channels, TransformError> {
    check_spatial(p, ray.n())?;
    central(|e| data.eval(&ray.shift_base(p, e), k), h)
}

pub fn mlrt_dt(data: &dyn RayData, ray: &Ray, k: usize, h: f64) -> Result<Channels, TransformError> {
    central(|e| data.eval(&ray.shift_base(0, e), k), h)
}

/// ∂_{ω_p} of the extended data (ω leaves the sphere), p in 1..=n.
pub fn mlrt_domega(data: &dyn RayData, ray: &Ray, k: usize, p: usize, h: f64) -> Result<Channels, TransformError> {
    check_spatial(p, ray.n())?;
    central(|e| data.eval(&ray.shift_omega(p, e), k), h)
}

/// p-th derivative along ω̃·∇_{t,x}.
pub fn directional_derivative(data: &dyn RayData, ray: &Ray, k: usize, p: usize, h: f64) -> Result<Channels, TransformError> {
    let dir = ray.direction();
    nth_central(
        |e| {
            let base = ray.base.iter().zip(&dir).map(|(b, d)| b + e * d).collect();
            data.eval(&ray.with_base(base), k)
        },
        p,
        h,
    )
}

/// ∇_S F = ∇_ω F − (ω·∇_ω F) ω for a function F of the ray, using F's own
/// off-sphere values. Returns n entries (p = 1..=n), each holding all channels.
pub fn sphere_gradient<E>(
    f: impl Fn(&Ray) -> Result<Channels, E>,
    ray: &Ray,
    h: f64,
) -> Result<Vec<Channels>, E> {
    let n = ray.n();
    let radial = central(|e| f(&ray.with_omega(ray.omega.iter().map(|w| w * (1.0 + e)).collect())), h)?;
    (1..=n)
        .map(|p| {
            let d = central(|e| f(&ray.shift_omega(p, e)), h)?;
            Ok(d.iter().zip(&radial).map(|(a, r)| a - ray.omega[p - 1] * r).collect())
        })
        .collect()
}

/// Tangential gradient of L^{m,k} on the unit sphere.
pub fn tangential_gradient(data: &dyn RayData, ray: &Ray, k: usize, h: f64) -> Result<Vec<Channels>, TransformError> {
    ray.require_unit(1e-9)?;
    sphere_gradient(|r| data.eval(r, k), ray, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_on_polynomials() {
        let g = |x: f64| -> Result<Vec<f64>, ()> { Ok(vec![x * x * x + 2.0 * x]) };
        let d1 = central(g, 1e-3).unwrap()[0];
        assert!((d1 - 2.0).abs() < 1e-5);
        let d2 = nth_central(g, 2, 1e-3).unwrap()[0];
        assert!(d2.abs() < 1e-6);
        let d3 = nth_central(g, 3, 1e-2).unwrap()[0];
        assert!((d3 - 6.0).abs() < 1e-6);
        assert_eq!(nth_central(g, 0, 1.0).unwrap()[0], 0.0);
    }
}
