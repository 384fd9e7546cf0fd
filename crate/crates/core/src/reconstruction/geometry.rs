use super::{ReconConfig, ReconError};
use crate::numerics::{dot, norm};
use nalgebra::DMatrix;

/// ω ∈ 𝕊^{n−1} with ζ ⊥ (1,ω) closest to ω₀.
pub fn omega_for_zeta(zeta: &[f64], omega0: &[f64], delta: f64) -> Result<Vec<f64>, ReconError> {
    let space = norm(&zeta[1..]);
    if zeta[0].abs() >= space {
        return Err(ReconError::NotSpacelike { time: zeta[0].abs(), space });
    }
    let a = -zeta[0] / space;
    let u: Vec<f64> = zeta[1..].iter().map(|z| z / space).collect();
    let proj = dot(omega0, &u);
    let w: Vec<f64> = omega0.iter().zip(&u).map(|(o, ui)| o - proj * ui).collect();
    let wn = norm(&w);
    if wn < 1e-12 {
        return Err(ReconError::DegenerateAxis);
    }
    let scale = (1.0 - a * a).sqrt() / wn;
    let omega: Vec<f64> = u.iter().zip(&w).map(|(ui, wi)| a * ui + scale * wi).collect();
    let distance = norm(&omega.iter().zip(omega0).map(|(x, y)| x - y).collect::<Vec<_>>());
    if distance >= delta {
        return Err(ReconError::OutsidePatch { distance, delta });
    }
    Ok(omega)
}

/// R (rows), M = blockdiag(1, R) and b = Rω.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    pub r: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Rotation {
    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn m_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| match (i, j) {
                        (0, 0) => 1.0,
                        (0, _) | (_, 0) => 0.0,
                        _ => self.r[i - 1][j - 1],
                    })
                    .collect()
            })
            .collect()
    }

    /// R v.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.r.iter().map(|row| dot(row, v)).collect()
    }

    /// R⁻¹ v = Rᵀ v.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (row, vi) in self.r.iter().zip(v) {
            out.iter_mut().zip(row).for_each(|(o, r)| *o += r * vi);
        }
        out
    }

    /// M v for v ∈ ℝ^{1+n}.
    pub fn apply_m(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![v[0]];
        out.extend(self.apply(&v[1..]));
        out
    }

    pub fn determinant(&self) -> f64 {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.r[i][j]).determinant()
    }
}

pub fn rotation_m(zeta: &[f64], omega: &[f64]) -> Result<Rotation, ReconError> {
    let n = omega.len();
    let space = norm(&zeta[1..]);
    if space == 0.0 {
        return Err(ReconError::ParallelDirection);
    }
    let v2: Vec<f64> = zeta[1..].iter().map(|z| z / space).collect();
    let p = dot(omega, &v2);
    let v1: Vec<f64> = omega.iter().zip(&v2).map(|(o, v)| o - p * v).collect();
    let l1 = norm(&v1);
    if l1 < 1e-12 {
        return Err(ReconError::ParallelDirection);
    }
    let mut rows = vec![v1.iter().map(|x| x / l1).collect::<Vec<_>>(), v2];
    // complete with the standard vector of largest residual at each step
    while rows.len() < n {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for e in 0..n {
            let mut v: Vec<f64> = (0..n).map(|j| (j == e) as u8 as f64).collect();
            for _ in 0..2 {
                for q in &rows {
                    let c = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let len = norm(&v);
            if best.as_ref().is_none_or(|(l, _)| len > *l + 1e-12) {
                best = Some((len, v.iter().map(|x| x / len).collect()));
            }
        }
        rows.push(best.expect("n >= 1").1);
    }
    let mut rot = Rotation { r: rows, b: Vec::new() };
    if rot.determinant() < 0.0 {
        let last = rot.r.last_mut().expect("n >= 3");
        last.iter_mut().for_each(|x| *x = -*x);
    }
    rot.b = rot.apply(omega);
    for bj in rot.b.iter_mut().skip(2) {
        *bj = 0.0;
    }
    Ok(rot)
}

/// The n directions w_i and the Gram condition number of {(1, w_i)}.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub w: Vec<Vec<f64>>,
    pub condition: f64,
}

impl Family {
    pub fn lifted(&self) -> Vec<Vec<f64>> {
        self.w
            .iter()
            .map(|w| std::iter::once(1.0).chain(w.iter().copied()).collect())
            .collect()
    }
}

/// Directions on the sphere near b with (1, w_i) ⊥ (ζ₀, |ζ′|e₂). `phis` are
/// absolute angles: (0, φ₂, φ₃) for n = 3, φ₁…φ_{n−1} for n ≥ 4.
pub fn direction_family(b: &[f64], n: usize, phis: &[f64], max_condition: f64) -> Result<Family, ReconError> {
    let (b1, b2) = (b[0], b[1]);
    let w: Vec<Vec<f64>> = if n == 3 {
        phis.iter().map(|p| vec![b1 * p.cos(), b2, b1 * p.sin()]).collect()
    } else {
        let mut out = vec![{
            let mut w = vec![0.0; n];
            w[0] = b1;
            w[1] = b2;
            w
        }];
        for i in 2..=n {
            // w_i uses φ₁…φ_{i−2} then φ_{i−1} as the last angle; w_n reuses the
            // prefix of w_{n−1} with φ_{n−1} in place of φ_{n−2}
            let (prefix_len, last) = if i < n { (i - 2, phis[i - 2]) } else { (n - 3, phis[n - 2]) };
            let mut w = vec![0.0; n];
            w[1] = b2;
            let mut sines = b1;
            if prefix_len == 0 {
                w[0] = b1 * last.cos();
                w[2] = b1 * last.sin();
            } else {
                w[0] = b1 * phis[0].cos();
                sines *= phis[0].sin();
                for (j, phi) in phis.iter().enumerate().take(prefix_len).skip(1) {
                    w[j + 1] = sines * phi.cos();
                    sines *= phi.sin();
                }
                w[prefix_len + 1] = sines * last.cos();
                w[prefix_len + 2] = sines * last.sin();
            }
            out.push(w);
        }
        out
    };
    let lifted: Vec<Vec<f64>> = w.iter().map(|w| std::iter::once(1.0).chain(w.iter().copied()).collect()).collect();
    let gram = DMatrix::from_fn(n, n, |i, j| dot(&lifted[i], &lifted[j]));
    let eig = gram.symmetric_eigen().eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(ReconError::DegenerateFamily { condition });
    }
    Ok(Family { w, condition })
}

/// μ_i = Σ_j A_ij v_j with {μ_i} orthonormal; A is lower triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct Orthonormalized {
    pub a: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
}

pub fn gram_schmidt_basis(vectors: &[Vec<f64>]) -> Result<Orthonormalized, ReconError> {
    let k = vectors.len();
    let mut mu: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (i, v) in vectors.iter().enumerate() {
        let mut u = v.clone();
        let mut coef: Vec<f64> = (0..k).map(|j| (j == i) as u8 as f64).collect();
        for _ in 0..2 {
            for (q, aq) in mu.iter().zip(&a) {
                let p = dot(&u, q);
                u.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
                coef.iter_mut().zip(aq).for_each(|(x, y)| *x -= p * y);
            }
        }
        let len = norm(&u);
        if len < 1e-12 * norm(v).max(1e-300) {
            return Err(ReconError::DegenerateFamily { condition: f64::INFINITY });
        }
        mu.push(u.iter().map(|x| x / len).collect());
        a.push(coef.iter().map(|x| x / len).collect());
    }
    Ok(Orthonormalized { a, mu })
}

/// Direction, rotation, measurement family and basis for one ζ.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub zeta: Vec<f64>,
    pub omega: Vec<f64>,
    pub rotation: Rotation,
    pub delta_prime: f64,
    pub family: Family,
    pub basis: Orthonormalized,
}

impl Geometry {
    /// ξ = Mζ = (ζ₀, |ζ′|e₂).
    pub fn xi(&self) -> Vec<f64> {
        self.rotation.apply_m(&self.zeta)
    }

    /// Measurement directions R⁻¹w_j.
    pub fn directions(&self) -> Vec<Vec<f64>> {
        self.family.w.iter().map(|w| self.rotation.apply_inverse(w)).collect()
    }

    /// [AᵀA]_{kj}.
    pub fn ata(&self) -> Vec<Vec<f64>> {
        let n = self.basis.a.len();
        (0..n)
            .map(|k| (0..n).map(|j| self.basis.a.iter().map(|row| row[k] * row[j]).sum()).collect())
            .collect()
    }
}

pub fn geometry(zeta: &[f64], config: &ReconConfig) -> Result<Geometry, ReconError> {
    let omega = omega_for_zeta(zeta, &config.omega0, config.delta)?;
    let rotation = rotation_m(zeta, &omega)?;
    let distance = norm(&omega.iter().zip(&config.omega0).map(|(x, y)| x - y).collect::<Vec<_>>());
    let delta_prime = 0.5 * (config.delta - distance);
    let family = direction_family(&rotation.b, config.n, &config.angles(delta_prime), config.max_condition)?;
    let basis = gram_schmidt_basis(&family.lifted())?;
    Ok(Geometry { zeta: zeta.to_vec(), omega, rotation, delta_prime, family, basis })
}
