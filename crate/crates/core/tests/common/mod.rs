//! Dense full-array tensors used as an independent oracle for the canonical
//! storage path.
#![allow(dead_code)]

use lightray::tensor_algebra::{FullIter, SymTensor};

#[derive(Clone, Debug)]
pub struct Full {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<f64>,
}

impl Full {
    pub fn from_fn(dim: usize, rank: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let data = FullIter::new(dim, rank).map(|i| f(&i)).collect();
        Full { dim, rank, data }
    }

    pub fn from_sym(t: &SymTensor) -> Self {
        Full { dim: t.dim(), rank: t.rank(), data: t.to_full() }
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Average over all rank! slot permutations.
    pub fn symmetrized(&self) -> Full {
        let perms = permutations(self.rank);
        Full::from_fn(self.dim, self.rank, |idx| {
            perms.iter().map(|p| {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                self.at(&permuted)
            }).sum::<f64>() / perms.len() as f64
        })
    }

    pub fn outer(&self, other: &Full) -> Full {
        let r = self.rank;
        Full::from_fn(self.dim, self.rank + other.rank, |idx| self.at(&idx[..r]) * other.at(&idx[r..]))
    }

    /// Contract the last two slots with a dim×dim matrix.
    pub fn contract_last_two(&self, w: &dyn Fn(usize, usize) -> f64) -> Full {
        let d = self.dim;
        Full::from_fn(d, self.rank - 2, |idx| {
            let mut full = idx.to_vec();
            full.extend([0, 0]);
            let l = full.len();
            let mut acc = 0.0;
            for p in 0..d {
                for q in 0..d {
                    full[l - 2] = p;
                    full[l - 1] = q;
                    acc += self.at(&full) * w(p, q);
                }
            }
            acc
        })
    }

    pub fn max_diff_sym(&self, t: &SymTensor) -> f64 {
        assert_eq!(self.rank, t.rank());
        FullIter::new(self.dim, self.rank)
            .map(|idx| (self.at(&idx) - t.get(&idx)).abs())
            .fold(0.0, f64::max)
    }

    /// Every permuted lookup returns the same value.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let perms = permutations(self.rank);
        FullIter::new(self.dim, self.rank).all(|idx| {
            perms.iter().all(|p| {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                (self.at(&permuted) - self.at(&idx)).abs() <= tol
            })
        })
    }
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

pub fn metric_full(n: usize, c: f64) -> Full {
    Full::from_fn(n + 1, 2, |i| match (i[0], i[1]) {
        (0, 0) => -1.0 / (c * c),
        (a, b) if a == b => 1.0,
        _ => 0.0,
    })
}

/// Deterministic pseudo-random symmetric tensor.
pub fn random_sym(dim: usize, rank: usize, seed: u64) -> SymTensor {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    SymTensor::from_fn(dim, rank, |_| rng.gen_range(-1.0..1.0))
}

/// Closed-form ∫ s^k exp(−|b + sω̃ − z|²/σ²) ds for one Gaussian envelope.
pub fn gaussian_line_moment(base: &[f64], dir: &[f64], center: &[f64], sigma: f64, k: usize) -> f64 {
    let d: Vec<f64> = base.iter().zip(center).map(|(b, c)| b - c).collect();
    let a: f64 = dir.iter().map(|x| x * x).sum();
    let beta: f64 = d.iter().zip(dir).map(|(x, y)| x * y).sum();
    let gamma: f64 = d.iter().map(|x| x * x).sum();
    let s2 = sigma * sigma;
    let prefactor = (-(gamma - beta * beta / a) / s2).exp();
    let shift = -beta / a;
    let var = s2 / (2.0 * a);
    let mut acc = 0.0;
    for j in (0..=k).step_by(2) {
        let double_fact: f64 = (1..j).step_by(2).map(|v| v as f64).product();
        let moment = (std::f64::consts::PI * s2 / a).sqrt() * var.powi(j as i32 / 2) * double_fact;
        acc += binom_f(k, j) * shift.powi((k - j) as i32) * moment;
    }
    prefactor * acc
}

pub fn binom_f(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed-form L^{m,k} of a phantom: Σ_terms (coeff·ω̃^m) × line moment.
pub fn mlrt_closed_form(f: &lightray::phantom::PhantomField, base: &[f64], omega: &[f64], c: f64, k: usize) -> f64 {
    let mut dir = vec![c];
    dir.extend_from_slice(omega);
    f.terms()
        .iter()
        .map(|t| t.coeff.contract_all(&dir) * gaussian_line_moment(base, &dir, &t.center, t.sigma, k))
        .sum()
}

pub fn random_unit(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Random phantom of rank m with `terms` Gaussians near the origin.
pub fn random_phantom(n: usize, m: usize, c: f64, terms: usize, seed: u64) -> lightray::phantom::PhantomField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..terms)
        .map(|t| lightray::phantom::GaussianTerm {
            coeff: random_sym(n + 1, m, seed.wrapping_mul(31).wrapping_add(t as u64)),
            center: (0..=n).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            sigma: rng.gen_range(0.7..1.2),
        })
        .collect();
    lightray::phantom::PhantomField::new(n, m, c, terms).unwrap()
}
