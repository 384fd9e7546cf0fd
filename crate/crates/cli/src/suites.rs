use crate::config::RunConfig;
use crate::CliError;
use lightray::fourier_slice::{phi1, phi2};
use lightray::phantom::{GaussianTerm, PhantomField};
use lightray::ray_transform::{check_column_identity, check_moment_descent, check_rank_reducer, DataOracle, Ray};
use lightray::reconstruction::{assemble_phi3, geometry, sample_zetas};
use lightray::tensor_algebra::{
    commutator_constants, decompose_with, i_g_matrix, i_v, j_op, CommutatorConstants, MinkowskiMetric, SymTensor,
};
use lightray::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const VERIFY_SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub version: u64,
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Transform,
    Slice,
    ReconGeometry,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Transform => "transform",
            Suite::Slice => "slice",
            Suite::ReconGeometry => "recon-geometry",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Suite::Algebra, Suite::Transform, Suite::Slice, Suite::ReconGeometry]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?} (algebra|transform|slice|recon-geometry)"))
    }
}

struct Checks<'a> {
    cfg: &'a RunConfig,
    out: Vec<Check>,
}

impl Checks<'_> {
    fn push(&mut self, name: &str, residual: f64, default_tol: f64) {
        let tolerance = self.cfg.verify.tolerances.get(name).copied().unwrap_or(default_tol);
        // NaN never passes
        let pass = residual <= tolerance;
        self.out.push(Check { name: name.to_string(), max_residual: residual, tolerance, pass });
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteReport, CliError> {
    let mut checks = Checks { cfg, out: Vec::new() };
    match suite {
        Suite::Algebra => algebra(&mut checks)?,
        Suite::Transform => transform(&mut checks)?,
        Suite::Slice => slice(&mut checks)?,
        Suite::ReconGeometry => recon_geometry(&mut checks)?,
    }
    let pass = checks.out.iter().all(|c| c.pass);
    Ok(SuiteReport { version: VERIFY_SCHEMA_VERSION, suite: suite.name().into(), checks: checks.out, pass })
}

fn random_tensor(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> SymTensor {
    SymTensor::from_fn(dim, rank, |_| rng.gen_range(-1.0..1.0))
}

pub fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

fn random_ray(n: usize, c: f64, rng: &mut ChaCha8Rng) -> Result<Ray, CliError> {
    let base = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ok(Ray::new(base, random_unit(n, rng), c)?)
}

/// A few Gaussian terms near the origin with random coefficients.
pub fn random_phantom(n: usize, m: usize, c: f64, terms: usize, rng: &mut ChaCha8Rng) -> Result<PhantomField, CliError> {
    let terms = (0..terms)
        .map(|_| GaussianTerm {
            coeff: random_tensor(n + 1, m, rng),
            center: (0..=n).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            sigma: rng.gen_range(0.7..1.2),
        })
        .collect();
    Ok(PhantomField::new(n, m, c, terms)?)
}

fn constants_for(cfg: &RunConfig) -> impl Fn(usize, usize) -> CommutatorConstants {
    let corrupt = cfg.verify.hooks.corrupt_commutator_constant;
    move |m, n| {
        let mut k = commutator_constants(m, n);
        if corrupt {
            k.c += 0.5;
        }
        k
    }
}

fn algebra(checks: &mut Checks) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(checks.cfg.seed());
    let constants = constants_for(checks.cfg);
    let (mut commutator, mut roundtrip, mut trace) = (0.0f64, 0.0f64, 0.0f64);
    let mut inverse_norm = 0.0f64;
    for n in 1..=3 {
        for c in [0.5, 1.0, 2.0] {
            let g = MinkowskiMetric::new(c, n)?.tensor();
            for m in 2..=5 {
                for _ in 0..50 {
                    let u = random_tensor(n + 1, m - 2, &mut rng);
                    let k = constants(m, n);
                    let lhs = j_op(&i_v(&g, &u)?, c)?;
                    let mut rhs = u.scale(k.c);
                    if m >= 4 {
                        rhs = rhs.try_add(&i_v(&g, &j_op(&u, c)?)?.scale(k.d))?;
                    }
                    let scale = lhs.max_abs().max(u.max_abs()).max(f64::MIN_POSITIVE);
                    commutator = commutator.max(lhs.try_sub(&rhs)?.max_abs() / scale);

                    let w = random_tensor(n + 1, m, &mut rng);
                    let dec = decompose_with(&w, c, &constants)?;
                    let back = dec.trace_free.try_add(&i_v(&g, &dec.lower)?)?;
                    let scale = w.max_abs().max(f64::MIN_POSITIVE);
                    roundtrip = roundtrip.max(back.try_sub(&w)?.max_abs() / scale);
                    trace = trace.max(j_op(&dec.trace_free, c)?.max_abs() / scale);
                }
                let sv = i_g_matrix(n, m, c)?.singular_values();
                let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
                inverse_norm = inverse_norm.max(1.0 / smallest);
            }
        }
    }
    checks.push("commutator_identity", commutator, 1e-12);
    checks.push("decompose_roundtrip", roundtrip, 1e-12);
    checks.push("trace_free_part", trace, 1e-12);
    // smallest singular value > 1e-8
    checks.push("i_g_inverse_norm", inverse_norm, 1e8);
    Ok(())
}

fn transform(checks: &mut Checks) -> Result<(), CliError> {
    let cfg = checks.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed() ^ 0x7472_616e);
    let n = 3;

    let mut kernel = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        for m in [2, 3] {
            let h = random_phantom(n, m - 2, c, 2, &mut rng)?;
            let lifted = DataOracle::new(PhantomField::i_g(&h)?, cfg.quadrature.clone())?;
            let own = DataOracle::new(h, cfg.quadrature.clone())?;
            let (mut worst, mut scale) = (0.0f64, 0.0f64);
            for _ in 0..100 {
                let ray = random_ray(n, c, &mut rng)?;
                for k in 0..=m {
                    worst = worst.max(lifted.value(&ray, k)?.abs());
                    scale = scale.max(own.value(&ray, k)?.abs());
                }
            }
            kernel = kernel.max(worst / scale.max(f64::MIN_POSITIVE));
        }
    }
    checks.push("kernel_i_g", kernel, 1e-8);

    let steps = cfg.steps();
    let (mut descent, mut reducer, mut column_identity) = (0.0f64, 0.0f64, 0.0f64);
    for m in 0..=2 {
        let f = random_phantom(n, m, 1.0, 2, &mut rng)?;
        let scale = f.coeff_scale().max(f64::MIN_POSITIVE);
        let o = DataOracle::new(f, cfg.quadrature.clone())?;
        for _ in 0..20 {
            let ray = random_ray(n, 1.0, &mut rng)?;
            for k in 1..=2 {
                for p in 1..=k {
                    descent = descent.max(check_moment_descent(&o, &ray, k, p, steps)? / scale);
                }
            }
            if m >= 1 {
                for k in 0..=1 {
                    for p in 1..=n {
                        reducer = reducer.max(check_rank_reducer(&o, &ray, k, p, steps)? / scale);
                    }
                }
            }
            if m == 2 {
                for k in 0..=2 {
                    column_identity = column_identity.max(check_column_identity(&o, &ray, k)? / scale);
                }
            }
        }
    }
    checks.push("moment_descent", descent, 1e-4);
    checks.push("rank_reducer", reducer, 1e-4);
    checks.push("column_identity_rank2", column_identity, 1e-10);
    Ok(())
}

/// Point ζ with (1, ω)·ζ = 0 and |ζ| ≤ max_radius.
pub fn slice_point(n: usize, omega: &[f64], max_radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let light: Vec<f64> = std::iter::once(1.0).chain(omega.iter().copied()).collect();
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = v.iter().zip(&light).map(|(x, y)| x * y).sum::<f64>() / 2.0;
        let z: Vec<f64> = v.iter().zip(&light).map(|(x, y)| x - a * y).collect();
        let r = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 {
            let target = rng.gen_range(0.0..max_radius);
            return z.iter().map(|x| x * target / r).collect();
        }
    }
}

/// ω̃·f̂ for rank 1, f̂ for rank 0.
fn light_contracted(f: &PhantomField, light: &[f64], zeta: &[f64]) -> Complex64 {
    let fhat = f.fourier_ref(zeta);
    match f.rank() {
        0 => fhat.get(&[]),
        _ => (0..light.len()).map(|j| fhat.get(&[j]) * light[j]).sum(),
    }
}

fn slice(checks: &mut Checks) -> Result<(), CliError> {
    let cfg = checks.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed() ^ 0x736c_6963);
    let n = 3;
    let points = &cfg.slice_points;
    let mut phantoms = vec![PhantomField::single(SymTensor::scalar(n + 1, 1.0), vec![0.0; n + 1], 1.0, 1.0)?];
    phantoms.push(random_phantom(n, 0, 1.0, 2, &mut rng)?);
    phantoms.push(random_phantom(n, 1, 1.0, 2, &mut rng)?);
    phantoms.push(random_phantom(n, 1, 1.0, 1, &mut rng)?);
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for f in phantoms {
        let peak: f64 = f
            .terms()
            .iter()
            .map(|t| t.coeff.max_abs() * (t.sigma * std::f64::consts::PI.sqrt()).powi(n as i32 + 1))
            .sum();
        let o = DataOracle::new(f.clone(), cfg.quadrature.clone())?;
        for _ in 0..points.count {
            let omega = match &points.omega {
                Some(w) => w.clone(),
                None => random_unit(n, &mut rng),
            };
            let zeta = slice_point(n, &omega, points.max_radius, &mut rng);
            let light: Vec<f64> = std::iter::once(1.0).chain(omega.iter().copied()).collect();
            let want1 = light_contracted(&f, &light, &zeta);
            // derivative along ω̃ of the closed form, by central difference
            let h = 1e-4;
            let shift = |s: f64| -> Vec<f64> { zeta.iter().zip(&light).map(|(z, l)| z + s * l).collect() };
            let want2 = (light_contracted(&f, &light, &shift(h)) - light_contracted(&f, &light, &shift(-h))) / (2.0 * h);
            let got1 = phi1(&o, &omega, &zeta, &cfg.slice)?[0];
            let got2 = phi2(&o, &omega, &zeta, &cfg.slice)?[0];
            e1 = e1.max((got1 - want1).norm() / peak);
            e2 = e2.max((got2 - want2).norm() / peak);
        }
    }
    checks.push("phi1_closed_form", e1, 0.01);
    checks.push("phi2_closed_form", e2, 0.02);
    Ok(())
}

fn recon_geometry(checks: &mut Checks) -> Result<(), CliError> {
    let cfg = &checks.cfg.recon;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6765_6f6d);
    let zetas = sample_zetas(cfg)?;
    let (mut orth, mut det, mut normal, mut light, mut basis, mut proj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut cond = 0.0f64;
    for zeta in &zetas {
        let g = geometry(zeta, cfg)?;
        let r = &g.rotation.r;
        for i in 0..cfg.n {
            for j in 0..cfg.n {
                let d: f64 = (0..cfg.n).map(|k| r[i][k] * r[j][k]).sum();
                orth = orth.max((d - (i == j) as u8 as f64).abs());
            }
        }
        det = det.max((g.rotation.determinant() - 1.0).abs());
        let xi = g.xi();
        let zn = zeta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let xn = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        normal = normal.max((xn - zn).abs() / zn).max(xi[3..].iter().fold(0.0f64, |a, b| a.max(b.abs())) / zn);
        for d in g.directions() {
            light = light.max((zeta[0] + d.iter().zip(&zeta[1..]).map(|(a, b)| a * b).sum::<f64>()).abs() / zn);
        }
        for (i, a) in g.basis.mu.iter().enumerate() {
            for (j, b) in g.basis.mu.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                basis = basis.max((d - (i == j) as u8 as f64).abs());
            }
        }
        cond = cond.max(g.family.condition);

        // Φ₁ of a synthetic v in every direction, assembled, equals the
        // projection of Mv onto ξ^⊥
        let v: Vec<Complex64> = (0..=cfg.n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let rotate = |part: &dyn Fn(&Complex64) -> f64| g.rotation.apply_m(&v.iter().map(part).collect::<Vec<_>>());
        let (mre, mim) = (rotate(&|z| z.re), rotate(&|z| z.im));
        let mv: Vec<Complex64> = mre.iter().zip(&mim).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let phi1: Vec<Complex64> = g
            .family
            .lifted()
            .iter()
            .map(|l| l.iter().zip(&mv).map(|(a, b)| b * a).sum())
            .collect();
        let got = assemble_phi3(&g, &phi1);
        let along: Complex64 = mv.iter().zip(&xi).map(|(a, b)| a * b).sum::<Complex64>() / (xn * xn);
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for ((gi, mi), x) in got.iter().zip(&mv).zip(&xi) {
            proj = proj.max((gi - (mi - along * x)).norm() / vn);
        }
    }
    checks.push("rotation_orthogonality", orth, 1e-12);
    checks.push("rotation_determinant", det, 1e-12);
    checks.push("normal_form", normal, 1e-12);
    checks.push("directions_in_slice", light, 1e-12);
    checks.push("basis_orthonormality", basis, 1e-10);
    checks.push("family_condition", cond, cfg.max_condition);
    checks.push("projection_completeness", proj, 1e-6);
    Ok(())
}
