mod common;

use common::{gaussian_line_moment, mlrt_closed_form, random_phantom, random_sym, random_unit};
use lightray::phantom::{GaussianTerm, PhantomField};
use lightray::ray_transform::*;
use lightray::tensor_algebra::SymTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle(f: PhantomField) -> DataOracle {
    DataOracle::new(f, QuadratureSpec::default()).unwrap()
}

fn random_ray(n: usize, c: f64, rng: &mut ChaCha8Rng) -> Ray {
    let base = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ray::new(base, random_unit(n, rng), c).unwrap()
}

#[test]
fn quadrature_matches_closed_form_line_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (m, c) in [(0, 1.0), (1, 0.5), (2, 2.0), (3, 1.0)] {
        let f = random_phantom(3, m, c, 3, 40 + m as u64);
        let scale = f.coeff_scale();
        let o = oracle(f.clone());
        for _ in 0..10 {
            let ray = random_ray(3, c, &mut rng);
            for k in 0..=m + 1 {
                let q = mlrt_eval(&o, &ray, k).unwrap();
                let exact = mlrt_closed_form(&f, &ray.base, &ray.omega, c, k);
                assert!((q - exact).abs() <= 1e-10 * scale, "m={m} k={k}: {q} vs {exact}");
            }
        }
    }
}

#[test]
fn off_sphere_directions_are_integrated() {
    let f = random_phantom(3, 2, 1.0, 2, 77);
    let o = oracle(f.clone());
    let omega = vec![0.7, -1.3, 0.4];
    let base = vec![0.2, 0.1, -0.3, 0.5];
    let q = mlrt_eval(&o, &Ray::new(base.clone(), omega.clone(), 1.0).unwrap(), 1).unwrap();
    let exact = mlrt_closed_form(&f, &base, &omega, 1.0, 1);
    assert!((q - exact).abs() < 1e-10 * f.coeff_scale());
}

#[test]
fn kernel_of_i_g_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for c in [0.5, 1.0, 2.0] {
        for m in [2usize, 3] {
            let h = random_phantom(3, m - 2, c, 2, 100 + m as u64);
            let f = PhantomField::i_g(&h).unwrap();
            let o = oracle(f);
            for _ in 0..20 {
                let ray = random_ray(3, c, &mut rng);
                for k in 0..=m {
                    let v = mlrt_eval(&o, &ray, k).unwrap();
                    assert!(v.abs() <= 1e-8 * h.coeff_scale(), "c={c} m={m} k={k}: {v}");
                }
            }
        }
    }
}

#[test]
fn linearity_without_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_phantom(3, 2, 1.0, 2, 5);
    let g = random_phantom(3, 2, 1.0, 2, 6);
    let alpha = -0.73;
    let sum = oracle(f.axpy(alpha, &g).unwrap());
    let (of, og) = (oracle(f), oracle(g));
    for _ in 0..10 {
        let ray = random_ray(3, 1.0, &mut rng);
        let lhs = mlrt_eval(&sum, &ray, 1).unwrap();
        let rhs = alpha * mlrt_eval(&of, &ray, 1).unwrap() + mlrt_eval(&og, &ray, 1).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12);
    }
}

fn scalar_unit() -> PhantomField {
    PhantomField::single(SymTensor::scalar(4, 1.0), vec![0.0; 4], 1.0, 1.0).unwrap()
}

#[test]
fn dx_vanishes_along_symmetry_axis() {
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.0; 4], vec![0.0, 0.0, 1.0], 1.0).unwrap();
    for p in 1..=2 {
        assert!(mlrt_dx(&o, &ray, 0, p, 1e-4).unwrap()[0].abs() < 1e-8);
    }
}

/// ∂_{x_p} of √(πσ²/a) exp(−(|d|² − (d·ω̃)²/a)/σ²).
fn analytic_dx(base: &[f64], dir: &[f64], p: usize) -> f64 {
    let a: f64 = dir.iter().map(|x| x * x).sum();
    let beta: f64 = base.iter().zip(dir).map(|(x, y)| x * y).sum();
    let l = gaussian_line_moment(base, dir, &[0.0; 4], 1.0, 0);
    -2.0 * (base[p] - beta * dir[p] / a) * l
}

#[test]
fn dx_matches_analytic_derivative_and_converges_quadratically() {
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.1, 0.4, -0.3, 0.2], vec![0.6, 0.0, 0.8], 1.0).unwrap();
    let exact = analytic_dx(&ray.base, &ray.direction(), 1);
    let approx = mlrt_dx(&o, &ray, 0, 1, 1e-4).unwrap()[0];
    assert!((approx - exact).abs() <= 1e-6 * exact.abs());
    let e1 = (mlrt_dx(&o, &ray, 0, 1, 2e-2).unwrap()[0] - exact).abs();
    let e2 = (mlrt_dx(&o, &ray, 0, 1, 1e-2).unwrap()[0] - exact).abs();
    let ratio = e1 / e2;
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn dt_matches_analytic_derivative() {
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.3, 0.4, -0.3, 0.2], vec![0.6, 0.0, 0.8], 1.0).unwrap();
    let exact = analytic_dx(&ray.base, &ray.direction(), 0);
    let approx = mlrt_dt(&o, &ray, 0, 1e-4).unwrap()[0];
    assert!((approx - exact).abs() <= 1e-6 * exact.abs());
}

#[test]
fn tangential_gradient_is_tangent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let o = oracle(random_phantom(3, 2, 1.0, 2, 8));
    for _ in 0..5 {
        let ray = random_ray(3, 1.0, &mut rng);
        let grad = tangential_gradient(&o, &ray, 1, 1e-4).unwrap();
        let dot: f64 = grad.iter().zip(&ray.omega).map(|(g, w)| g[0] * w).sum();
        assert!(dot.abs() <= 1e-8, "{dot}");
    }
}

#[test]
fn tangential_gradient_vanishes_for_centered_radial_phantom() {
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.0; 4], vec![0.0, 0.6, 0.8], 1.0).unwrap();
    for g in tangential_gradient(&o, &ray, 0, 1e-4).unwrap() {
        assert!(g[0].abs() < 1e-6);
    }
}

#[test]
fn tangential_gradient_matches_geodesic_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_phantom(3, 2, 1.0, 2, 11);
    let o = oracle(f.clone());
    for _ in 0..5 {
        let ray = random_ray(3, 1.0, &mut rng);
        // unit tangent t ⊥ ω
        let r: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let proj: f64 = r.iter().zip(&ray.omega).map(|(a, b)| a * b).sum();
        let t: Vec<f64> = r.iter().zip(&ray.omega).map(|(a, w)| a - proj * w).collect();
        let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        let t: Vec<f64> = t.iter().map(|x| x / tn).collect();
        let along = |eps: f64| {
            let omega: Vec<f64> = ray.omega.iter().zip(&t).map(|(w, ti)| eps.cos() * w + eps.sin() * ti).collect();
            mlrt_closed_form(&f, &ray.base, &omega, 1.0, 1)
        };
        let eps = 1e-5;
        let geodesic = (along(eps) - along(-eps)) / (2.0 * eps);
        let grad = tangential_gradient(&o, &ray, 1, 1e-4).unwrap();
        let ours: f64 = grad.iter().zip(&t).map(|(g, ti)| g[0] * ti).sum();
        assert!((ours - geodesic).abs() <= 1e-5 * f.coeff_scale(), "{ours} vs {geodesic}");
    }
}

#[test]
fn tangential_gradient_rejects_non_unit() {
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.0; 4], vec![0.0, 1.0, 1.0], 1.0).unwrap();
    assert!(matches!(tangential_gradient(&o, &ray, 0, 1e-4), Err(TransformError::NonUnitOmega(_))));
}

#[test]
fn moment_descent_cases() {
    let steps = FdSteps::default();
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.2, 0.1, 0.0, -0.3], vec![0.0, 1.0, 0.0], 1.0).unwrap();
    assert_eq!(check_moment_descent(&o, &ray, 2, 0, steps).unwrap(), 0.0);
    assert!(check_moment_descent(&o, &ray, 1, 1, steps).unwrap() <= 1e-5);
    let v = oracle(random_phantom(3, 1, 1.0, 2, 21));
    let scale = v.phantom().coeff_scale();
    assert!(check_moment_descent(&v, &ray, 2, 1, steps).unwrap() <= 1e-4 * scale);
    assert!(check_moment_descent(&v, &ray, 2, 2, steps).unwrap() <= 1e-4 * scale);
    assert!(matches!(check_moment_descent(&v, &ray, 1, 2, steps), Err(TransformError::OrderExceedsMoment { .. })));
}

#[test]
fn rank_reducer_cases() {
    let steps = FdSteps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (m, k) in [(1usize, 0usize), (2, 1), (2, 0)] {
        let o = oracle(random_phantom(3, m, 1.0, 2, 60 + m as u64));
        let scale = o.phantom().coeff_scale();
        for _ in 0..5 {
            let ray = random_ray(3, 1.0, &mut rng);
            for p in 1..=3 {
                let r = check_rank_reducer(&o, &ray, k, p, steps).unwrap();
                assert!(r <= 1e-5 * scale, "m={m} k={k} p={p}: {r}");
            }
        }
    }
    let o = oracle(scalar_unit());
    let ray = Ray::new(vec![0.0; 4], vec![1.0, 0.0, 0.0], 1.0).unwrap();
    assert!(matches!(check_rank_reducer(&o, &ray, 0, 1, steps), Err(TransformError::Rank { .. })));
    let v = oracle(random_phantom(3, 1, 1.0, 1, 3));
    assert!(matches!(check_rank_reducer(&v, &ray, 0, 0, steps), Err(TransformError::SpatialIndex(0))));
}

#[test]
fn rank_reducer_with_zero_column() {
    // coefficient e₀ ⊗ e₀ has zero spatial columns
    let coeff = SymTensor::from_fn(4, 2, |i| if i == [0, 0] { 1.0 } else { 0.0 });
    let o = oracle(PhantomField::single(coeff, vec![0.1, 0.0, 0.2, 0.0], 1.0, 1.0).unwrap());
    let ray = Ray::new(vec![0.0, 0.3, 0.0, 0.1], vec![0.0, 0.6, 0.8], 1.0).unwrap();
    for p in 1..=3 {
        let d_omega = mlrt_domega(&o, &ray, 0, p, 1e-4).unwrap()[0];
        let d_x = mlrt_dx(&o, &ray, 1, p, 1e-4).unwrap()[0];
        assert!((d_omega - d_x).abs() <= 1e-5);
    }
}

#[test]
fn column_relation_for_pure_trace_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for c in [0.5, 1.0, 2.0] {
        let h = random_phantom(3, 0, c, 2, 31);
        let o = oracle(PhantomField::i_g(&h).unwrap());
        let col0 = o.column(0).unwrap();
        for _ in 0..5 {
            let ray = random_ray(3, c, &mut rng);
            for k in 0..=1 {
                let l0 = mlrt_eval(&col0, &ray, k).unwrap();
                for i in 1..=3 {
                    let li = mlrt_eval(&o.column(i).unwrap(), &ray, k).unwrap();
                    let r = (li + c * ray.omega[i - 1] * l0).abs();
                    assert!(r <= 1e-6 * h.coeff_scale(), "c={c}: {r}");
                }
            }
        }
    }
}

#[test]
fn column_identity_for_arbitrary_phantoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for c in [0.5, 1.0, 2.0] {
        let o = oracle(random_phantom(3, 2, c, 2, 50));
        let scale = o.phantom().coeff_scale();
        for _ in 0..5 {
            let ray = random_ray(3, c, &mut rng);
            for k in 0..=2 {
                assert!(check_column_identity(&o, &ray, k).unwrap() <= 1e-6 * scale);
            }
        }
    }
}

#[test]
fn csv_export_layout() {
    let o = oracle(scalar_unit());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rows: Vec<DataRow> = (0..3)
        .flat_map(|_| {
            let ray = random_ray(3, 1.0, &mut rng);
            (0..2).map(|k| DataRow { value: mlrt_eval(&o, &ray, k).unwrap(), ray: ray.clone(), k }).collect::<Vec<_>>()
        })
        .collect();
    let mut buf = Vec::new();
    write_data_csv(&mut buf, 3, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3,omega1,omega2,omega3,k,value");
    assert_eq!(lines.len(), 7);
}

#[test]
fn gaussian_term_shape_checked() {
    let bad = PhantomField::new(3, 1, 1.0, vec![GaussianTerm { coeff: random_sym(4, 2, 1), center: vec![0.0; 4], sigma: 1.0 }]);
    assert!(bad.is_err());
}
