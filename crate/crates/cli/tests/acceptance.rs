//! Acceptance run: one line per criterion, nonzero exit if any fails.

use lightray::fourier_slice::SliceSpec;
use lightray::phantom::PhantomField;
use lightray::ray_transform::{DataOracle, FdSteps, QuadratureSpec, Ray, RayData, Rule};
use lightray::reconstruction::{reconstruct, reduce_rank, resolve_sign, ReconConfig, ReconError};
use lightray::tensor_algebra::SymTensor;
use lightray_cli::config::RunConfig;
use lightray_cli::suites::{random_phantom, random_unit, run_suite, Suite, SuiteReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(report: &SuiteReport, names: &[&str]) -> Outcome {
    let picked: Vec<_> = report.checks.iter().filter(|c| names.contains(&c.name.as_str())).collect();
    assert_eq!(picked.len(), names.len(), "suite {} lacks one of {names:?}", report.suite);
    let detail = picked
        .iter()
        .map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.max_residual, c.tolerance))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { pass: picked.iter().all(|c| c.pass), detail }
}

fn light_quadrature() -> QuadratureSpec {
    QuadratureSpec { rule: Rule::GaussLegendre, nodes: 32, halfwidth: 6.0 }
}

fn rank2_config(count: usize) -> ReconConfig {
    ReconConfig { zeta_count: count, slice: SliceSpec { nodes: 16, margin: 6.0 }, ..Default::default() }
}

fn fourier_scale(f: &PhantomField) -> f64 {
    let n = f.n() as i32;
    f.terms()
        .iter()
        .map(|t| t.coeff.frobenius() * (t.sigma * std::f64::consts::PI.sqrt()).powi(n + 1))
        .sum()
}

fn criterion_5() -> Outcome {
    let cfg = ReconConfig::default();
    let mut phantoms = Vec::new();
    for i in 0..4 {
        let mut a = [0.0; 4];
        a[i] = 1.0;
        phantoms.push(PhantomField::single(SymTensor::vector(&a), vec![0.0; 4], 1.0, 1.0).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    phantoms.push(random_phantom(3, 1, 1.0, 2, &mut rng).unwrap());
    phantoms.push(random_phantom(3, 1, 1.0, 3, &mut rng).unwrap());

    let (mut worst_agg, mut worst_comp) = (0.0f64, 0.0f64);
    let mut signs = Vec::new();
    let mut failures = 0;
    for f in phantoms {
        let oracle = DataOracle::new(f, QuadratureSpec::default()).unwrap();
        signs.push(resolve_sign(&oracle, &cfg).unwrap().sign);
        let r = reconstruct(&oracle, &cfg).unwrap();
        failures += r.failures.len();
        worst_agg = worst_agg.max(r.aggregate_rel_error);
        // per component: RMS error over points relative to the RMS reference norm
        let ref_rms = (r.points.iter().flat_map(|p| &p.reference).map(|v| v.norm_sqr()).sum::<f64>() / r.points.len() as f64).sqrt();
        for i in 0..4 {
            let err = (r.points.iter().map(|p| (p.recovered[i] - p.reference[i]).norm_sqr()).sum::<f64>() / r.points.len() as f64).sqrt();
            worst_comp = worst_comp.max(err / ref_rms);
        }
    }
    let consistent = signs.iter().all(|s| *s == signs[0]);
    Outcome {
        pass: worst_agg <= 0.05 && worst_comp <= 0.05 && consistent && failures == 0,
        detail: format!(
            "6 phantoms x 50 points: aggregate {worst_agg:.2e}, worst component {worst_comp:.2e} (<= 5e-2), signs {signs:?}, failures {failures}"
        ),
    }
}

/// Max over rays and k of |reduced − direct| relative to the largest direct value.
fn reduction_mismatch(m: usize, seed: u64, steps: FdSteps) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_phantom(3, m, 1.0, 2, &mut rng).unwrap().make_tracefree().unwrap();
    let oracle = DataOracle::new(f, QuadratureSpec::default()).unwrap();
    let reduced = reduce_rank(Arc::new(oracle.clone()), steps, 1.0).unwrap();
    let columns: Vec<DataOracle> = (0..4).map(|p| oracle.column(p).unwrap()).collect();
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let base = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ray = Ray::new(base, random_unit(3, &mut rng), 1.0).unwrap();
        for k in 0..=1 {
            let got = reduced.eval(&ray, k).unwrap();
            for (g, col) in got.iter().zip(&columns) {
                let want = col.value(&ray, k).unwrap();
                diff = diff.max((g - want).abs());
                scale = scale.max(want.abs());
            }
        }
    }
    diff / scale
}

fn criterion_6() -> Outcome {
    let steps = FdSteps::default();
    let rank2 = reduction_mismatch(2, 61, steps);
    let rank3 = reduction_mismatch(3, 63, steps);
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let f = random_phantom(3, 2, 1.0, 2, &mut rng).unwrap().make_tracefree().unwrap();
    let r = reconstruct(&DataOracle::new(f, light_quadrature()).unwrap(), &rank2_config(50)).unwrap();
    let ok = rank2 <= 0.02 && rank3 <= 0.05 && r.aggregate_rel_error <= 0.10 && r.failures.is_empty() && r.points.len() == 50;
    Outcome {
        pass: ok,
        detail: format!(
            "m=2 columns {rank2:.2e} (<= 2e-2), m=2 aggregate {:.2e} over {} points (<= 1e-1), psi sign {:?}, m=3 columns {rank3:.2e} (<= 5e-2)",
            r.aggregate_rel_error,
            r.points.len(),
            r.psi_sign.as_ref().map(|s| s.sign)
        ),
    }
}

fn criterion_7() -> Outcome {
    let h = PhantomField::single(SymTensor::scalar(4, 1.0), vec![0.2, -0.1, 0.0, 0.1], 0.9, 1.0).unwrap();
    let lifted = PhantomField::i_g(&h).unwrap();
    let scale = fourier_scale(&lifted);
    let r = reconstruct(&DataOracle::new(lifted, light_quadrature()).unwrap(), &rank2_config(5)).unwrap();
    let rank2 = r.max_recovered_abs / scale;

    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let hv = random_phantom(3, 1, 1.0, 1, &mut rng).unwrap();
    let lifted3 = DataOracle::new(PhantomField::i_g(&hv).unwrap(), QuadratureSpec::default()).unwrap();
    let reduced = reduce_rank(Arc::new(lifted3), FdSteps::default(), 1.0).unwrap();
    let own = DataOracle::new(hv, QuadratureSpec::default()).unwrap();
    let (mut worst, mut own_scale) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let base = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ray = Ray::new(base, random_unit(3, &mut rng), 1.0).unwrap();
        for k in 0..=1 {
            worst = reduced.eval(&ray, k).unwrap().iter().fold(worst, |a, b| a.max(b.abs()));
            own_scale = own_scale.max(own.value(&ray, k).unwrap().abs());
        }
    }
    let rank3 = worst / own_scale;

    let f2 = random_phantom(2, 1, 1.0, 1, &mut rng).unwrap();
    let cfg2 = ReconConfig { n: 2, omega0: vec![1.0, 0.0], phis: vec![0.0], ..Default::default() };
    let lib_rejects = matches!(
        reconstruct(&DataOracle::new(f2, QuadratureSpec::default()).unwrap(), &cfg2),
        Err(ReconError::TwoDimensional(2) | ReconError::Config(_))
    );
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lightray"))
        .current_dir(dir.path())
        .args(["reconstruct", "--set", "recon.n=2", "--set", "recon.omega0=[1,0]", "--set", "recon.phis=[0]"])
        .output()
        .unwrap();
    let cli_rejects = out.status.code() == Some(2) && String::from_utf8_lossy(&out.stderr).contains("two dimensions");
    Outcome {
        pass: rank2 <= 1e-3 && rank3 <= 1e-3 && lib_rejects && cli_rejects,
        detail: format!(
            "i_g rank 2 recovered/scale {rank2:.2e}, i_g rank 3 reduced data {rank3:.2e} (<= 1e-3), n=2 rejected lib {lib_rejects} cli {cli_rejects}"
        ),
    }
}

fn run_cli(dir: &Path, threads: &str, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_lightray"))
        .current_dir(dir)
        .env_remove("LIGHTRAY_THREADS")
        .args(["--threads", threads, "--seed", "17", "--out", "."])
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn criterion_8() -> Outcome {
    let phantom = serde_json::json!({
        "phantom": {"n": 3, "m": 1, "terms": [
            {"coeff": {"components": {"0": 0.5, "2": -1.0}}, "center": [0.1, 0.0, -0.2, 0.0], "sigma": 0.9}
        ]},
        "forward": {"rays": 25, "moments": [0, 1, 2], "noise_sigma": 0.01},
        "recon": {"zeta_count": 6},
        "slice_points": {"count": 4}
    });
    let commands: [&[&str]; 4] = [&["forward"], &["slice"], &["reconstruct", "--rank", "1"], &["verify", "recon-geometry"]];
    let files = ["data.csv", "slice.csv", "recon.csv", "report.json", "verify-recon-geometry.json"];
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    let mut all_ran = true;
    for threads in ["1", "8", "1", "8"] {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("cfg.json"), phantom.to_string()).unwrap();
        for cmd in commands {
            let mut args = cmd.to_vec();
            args.extend(["--config", "cfg.json"]);
            all_ran &= run_cli(dir.path(), threads, &args);
        }
        outputs.push(files.iter().map(|f| std::fs::read(dir.path().join(f)).unwrap_or_default()).collect());
    }
    let identical = outputs.iter().all(|o| o == &outputs[0]) && outputs[0].iter().all(|b| !b.is_empty());
    Outcome {
        pass: all_ran && identical,
        detail: format!("{} files x 4 runs (threads 1, 8, 1, 8): commands ok {all_ran}, byte-identical {identical}", files.len()),
    }
}

fn main() {
    let cfg = RunConfig::default();
    let mut results: Vec<(usize, &str, Outcome, Duration, Duration)> = Vec::new();
    let mut record = |id, name, budget_s: u64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let budget = Duration::from_secs(budget_s);
        let line = (id, name, outcome, elapsed, budget);
        println!(
            "criterion {} [{}] {}: {} ({:.1} s, budget {} s)",
            line.0,
            line.1,
            if line.2.pass && elapsed <= budget { "PASS" } else { "FAIL" },
            line.2.detail,
            elapsed.as_secs_f64(),
            budget_s
        );
        results.push(line);
    };

    record(1, "algebra", 10, &mut || {
        let r = run_suite(Suite::Algebra, &cfg).unwrap();
        check(&r, &["commutator_identity", "decompose_roundtrip", "trace_free_part", "i_g_inverse_norm"])
    });
    let mut transform = None;
    record(2, "kernel", 30, &mut || {
        let r = run_suite(Suite::Transform, &cfg).unwrap();
        let o = check(&r, &["kernel_i_g"]);
        transform = Some(r);
        o
    });
    record(3, "moment descent and rank reducer", 60, &mut || {
        let mut o = check(transform.as_ref().unwrap(), &["moment_descent", "rank_reducer"]);
        o.detail.push_str(" (timed with criterion 2)");
        o
    });
    record(4, "fourier slice", 300, &mut || {
        let r = run_suite(Suite::Slice, &cfg).unwrap();
        check(&r, &["phi1_closed_form", "phi2_closed_form"])
    });
    record(5, "vector reconstruction", 1800, &mut criterion_5);
    record(6, "rank reduction", 3600, &mut criterion_6);
    record(7, "negative controls", 600, &mut criterion_7);
    record(8, "determinism", 600, &mut criterion_8);

    let failed: Vec<usize> = results.iter().filter(|r| !(r.2.pass && r.3 <= r.4)).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
