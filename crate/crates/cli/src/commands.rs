use crate::config::RunConfig;
use crate::suites::{random_unit, run_suite, slice_point, Suite};
use crate::CliError;
use lightray::fourier_slice::{phi1, phi2, write_slice_csv, SliceRow};
use lightray::phantom::{GaussianTerm, PhantomField};
use lightray::ray_transform::{write_data_csv, DataOracle, DataRow, Ray};
use lightray::reconstruction::{reconstruct, report_json, write_recon_csv};
use lightray::tensor_algebra::SymTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const PHANTOM_FILE: &str = "phantom.json";
pub const DATA_FILE: &str = "data.csv";
pub const SLICE_FILE: &str = "slice.csv";
pub const RECON_FILE: &str = "recon.csv";
pub const REPORT_FILE: &str = "report.json";

pub fn verify_file(suite: Suite) -> String {
    format!("verify-{}.json", suite.name())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf, CliError> {
    let mut w = create(dir, name)?;
    let path = dir.join(name);
    let io = |e: std::io::Error| CliError::Io(path.display().to_string(), e);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io(e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io)?;
    Ok(path)
}

fn require_phantom(cfg: &RunConfig) -> Result<PhantomField, CliError> {
    cfg.phantom()?
        .ok_or_else(|| CliError::Usage("no phantom given (set `phantom` or `phantom_file` in the config)".into()))
}

/// Built-in reconstruction phantom: two off-centre Gaussians, trace-free
/// for rank ≥ 2.
pub fn default_phantom(n: usize, rank: usize) -> Result<PhantomField, CliError> {
    let term = |shift: f64, sigma: f64, center: f64| GaussianTerm {
        coeff: SymTensor::from_fn(n + 1, rank, |i| {
            let s: f64 = i.iter().enumerate().map(|(k, &v)| (v as f64 + 1.0) * (k as f64 + 1.5)).sum();
            (s * 0.7 + shift).sin()
        }),
        center: (0..=n).map(|i| if i == 1 { center } else { 0.1 * i as f64 * center }).collect(),
        sigma,
    };
    let f = PhantomField::new(n, rank, 1.0, vec![term(0.3, 0.9, 0.25), term(1.1, 1.1, -0.3)])?;
    Ok(if rank >= 2 { f.make_tracefree()? } else { f })
}

pub fn cmd_phantom(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let f = require_phantom(cfg)?;
    let path = write_json(out, PHANTOM_FILE, &f.to_json())?;
    println!("phantom: n={} m={} terms={} -> {}", f.n(), f.rank(), f.terms().len(), path.display());
    Ok(())
}

fn read_rays(path: &Path, n: usize, c: f64) -> Result<Vec<Ray>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let mut rays = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let values: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Schema(format!("{} row {}: {e}", path.display(), line + 1)))?;
        if values.len() != 2 * n + 1 {
            return Err(CliError::Schema(format!(
                "{} row {}: expected {} columns (t, x1..x{n}, omega1..omega{n}), got {}",
                path.display(),
                line + 1,
                2 * n + 1,
                values.len()
            )));
        }
        let ray = Ray::new(values[..=n].to_vec(), values[n + 1..].to_vec(), c)
            .map_err(|e| CliError::Schema(format!("{} row {}: {e}", path.display(), line + 1)))?;
        rays.push(ray);
    }
    Ok(rays)
}

pub fn cmd_forward(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let f = require_phantom(cfg)?;
    let (n, c) = (f.n(), f.c());
    let fw = &cfg.forward;
    let rays = match &fw.rays_file {
        Some(path) => read_rays(path, n, c)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
            (0..fw.rays)
                .map(|_| {
                    let base: Vec<f64> = (0..=n).map(|_| rng.gen_range(-fw.extent..=fw.extent)).collect();
                    Ray::new(base, random_unit(n, &mut rng), c)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let oracle = DataOracle::new(f, cfg.quadrature.clone())?.with_noise(fw.noise_sigma, cfg.seed());
    let mut rows = Vec::with_capacity(rays.len() * fw.moments.len());
    for ray in rays {
        for &k in &fw.moments {
            let value = oracle.value(&ray, k)?;
            rows.push(DataRow { ray: ray.clone(), k, value });
        }
    }
    write_data_csv(create(out, DATA_FILE)?, n, &rows)?;
    println!("forward: {} rows -> {}", rows.len(), out.join(DATA_FILE).display());
    Ok(())
}

/// Returns whether every check passed.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite, out: &Path) -> Result<bool, CliError> {
    let report = run_suite(suite, cfg)?;
    for c in &report.checks {
        println!(
            "{:<26} {:>12.3e} <= {:<10.3e} {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let path = write_json(out, &verify_file(suite), &report)?;
    println!("verify {}: {} -> {}", suite.name(), if report.pass { "pass" } else { "FAIL" }, path.display());
    Ok(report.pass)
}

pub fn cmd_slice(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let f = match cfg.phantom()? {
        Some(f) => f,
        None => default_phantom(3, 1)?,
    };
    let n = f.n();
    if f.c() != 1.0 {
        return Err(CliError::Usage(format!("slice needs c = 1, phantom has c = {}", f.c())));
    }
    if let Some(w) = &cfg.slice_points.omega {
        if w.len() != n {
            return Err(CliError::Schema(format!("slice_points.omega: expected {n} entries, got {}", w.len())));
        }
    }
    let oracle = DataOracle::new(f, cfg.quadrature.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut rows = Vec::with_capacity(cfg.slice_points.count);
    for _ in 0..cfg.slice_points.count {
        let omega = match &cfg.slice_points.omega {
            Some(w) => w.clone(),
            None => random_unit(n, &mut rng),
        };
        let zeta = slice_point(n, &omega, cfg.slice_points.max_radius, &mut rng);
        let p1 = phi1(&oracle, &omega, &zeta, &cfg.slice)?;
        let p2 = phi2(&oracle, &omega, &zeta, &cfg.slice)?;
        rows.push(SliceRow { zeta, omega, phi1: p1[0], phi2: p2[0] });
    }
    write_slice_csv(create(out, SLICE_FILE)?, n, &rows)?;
    println!("slice: {} points -> {}", rows.len(), out.join(SLICE_FILE).display());
    Ok(())
}

/// Returns whether the aggregate error stayed within the configured bound.
pub fn cmd_reconstruct(cfg: &RunConfig, rank: usize, out: &Path) -> Result<bool, CliError> {
    if !(1..=3).contains(&rank) {
        return Err(CliError::Usage(format!("rank must be 1, 2 or 3, got {rank}")));
    }
    if cfg.recon.n < 3 {
        return Err(CliError::Usage(format!(
            "n = {}: the reconstruction does not hold in two dimensions (needs n >= 3)",
            cfg.recon.n
        )));
    }
    cfg.recon.validate().map_err(|e| CliError::Schema(format!("recon: {e}")))?;
    let f = match cfg.phantom()? {
        Some(f) => f,
        None => default_phantom(cfg.recon.n, rank)?,
    };
    if f.rank() != rank || f.n() != cfg.recon.n {
        return Err(CliError::Usage(format!(
            "phantom has n = {}, rank {}; command asked for n = {}, rank {rank}",
            f.n(),
            f.rank(),
            cfg.recon.n
        )));
    }
    if f.c() != 1.0 {
        return Err(CliError::Usage(format!("reconstruction needs c = 1, phantom has c = {}", f.c())));
    }
    let oracle = DataOracle::new(f, cfg.quadrature.clone())?;
    let report = reconstruct(&oracle, &cfg.recon)?;
    write_recon_csv(create(out, RECON_FILE)?, &report)?;
    write_json(out, REPORT_FILE, &report_json(&report))?;
    let bound = cfg.max_rel_error.unwrap_or(if rank == 1 { 0.05 } else { 0.10 });
    let ok = report.aggregate_rel_error <= bound;
    println!("sign: {:+}", report.sign.sign);
    if let Some(p) = &report.psi_sign {
        println!("psi sign: {:+}", p.sign);
    }
    if !report.input_trace_free {
        println!("note: input not trace-free; compared against its trace-free part");
    }
    for fail in &report.failures {
        println!("failed point {}: {}", fail.index, fail.reason);
    }
    println!(
        "aggregate rel error: {:.4e} over {} points (bound {bound}) {}",
        report.aggregate_rel_error,
        report.points.len(),
        if ok { "pass" } else { "FAIL" }
    );
    Ok(ok)
}

