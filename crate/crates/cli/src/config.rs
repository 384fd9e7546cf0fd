use crate::CliError;
use lightray::fourier_slice::SliceSpec;
use lightray::phantom::PhantomField;
use lightray::ray_transform::{FdSteps, QuadratureSpec, Rule};
use lightray::reconstruction::ReconConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const CONFIG_SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u64,
    /// Overrides every other seed in the file when set.
    pub seed: Option<u64>,
    /// Inline phantom spec; takes precedence over `phantom_file`.
    pub phantom: Option<Value>,
    pub phantom_file: Option<PathBuf>,
    pub quadrature: QuadratureSpec,
    pub slice: SliceSpec,
    pub recon: ReconConfig,
    pub forward: ForwardConfig,
    pub slice_points: SlicePoints,
    pub verify: VerifyConfig,
    /// Reconstruct exits 1 when the aggregate error exceeds this.
    pub max_rel_error: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_SCHEMA_VERSION,
            seed: None,
            phantom: None,
            phantom_file: None,
            quadrature: QuadratureSpec::default(),
            slice: SliceSpec::default(),
            recon: ReconConfig::default(),
            forward: ForwardConfig::default(),
            slice_points: SlicePoints::default(),
            verify: VerifyConfig::default(),
            max_rel_error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForwardConfig {
    /// Sampled rays when no rays file is given.
    pub rays: usize,
    pub moments: Vec<usize>,
    /// Base points are drawn from [−extent, extent]^{n+1}.
    pub extent: f64,
    /// CSV with columns t, x1..xn, omega1..omegan.
    pub rays_file: Option<PathBuf>,
    pub noise_sigma: f64,
}

impl Default for ForwardConfig {
    fn default() -> Self {
        ForwardConfig { rays: 10, moments: vec![0, 1], extent: 1.0, rays_file: None, noise_sigma: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlicePoints {
    pub count: usize,
    /// Fixed direction; random per point when absent.
    pub omega: Option<Vec<f64>>,
    pub max_radius: f64,
}

impl Default for SlicePoints {
    fn default() -> Self {
        SlicePoints { count: 20, omega: None, max_radius: 2.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Per-check tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub hooks: Hooks,
}

/// Test hooks for negative controls.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hooks {
    pub corrupt_commutator_constant: bool,
}

impl RunConfig {
    /// Defaults tuned for a reconstruction run of the given rank: rank ≥ 2
    /// runs use a coarser slice grid and data quadrature, rank 3 samples
    /// few points since every datum costs two levels of nested differences.
    pub fn for_rank(rank: usize) -> Self {
        let mut cfg = RunConfig::default();
        if rank >= 2 {
            cfg.quadrature = QuadratureSpec { rule: Rule::GaussLegendre, nodes: 32, halfwidth: 6.0 };
            cfg.recon.slice = SliceSpec { nodes: 16, margin: 6.0 };
        }
        if rank >= 3 {
            cfg.recon.zeta_count = 2;
        }
        cfg.max_rel_error = Some(if rank <= 1 { 0.05 } else { 0.10 });
        cfg
    }

    /// Layer a config file and `--set key=value` overrides over `base`.
    /// Objects merge key by key; anything else replaces.
    pub fn load(base: RunConfig, file: Option<&Path>, sets: &[String], seed: Option<u64>) -> Result<RunConfig, CliError> {
        let mut value = serde_json::to_value(&base).expect("config serializes");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            let user: Value = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
            if !user.is_object() {
                return Err(CliError::Schema(format!("{}: top level must be an object", path.display())));
            }
            merge(&mut value, user);
        }
        for s in sets {
            let (key, raw) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {s:?}")))?;
            let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut value, key, parsed)?;
        }
        if let Some(seed) = seed {
            value["seed"] = Value::from(seed);
        }
        let mut cfg: RunConfig = serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))?;
        if cfg.version != CONFIG_SCHEMA_VERSION {
            return Err(CliError::Schema(format!("config version {} unsupported, expected {CONFIG_SCHEMA_VERSION}", cfg.version)));
        }
        if let Some(seed) = cfg.seed {
            cfg.recon.seed = seed;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        for (name, tol) in &self.verify.tolerances {
            if !(*tol > 0.0) {
                return Err(CliError::Schema(format!("verify.tolerances.{name}: must be > 0")));
            }
        }
        if let Some(bound) = self.max_rel_error {
            if !(bound > 0.0) {
                return Err(CliError::Schema("max_rel_error: must be > 0".into()));
            }
        }
        if !(self.forward.extent > 0.0) || !(self.forward.noise_sigma >= 0.0) {
            return Err(CliError::Schema("forward: extent must be > 0 and noise_sigma >= 0".into()));
        }
        if !(self.slice_points.max_radius > 0.0) {
            return Err(CliError::Schema("slice_points.max_radius: must be > 0".into()));
        }
        self.quadrature.validate().map_err(|e| CliError::Schema(format!("quadrature: {e}")))?;
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn steps(&self) -> FdSteps {
        self.recon.steps
    }

    /// The configured phantom, if any.
    pub fn phantom(&self) -> Result<Option<PhantomField>, CliError> {
        let value = match (&self.phantom, &self.phantom_file) {
            (Some(v), _) => v.clone(),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
            }
            (None, None) => return Ok(None),
        };
        PhantomField::from_json(&value).map(Some).map_err(|e| CliError::Schema(format!("phantom: {e}")))
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set: empty path segment in {key:?}")));
    }
    let (last, parents) = parts.split_last().expect("split yields at least one segment");
    let mut cur = root;
    for part in parents {
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
        cur = match cur {
            Value::Object(obj) => obj.entry(part.to_string()).or_insert(Value::Null),
            Value::Array(items) => {
                let len = items.len();
                part.parse::<usize>()
                    .ok()
                    .and_then(|i| items.get_mut(i))
                    .ok_or_else(|| CliError::Usage(format!("--set: {key:?}: no element {part} (length {len})")))?
            }
            _ => return Err(CliError::Usage(format!("--set: {key:?} descends into a scalar"))),
        };
    }
    if cur.is_null() {
        *cur = Value::Object(Default::default());
    }
    match cur {
        Value::Object(obj) => {
            obj.insert(last.to_string(), value);
        }
        Value::Array(items) => {
            let len = items.len();
            let slot = last
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| CliError::Usage(format!("--set: {key:?}: no element {last} (length {len})")))?;
            *slot = value;
        }
        _ => return Err(CliError::Usage(format!("--set: {key:?} descends into a scalar"))),
    }
    Ok(())
}
