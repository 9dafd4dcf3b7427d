//! Experiment configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use cone_walk::WindowPolicy;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::GlobalArgs;

/// Settings shared by every command, after merging file and flags.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved<P> {
    pub command: String,
    pub model: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub params: P,
}

impl<P> Resolved<P> {
    /// Parallel kernels are used unless deterministic mode was requested.
    pub fn parallel(&self) -> bool {
        !self.deterministic
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig<P> {
    model: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
    deterministic: Option<bool>,
    params: Option<P>,
}

fn parse_typed<T: DeserializeOwned>(text: &str, origin: &str) -> anyhow::Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            anyhow!("config: {origin}: {inner}")
        } else {
            anyhow!("config: {origin}: field `{path}`: {inner}")
        }
    })
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

pub fn resolve<P>(command: &str, args: &GlobalArgs) -> anyhow::Result<Resolved<P>>
where
    P: DeserializeOwned + Serialize,
{
    let (mut text, origin, base_dir) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("config: cannot read {}", path.display()))?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (text, path.display().to_string(), dir)
        }
        None => ("{}".to_string(), "<flags>".to_string(), PathBuf::new()),
    };
    if let Some(inline) = &args.params {
        let over: Value = serde_json::from_str(inline).map_err(|e| anyhow!("config: --params: {e}"))?;
        let mut doc: Value = serde_json::from_str(&text).map_err(|e| anyhow!("config: {origin}: {e}"))?;
        merge(&mut doc, serde_json::json!({ "params": over }));
        text = serde_json::to_string_pretty(&doc)?;
    }
    let file: FileConfig<Value> = parse_typed(&text, &origin)?;
    let params_text = serde_json::to_string_pretty(&file.params.unwrap_or_else(|| serde_json::json!({})))?;
    let params: P = parse_typed(&params_text, &format!("{origin} (params)"))?;

    let model = match (&args.model, file.model) {
        (Some(m), _) => m.clone(),
        (None, Some(m)) if m.is_relative() => base_dir.join(m),
        (None, Some(m)) => m,
        (None, None) => bail!("config: no model given (use --model or the `model` field)"),
    };
    let out = args
        .out
        .clone()
        .or_else(|| file.out.map(|o| if o.is_relative() { base_dir.join(o) } else { o }))
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Resolved {
        command: command.to_string(),
        model,
        out,
        seed: args.seed.or(file.seed).unwrap_or(0),
        threads: args.threads.or(file.threads),
        deterministic: args.deterministic || file.deterministic.unwrap_or(false),
        params,
    })
}

/// Optional capped window; omitted means unbounded.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    #[serde(default = "default_window_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub prune_below: f64,
}

fn default_window_tolerance() -> f64 {
    1e-6
}

pub fn window(w: &Option<WindowConfig>) -> WindowPolicy {
    match w {
        None => WindowPolicy::unbounded(),
        Some(w) => {
            let mut p = WindowPolicy::capped(w.lower.clone(), w.upper.clone(), w.tolerance);
            p.prune_below = w.prune_below;
            p
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateParams {
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Points used for the irreducibility evidence; generated when omitted.
    #[serde(default)]
    pub samples: Option<Vec<Vec<i64>>>,
}

fn default_radius() -> f64 {
    3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenParams {
    pub x: Vec<i64>,
    #[serde(default)]
    pub targets: Vec<Vec<i64>>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "yes")]
    pub tail: bool,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    /// Also dump the truncated Green function at every visited point.
    #[serde(default)]
    pub table: bool,
}

fn default_horizon() -> usize {
    10_000
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalParams {
    pub x: Vec<i64>,
    pub n: usize,
    #[serde(default)]
    pub window: Option<WindowConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicParams {
    pub points: Vec<Vec<i64>>,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Evaluate `V'` (reversed walk) instead of `V`.
    #[serde(default)]
    pub reversed: bool,
    #[serde(default)]
    pub window: Option<WindowConfig>,
}

fn default_schedule() -> Vec<usize> {
    vec![50, 100, 200]
}

fn default_tol() -> f64 {
    1e-3
}

/// Green and `V` settings shared by the verification harnesses.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessParams {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    #[serde(default = "default_k_last")]
    pub k_last: usize,
    #[serde(default = "default_schedule")]
    pub v_schedule: Vec<usize>,
    #[serde(default = "default_tol")]
    pub v_tol: f64,
    #[serde(default)]
    pub v_window: Option<WindowConfig>,
}

impl Default for HarnessParams {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            window: None,
            k_last: default_k_last(),
            v_schedule: default_schedule(),
            v_tol: default_tol(),
            v_window: None,
        }
    }
}

fn default_k_last() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorParams {
    pub x: Vec<i64>,
    pub direction: Vec<f64>,
    pub scales: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_interior_spread")]
    pub max_spread: f64,
    #[serde(default)]
    pub harness: HarnessParams,
}

fn default_alpha() -> f64 {
    0.1
}

fn default_interior_spread() -> f64 {
    0.10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceParams {
    pub x: Vec<i64>,
    /// Explicit path; when omitted the path `(k, ceil(k^gamma))` over `ks` is used.
    #[serde(default)]
    pub path: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub ks: Vec<i64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_halfspace_spread")]
    pub max_spread: f64,
    #[serde(default)]
    pub harness: HarnessParams,
}

fn default_gamma() -> f64 {
    0.5
}

fn default_halfspace_spread() -> f64 {
    0.15
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryParams {
    pub x: Vec<i64>,
    pub sigma: Vec<f64>,
    pub scales: Vec<f64>,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_stopped_horizon")]
    pub stopped_horizon: usize,
    #[serde(default = "default_early_stop")]
    pub early_stop: f64,
    #[serde(default = "default_unstopped_limit")]
    pub unstopped_limit: f64,
    #[serde(default)]
    pub stopped_window: Option<WindowConfig>,
    #[serde(default = "default_boundary_spread")]
    pub max_spread: f64,
    #[serde(default)]
    pub harness: HarnessParams,
}

fn default_r() -> f64 {
    1.0
}

fn default_rho() -> f64 {
    0.25
}

fn default_stopped_horizon() -> usize {
    20_000
}

fn default_early_stop() -> f64 {
    1e-4
}

fn default_unstopped_limit() -> f64 {
    0.05
}

fn default_boundary_spread() -> f64 {
    0.20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartinParams {
    pub x: Vec<i64>,
    pub x0: Vec<i64>,
    #[serde(default)]
    pub path: Option<Vec<Vec<i64>>>,
    /// Used with `scales` when no explicit path is given.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    #[serde(default)]
    pub scales: Vec<f64>,
    /// Admissible relative deviation of the limit from `V(x)/V(x0)`.
    #[serde(default = "default_martin_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub harness: HarnessParams,
}

fn default_martin_tolerance() -> f64 {
    0.02
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSurvivalParams {
    pub x: Vec<i64>,
    pub n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McGreenParams {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    100_000
}
