//! Run configuration files.
//!
//! TOML with a small schema; matrix and vector data live in separate CSV
//! files referenced by path (relative paths resolve against the config
//! file's directory), small vectors are written inline.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use gippa_core::solvers::Schedule;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub kernel: KernelConfig,
    pub schedules: Schedules,
    pub init: InitSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub output: OutputSpec,
    /// Reserved for sampled diagnostics; the deterministic solve path does
    /// not consume randomness.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
}

fn default_max_iter() -> usize {
    10_000
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `F(x) = Ax − b` with both pieces loaded from CSV files.
    Affine { a: String, b: String },
    /// A named operator from the built-in registry.
    Builtin { name: String },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelConfig {
    Matrix {
        file: String,
    },
    Identity,
    Construct {
        method: ConstructMethod,
        a1: Option<String>,
        replacement: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructMethod {
    Perturbation,
    Symmetric,
    Factored,
}

impl std::fmt::Display for ConstructMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConstructMethod::Perturbation => "perturbation",
            ConstructMethod::Symmetric => "symmetric",
            ConstructMethod::Factored => "factored",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedules {
    pub gamma: ScheduleSpec,
    pub alpha: ScheduleSpec,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Constant { value: f64 },
    /// `base + scale/(n + offset)`.
    OffsetInverse { base: f64, scale: f64, offset: f64 },
    /// `min(cap, n/(n + offset))`.
    CappedRamp { cap: f64, offset: f64 },
}

impl From<ScheduleSpec> for Schedule {
    fn from(spec: ScheduleSpec) -> Schedule {
        match spec {
            ScheduleSpec::Constant { value } => Schedule::Constant(value),
            ScheduleSpec::OffsetInverse { base, scale, offset } => {
                Schedule::OffsetInverse { base, scale, offset }
            }
            ScheduleSpec::CappedRamp { cap, offset } => Schedule::CappedRamp { cap, offset },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol")]
    pub step: f64,
    #[serde(default = "default_tol")]
    pub residual: f64,
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { step: default_tol(), residual: default_tol() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; a `--out` flag overrides it.
    pub dir: Option<String>,
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default = "default_true")]
    pub report: bool,
    #[serde(default)]
    pub plot: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, csv: true, report: true, plot: false }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub x_star: Vec<f64>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<(Self, PathBuf), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| format!("cannot parse config: {e}"))?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        Ok((cfg, base))
    }

    /// Resolve a file reference against the config's directory.
    pub fn resolve(base: &Path, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }
}
