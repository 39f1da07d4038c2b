//! Experiment configuration schema: a single JSON document validated into
//! the core experiment types.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ramsey_zne::circuits::{Detection, Folding, ProtocolSpec};
use ramsey_zne::experiments::{ExperimentConfig, Method};
use ramsey_zne::fitters::FitKind;
use ramsey_zne::{NoiseKind, NoiseSpec};

pub const CONFIG_SCHEMA: &str = "zne-experiment-v1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config field `{field}` invalid: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

/// Top-level config document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub n_trials: u32,
    #[serde(default = "default_shots")]
    pub n_shots: u64,
    #[serde(default)]
    pub exact_p: bool,
    pub noise: NoiseConfig,
    pub protocol: ProtocolConfig,
    pub experiment: ExperimentSpec,
}

fn default_seed() -> u64 {
    0
}
fn default_trials() -> u32 {
    500
}
fn default_shots() -> u64 {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// "phase_damping" or "amplitude_damping".
    pub kind: String,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// "slope" or "variance".
    pub detection: String,
    /// "local" or "global".
    #[serde(default = "default_folding")]
    pub folding: String,
    #[serde(default = "default_fold_counts")]
    pub fold_counts: Vec<u32>,
    #[serde(default = "default_n_qubits")]
    pub n_qubits: usize,
    pub sensing_time: f64,
    /// ZNE extrapolation used where a single fit is called for.
    #[serde(default = "default_fit")]
    pub fit: String,
}

fn default_folding() -> String {
    "local".into()
}
fn default_fold_counts() -> Vec<u32> {
    vec![0, 1, 2]
}
fn default_n_qubits() -> usize {
    1
}
fn default_fit() -> String {
    "linear".into()
}

/// The experiment families the runner knows how to execute.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// ZNE success probability over a sensing-time grid, one curve per rate.
    SuccessVsTime { b_true: f64, t_grid: Vec<f64>, rates: Vec<f64> },
    /// Mean estimate per noise scale, one curve per sensing time.
    ExtrapolationTrace { b_true: f64, t_values: Vec<f64> },
    /// Mean relative error per method over a field grid.
    RelativeError { b_grid: Vec<f64>, methods: Vec<String> },
    /// Crossover field against the equal-shot baseline per shot count.
    Crossover { b_grid: Vec<f64>, shot_counts: Vec<u64> },
    /// Closed-form folded fringe probability over a rate grid.
    ClosedForm { rate_grid: Vec<f64>, fold_counts: Vec<u32>, bt: f64 },
    /// Noise-informed two-parameter fits over a field grid.
    Informed { b_grid: Vec<f64> },
    /// Deterministic infinite-shot ZNE vs unmitigated comparison.
    InfiniteShot { b_grid: Vec<f64> },
    /// Global-folding simulation against average-Liouvillian references.
    AltCheck {
        dephasing_rate: f64,
        decay_rate: f64,
        b_true: f64,
        segment_time: f64,
        #[serde(default = "default_gate_time_fraction")]
        gate_time_fraction: f64,
        k_max: u32,
    },
}

fn default_gate_time_fraction() -> f64 {
    0.05
}

impl ExperimentSpec {
    /// Stable name used for CSV files and schema tags.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExperimentSpec::SuccessVsTime { .. } => "success_vs_time",
            ExperimentSpec::ExtrapolationTrace { .. } => "extrapolation_trace",
            ExperimentSpec::RelativeError { .. } => "relative_error",
            ExperimentSpec::Crossover { .. } => "crossover",
            ExperimentSpec::ClosedForm { .. } => "closed_form",
            ExperimentSpec::Informed { .. } => "informed",
            ExperimentSpec::InfiniteShot { .. } => "infinite_shot",
            ExperimentSpec::AltCheck { .. } => "alt_check",
        }
    }
}

fn is_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn is_non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

fn ascending(field: &str, grid: &[f64]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(invalid(field, "grid must be nonempty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(invalid(field, "grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(field, "grid must be strictly ascending"));
    }
    Ok(())
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn noise_kind(&self) -> Result<NoiseKind, ConfigError> {
        match self.noise.kind.as_str() {
            "phase_damping" => Ok(NoiseKind::PhaseDamping),
            "amplitude_damping" => Ok(NoiseKind::AmplitudeDamping),
            other => Err(invalid(
                "noise.kind",
                format!("unknown kind {other:?}, expected phase_damping or amplitude_damping"),
            )),
        }
    }

    pub fn detection(&self) -> Result<Detection, ConfigError> {
        match self.protocol.detection.as_str() {
            "slope" => Ok(Detection::Slope),
            "variance" => Ok(Detection::Variance),
            other => {
                Err(invalid(
                    "protocol.detection",
                    format!("unknown detection {other:?}, expected slope or variance"),
                ))
            }
        }
    }

    pub fn fit_kind(&self) -> Result<FitKind, ConfigError> {
        match self.protocol.fit.as_str() {
            "linear" => Ok(FitKind::Linear),
            "richardson" => Ok(FitKind::Richardson),
            "exponential" => Ok(FitKind::Exponential),
            other => Err(invalid(
                "protocol.fit",
                format!("unknown fit {other:?}, expected linear, richardson or exponential"),
            )),
        }
    }

    pub fn methods(names: &[String]) -> Result<Vec<Method>, ConfigError> {
        names
            .iter()
            .map(|n| {
                Method::parse(n).ok_or_else(|| {
                    invalid("experiment.methods", format!("unknown method {n:?}"))
                })
            })
            .collect()
    }

    /// Full validation; returns the core experiment config for the base
    /// protocol.
    pub fn validate(&self) -> Result<ExperimentConfig, ConfigError> {
        if self.schema != CONFIG_SCHEMA {
            return Err(invalid(
                "schema",
                format!("expected {CONFIG_SCHEMA:?}, got {:?}", self.schema),
            ));
        }
        let kind = self.noise_kind()?;
        let noise = NoiseSpec::new(kind, self.noise.rate)
            .map_err(|e| invalid("noise.rate", e.to_string()))?;
        let detection = self.detection()?;
        let folding = match self.protocol.folding.as_str() {
            "local" => Folding::Local(0),
            "global" => Folding::Global(0),
            other => {
                return Err(invalid(
                    "protocol.folding",
                    format!("unknown folding {other:?}, expected local or global"),
                ))
            }
        };
        if self.protocol.n_qubits == 0 || self.protocol.n_qubits > 12 {
            return Err(invalid("protocol.n_qubits", "must be between 1 and 12"));
        }
        if !is_positive(self.protocol.sensing_time) {
            return Err(invalid("protocol.sensing_time", "must be positive and finite"));
        }
        let fit = self.fit_kind()?;
        if self.n_trials == 0 {
            return Err(invalid("n_trials", "must be at least 1"));
        }
        if self.n_shots == 0 {
            return Err(invalid("n_shots", "must be at least 1"));
        }

        match &self.experiment {
            ExperimentSpec::SuccessVsTime { b_true, t_grid, rates } => {
                if !is_positive(*b_true) {
                    return Err(invalid("experiment.b_true", "must be positive"));
                }
                ascending("experiment.t_grid", t_grid)?;
                if t_grid.iter().any(|t| *t <= 0.0) {
                    return Err(invalid("experiment.t_grid", "times must be positive"));
                }
                if rates.is_empty() {
                    return Err(invalid("experiment.rates", "need at least one rate"));
                }
                for r in rates {
                    NoiseSpec::new(kind, *r)
                        .map_err(|e| invalid("experiment.rates", e.to_string()))?;
                }
            }
            ExperimentSpec::ExtrapolationTrace { b_true, t_values } => {
                if !is_positive(*b_true) {
                    return Err(invalid("experiment.b_true", "must be positive"));
                }
                if t_values.is_empty() || t_values.iter().any(|t| *t <= 0.0) {
                    return Err(invalid("experiment.t_values", "need positive times"));
                }
            }
            ExperimentSpec::RelativeError { b_grid, methods } => {
                ascending("experiment.b_grid", b_grid)?;
                if b_grid[0] <= 0.0 {
                    return Err(invalid("experiment.b_grid", "fields must be positive"));
                }
                let parsed = Self::methods(methods)?;
                if parsed.is_empty() {
                    return Err(invalid("experiment.methods", "need at least one method"));
                }
            }
            ExperimentSpec::Crossover { b_grid, shot_counts } => {
                ascending("experiment.b_grid", b_grid)?;
                if b_grid[0] <= 0.0 {
                    return Err(invalid("experiment.b_grid", "fields must be positive"));
                }
                if shot_counts.is_empty() || shot_counts.contains(&0) {
                    return Err(invalid("experiment.shot_counts", "need positive shot counts"));
                }
            }
            ExperimentSpec::ClosedForm { rate_grid, fold_counts, bt } => {
                ascending("experiment.rate_grid", rate_grid)?;
                for r in rate_grid {
                    NoiseSpec::new(kind, *r)
                        .map_err(|e| invalid("experiment.rate_grid", e.to_string()))?;
                }
                if fold_counts.is_empty() {
                    return Err(invalid("experiment.fold_counts", "need at least one fold count"));
                }
                if !bt.is_finite() {
                    return Err(invalid("experiment.bt", "must be finite"));
                }
            }
            ExperimentSpec::Informed { b_grid } => {
                ascending("experiment.b_grid", b_grid)?;
                if b_grid[0] <= 0.0 {
                    return Err(invalid("experiment.b_grid", "fields must be positive"));
                }
            }
            ExperimentSpec::InfiniteShot { b_grid } => {
                ascending("experiment.b_grid", b_grid)?;
                if b_grid[0] <= 0.0 {
                    return Err(invalid("experiment.b_grid", "fields must be positive"));
                }
            }
            ExperimentSpec::AltCheck {
                dephasing_rate,
                decay_rate,
                b_true,
                segment_time,
                gate_time_fraction,
                ..
            } => {
                for (name, v) in [
                    ("experiment.dephasing_rate", dephasing_rate),
                    ("experiment.decay_rate", decay_rate),
                ] {
                    if !is_non_negative(*v) {
                        return Err(invalid(name, "must be non-negative and finite"));
                    }
                }
                if !is_positive(*segment_time) {
                    return Err(invalid("experiment.segment_time", "must be positive"));
                }
                if !is_positive(*gate_time_fraction) {
                    return Err(invalid("experiment.gate_time_fraction", "must be positive"));
                }
                if !b_true.is_finite() {
                    return Err(invalid("experiment.b_true", "must be finite"));
                }
            }
        }

        let cfg = ExperimentConfig {
            protocol: ProtocolSpec {
                detection,
                folding,
                n_qubits: self.protocol.n_qubits,
                noise,
                field: 1.0,
                sensing_time: self.protocol.sensing_time,
            },
            fit,
            fold_counts: self.protocol.fold_counts.clone(),
            n_shots: self.n_shots,
            n_trials: self.n_trials,
            seed: self.seed,
            exact_p: self.exact_p,
        };
        cfg.validate().map_err(|e| invalid("protocol.fold_counts", e.to_string()))?;
        Ok(cfg)
    }
}

/// Applies one `key=value` override to the JSON document; `key` is a
/// dot-separated path and `value` is parsed as JSON, falling back to a bare
/// string.
pub fn apply_override(doc: &mut serde_json::Value, setting: &str) -> Result<(), ConfigError> {
    let Some((key, raw_value)) = setting.split_once('=') else {
        return Err(invalid("--set", format!("expected key=value, got {setting:?}")));
    };
    if key.is_empty() {
        return Err(invalid("--set", "empty key"));
    }
    let value: serde_json::Value = serde_json::from_str(raw_value)
        .unwrap_or_else(|_| serde_json::Value::String(raw_value.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            invalid("--set", format!("path {key:?} does not address an object"))
        })?;
        if i == parts.len() - 1 {
            map.insert((*part).to_string(), value);
            return Ok(());
        }
        node = map
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("loop returns on the last path segment")
}
