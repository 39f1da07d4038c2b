//! Command implementations behind the CLI surface.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::config::{apply_override, ConfigError, ConfigFile};
use crate::csv_io::{CsvError, CsvTable};
use crate::presets;
use crate::runner::{run_experiment, RunError};
use crate::svg::{write_plot, PlotError, PlotSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    UnknownPreset(String),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("run failed: {0}")]
    Run(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Whether the failure is the caller's input (exit 2) rather than a
    /// runtime fault (exit 1).
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            CliError::Config(_)
                | CliError::UnknownPreset(_)
                | CliError::Csv(
                    CsvError::MissingHeader
                        | CsvError::Empty
                        | CsvError::RaggedRow { .. }
                        | CsvError::BadNumber { .. }
                )
                | CliError::Plot(PlotError::TooFewColumns | PlotError::NothingToDraw)
        )
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => CliError::Config(c),
            RunError::Experiment(x) => CliError::Run(x.to_string()),
        }
    }
}

/// Options shared by `run` and `preset`.
#[derive(Debug, Clone, Default)]
pub struct GlobalOpts {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub full_scale: bool,
}

/// Record of one completed run; every listed artifact exists on success.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_source: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub duration: Duration,
}

fn execute(
    mut file: ConfigFile,
    config_source: String,
    default_out: &str,
    opts: &GlobalOpts,
    write_config_copy: bool,
) -> Result<RunManifest, CliError> {
    if let Some(seed) = opts.seed {
        file.seed = seed;
    }
    if opts.full_scale {
        file.n_trials = presets::FULL_SCALE_TRIALS;
    }
    file.validate()?;

    let out_dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(default_out));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io { path: out_dir.display().to_string(), source: e })?;

    let started = Instant::now();
    let tables = match opts.workers {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Run(e.to_string()))?;
            pool.install(|| run_experiment(&file))?
        }
        _ => run_experiment(&file)?,
    };

    let mut artifacts = Vec::new();
    if write_config_copy {
        let path = out_dir.join("config.json");
        let text = serde_json::to_string_pretty(&file).map_err(ConfigError::Parse)?;
        std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        artifacts.push(path);
    }
    for (name, table) in &tables {
        let path = out_dir.join(name);
        table.write(&path)?;
        artifacts.push(path);
    }
    for artifact in &artifacts {
        if !artifact.exists() {
            return Err(CliError::Run(format!("artifact {} was not written", artifact.display())));
        }
    }
    Ok(RunManifest {
        config_source,
        seed: file.seed,
        out_dir,
        artifacts,
        duration: started.elapsed(),
    })
}

/// `run <config.json>`: execute the experiment a config file describes.
pub fn cmd_run(config_path: &Path, opts: &GlobalOpts) -> Result<RunManifest, CliError> {
    let file = ConfigFile::load(config_path)?;
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    execute(file, config_path.display().to_string(), &stem, opts, false)
}

/// `preset <name> [--set key=value ...]`: materialize a named preset, apply
/// overrides, and run it. The materialized config is written alongside the
/// results so the run can be reproduced with `run`.
pub fn cmd_preset(
    name: &str,
    overrides: &[String],
    opts: &GlobalOpts,
) -> Result<RunManifest, CliError> {
    let file = presets::materialize(name).map_err(CliError::UnknownPreset)?;
    let mut doc = serde_json::to_value(&file).map_err(ConfigError::Parse)?;
    for setting in overrides {
        apply_override(&mut doc, setting)?;
    }
    let file: ConfigFile = serde_json::from_value(doc).map_err(ConfigError::Parse)?;
    execute(file, format!("preset:{name}"), name, opts, true)
}

/// `plot <csv>`: render a CSV table to an SVG line plot next to the input
/// (or at `out_file`).
pub fn cmd_plot(
    csv_path: &Path,
    spec: PlotSpec,
    out_file: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let table = CsvTable::read(csv_path)?;
    let out = out_file.unwrap_or_else(|| csv_path.with_extension("svg"));
    write_plot(&table, spec, &out)?;
    Ok(out)
}
