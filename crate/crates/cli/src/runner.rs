//! Executes a validated config and renders the results as CSV tables.

use thiserror::Error;

use ramsey_zne::analytic::{p1_local_ad, p1_local_pd};
use ramsey_zne::experiments::{
    alt_check, crossover_field, extrapolation_trace, infinite_shot_compare, informed_sweep,
    relative_error_sweep, success_probability, ExperimentConfig, ExperimentError,
};
use ramsey_zne::{NoiseKind, NoiseSpec};

use crate::config::{ConfigError, ConfigFile, ExperimentSpec};
use crate::csv_io::CsvTable;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("experiment failed: {0}")]
    Experiment(#[from] ExperimentError),
}

fn base_table(file: &ConfigFile, cfg: &ExperimentConfig, header: Vec<String>) -> CsvTable {
    let mut t = CsvTable::new(&format!("{}-v1", file.experiment.kind_name()), header);
    t.meta("seed", cfg.seed);
    t.meta("n_trials", cfg.n_trials);
    t.meta("n_shots", cfg.n_shots);
    t.meta("exact_p", cfg.exact_p);
    t.meta("noise_kind", &file.noise.kind);
    t.meta("noise_rate", file.noise.rate);
    t.meta("detection", &file.protocol.detection);
    t.meta("folding", &file.protocol.folding);
    t.meta("n_qubits", file.protocol.n_qubits);
    t.meta("sensing_time", file.protocol.sensing_time);
    t.meta(
        "fold_counts",
        file.protocol
            .fold_counts
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    t
}

/// Runs the experiment a config describes. Returns `(file_name, table)`
/// pairs, one CSV per output table.
pub fn run_experiment(file: &ConfigFile) -> Result<Vec<(String, CsvTable)>, RunError> {
    let cfg = file.validate()?;
    let kind = file.noise_kind()?;
    let name = format!("{}.csv", file.experiment.kind_name());
    let table = match &file.experiment {
        ExperimentSpec::SuccessVsTime { b_true, t_grid, rates } => {
            let mut header = vec!["t".to_string()];
            header.extend(rates.iter().map(|r| format!("nu_{r}")));
            let mut table = base_table(file, &cfg, header);
            table.meta("b_true", b_true);
            for &t in t_grid {
                let mut row = vec![Some(t)];
                for &rate in rates {
                    let noise = NoiseSpec::new(kind, rate)
                        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
                    let mut sub = cfg.clone();
                    sub.protocol.noise = noise;
                    sub.protocol.sensing_time = t;
                    row.push(Some(success_probability(&sub, *b_true)?));
                }
                table.push_row(row);
            }
            table
        }
        ExperimentSpec::ExtrapolationTrace { b_true, t_values } => {
            let mut header = vec!["eta".to_string()];
            header.extend((0..t_values.len()).map(|i| format!("mean_b_t{i}")));
            let mut table = base_table(file, &cfg, header);
            table.meta("b_true", b_true);
            table.meta(
                "t_values",
                t_values.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
            );
            let mut columns = Vec::new();
            for &t in t_values {
                let mut sub = cfg.clone();
                sub.protocol.sensing_time = t;
                columns.push(extrapolation_trace(&sub, *b_true)?);
            }
            for (i, &(eta, _)) in columns[0].iter().enumerate() {
                let mut row = vec![Some(eta)];
                for col in &columns {
                    row.push(Some(col[i].1));
                }
                table.push_row(row);
            }
            table
        }
        ExperimentSpec::RelativeError { b_grid, methods } => {
            let parsed = ConfigFile::methods(methods)?;
            let mut header = vec!["b".to_string()];
            header.extend(parsed.iter().map(|m| m.name().to_string()));
            let mut table = base_table(file, &cfg, header);
            let rows = relative_error_sweep(&cfg, b_grid, &parsed)?;
            for r in rows {
                let mut row = vec![Some(r.x)];
                for m in &parsed {
                    row.push(r.error_of(*m));
                }
                table.push_row(row);
            }
            table
        }
        ExperimentSpec::Crossover { b_grid, shot_counts } => {
            let mut table =
                base_table(file, &cfg, vec!["n_shots".into(), "crossover_b".into()]);
            for &n_s in shot_counts {
                let mut sub = cfg.clone();
                sub.n_shots = n_s;
                let crossing = crossover_field(&sub, b_grid)?;
                table.push_row(vec![Some(n_s as f64), crossing]);
            }
            table
        }
        ExperimentSpec::ClosedForm { rate_grid, fold_counts, bt } => {
            let mut header = vec!["rate".to_string()];
            header.extend(fold_counts.iter().map(|m| format!("p1_m{m}")));
            let mut table = base_table(file, &cfg, header);
            table.meta("bt", bt);
            for &rate in rate_grid {
                let mut row = vec![Some(rate)];
                for &m in fold_counts {
                    let p = match kind {
                        NoiseKind::PhaseDamping => p1_local_pd(rate, *bt, 1.0, m),
                        NoiseKind::AmplitudeDamping => p1_local_ad(rate, *bt, 1.0, m, m),
                    };
                    row.push(Some(p));
                }
                table.push_row(row);
            }
            table
        }
        ExperimentSpec::Informed { b_grid } => {
            let mut table = base_table(
                file,
                &cfg,
                vec!["b".into(), "zne_informed".into(), "ramsey_fringe".into()],
            );
            for r in informed_sweep(&cfg, b_grid)? {
                table.push_row(vec![Some(r.x), Some(r.zne_informed), Some(r.ramsey_fringe)]);
            }
            table
        }
        ExperimentSpec::InfiniteShot { b_grid } => {
            let mut table =
                base_table(file, &cfg, vec!["b".into(), "zne_linear".into(), "ramsey".into()]);
            for r in infinite_shot_compare(&cfg, b_grid)? {
                let mut row = vec![Some(r.x)];
                for (_, err) in &r.mean_rel_error {
                    row.push(Some(*err));
                }
                table.push_row(row);
            }
            table
        }
        ExperimentSpec::AltCheck {
            dephasing_rate,
            decay_rate,
            b_true,
            segment_time,
            gate_time_fraction,
            k_max,
        } => {
            let mut table = base_table(
                file,
                &cfg,
                vec![
                    "k".into(),
                    "sim_pd".into(),
                    "alt_pd".into(),
                    "sim_ad".into(),
                    "alt_ad".into(),
                    "alt_ad_first_order".into(),
                ],
            );
            table.meta("dephasing_rate", dephasing_rate);
            table.meta("decay_rate", decay_rate);
            table.meta("b_true", b_true);
            table.meta("segment_time", segment_time);
            table.meta("gate_time_fraction", gate_time_fraction);
            for r in alt_check(
                *dephasing_rate,
                *decay_rate,
                *b_true,
                *segment_time,
                *gate_time_fraction,
                *k_max,
            )? {
                table.push_row(vec![
                    Some(f64::from(r.folds)),
                    Some(r.sim_pd),
                    Some(r.alt_pd),
                    Some(r.sim_ad),
                    Some(r.alt_ad),
                    Some(r.alt_ad_first_order),
                ]);
            }
            table
        }
    };
    Ok(vec![(name, table)])
}
