//! Named experiment presets with the study's reference parameters.
//!
//! Trial counts default to desk scale (500, or 300 for the multi-qubit
//! sweeps); `--full-scale` restores 5000.

use crate::config::{ConfigFile, ExperimentSpec, NoiseConfig, ProtocolConfig};

pub const FULL_SCALE_TRIALS: u32 = 5000;

pub const PRESET_NAMES: [&str; 14] = [
    "fig2-success-dip",
    "fig3-traces",
    "fig4a-relerr",
    "fig4b-crossover",
    "fig5-closedform",
    "fig6-informed-pd",
    "ad-success",
    "ad-relerr",
    "ad-informed",
    "ghz-pd",
    "ghz-ad",
    "globalfold-pd",
    "globalfold-ad",
    "alt-check",
];

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

fn all_methods() -> Vec<String> {
    [
        "zne_linear",
        "zne_richardson",
        "zne_exponential",
        "ramsey",
        "ramsey_equal_shots",
        "ramsey_equal_time",
        "ramsey_equal_both",
    ]
    .map(String::from)
    .to_vec()
}

fn ghz_methods() -> Vec<String> {
    ["ramsey", "ramsey_equal_both", "zne_linear", "zne_richardson", "zne_exponential"]
        .map(String::from)
        .to_vec()
}

fn base(
    noise_kind: &str,
    rate: f64,
    detection: &str,
    sensing_time: f64,
    experiment: ExperimentSpec,
) -> ConfigFile {
    ConfigFile {
        schema: crate::config::CONFIG_SCHEMA.into(),
        seed: 0,
        n_trials: 500,
        n_shots: 10_000,
        exact_p: false,
        noise: NoiseConfig { kind: noise_kind.into(), rate },
        protocol: ProtocolConfig {
            detection: detection.into(),
            folding: "local".into(),
            fold_counts: vec![0, 1, 2],
            n_qubits: 1,
            sensing_time,
            fit: "linear".into(),
        },
        experiment,
    }
}

/// Materializes a preset config, or lists the known names in the error.
pub fn materialize(name: &str) -> Result<ConfigFile, String> {
    let pi = std::f64::consts::PI;
    let cfg = match name {
        "fig2-success-dip" => base(
            "phase_damping",
            0.05,
            "variance",
            1.0,
            ExperimentSpec::SuccessVsTime {
                b_true: 1.0,
                t_grid: grid(0.1, 0.1, 30),
                rates: vec![0.05, 0.1, 0.15],
            },
        ),
        "fig3-traces" => base(
            "phase_damping",
            0.15,
            "variance",
            1.0,
            ExperimentSpec::ExtrapolationTrace {
                b_true: 1.0,
                t_values: vec![pi / 2.0, pi / 4.0],
            },
        ),
        "fig4a-relerr" => base(
            "phase_damping",
            0.1,
            "slope",
            1.0,
            ExperimentSpec::RelativeError { b_grid: grid(0.05, 0.05, 20), methods: all_methods() },
        ),
        "fig4b-crossover" => base(
            "phase_damping",
            0.1,
            "slope",
            1.0,
            ExperimentSpec::Crossover {
                b_grid: grid(0.05, 0.05, 20),
                shot_counts: vec![1_000, 10_000],
            },
        ),
        "fig5-closedform" => base(
            "phase_damping",
            0.0,
            "variance",
            1.0,
            ExperimentSpec::ClosedForm {
                rate_grid: grid(0.0, 0.01, 51),
                fold_counts: vec![0, 1, 2],
                bt: pi / 4.0,
            },
        ),
        "fig6-informed-pd" => {
            let mut cfg = base(
                "phase_damping",
                0.05,
                "variance",
                1.0,
                ExperimentSpec::Informed { b_grid: grid(0.05, 0.05, 20) },
            );
            cfg.n_shots = 20_000;
            cfg
        }
        "ad-success" => base(
            "amplitude_damping",
            0.05,
            "variance",
            1.0,
            ExperimentSpec::SuccessVsTime {
                b_true: 1.0,
                t_grid: grid(0.1, 0.1, 30),
                rates: vec![0.05, 0.1, 0.15],
            },
        ),
        "ad-relerr" => base(
            "amplitude_damping",
            0.01,
            "variance",
            1.0,
            ExperimentSpec::RelativeError { b_grid: grid(0.05, 0.05, 20), methods: all_methods() },
        ),
        "ad-informed" => {
            let mut cfg = base(
                "amplitude_damping",
                0.01,
                "variance",
                1.0,
                ExperimentSpec::Informed { b_grid: grid(0.05, 0.05, 20) },
            );
            cfg.n_shots = 20_000;
            cfg
        }
        "ghz-pd" => {
            let mut cfg = base(
                "phase_damping",
                0.005,
                "slope",
                1.0,
                ExperimentSpec::RelativeError {
                    b_grid: vec![0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
                    methods: ghz_methods(),
                },
            );
            cfg.protocol.n_qubits = 4;
            cfg.n_trials = 300;
            cfg
        }
        "ghz-ad" => {
            let mut cfg = base(
                "amplitude_damping",
                0.005,
                "slope",
                1.0,
                ExperimentSpec::RelativeError {
                    b_grid: vec![0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
                    methods: ghz_methods(),
                },
            );
            cfg.protocol.n_qubits = 4;
            cfg.n_trials = 300;
            cfg
        }
        "globalfold-pd" => {
            let mut cfg = base(
                "phase_damping",
                0.1,
                "slope",
                1.0,
                ExperimentSpec::RelativeError {
                    b_grid: grid(0.05, 0.05, 20),
                    methods: all_methods(),
                },
            );
            cfg.protocol.folding = "global".into();
            cfg
        }
        "globalfold-ad" => {
            let mut cfg = base(
                "amplitude_damping",
                0.01,
                "slope",
                1.0,
                ExperimentSpec::RelativeError {
                    b_grid: grid(0.05, 0.05, 20),
                    methods: all_methods(),
                },
            );
            cfg.protocol.folding = "global".into();
            cfg
        }
        "alt-check" => base(
            "phase_damping",
            0.0,
            "variance",
            pi / 10.0,
            ExperimentSpec::AltCheck {
                dephasing_rate: 0.05,
                decay_rate: 0.01,
                b_true: 1.0,
                segment_time: pi / 10.0,
                gate_time_fraction: 0.05,
                k_max: 10,
            },
        ),
        unknown => {
            return Err(format!(
                "unknown preset {unknown:?}; available presets: {}",
                PRESET_NAMES.join(", ")
            ))
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_materializes_and_validates() {
        for name in PRESET_NAMES {
            let cfg = materialize(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn materialized_configs_survive_json_round_trip() {
        for name in PRESET_NAMES {
            let cfg = materialize(name).unwrap();
            let text = serde_json::to_string_pretty(&cfg).unwrap();
            let back = ConfigFile::parse(&text).unwrap();
            assert_eq!(back, cfg, "{name} drifted through serialization");
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        let err = materialize("fig9-nope").unwrap_err();
        assert!(err.contains("fig2-success-dip"));
        assert!(err.contains("alt-check"));
    }
}
