//! Monte-Carlo experiment orchestration and aggregate metrics: ZNE success
//! probability, resource-equalized relative-error sweeps, crossover fields,
//! sensitivity, and infinite-shot comparisons.
//!
//! Trials are independent work units. Each trial derives its random stream
//! from `(seed, stream_index)`, per-trial results are collected in trial
//! order, and aggregation is a sequential reduction over that order, so
//! results are bit-reproducible regardless of how many workers run the
//! trials.

use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{
    alt_p1_global_ad, alt_p1_global_ad_first_order, alt_p1_global_pd, AnalyticError,
};
use crate::circuits::{
    build_circuit, build_global_repeated, execute, CircuitError, Detection, ProtocolSpec,
};
use crate::fitters::{extrapolate, FitError, FitKind};
use crate::sampling::{invert_estimate, sample_p1, RngStream, SamplingError, ShotMode};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("experiment config invalid: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// Estimation methods that can appear in a comparison sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ZneLinear,
    ZneRichardson,
    ZneExponential,
    /// Unmitigated protocol at the ZNE per-circuit budget.
    Ramsey,
    /// Unmitigated protocol with the total ZNE shot budget.
    RamseyEqualShots,
    /// Unmitigated protocol with the total ZNE sensing time.
    RamseyEqualTime,
    /// Unmitigated protocol with both budgets equalized.
    RamseyEqualBoth,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::ZneLinear,
        Method::ZneRichardson,
        Method::ZneExponential,
        Method::Ramsey,
        Method::RamseyEqualShots,
        Method::RamseyEqualTime,
        Method::RamseyEqualBoth,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::ZneLinear => "zne_linear",
            Method::ZneRichardson => "zne_richardson",
            Method::ZneExponential => "zne_exponential",
            Method::Ramsey => "ramsey",
            Method::RamseyEqualShots => "ramsey_equal_shots",
            Method::RamseyEqualTime => "ramsey_equal_time",
            Method::RamseyEqualBoth => "ramsey_equal_both",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn is_zne(&self) -> bool {
        matches!(self, Method::ZneLinear | Method::ZneRichardson | Method::ZneExponential)
    }

    fn fit_kind(&self) -> Option<FitKind> {
        match self {
            Method::ZneLinear => Some(FitKind::Linear),
            Method::ZneRichardson => Some(FitKind::Richardson),
            Method::ZneExponential => Some(FitKind::Exponential),
            _ => None,
        }
    }
}

/// Declarative description of one experiment family.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Base protocol; the field strength is overridden per grid point.
    pub protocol: ProtocolSpec,
    /// Extrapolation used by `run_zne_trial` and `success_probability`.
    pub fit: FitKind,
    /// Fold counts of the ZNE ensemble; must start at 0 so every trial also
    /// yields the unmitigated estimate.
    pub fold_counts: Vec<u32>,
    pub n_shots: u64,
    pub n_trials: u32,
    pub seed: u64,
    /// Infinite-shot limit: use exact probabilities instead of sampling.
    pub exact_p: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.protocol.validate().map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        if self.fold_counts.is_empty() || self.fold_counts[0] != 0 {
            return Err(ExperimentError::InvalidConfig(
                "fold_counts must be nonempty and start at 0".into(),
            ));
        }
        if self.fold_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::InvalidConfig(
                "fold_counts must be strictly ascending".into(),
            ));
        }
        if self.n_trials == 0 {
            return Err(ExperimentError::InvalidConfig("n_trials must be at least 1".into()));
        }
        if self.n_shots == 0 {
            return Err(ExperimentError::InvalidConfig("n_shots must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of circuits one ZNE estimate consumes.
    pub fn circuits_per_estimate(&self) -> u64 {
        self.fold_counts.len() as u64
    }

    fn shot_mode(&self) -> ShotMode {
        if self.exact_p {
            ShotMode::ExactP
        } else {
            ShotMode::Shots(self.n_shots)
        }
    }
}

/// Shot count and total sensing time an unmitigated baseline is granted
/// under each resource policy.
pub fn baseline_resources(cfg: &ExperimentConfig, method: Method) -> (u64, f64) {
    let n_f = cfg.circuits_per_estimate();
    let t = cfg.protocol.sensing_time;
    match method {
        Method::RamseyEqualShots => (n_f * cfg.n_shots, t),
        Method::RamseyEqualTime => (cfg.n_shots, n_f as f64 * t),
        Method::RamseyEqualBoth => (n_f * cfg.n_shots, n_f as f64 * t),
        _ => (cfg.n_shots, t),
    }
}

/// Exact probabilities plus inversion contexts, precomputed once per grid
/// point so the Monte-Carlo loop only samples and fits.
struct TrialEngine {
    etas: Vec<f64>,
    zne_probs: Vec<f64>,
    zne_spec: ProtocolSpec,
    baselines: Vec<(Method, BaselineProbe)>,
    mode: ShotMode,
    fit: FitKind,
}

#[derive(Clone, Copy)]
struct BaselineProbe {
    p: f64,
    n_shots: u64,
    spec: ProtocolSpec,
}

impl TrialEngine {
    fn new(
        cfg: &ExperimentConfig,
        b_true: f64,
        methods: &[Method],
    ) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let zne_spec = ProtocolSpec { field: b_true, ..cfg.protocol };
        let mut etas = Vec::with_capacity(cfg.fold_counts.len());
        let mut zne_probs = Vec::with_capacity(cfg.fold_counts.len());
        for &m in &cfg.fold_counts {
            etas.push(2.0 * f64::from(m) + 1.0);
            zne_probs.push(execute(&build_circuit(&zne_spec.with_fold_count(m))?)?);
        }
        let mut baselines = Vec::new();
        for &method in methods {
            if method.is_zne() {
                continue;
            }
            let (n_shots, t_used) = baseline_resources(cfg, method);
            let spec = ProtocolSpec {
                field: b_true,
                sensing_time: t_used,
                ..cfg.protocol.with_fold_count(0)
            };
            let p = execute(&build_circuit(&spec)?)?;
            baselines.push((method, BaselineProbe { p, n_shots, spec }));
        }
        Ok(Self { etas, zne_probs, zne_spec, baselines, mode: cfg.shot_mode(), fit: cfg.fit })
    }

    /// Draws one trial and returns every requested estimate. The ZNE fits
    /// share one sampled ensemble; baselines draw their own shots, in
    /// declaration order.
    fn run_trial(&self, stream: RngStream) -> Result<TrialOutput, ExperimentError> {
        let mut rng = stream.rng();
        let mut ensemble = Vec::with_capacity(self.etas.len());
        for (&eta, &p) in self.etas.iter().zip(&self.zne_probs) {
            let p_hat = match self.mode {
                ShotMode::ExactP => p,
                ShotMode::Shots(n_s) => sample_p1(p, n_s, &mut rng)?.p_hat,
            };
            ensemble.push((eta, invert_estimate(&self.zne_spec, p_hat)?));
        }
        let unmitigated = ensemble[0].1;
        let mut baselines = Vec::with_capacity(self.baselines.len());
        for (method, probe) in &self.baselines {
            let p_hat = match self.mode {
                ShotMode::ExactP => probe.p,
                ShotMode::Shots(_) => sample_p1(probe.p, probe.n_shots, &mut rng)?.p_hat,
            };
            baselines.push((*method, invert_estimate(&probe.spec, p_hat)?));
        }
        Ok(TrialOutput { ensemble, unmitigated, baselines })
    }

    fn estimate(&self, output: &TrialOutput, method: Method) -> Result<f64, ExperimentError> {
        if let Some(kind) = method.fit_kind() {
            return Ok(extrapolate(&output.ensemble, kind, None)?);
        }
        output
            .baselines
            .iter()
            .find(|(m, _)| *m == method)
            .map(|(_, b)| *b)
            .ok_or_else(|| ExperimentError::InvalidConfig(format!("method {method:?} not probed")))
    }

    fn zne_estimate(&self, output: &TrialOutput) -> Result<f64, ExperimentError> {
        Ok(extrapolate(&output.ensemble, self.fit, None)?)
    }
}

struct TrialOutput {
    ensemble: Vec<(f64, f64)>,
    unmitigated: f64,
    baselines: Vec<(Method, f64)>,
}

/// One ZNE trial: the extrapolated estimate and the unmitigated (`m = 0`)
/// estimate from the same run. Deterministic in `(cfg.seed, trial_index)`.
pub fn run_zne_trial(
    cfg: &ExperimentConfig,
    b_true: f64,
    trial_index: u64,
) -> Result<(f64, f64), ExperimentError> {
    let engine = TrialEngine::new(cfg, b_true, &[])?;
    let output = engine.run_trial(RngStream::new(cfg.seed, trial_index))?;
    Ok((engine.zne_estimate(&output)?, output.unmitigated))
}

/// Fraction of `(zne, unmitigated)` pairs whose extrapolated estimate is
/// strictly closer to the truth; ties count as failures.
pub fn success_fraction(pairs: &[(f64, f64)], b_true: f64) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let wins = pairs
        .iter()
        .filter(|(zne, unmit)| (zne - b_true).abs() < (unmit - b_true).abs())
        .count();
    wins as f64 / pairs.len() as f64
}

/// ZNE success probability over `cfg.n_trials` Monte-Carlo trials.
pub fn success_probability(cfg: &ExperimentConfig, b_true: f64) -> Result<f64, ExperimentError> {
    let engine = TrialEngine::new(cfg, b_true, &[])?;
    let pairs = (0..u64::from(cfg.n_trials))
        .into_par_iter()
        .map(|idx| {
            let output = engine.run_trial(RngStream::new(cfg.seed, idx))?;
            Ok((engine.zne_estimate(&output)?, output.unmitigated))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(success_fraction(&pairs, b_true))
}

/// One aggregated output record of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    /// Independent variable (field strength unless stated otherwise).
    pub x: f64,
    pub nu: Option<f64>,
    pub mean_rel_error: Vec<(Method, f64)>,
    pub n_trials: u32,
}

impl MetricRow {
    pub fn error_of(&self, method: Method) -> Option<f64> {
        self.mean_rel_error.iter().find(|(m, _)| *m == method).map(|(_, e)| *e)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sweep_one_field(
    cfg: &ExperimentConfig,
    b_true: f64,
    b_index: usize,
    methods: &[Method],
    absolute_error: bool,
) -> Result<MetricRow, ExperimentError> {
    if b_true <= 0.0 {
        return Err(ExperimentError::InvalidConfig(
            "field grid values must be positive for error sweeps".into(),
        ));
    }
    let engine = TrialEngine::new(cfg, b_true, methods)?;
    let n_trials = if cfg.exact_p { 1 } else { cfg.n_trials };
    let per_trial = (0..u64::from(n_trials))
        .into_par_iter()
        .map(|idx| {
            let stream = RngStream::new(cfg.seed, b_index as u64 * u64::from(cfg.n_trials) + idx);
            let output = engine.run_trial(stream)?;
            methods
                .iter()
                .map(|&m| {
                    let est = engine.estimate(&output, m)?;
                    let err = if absolute_error {
                        (est - b_true).abs()
                    } else {
                        ((est - b_true) / b_true).abs()
                    };
                    Ok(err)
                })
                .collect::<Result<Vec<f64>, ExperimentError>>()
        })
        .collect::<Result<Vec<Vec<f64>>, ExperimentError>>()?;
    let mean_rel_error = methods
        .iter()
        .enumerate()
        .map(|(col, &m)| (m, mean(&per_trial.iter().map(|row| row[col]).collect::<Vec<_>>())))
        .collect();
    Ok(MetricRow { x: b_true, nu: None, mean_rel_error, n_trials })
}

/// Mean relative error `|(B_est - B)| / B` per method over the field grid.
pub fn relative_error_sweep(
    cfg: &ExperimentConfig,
    b_grid: &[f64],
    methods: &[Method],
) -> Result<Vec<MetricRow>, ExperimentError> {
    if b_grid.is_empty() || b_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::InvalidConfig("field grid must be ascending".into()));
    }
    b_grid
        .iter()
        .enumerate()
        .map(|(i, &b)| sweep_one_field(cfg, b, i, methods, false))
        .collect()
}

/// Crossover extraction on precomputed error curves: the smallest grid point
/// at which the ZNE error drops below the baseline error and stays below for
/// every larger grid point.
pub fn crossover_from_curves(grid: &[f64], zne: &[f64], baseline: &[f64]) -> Option<f64> {
    assert_eq!(grid.len(), zne.len());
    assert_eq!(grid.len(), baseline.len());
    let mut candidate = None;
    for i in 0..grid.len() {
        if zne[i] < baseline[i] {
            if candidate.is_none() {
                candidate = Some(grid[i]);
            }
        } else {
            candidate = None;
        }
    }
    candidate
}

/// Crossover field between ZNE-Linear and the equal-shot baseline.
pub fn crossover_field(
    cfg: &ExperimentConfig,
    b_grid: &[f64],
) -> Result<Option<f64>, ExperimentError> {
    let methods = [Method::ZneLinear, Method::RamseyEqualShots];
    let rows = relative_error_sweep(cfg, b_grid, &methods)?;
    let zne: Vec<f64> = rows.iter().map(|r| r.error_of(Method::ZneLinear).unwrap()).collect();
    let base: Vec<f64> =
        rows.iter().map(|r| r.error_of(Method::RamseyEqualShots).unwrap()).collect();
    Ok(crossover_from_curves(b_grid, &zne, &base))
}

/// Solves `error(B) = B` on a mean absolute-error curve by scanning for the
/// first downward crossing and interpolating linearly. When the error is
/// below `B` already at the smallest grid point, that grid value is
/// returned; with no crossing the result is `None`.
pub fn sensitivity_from_curve(grid: &[f64], abs_error: &[f64]) -> Option<f64> {
    assert_eq!(grid.len(), abs_error.len());
    if grid.is_empty() {
        return None;
    }
    let excess: Vec<f64> = grid.iter().zip(abs_error).map(|(b, e)| e - b).collect();
    if excess[0] < 0.0 {
        return Some(grid[0]);
    }
    for i in 0..grid.len() - 1 {
        if excess[i] >= 0.0 && excess[i + 1] < 0.0 {
            let span = excess[i] - excess[i + 1];
            if span == 0.0 {
                return Some(grid[i]);
            }
            return Some(grid[i] + excess[i] / span * (grid[i + 1] - grid[i]));
        }
    }
    None
}

/// The minimum detectable field of one method: the field at which its mean
/// absolute estimation error equals the field itself.
pub fn sensitivity(
    cfg: &ExperimentConfig,
    b_grid: &[f64],
    method: Method,
) -> Result<Option<f64>, ExperimentError> {
    if b_grid.is_empty() || b_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::InvalidConfig("field grid must be ascending".into()));
    }
    let methods = [method];
    let rows: Vec<MetricRow> = b_grid
        .iter()
        .enumerate()
        .map(|(i, &b)| sweep_one_field(cfg, b, i, &methods, true))
        .collect::<Result<_, _>>()?;
    let errs: Vec<f64> = rows.iter().map(|r| r.error_of(method).unwrap()).collect();
    Ok(sensitivity_from_curve(b_grid, &errs))
}

/// Deterministic infinite-shot comparison of ZNE-Linear against the
/// unmitigated protocol.
pub fn infinite_shot_compare(
    cfg: &ExperimentConfig,
    b_grid: &[f64],
) -> Result<Vec<MetricRow>, ExperimentError> {
    let exact = ExperimentConfig { exact_p: true, ..cfg.clone() };
    relative_error_sweep(&exact, b_grid, &[Method::ZneLinear, Method::Ramsey])
}

/// Mean estimate at each noise scale over the trial ensemble (the raw
/// extrapolation picture).
pub fn extrapolation_trace(
    cfg: &ExperimentConfig,
    b_true: f64,
) -> Result<Vec<(f64, f64)>, ExperimentError> {
    let engine = TrialEngine::new(cfg, b_true, &[])?;
    let n_trials = if cfg.exact_p { 1 } else { cfg.n_trials };
    let per_trial = (0..u64::from(n_trials))
        .into_par_iter()
        .map(|idx| {
            let output = engine.run_trial(RngStream::new(cfg.seed, idx))?;
            Ok(output.ensemble.iter().map(|(_, b)| *b).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<Vec<f64>>, ExperimentError>>()?;
    Ok(engine
        .etas
        .iter()
        .enumerate()
        .map(|(col, &eta)| (eta, mean(&per_trial.iter().map(|row| row[col]).collect::<Vec<_>>())))
        .collect())
}

/// Per-field mean errors of the two noise-informed estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct InformedRow {
    pub x: f64,
    /// Two-parameter fit over fold counts at fixed sensing time.
    pub zne_informed: f64,
    /// Two-parameter fit over a fringe of sensing times with the same total
    /// sensing budget.
    pub ramsey_fringe: f64,
}

/// Noise-informed comparison: the folded-fringe fit against the Ramsey
/// fringe fit, both seeded at 99% of the true parameters.
///
/// The fringe uses `fold_counts.len()` circuits with equally spaced sensing
/// times chosen so its total sensing time matches the ZNE ensemble's.
pub fn informed_sweep(
    cfg: &ExperimentConfig,
    b_grid: &[f64],
) -> Result<Vec<InformedRow>, ExperimentError> {
    use crate::channels::NoiseKind;
    use crate::fitters::{fit_informed_ad, fit_informed_pd, fit_ramsey_fringes, ramsey_time_grid};

    cfg.validate()?;
    if b_grid.is_empty() || b_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::InvalidConfig("field grid must be ascending".into()));
    }
    let rate = cfg.protocol.noise.rate;
    let t = cfg.protocol.sensing_time;
    let levels = cfg.fold_counts.len() as u32;
    let fringe_times = ramsey_time_grid(levels, t);

    let mut rows = Vec::with_capacity(b_grid.len());
    for (b_index, &b_true) in b_grid.iter().enumerate() {
        if b_true <= 0.0 {
            return Err(ExperimentError::InvalidConfig(
                "field grid values must be positive for error sweeps".into(),
            ));
        }
        // exact probabilities, computed once per grid point
        let zne_spec = ProtocolSpec { field: b_true, ..cfg.protocol };
        let mut fold_probs = Vec::new();
        for &m in &cfg.fold_counts {
            fold_probs.push((m, execute(&build_circuit(&zne_spec.with_fold_count(m))?)?));
        }
        let mut fringe_probs = Vec::new();
        for &tj in &fringe_times {
            let spec = ProtocolSpec {
                field: b_true,
                sensing_time: tj,
                ..cfg.protocol.with_fold_count(0)
            };
            fringe_probs.push((tj, execute(&build_circuit(&spec)?)?));
        }
        let init = (0.99 * b_true, 0.99 * rate);
        let n_trials = if cfg.exact_p { 1 } else { cfg.n_trials };
        let per_trial = (0..u64::from(n_trials))
            .into_par_iter()
            .map(|idx| {
                let stream =
                    RngStream::new(cfg.seed, b_index as u64 * u64::from(cfg.n_trials) + idx);
                let mut rng = stream.rng();
                let mut zne_data = Vec::with_capacity(fold_probs.len());
                for &(m, p) in &fold_probs {
                    let p_hat = if cfg.exact_p {
                        p
                    } else {
                        sample_p1(p, cfg.n_shots, &mut rng)?.p_hat
                    };
                    zne_data.push((m, p_hat));
                }
                let mut fringe_data = Vec::with_capacity(fringe_probs.len());
                for &(tj, p) in &fringe_probs {
                    let p_hat = if cfg.exact_p {
                        p
                    } else {
                        sample_p1(p, cfg.n_shots, &mut rng)?.p_hat
                    };
                    fringe_data.push((tj, p_hat));
                }
                let (zne_fit, fringe_fit) = match cfg.protocol.noise.kind {
                    NoiseKind::PhaseDamping => (
                        fit_informed_pd(&zne_data, t, init)?,
                        fit_ramsey_fringes(&fringe_data, NoiseKind::PhaseDamping, init)?,
                    ),
                    NoiseKind::AmplitudeDamping => (
                        fit_informed_ad(&zne_data, t, init)?,
                        fit_ramsey_fringes(&fringe_data, NoiseKind::AmplitudeDamping, init)?,
                    ),
                };
                let zne_b = zne_fit.param("B_est").unwrap_or(f64::NAN);
                let fringe_b = fringe_fit.param("B_est").unwrap_or(f64::NAN);
                Ok((((zne_b - b_true) / b_true).abs(), ((fringe_b - b_true) / b_true).abs()))
            })
            .collect::<Result<Vec<(f64, f64)>, ExperimentError>>()?;
        rows.push(InformedRow {
            x: b_true,
            zne_informed: mean(&per_trial.iter().map(|p| p.0).collect::<Vec<_>>()),
            ramsey_fringe: mean(&per_trial.iter().map(|p| p.1).collect::<Vec<_>>()),
        });
    }
    Ok(rows)
}

/// One row of the global-folding cross-check between the simulated repeated
/// sequence and the average-Liouvillian references.
#[derive(Debug, Clone, PartialEq)]
pub struct AltCheckRow {
    pub folds: u32,
    pub sim_pd: f64,
    pub alt_pd: f64,
    pub sim_ad: f64,
    pub alt_ad: f64,
    pub alt_ad_first_order: f64,
}

/// Compares the simulated globally folded sequence against first-order
/// (phase damping) and second-order (amplitude damping) average-Liouvillian
/// predictions for `k = 0..=k_max` folds.
///
/// The discrete channel rates come from the continuous ones through
/// `lambda = 1 - e^(-2 Lambda dt)` and `gamma = 1 - e^(-Gamma dt)` with
/// `dt = gate_time_fraction * segment_time`.
pub fn alt_check(
    dephasing_rate: f64,
    decay_rate: f64,
    field: f64,
    segment_time: f64,
    gate_time_fraction: f64,
    k_max: u32,
) -> Result<Vec<AltCheckRow>, ExperimentError> {
    use crate::analytic::LindbladParams;
    use crate::channels::NoiseSpec;
    let dt = gate_time_fraction * segment_time;
    let params = LindbladParams {
        dephasing_rate,
        decay_rate,
        control_rate: 0.0,
        rotation_angle: std::f64::consts::FRAC_PI_2,
        gate_time: dt,
        dephasing_time: dt,
        alt_gate_time: dt,
        segment_time,
        total_sensing_time: segment_time,
    };
    params.validate().map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let lambda = params.discrete_dephasing();
    let gamma = params.discrete_decay();
    let pd = NoiseSpec::phase_damping(lambda)
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let ad = NoiseSpec::amplitude_damping(gamma)
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    (0..=k_max)
        .map(|k| {
            let reps = k + 1;
            let sim_pd = execute(&build_global_repeated(
                reps,
                Detection::Variance,
                &pd,
                field,
                segment_time,
            )?)?;
            let sim_ad = execute(&build_global_repeated(
                reps,
                Detection::Variance,
                &ad,
                field,
                segment_time,
            )?)?;
            Ok(AltCheckRow {
                folds: k,
                sim_pd,
                alt_pd: alt_p1_global_pd(dephasing_rate, field, segment_time, dt, k)?,
                sim_ad,
                alt_ad: alt_p1_global_ad(decay_rate, field, segment_time, dt, k)?,
                alt_ad_first_order: alt_p1_global_ad_first_order(
                    decay_rate,
                    field,
                    segment_time,
                    dt,
                    k,
                )?,
            })
        })
        .collect()
}
