//! Finite-shot measurement simulation and noise-agnostic field inversion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::circuits::{build_circuit, execute, CircuitError, Detection, ProtocolSpec};

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("shot count must be at least 1")]
    InvalidShotCount,
    #[error("sensing time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("fold counts must be nonempty and strictly ascending")]
    BadFoldList,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A reproducible, counter-addressed random stream.
///
/// Streams with distinct `stream_index` under the same `master_seed` are
/// statistically independent, so parallel trials can draw from
/// `(seed, trial_index)` in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// An empirical probability from `n_s` shots; `p_hat` is always a multiple
/// of `1 / n_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub p_hat: f64,
    pub n_s: u64,
}

/// Draws `Binomial(n_s, p) / n_s`.
pub fn sample_p1(p: f64, n_s: u64, rng: &mut ChaCha8Rng) -> Result<ShotEstimate, SamplingError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(SamplingError::InvalidProbability(p));
    }
    if n_s == 0 {
        return Err(SamplingError::InvalidShotCount);
    }
    let dist = Binomial::new(n_s, p).map_err(|_| SamplingError::InvalidProbability(p))?;
    let successes = dist.sample(rng);
    Ok(ShotEstimate { p_hat: successes as f64 / n_s as f64, n_s })
}

/// Slope-detection inversion around the reference probability 1/2:
/// `B = arcsin(clamp(2 (p_hat - 1/2))) / t`, principal branch.
pub fn invert_slope(p_hat: f64, t: f64) -> Result<f64, SamplingError> {
    if t <= 0.0 || !t.is_finite() {
        return Err(SamplingError::NonPositiveTime(t));
    }
    let arg = (2.0 * (p_hat - 0.5)).clamp(-1.0, 1.0);
    Ok(arg.asin() / t)
}

/// Variance-detection inversion of the noiseless fringe:
/// `B = arccos(clamp(1 - 2 p_hat)) / (n_qubits t)`, principal branch.
pub fn invert_variance(p_hat: f64, t: f64, n_qubits: usize) -> Result<f64, SamplingError> {
    if t <= 0.0 || !t.is_finite() {
        return Err(SamplingError::NonPositiveTime(t));
    }
    let arg = (1.0 - 2.0 * p_hat).clamp(-1.0, 1.0);
    Ok(arg.acos() / (n_qubits as f64 * t))
}

/// Inverts a measured probability into a field estimate using the noiseless
/// fringe expression for the protocol's detection mode and qubit count.
pub fn invert_estimate(spec: &ProtocolSpec, p_hat: f64) -> Result<f64, SamplingError> {
    let n = spec.n_qubits as f64;
    match spec.detection {
        Detection::Slope => invert_slope(p_hat, n * spec.sensing_time),
        Detection::Variance => invert_variance(p_hat, spec.sensing_time, spec.n_qubits),
    }
}

/// Shot accounting for one estimate: exact-p mode skips sampling entirely
/// (the infinite-shot limit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotMode {
    ExactP,
    Shots(u64),
}

/// Runs the folded circuit at every fold count in `fold_counts`, samples the
/// measured probability, and inverts it noise-agnostically.
///
/// Returns `(eta, B_est)` pairs with `eta = 2m + 1`.
pub fn estimate_ensemble(
    spec: &ProtocolSpec,
    fold_counts: &[u32],
    mode: ShotMode,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(f64, f64)>, SamplingError> {
    if fold_counts.is_empty() || fold_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SamplingError::BadFoldList);
    }
    let mut out = Vec::with_capacity(fold_counts.len());
    for &m in fold_counts {
        let circuit = build_circuit(&spec.with_fold_count(m))?;
        let p = execute(&circuit)?;
        let p_hat = match mode {
            ShotMode::ExactP => p,
            ShotMode::Shots(n_s) => sample_p1(p, n_s, rng)?.p_hat,
        };
        out.push((2.0 * f64::from(m) + 1.0, invert_estimate(spec, p_hat)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NoiseSpec;
    use crate::circuits::{Detection, Folding};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_probabilities_sample_exactly() {
        let mut rng = RngStream::new(7, 0).rng();
        for _ in 0..50 {
            assert_eq!(sample_p1(0.0, 100, &mut rng).unwrap().p_hat, 0.0);
            assert_eq!(sample_p1(1.0, 100, &mut rng).unwrap().p_hat, 1.0);
        }
    }

    #[test]
    fn binomial_spread_concentrates() {
        // 3-sigma band for p = 0.5, n_s = 1e4 is +-0.015
        let mut rng = RngStream::new(12345, 3).rng();
        let draws = 300;
        let mut within = 0;
        for _ in 0..draws {
            let est = sample_p1(0.5, 10_000, &mut rng).unwrap();
            if (est.p_hat - 0.5).abs() <= 0.015 {
                within += 1;
            }
        }
        assert!(within as f64 >= 0.99 * draws as f64, "{within}/{draws} inside 3 sigma");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let serie_a: Vec<f64> = {
            let mut rng = RngStream::new(99, 5).rng();
            (0..10).map(|_| sample_p1(0.3, 1000, &mut rng).unwrap().p_hat).collect()
        };
        let serie_b: Vec<f64> = {
            let mut rng = RngStream::new(99, 5).rng();
            (0..10).map(|_| sample_p1(0.3, 1000, &mut rng).unwrap().p_hat).collect()
        };
        let serie_c: Vec<f64> = {
            let mut rng = RngStream::new(99, 6).rng();
            (0..10).map(|_| sample_p1(0.3, 1000, &mut rng).unwrap().p_hat).collect()
        };
        assert_eq!(serie_a, serie_b);
        assert_ne!(serie_a, serie_c);
    }

    #[test]
    fn sample_rejects_invalid_inputs() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_p1(-0.1, 10, &mut rng).is_err());
        assert!(sample_p1(1.1, 10, &mut rng).is_err());
        assert!(sample_p1(0.5, 0, &mut rng).is_err());
    }

    #[test]
    fn slope_inversion_examples() {
        assert_relative_eq!(invert_slope(0.5, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(invert_slope(1.0, 1.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        // forward-evaluate dp = sin(0.3)/2, then invert
        let p_hat = 0.5 + 0.5 * 0.3_f64.sin();
        assert_relative_eq!(invert_slope(p_hat, 1.0).unwrap(), 0.3, epsilon = 1e-12);
        assert!(invert_slope(0.5, 0.0).is_err());
        assert!(invert_slope(0.5, -1.0).is_err());
    }

    #[test]
    fn variance_inversion_examples() {
        assert_relative_eq!(invert_variance(0.0, 1.0, 1).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(invert_variance(1.0, 1.0, 1).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(invert_variance(0.25, 1.0, 1).unwrap(), PI / 3.0, epsilon = 1e-12);
        // GHZ phase accumulates n times faster
        assert_relative_eq!(invert_variance(1.0, 1.0, 4).unwrap(), PI / 4.0, epsilon = 1e-15);
        assert!(invert_variance(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn ensemble_noiseless_exact_recovers_field() {
        let spec = ProtocolSpec {
            detection: Detection::Variance,
            folding: Folding::Local(0),
            n_qubits: 1,
            noise: NoiseSpec::phase_damping(0.0).unwrap(),
            field: 0.8,
            sensing_time: 1.0,
        };
        let mut rng = RngStream::new(0, 0).rng();
        let ens = estimate_ensemble(&spec, &[0, 1, 2], ShotMode::ExactP, &mut rng).unwrap();
        for (eta, b_est) in ens {
            assert!(eta == 1.0 || eta == 3.0 || eta == 5.0);
            assert_relative_eq!(b_est, 0.8, epsilon = 1e-10);
        }
    }

    #[test]
    fn ensemble_pd_bias_increases_with_folding() {
        // systematic overestimation grows with the noise scale at t < pi/2B
        let spec = ProtocolSpec {
            detection: Detection::Variance,
            folding: Folding::Local(0),
            n_qubits: 1,
            noise: NoiseSpec::phase_damping(0.15).unwrap(),
            field: 1.0,
            sensing_time: PI / 4.0,
        };
        let mut rng = RngStream::new(0, 0).rng();
        let ens = estimate_ensemble(&spec, &[0, 1, 2], ShotMode::ExactP, &mut rng).unwrap();
        assert!(ens[0].1 > 1.0);
        assert!(ens.windows(2).all(|w| w[1].1 > w[0].1), "{ens:?}");
    }

    #[test]
    fn ensemble_ad_bias_is_monotone() {
        let spec = ProtocolSpec {
            detection: Detection::Variance,
            folding: Folding::Local(0),
            n_qubits: 1,
            noise: NoiseSpec::amplitude_damping(0.01).unwrap(),
            field: 1.0,
            sensing_time: 1.0,
        };
        let mut rng = RngStream::new(0, 0).rng();
        let ens = estimate_ensemble(&spec, &[0, 1, 2], ShotMode::ExactP, &mut rng).unwrap();
        let increasing = ens.windows(2).all(|w| w[1].1 > w[0].1);
        let decreasing = ens.windows(2).all(|w| w[1].1 < w[0].1);
        assert!(increasing || decreasing, "bias not monotone: {ens:?}");
    }

    #[test]
    fn ensemble_rejects_bad_fold_lists() {
        let spec = ProtocolSpec {
            detection: Detection::Variance,
            folding: Folding::Local(0),
            n_qubits: 1,
            noise: NoiseSpec::phase_damping(0.0).unwrap(),
            field: 0.8,
            sensing_time: 1.0,
        };
        let mut rng = RngStream::new(0, 0).rng();
        assert!(estimate_ensemble(&spec, &[], ShotMode::ExactP, &mut rng).is_err());
        assert!(estimate_ensemble(&spec, &[1, 1], ShotMode::ExactP, &mut rng).is_err());
        assert!(estimate_ensemble(&spec, &[2, 0], ShotMode::ExactP, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn inversions_never_produce_non_finite(p_hat in 0.0f64..=1.0, t in 0.01f64..10.0) {
            let b1 = invert_slope(p_hat, t).unwrap();
            let b2 = invert_variance(p_hat, t, 1).unwrap();
            prop_assert!(b1.is_finite());
            prop_assert!(b2.is_finite());
        }

        #[test]
        fn shot_estimates_live_on_the_grid(p in 0.0f64..=1.0, seed in 0u64..32) {
            let mut rng = RngStream::new(seed, 0).rng();
            let n_s = 100u64;
            let est = sample_p1(p, n_s, &mut rng).unwrap();
            let counts = est.p_hat * n_s as f64;
            prop_assert!((counts - counts.round()).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&est.p_hat));
        }
    }
}
