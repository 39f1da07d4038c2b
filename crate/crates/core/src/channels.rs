//! Phase- and amplitude-damping channels applied locally per qubit.

use num_complex::Complex64;
use thiserror::Error;

use crate::densmat::{apply_kraus, ComplexMatrix, DensityMatrix, MatrixError};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("damping rate {0} outside [0, 1]")]
    RateOutOfRange(f64),
    #[error("duplicate qubit index {0} in channel target set")]
    DuplicateQubit(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Channel family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    PhaseDamping,
    AmplitudeDamping,
}

/// A single-qubit damping channel with per-gate probability `rate`
/// (the dephasing probability for phase damping, the decay probability for
/// amplitude damping).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub rate: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, rate: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
            return Err(ChannelError::RateOutOfRange(rate));
        }
        Ok(Self { kind, rate })
    }

    pub fn phase_damping(rate: f64) -> Result<Self, ChannelError> {
        Self::new(NoiseKind::PhaseDamping, rate)
    }

    pub fn amplitude_damping(rate: f64) -> Result<Self, ChannelError> {
        Self::new(NoiseKind::AmplitudeDamping, rate)
    }

    pub fn is_noiseless(&self) -> bool {
        self.rate == 0.0
    }
}

/// Kraus operators of the channel.
///
/// Phase damping: `{diag(1, sqrt(1-rate)), diag(0, sqrt(rate))}`.
/// Amplitude damping: `{diag(1, sqrt(1-rate)), [[0, sqrt(rate)], [0, 0]]}`.
pub fn kraus_of(spec: &NoiseSpec) -> Result<Vec<ComplexMatrix>, ChannelError> {
    if !(0.0..=1.0).contains(&spec.rate) {
        return Err(ChannelError::RateOutOfRange(spec.rate));
    }
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let keep = Complex64::new((1.0 - spec.rate).sqrt(), 0.0);
    let jump = Complex64::new(spec.rate.sqrt(), 0.0);
    let e0 = ComplexMatrix::new(2, 2, vec![one, z, z, keep])?;
    let e1 = match spec.kind {
        NoiseKind::PhaseDamping => ComplexMatrix::new(2, 2, vec![z, z, z, jump])?,
        NoiseKind::AmplitudeDamping => ComplexMatrix::new(2, 2, vec![z, jump, z, z])?,
    };
    Ok(vec![e0, e1])
}

/// Applies the channel independently to each listed qubit, composing the
/// single-qubit maps in the given order.
pub fn apply_local_noise(
    rho: &DensityMatrix,
    spec: &NoiseSpec,
    qubits: &[usize],
) -> Result<DensityMatrix, ChannelError> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[i + 1..].contains(q) {
            return Err(ChannelError::DuplicateQubit(*q));
        }
    }
    if spec.is_noiseless() {
        return Ok(rho.clone());
    }
    let kraus = kraus_of(spec)?;
    let mut out = rho.clone();
    for &q in qubits {
        out = apply_kraus(&out, &kraus, q)?;
    }
    Ok(out)
}
