//! Sensing-circuit construction and execution.
//!
//! Circuits are explicit element lists: gates, per-gate noise insertions, and
//! noiseless sensing periods. Builders cover the plain Ramsey protocol, its
//! locally and globally folded variants, and GHZ sensing with block folding.

use num_complex::Complex64;
use thiserror::Error;

use crate::channels::{apply_local_noise, ChannelError, NoiseSpec};
use crate::densmat::{
    apply_diagonal_unitary, apply_unitary, init_ground, prob_one, ComplexMatrix, GateMatrix,
    MatrixError,
};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("protocol requires {expected} qubit(s), got {got}")]
    WrongQubitCount { expected: usize, got: usize },
    #[error("GHZ circuits need at least 2 qubits, got {0}")]
    GhzTooSmall(usize),
    #[error("global folding is defined for single-qubit circuits only")]
    GlobalFoldingMultiQubit,
    #[error("{0}")]
    InvalidProtocol(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Readout scheme: slope detection inverts the sine fringe around the
/// half-probability point, variance detection inverts the cosine fringe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Slope,
    Variance,
}

/// Noise-scaling scheme and fold count `m` (noise scale factor is `2m + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Folding {
    None,
    Local(u32),
    Global(u32),
}

impl Folding {
    pub fn fold_count(&self) -> u32 {
        match self {
            Folding::None => 0,
            Folding::Local(m) | Folding::Global(m) => *m,
        }
    }
}

/// One step of a sensing circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitElement {
    Gate(GateMatrix),
    /// Noise channel applied to the qubits activated by the preceding gate.
    Noise(NoiseSpec, Vec<usize>),
    /// Noiseless free evolution under the sensed field for `duration`.
    Sense { field: f64, duration: f64 },
}

/// An ordered program over `n_qubits` plus the qubit whose `|1>` probability
/// is read out at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingCircuit {
    pub n_qubits: usize,
    pub elements: Vec<CircuitElement>,
    pub measured_qubit: usize,
}

/// Full description of one protocol instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    pub detection: Detection,
    pub folding: Folding,
    pub n_qubits: usize,
    pub noise: NoiseSpec,
    /// Field strength `B` in rad/time.
    pub field: f64,
    /// Total sensing duration `t`.
    pub sensing_time: f64,
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_qubits == 0 {
            return Err(CircuitError::InvalidProtocol("n_qubits must be at least 1".into()));
        }
        if matches!(self.folding, Folding::Global(_)) && self.n_qubits != 1 {
            return Err(CircuitError::GlobalFoldingMultiQubit);
        }
        if !self.field.is_finite() || !self.sensing_time.is_finite() || self.sensing_time < 0.0 {
            return Err(CircuitError::InvalidProtocol(
                "field and sensing_time must be finite, sensing_time >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn with_fold_count(&self, m: u32) -> Self {
        let folding = match self.folding {
            Folding::Global(_) => Folding::Global(m),
            _ => Folding::Local(m),
        };
        Self { folding, ..*self }
    }
}

/// Standard gate constructors used by the protocols.
pub mod gates {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `R_y(pi/2)`: takes `|0>` to the equal superposition.
    pub fn sqrt_y(target: usize) -> GateMatrix {
        let s = FRAC_1_SQRT_2;
        let m = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(-s, 0.0), c(s, 0.0), c(s, 0.0)])
            .expect("static gate");
        GateMatrix::new(m, vec![target]).expect("static gate")
    }

    /// `R_y(-pi/2)`: the variance-detection inversion gate.
    pub fn sqrt_y_dag(target: usize) -> GateMatrix {
        sqrt_y(target).dagger()
    }

    /// `R_x(-pi/2)`: the slope-detection inversion gate.
    pub fn sqrt_x_dag(target: usize) -> GateMatrix {
        let s = FRAC_1_SQRT_2;
        let m = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)])
            .expect("static gate");
        GateMatrix::new(m, vec![target]).expect("static gate")
    }

    /// `R_x(pi/2)`.
    pub fn sqrt_x(target: usize) -> GateMatrix {
        sqrt_x_dag(target).dagger()
    }

    /// CNOT with `control` as the first target (most significant block bit).
    pub fn cnot(control: usize, target: usize) -> GateMatrix {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = ComplexMatrix::new(
            4,
            4,
            vec![
                one, z, z, z, //
                z, one, z, z, //
                z, z, z, one, //
                z, z, one, z,
            ],
        )
        .expect("static gate");
        GateMatrix::new(m, vec![control, target]).expect("static gate")
    }
}

fn inversion_gate(detection: Detection, target: usize) -> GateMatrix {
    match detection {
        Detection::Slope => gates::sqrt_x_dag(target),
        Detection::Variance => gates::sqrt_y_dag(target),
    }
}

fn gate_with_noise(gate: GateMatrix, noise: &NoiseSpec, out: &mut Vec<CircuitElement>) {
    let targets = gate.targets().to_vec();
    out.push(CircuitElement::Gate(gate));
    out.push(CircuitElement::Noise(*noise, targets));
}

/// A gate block followed by `m` fold pairs (inverse block, block), each gate
/// trailed by its noise insertion: `2m + 1` gates per underlying gate.
fn folded_block(block: &[GateMatrix], noise: &NoiseSpec, m: u32) -> Vec<CircuitElement> {
    let mut out = Vec::new();
    let forward = |out: &mut Vec<CircuitElement>| {
        for g in block {
            gate_with_noise(g.clone(), noise, out);
        }
    };
    let backward = |out: &mut Vec<CircuitElement>| {
        for g in block.iter().rev() {
            gate_with_noise(g.dagger(), noise, out);
        }
    };
    forward(&mut out);
    for _ in 0..m {
        backward(&mut out);
        forward(&mut out);
    }
    out
}

/// Plain single-qubit Ramsey circuit (no folding).
pub fn build_ramsey(spec: &ProtocolSpec) -> Result<SensingCircuit, CircuitError> {
    spec.validate()?;
    if spec.n_qubits != 1 {
        return Err(CircuitError::WrongQubitCount { expected: 1, got: spec.n_qubits });
    }
    build_local_with(spec, 0)
}

/// Locally folded single-qubit Ramsey circuit.
pub fn build_local_folded(spec: &ProtocolSpec) -> Result<SensingCircuit, CircuitError> {
    spec.validate()?;
    if spec.n_qubits != 1 {
        return Err(CircuitError::WrongQubitCount { expected: 1, got: spec.n_qubits });
    }
    build_local_with(spec, spec.folding.fold_count())
}

fn build_local_with(spec: &ProtocolSpec, m: u32) -> Result<SensingCircuit, CircuitError> {
    let mut elements = folded_block(&[gates::sqrt_y(0)], &spec.noise, m);
    elements.push(CircuitElement::Sense { field: spec.field, duration: spec.sensing_time });
    elements.extend(folded_block(&[inversion_gate(spec.detection, 0)], &spec.noise, m));
    Ok(SensingCircuit { n_qubits: 1, elements, measured_qubit: 0 })
}

/// Globally folded single-qubit Ramsey circuit: the whole sequence is
/// repeated as (inverse, forward) pairs without inverting the sensed
/// rotation, and each of the `2m + 1` sensing periods runs for
/// `t / (2m + 1)` so the noiseless total phase is unchanged.
pub fn build_global_folded(spec: &ProtocolSpec) -> Result<SensingCircuit, CircuitError> {
    spec.validate()?;
    if spec.n_qubits != 1 {
        return Err(CircuitError::GlobalFoldingMultiQubit);
    }
    let m = spec.folding.fold_count();
    let period = spec.sensing_time / f64::from(2 * m + 1);
    let v1 = gates::sqrt_y(0);
    let v2 = inversion_gate(spec.detection, 0);

    let mut elements = Vec::new();
    let forward = |out: &mut Vec<CircuitElement>| {
        gate_with_noise(v1.clone(), &spec.noise, out);
        out.push(CircuitElement::Sense { field: spec.field, duration: period });
        gate_with_noise(v2.clone(), &spec.noise, out);
    };
    // Inverse of the sequence, except the sensed rotation keeps its sign.
    let backward = |out: &mut Vec<CircuitElement>| {
        gate_with_noise(v2.dagger(), &spec.noise, out);
        out.push(CircuitElement::Sense { field: spec.field, duration: period });
        gate_with_noise(v1.dagger(), &spec.noise, out);
    };
    forward(&mut elements);
    for _ in 0..m {
        backward(&mut elements);
        forward(&mut elements);
    }
    Ok(SensingCircuit { n_qubits: 1, elements, measured_qubit: 0 })
}

/// The full Ramsey sequence repeated `reps` times back to back, each pass
/// sensing for `period`. This is the periodic sequence the average-Liouvillian
/// cross-check models; with variance detection and `reps = 2m + 1`,
/// `period = t / (2m + 1)` it executes identically to [`build_global_folded`].
pub fn build_global_repeated(
    reps: u32,
    detection: Detection,
    noise: &NoiseSpec,
    field: f64,
    period: f64,
) -> Result<SensingCircuit, CircuitError> {
    if reps == 0 {
        return Err(CircuitError::InvalidProtocol("need at least one repetition".into()));
    }
    let v1 = gates::sqrt_y(0);
    let v2 = inversion_gate(detection, 0);
    let mut elements = Vec::new();
    for _ in 0..reps {
        gate_with_noise(v1.clone(), noise, &mut elements);
        elements.push(CircuitElement::Sense { field, duration: period });
        gate_with_noise(v2.clone(), noise, &mut elements);
    }
    Ok(SensingCircuit { n_qubits: 1, elements, measured_qubit: 0 })
}

/// GHZ sensing circuit over `spec.n_qubits >= 2` qubits.
///
/// The preparation block is `sqrt(Y)` on qubit 0 followed by the CNOT chain;
/// the inversion block is the reversed chain and the detection gate on qubit
/// 0. Local folding repeats whole blocks as units, with noise after every
/// gate in every repetition. Qubit 0 is measured.
pub fn build_ghz(spec: &ProtocolSpec) -> Result<SensingCircuit, CircuitError> {
    spec.validate()?;
    let n = spec.n_qubits;
    if n < 2 {
        return Err(CircuitError::GhzTooSmall(n));
    }
    let m = spec.folding.fold_count();

    let mut prep = vec![gates::sqrt_y(0)];
    for q in 0..n - 1 {
        prep.push(gates::cnot(q, q + 1));
    }
    let mut inversion: Vec<GateMatrix> =
        (0..n - 1).rev().map(|q| gates::cnot(q, q + 1)).collect();
    inversion.push(inversion_gate(spec.detection, 0));

    let mut elements = folded_block(&prep, &spec.noise, m);
    elements.push(CircuitElement::Sense { field: spec.field, duration: spec.sensing_time });
    elements.extend(folded_block(&inversion, &spec.noise, m));
    Ok(SensingCircuit { n_qubits: n, elements, measured_qubit: 0 })
}

/// Builds the circuit a protocol spec describes, dispatching on qubit count
/// and folding style.
pub fn build_circuit(spec: &ProtocolSpec) -> Result<SensingCircuit, CircuitError> {
    spec.validate()?;
    if spec.n_qubits >= 2 {
        return build_ghz(spec);
    }
    match spec.folding {
        Folding::None => build_ramsey(spec),
        Folding::Local(_) => build_local_folded(spec),
        Folding::Global(_) => build_global_folded(spec),
    }
}

/// Phases of `exp(-i (B/2) sum_i sigma_z^i t)` over the computational basis.
fn sensing_phases(n_qubits: usize, field: f64, duration: f64) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let half_angle = 0.5 * field * duration;
    (0..dim)
        .map(|idx| {
            let ones = (idx as u32).count_ones() as i32;
            let zeros = n_qubits as i32 - ones;
            Complex64::from_polar(1.0, -half_angle * f64::from(zeros - ones))
        })
        .collect()
}

/// Runs the circuit from the ground state and returns the final density
/// matrix. Deterministic.
pub fn final_state(circuit: &SensingCircuit) -> Result<crate::densmat::DensityMatrix, CircuitError> {
    let mut rho = init_ground(circuit.n_qubits)?;
    for element in &circuit.elements {
        match element {
            CircuitElement::Gate(g) => rho = apply_unitary(&rho, g)?,
            CircuitElement::Noise(spec, qubits) => {
                if !spec.is_noiseless() {
                    rho = apply_local_noise(&rho, spec, qubits)?;
                }
            }
            CircuitElement::Sense { field, duration } => {
                let phases = sensing_phases(circuit.n_qubits, *field, *duration);
                rho = apply_diagonal_unitary(&rho, &phases)?;
            }
        }
    }
    Ok(rho)
}

/// Runs the circuit and returns the `|1>` probability of the measured qubit.
pub fn execute(circuit: &SensingCircuit) -> Result<f64, CircuitError> {
    Ok(prob_one(&final_state(circuit)?, circuit.measured_qubit)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NoiseKind;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn noiseless() -> NoiseSpec {
        NoiseSpec::phase_damping(0.0).unwrap()
    }

    fn spec(detection: Detection, folding: Folding, noise: NoiseSpec, b: f64, t: f64) -> ProtocolSpec {
        ProtocolSpec { detection, folding, n_qubits: 1, noise, field: b, sensing_time: t }
    }

    #[test]
    fn noiseless_variance_fringe() {
        for (bt, expect) in [(0.0, 0.0), (PI, 1.0), (PI / 2.0, 0.5)] {
            let s = spec(Detection::Variance, Folding::None, noiseless(), bt, 1.0);
            let p = execute(&build_ramsey(&s).unwrap()).unwrap();
            assert_relative_eq!(p, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn noiseless_slope_fringe() {
        let x = 0.3;
        let s = spec(Detection::Slope, Folding::None, noiseless(), x, 1.0);
        let p = execute(&build_ramsey(&s).unwrap()).unwrap();
        assert_relative_eq!(p - 0.5, 0.5 * x.sin(), epsilon = 1e-12);
    }

    #[test]
    fn ramsey_rejects_multiqubit_spec() {
        let mut s = spec(Detection::Slope, Folding::None, noiseless(), 0.1, 1.0);
        s.n_qubits = 2;
        assert!(matches!(build_ramsey(&s), Err(CircuitError::WrongQubitCount { .. })));
    }

    #[test]
    fn zero_folds_reduce_to_ramsey() {
        let s0 = spec(Detection::Variance, Folding::None, noiseless(), 0.4, 1.3);
        let s1 = spec(Detection::Variance, Folding::Local(0), NoiseSpec::phase_damping(0.2).unwrap(), 0.4, 1.3);
        let ramsey = build_ramsey(&ProtocolSpec { noise: s1.noise, ..s0 }).unwrap();
        let folded = build_local_folded(&s1).unwrap();
        assert_eq!(ramsey, folded);
    }

    #[test]
    fn noiseless_folding_is_invariant() {
        for detection in [Detection::Slope, Detection::Variance] {
            let base = spec(detection, Folding::None, noiseless(), 0.7, 0.9);
            let p0 = execute(&build_ramsey(&base).unwrap()).unwrap();
            for m in 0..=5 {
                let local = spec(detection, Folding::Local(m), noiseless(), 0.7, 0.9);
                let global = spec(detection, Folding::Global(m), noiseless(), 0.7, 0.9);
                let pl = execute(&build_local_folded(&local).unwrap()).unwrap();
                let pg = execute(&build_global_folded(&global).unwrap()).unwrap();
                assert_relative_eq!(pl, p0, epsilon = 1e-12);
                assert_relative_eq!(pg, p0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn local_folded_phase_damping_matches_closed_form() {
        // p1 = (1 - (1-lambda)^((2m+1)/2) cos(Bt)) / 2 for variance detection
        let lambda = 0.15;
        let bt = PI / 4.0;
        for m in 0..=3u32 {
            let s = spec(
                Detection::Variance,
                Folding::Local(m),
                NoiseSpec::phase_damping(lambda).unwrap(),
                bt,
                1.0,
            );
            let p = execute(&build_local_folded(&s).unwrap()).unwrap();
            let expect =
                0.5 * (1.0 - (1.0 - lambda).powf((2.0 * f64::from(m) + 1.0) / 2.0) * bt.cos());
            assert_relative_eq!(p, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn phase_damping_pi_half_degeneracy() {
        let s0 = spec(
            Detection::Variance,
            Folding::Local(0),
            NoiseSpec::phase_damping(0.3).unwrap(),
            PI / 2.0,
            1.0,
        );
        for m in 0..=4 {
            let s = ProtocolSpec { folding: Folding::Local(m), ..s0 };
            let p = execute(&build_local_folded(&s).unwrap()).unwrap();
            assert_relative_eq!(p, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_decay_drives_p1_to_zero() {
        for m in [0, 1, 3] {
            let s = spec(
                Detection::Variance,
                Folding::Local(m),
                NoiseSpec::new(NoiseKind::AmplitudeDamping, 1.0).unwrap(),
                1.0,
                1.0,
            );
            let p = execute(&build_local_folded(&s).unwrap()).unwrap();
            assert_relative_eq!(p, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_circuit_reads_zero() {
        let c = SensingCircuit { n_qubits: 1, elements: vec![], measured_qubit: 0 };
        assert_eq!(execute(&c).unwrap(), 0.0);
    }

    #[test]
    fn global_folding_preserves_total_phase() {
        let s0 = spec(Detection::Variance, Folding::Global(0), noiseless(), 0.8, 1.1);
        let p0 = execute(&build_global_folded(&s0).unwrap()).unwrap();
        let s2 = spec(Detection::Variance, Folding::Global(2), noiseless(), 0.8, 1.1);
        let p2 = execute(&build_global_folded(&s2).unwrap()).unwrap();
        assert_relative_eq!(p0, p2, epsilon = 1e-12);
    }

    #[test]
    fn global_folded_equals_repeated_form() {
        let lambda = 0.05;
        let noise = NoiseSpec::phase_damping(lambda).unwrap();
        for m in 0..=2u32 {
            let t = 1.2;
            let s = spec(Detection::Variance, Folding::Global(m), noise, 0.9, t);
            let folded = execute(&build_global_folded(&s).unwrap()).unwrap();
            let reps = 2 * m + 1;
            let repeated = execute(
                &build_global_repeated(reps, Detection::Variance, &noise, 0.9, t / f64::from(reps))
                    .unwrap(),
            )
            .unwrap();
            assert_relative_eq!(folded, repeated, epsilon = 1e-12);
        }
    }

    #[test]
    fn ghz_noiseless_slope_law() {
        let x = 0.1;
        for n in [2usize, 4] {
            let s = ProtocolSpec {
                detection: Detection::Slope,
                folding: Folding::None,
                n_qubits: n,
                noise: noiseless(),
                field: x,
                sensing_time: 1.0,
            };
            let p = execute(&build_ghz(&s).unwrap()).unwrap();
            assert_relative_eq!(p - 0.5, 0.5 * (n as f64 * x).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn ghz_noiseless_fold_invariance() {
        let s0 = ProtocolSpec {
            detection: Detection::Variance,
            folding: Folding::None,
            n_qubits: 3,
            noise: noiseless(),
            field: 0.35,
            sensing_time: 1.0,
        };
        let p0 = execute(&build_ghz(&s0).unwrap()).unwrap();
        for m in 1..=3 {
            let s = ProtocolSpec { folding: Folding::Local(m), ..s0 };
            let p = execute(&build_ghz(&s).unwrap()).unwrap();
            assert_relative_eq!(p, p0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ghz_damped_contrast_below_half() {
        // weak noise strictly shrinks the fringe amplitude
        let s = ProtocolSpec {
            detection: Detection::Slope,
            folding: Folding::None,
            n_qubits: 4,
            noise: NoiseSpec::phase_damping(0.005).unwrap(),
            field: 0.05,
            sensing_time: 1.0,
        };
        let p = execute(&build_ghz(&s).unwrap()).unwrap();
        let noiseless_dev = 0.5 * (4.0 * 0.05_f64).sin();
        let dev = p - 0.5;
        assert!(dev > 0.0 && dev < noiseless_dev);
    }

    #[test]
    fn ghz_preparation_marginals_are_half() {
        // stop after the entangling block: every qubit of the GHZ state
        // reads |1> with probability 1/2
        use crate::densmat::{apply_unitary, init_ground, prob_one};
        let mut rho = init_ground(4).unwrap();
        rho = apply_unitary(&rho, &gates::sqrt_y(0)).unwrap();
        for q in 0..3 {
            rho = apply_unitary(&rho, &gates::cnot(q, q + 1)).unwrap();
        }
        for q in 0..4 {
            assert_relative_eq!(prob_one(&rho, q).unwrap(), 0.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn ghz_rejects_single_qubit() {
        let s = spec(Detection::Slope, Folding::None, noiseless(), 0.1, 1.0);
        assert!(matches!(build_ghz(&s), Err(CircuitError::GhzTooSmall(1))));
    }

    #[test]
    fn global_folding_requires_single_qubit() {
        let s = ProtocolSpec {
            detection: Detection::Slope,
            folding: Folding::Global(1),
            n_qubits: 2,
            noise: noiseless(),
            field: 0.1,
            sensing_time: 1.0,
        };
        assert!(matches!(build_circuit(&s), Err(CircuitError::GlobalFoldingMultiQubit)));
    }
}
