//! Closed-form and Lindblad-based reference results.
//!
//! These serve as independent oracles for the circuit simulator: the local
//! folding closed forms for both channels, single-step Bloch-vector evolution
//! under the formal Lindblad solution, and first/second-order
//! average-Liouvillian approximations for global folding.

use num_complex::Complex64;
use thiserror::Error;

use crate::densmat::{expm, ComplexMatrix, MatrixError};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("coupling matrix is singular but the shift vector is nonzero")]
    SingularCoupling,
    #[error("parameters must be non-negative and finite")]
    InvalidParameter,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Excited-state probability after the locally folded Ramsey sequence under
/// phase damping (variance convention):
/// `p1 = [1 - (1-lambda)^((2m+1)/2) cos(B t)] / 2`.
pub fn p1_local_pd(lambda: f64, field: f64, sensing_time: f64, folds: u32) -> f64 {
    let eta = 2.0 * f64::from(folds) + 1.0;
    0.5 * (1.0 - (1.0 - lambda).powf(eta / 2.0) * (field * sensing_time).cos())
}

/// Geometric fold sum `g_j = (1 - a^j) / (1 - a)` with `a = (1-gamma)^(3/2)`;
/// the removable singularity at `gamma = 0` evaluates to `j`.
fn fold_sum(j: u32, gamma: f64) -> f64 {
    let a = (1.0 - gamma).powf(1.5);
    if (1.0 - a).abs() < 1e-12 {
        return f64::from(j);
    }
    (1.0 - a.powi(j as i32)) / (1.0 - a)
}

/// Excited-state probability after the locally folded Ramsey sequence under
/// amplitude damping (variance convention), with `n` fold pairs before the
/// sensing period and `m` after.
///
/// Derived by iterating the Bloch-vector recursion along the gate/noise
/// sequence: `p1 = [1 - A - B cos(B tau_z)] / 2` with
/// `A = gamma (a^m + g_m)`, `B = a^(m+1) (a^n + gamma g_n)` and
/// `a = (1-gamma)^(3/2)`.
pub fn p1_local_ad(
    gamma: f64,
    field: f64,
    sensing_time: f64,
    pre_folds: u32,
    post_folds: u32,
) -> f64 {
    let a = (1.0 - gamma).powf(1.5);
    let coef_offset = gamma * (a.powi(post_folds as i32) + fold_sum(post_folds, gamma));
    let coef_fringe = a.powi(post_folds as i32 + 1)
        * (a.powi(pre_folds as i32) + gamma * fold_sum(pre_folds, gamma));
    0.5 * (1.0 - coef_offset - coef_fringe * (field * sensing_time).cos())
}

/// A Bloch vector (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// The ground state `|0>`.
    pub fn ground() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `p1` when measuring along z: `(1 - v_z) / 2`.
    pub fn prob_one(&self) -> f64 {
        0.5 * (1.0 - self.z)
    }
}

/// Sensing-period coupling matrix: rotation about z at rate `field`.
pub fn sensing_coupling(field: f64) -> [[f64; 3]; 3] {
    [[0.0, -field, 0.0], [field, 0.0, 0.0], [0.0, 0.0, 0.0]]
}

/// Control/noise coupling for a rotation about x at rate `omega` with
/// dephasing rate `dephasing` and decay rate `decay`. The matching shift
/// vector is `(0, 0, decay)`.
pub fn control_coupling_x(omega: f64, dephasing: f64, decay: f64) -> [[f64; 3]; 3] {
    let transverse = -(0.5 * decay + dephasing);
    [[transverse, 0.0, 0.0], [0.0, transverse, -omega], [0.0, omega, -decay]]
}

/// Same as [`control_coupling_x`] for a rotation about y.
pub fn control_coupling_y(omega: f64, dephasing: f64, decay: f64) -> [[f64; 3]; 3] {
    let transverse = -(0.5 * decay + dephasing);
    [[transverse, 0.0, -omega], [0.0, transverse, 0.0], [omega, 0.0, -decay]]
}

fn real_matrix(g: &[[f64; 3]; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3, 3);
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(*v, 0.0);
        }
    }
    m
}

/// One application of the formal solution
/// `v(t + tau) = e^(G tau) v + (e^(G tau) - 1) G^-1 c`.
///
/// `G` must be invertible whenever `c` is nonzero.
pub fn bloch_step(
    v: BlochVector,
    coupling: &[[f64; 3]; 3],
    shift: [f64; 3],
    tau: f64,
) -> Result<BlochVector, AnalyticError> {
    let g = real_matrix(coupling);
    let propagator = expm(&g.scale(Complex64::new(tau, 0.0)), 1e-14)?;
    // e^(G tau) v + (e^(G tau) - 1) G^-1 c = e^(G tau)(v + G^-1 c) - G^-1 c
    let offset = if shift == [0.0; 3] {
        [0.0; 3]
    } else {
        let mut rhs = ComplexMatrix::zeros(3, 1);
        for i in 0..3 {
            rhs[(i, 0)] = Complex64::new(shift[i], 0.0);
        }
        let sol = g.solve(&rhs).map_err(|e| match e {
            MatrixError::Singular => AnalyticError::SingularCoupling,
            other => AnalyticError::Matrix(other),
        })?;
        [sol[(0, 0)].re, sol[(1, 0)].re, sol[(2, 0)].re]
    };
    let shifted = [v.x + offset[0], v.y + offset[1], v.z + offset[2]];
    let mut out = [0.0; 3];
    for i in 0..3 {
        let mut acc = 0.0;
        for (j, s) in shifted.iter().enumerate() {
            acc += propagator[(i, j)].re * s;
        }
        out[i] = acc - offset[i];
    }
    Ok(BlochVector::new(out[0], out[1], out[2]))
}

/// Continuous-time Lindblad parameters and sequence timings used by the
/// analytic references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    /// Phase damping rate (1/time).
    pub dephasing_rate: f64,
    /// Amplitude damping rate (1/time).
    pub decay_rate: f64,
    /// Control rotation rate omega = theta / tau (rad/time).
    pub control_rate: f64,
    /// Rotation angle theta.
    pub rotation_angle: f64,
    /// Gate duration tau.
    pub gate_time: f64,
    /// Duration of one dephasing-channel application.
    pub dephasing_time: f64,
    /// Gate time delta-t entering the average-Liouvillian sequence.
    pub alt_gate_time: f64,
    /// Per-segment sensing duration T.
    pub segment_time: f64,
    /// Total sensing time tau_z.
    pub total_sensing_time: f64,
}

impl LindbladParams {
    pub fn validate(&self) -> Result<(), AnalyticError> {
        let fields = [
            self.dephasing_rate,
            self.decay_rate,
            self.control_rate,
            self.rotation_angle,
            self.gate_time,
            self.dephasing_time,
            self.alt_gate_time,
            self.segment_time,
            self.total_sensing_time,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(AnalyticError::InvalidParameter);
        }
        Ok(())
    }

    /// Discrete phase-damping probability equivalent to the continuous
    /// channel acting for `dephasing_time`: `lambda = 1 - e^(-2 Lambda t_p)`.
    pub fn discrete_dephasing(&self) -> f64 {
        1.0 - (-2.0 * self.dephasing_rate * self.dephasing_time).exp()
    }

    /// Discrete decay probability for one gate interval:
    /// `gamma = 1 - e^(-Gamma tau)`.
    pub fn discrete_decay(&self) -> f64 {
        1.0 - (-self.decay_rate * self.gate_time).exp()
    }
}

// Vectorization is row-major: vec(rho) = (rho00, rho01, rho10, rho11).

/// Superoperator of `rho -> U rho U^dag` for a single-qubit unitary.
pub fn superop_of_unitary(u: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!((u.rows(), u.cols()), (2, 2));
    let mut s = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s[(i * 2 + j, k * 2 + l)] = u[(i, k)] * u[(j, l)].conj();
                }
            }
        }
    }
    s
}

/// Vectorized phase-damping Lindbladian at rate `dephasing`.
pub fn lindblad_pd(dephasing: f64) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(4, 4);
    l[(1, 1)] = Complex64::new(-dephasing, 0.0);
    l[(2, 2)] = Complex64::new(-dephasing, 0.0);
    l
}

/// Vectorized amplitude-damping Lindbladian at rate `decay`.
pub fn lindblad_ad(decay: f64) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(4, 4);
    l[(0, 3)] = Complex64::new(decay, 0.0);
    l[(1, 1)] = Complex64::new(-0.5 * decay, 0.0);
    l[(2, 2)] = Complex64::new(-0.5 * decay, 0.0);
    l[(3, 3)] = Complex64::new(-decay, 0.0);
    l
}

/// Vectorized generator of the sensing rotation at field strength `field`.
pub fn sensing_liouvillian(field: f64) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(4, 4);
    l[(1, 1)] = Complex64::new(0.0, -field);
    l[(2, 2)] = Complex64::new(0.0, field);
    l
}

fn ry_superops() -> (ComplexMatrix, ComplexMatrix) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex64::new(re, 0.0);
    let ry_plus = ComplexMatrix::new(2, 2, vec![c(s), c(-s), c(s), c(s)]).expect("static gate");
    let plus = superop_of_unitary(&ry_plus);
    let minus = superop_of_unitary(&ry_plus.adjoint());
    (plus, minus)
}

/// First-order average Liouvillian (times total sequence time) of one noisy
/// Ramsey pass: gate, sensing segment of duration `segment_time`, inverse
/// gate, with `noise` acting for `gate_time` after each gate.
pub fn alt_first_order(
    noise: &ComplexMatrix,
    field: f64,
    segment_time: f64,
    gate_time: f64,
) -> ComplexMatrix {
    let (r_plus, r_minus) = ry_superops();
    let dt = Complex64::new(gate_time, 0.0);
    let seg = Complex64::new(segment_time, 0.0);
    // Interaction-frame generators: the first gate interval is conjugated by
    // the preparation rotation, the final one is untouched.
    let first = r_minus.mul(noise).mul(&r_plus).scale(dt);
    let sensing = r_minus.mul(&sensing_liouvillian(field)).mul(&r_plus).scale(seg);
    let last = noise.scale(dt);
    first.add(&sensing).add(&last)
}

/// Second-order (Magnus) correction times total sequence time for the same
/// pass: `([C,H] + [C,A] + [H,A]) / 2` with `A`, `H`, `C` the three interval
/// generators in time order.
pub fn alt_second_order(
    noise: &ComplexMatrix,
    field: f64,
    segment_time: f64,
    gate_time: f64,
) -> ComplexMatrix {
    let (r_plus, r_minus) = ry_superops();
    let dt = Complex64::new(gate_time, 0.0);
    let seg = Complex64::new(segment_time, 0.0);
    let a = r_minus.mul(noise).mul(&r_plus).scale(dt);
    let h = r_minus.mul(&sensing_liouvillian(field)).mul(&r_plus).scale(seg);
    let c = noise.scale(dt);
    let comm = |x: &ComplexMatrix, y: &ComplexMatrix| x.mul(y).sub(&y.mul(x));
    comm(&c, &h).add(&comm(&c, &a)).add(&comm(&h, &a)).scale(Complex64::new(0.5, 0.0))
}

fn alt_p1(total_generator: &ComplexMatrix, reps: u32) -> Result<f64, AnalyticError> {
    let propagator = expm(&total_generator.scale(Complex64::new(f64::from(reps), 0.0)), 1e-13)?;
    // acting on vec(|0><0|) = e_0; p1 is the rho11 component
    Ok(propagator[(3, 0)].re)
}

/// First-order average-Liouvillian `p1` for `folds` global folds under phase
/// damping at rate `dephasing` (`folds + 1` sequence repetitions, each
/// sensing for `segment_time`).
pub fn alt_p1_global_pd(
    dephasing: f64,
    field: f64,
    segment_time: f64,
    gate_time: f64,
    folds: u32,
) -> Result<f64, AnalyticError> {
    let l1 = alt_first_order(&lindblad_pd(dephasing), field, segment_time, gate_time);
    alt_p1(&l1, folds + 1)
}

/// Second-order average-Liouvillian `p1` for `folds` global folds under
/// amplitude damping at rate `decay`.
pub fn alt_p1_global_ad(
    decay: f64,
    field: f64,
    segment_time: f64,
    gate_time: f64,
    folds: u32,
) -> Result<f64, AnalyticError> {
    let noise = lindblad_ad(decay);
    let l1 = alt_first_order(&noise, field, segment_time, gate_time);
    let l2 = alt_second_order(&noise, field, segment_time, gate_time);
    alt_p1(&l1.add(&l2), folds + 1)
}

/// First-order-only variant of [`alt_p1_global_ad`], kept for truncation
/// comparisons.
pub fn alt_p1_global_ad_first_order(
    decay: f64,
    field: f64,
    segment_time: f64,
    gate_time: f64,
    folds: u32,
) -> Result<f64, AnalyticError> {
    let l1 = alt_first_order(&lindblad_ad(decay), field, segment_time, gate_time);
    alt_p1(&l1, folds + 1)
}
