//! Dense complex linear algebra and density-matrix evolution.
//!
//! Everything here is sized for desk-scale simulation: dense matrices up to
//! 4096x4096 (12 qubits), with gates embedded by index arithmetic rather than
//! explicit tensor products.

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on simulated register size; `2^12` dense is still desk-feasible.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix dimensions {rows}x{cols} do not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not unitary within tolerance {0:e}")]
    NotUnitary(f64),
    #[error("Kraus set is not trace preserving within tolerance {0:e}")]
    NotCptp(f64),
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("gate targets must be distinct")]
    DuplicateTarget,
    #[error("matrix is singular")]
    Singular,
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting shape mismatches and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if rows * cols != entries.len() {
            return Err(MatrixError::ShapeMismatch { rows, cols, len: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Convenience constructor from real/imag pairs, mostly for tests and
    /// fixed gate tables.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend_from_slice(row);
        }
        Self { rows: r, cols: c, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let entries = self.entries.iter().map(|z| z * a).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Maximum entrywise |a_ij - b_ij|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0_f64;
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| self[(i, j)].norm()).sum();
            best = best.max(s);
        }
        best
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = self.adjoint().mul(self);
        prod.max_abs_diff(&Self::identity(self.rows)) < tol
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let (mut pivot_row, mut pivot_mag) = (col, lu[(col, col)].norm());
            for r in col + 1..n {
                let mag = lu[(r, col)].norm();
                if mag > pivot_mag {
                    pivot_row = r;
                    pivot_mag = mag;
                }
            }
            if pivot_mag == 0.0 {
                return Err(MatrixError::Singular);
            }
            if pivot_row != col {
                lu.swap_rows(col, pivot_row);
                x.swap_rows(col, pivot_row);
            }
            let inv = Complex64::new(1.0, 0.0) / lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] * inv;
                if factor == Complex64::ZERO {
                    continue;
                }
                for c in col..n {
                    let v = lu[(col, c)];
                    lu[(r, c)] -= factor * v;
                }
                for c in 0..x.cols {
                    let v = x[(col, c)];
                    x[(r, c)] -= factor * v;
                }
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let inv = Complex64::new(1.0, 0.0) / lu[(col, col)];
            for c in 0..x.cols {
                let mut v = x[(col, c)];
                for k in col + 1..n {
                    v -= lu[(col, k)] * x[(k, c)];
                }
                x[(col, c)] = v * inv;
            }
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

// [6/6] diagonal Pade coefficients of the exponential.
const PADE6: [f64; 7] =
    [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0];

/// Matrix exponential by scaling-and-squaring with a fixed-order [6/6] Pade
/// approximant. The scaling threshold is chosen so the series truncation
/// error stays below `tol`.
pub fn expm(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let tol = if tol > 0.0 { tol } else { 1e-12 };
    // Leading truncation coefficient of the [6/6] approximant is
    // (6!)^2 / (12! 13!); theta solves c * theta^13 = tol, capped for safety.
    let c13 = 1.744e-13_f64;
    let theta = (tol / c13).powf(1.0 / 13.0).clamp(1e-3, 0.5);
    let norm = m.one_norm();
    let mut s = 0u32;
    if norm > theta {
        s = (norm / theta).log2().ceil() as u32;
    }
    let scaled = m.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));

    let a2 = scaled.mul(&scaled);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let id = ComplexMatrix::identity(n);
    let re = |x: f64| Complex64::new(x, 0.0);
    // odd part: A (b1 I + b3 A^2 + b5 A^4)
    let u = scaled.mul(
        &id.scale(re(PADE6[1]))
            .add(&a2.scale(re(PADE6[3])))
            .add(&a4.scale(re(PADE6[5]))),
    );
    // even part: b0 I + b2 A^2 + b4 A^4 + b6 A^6
    let v = id
        .scale(re(PADE6[0]))
        .add(&a2.scale(re(PADE6[2])))
        .add(&a4.scale(re(PADE6[4])))
        .add(&a6.scale(re(PADE6[6])));
    // exp(A) ~ (V - U)^-1 (V + U)
    let mut result = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        result = result.mul(&result);
    }
    Ok(result)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Diagnostic routine used by the physicality checks in the test suites; not
/// tuned for large matrices.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square());
    let n = m.rows;
    let mut h = m.clone();
    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(h[(p, q)].norm());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = h[(p, q)];
                if apq.norm() < 1e-15 {
                    continue;
                }
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                let (sin_t, cos_t) = theta.sin_cos();
                let s = phase * sin_t;
                // columns
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * cos_t + hiq * s.conj();
                    h[(i, q)] = -hip * s + hiq * cos_t;
                }
                // rows
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = hpj * cos_t + hqj * s;
                    h[(q, j)] = -hpj * s.conj() + hqj * cos_t;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// A unitary acting on an ordered list of target qubits.
///
/// `targets[0]` is the most significant bit of the gate's own basis index,
/// matching the register convention that qubit 0 is the leftmost tensor
/// factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    matrix: ComplexMatrix,
    targets: Vec<usize>,
}

impl GateMatrix {
    pub fn new(matrix: ComplexMatrix, targets: Vec<usize>) -> Result<Self, MatrixError> {
        if !matrix.is_square() {
            return Err(MatrixError::NotSquare { rows: matrix.rows, cols: matrix.cols });
        }
        let dim = 1usize << targets.len();
        if matrix.rows != dim {
            return Err(MatrixError::Dimension(format!(
                "{} targets require a {dim}x{dim} matrix, got {}x{}",
                targets.len(),
                matrix.rows,
                matrix.cols
            )));
        }
        for (i, a) in targets.iter().enumerate() {
            if targets[i + 1..].contains(a) {
                return Err(MatrixError::DuplicateTarget);
            }
        }
        if !matrix.is_unitary(1e-10) {
            return Err(MatrixError::NotUnitary(1e-10));
        }
        Ok(Self { matrix, targets })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The inverse gate on the same targets.
    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), targets: self.targets.clone() }
    }
}

/// Density matrix of an `n_qubits` register. Qubit 0 is the leftmost tensor
/// factor, i.e. the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Bit position of `qubit` within a basis index.
    fn bit(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), MatrixError> {
        if qubit >= self.n_qubits {
            return Err(MatrixError::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }
}

/// `|0...0><0...0|` on `n_qubits` qubits.
pub fn init_ground(n_qubits: usize) -> Result<DensityMatrix, MatrixError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(MatrixError::QubitCount(n_qubits));
    }
    let dim = 1usize << n_qubits;
    let mut mat = ComplexMatrix::zeros(dim, dim);
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    Ok(DensityMatrix { n_qubits, mat })
}

/// Basis indices of the 2^k-dimensional block spanned by `targets` on top of
/// `base` (an index with all target bits clear).
fn block_indices(base: usize, bit_positions: &[usize], out: &mut [usize]) {
    let k = bit_positions.len();
    for (pattern, slot) in out.iter_mut().enumerate() {
        let mut idx = base;
        for (j, &pos) in bit_positions.iter().enumerate() {
            if (pattern >> (k - 1 - j)) & 1 == 1 {
                idx |= 1 << pos;
            }
        }
        *slot = idx;
    }
}

/// Left-multiplies the embedded `gate` into `m` (rows mix), writing in place.
fn embed_left_mul(m: &mut ComplexMatrix, gate: &ComplexMatrix, bit_positions: &[usize], dim: usize) {
    let k = bit_positions.len();
    let bs = 1usize << k;
    let target_mask: usize = bit_positions.iter().map(|&p| 1usize << p).sum();
    let mut idx = vec![0usize; bs];
    let mut scratch = vec![Complex64::ZERO; bs];
    for base in 0..dim {
        if base & target_mask != 0 {
            continue;
        }
        block_indices(base, bit_positions, &mut idx);
        for col in 0..dim {
            for i in 0..bs {
                let mut acc = Complex64::ZERO;
                for j in 0..bs {
                    acc += gate[(i, j)] * m[(idx[j], col)];
                }
                scratch[i] = acc;
            }
            for (i, &row) in idx.iter().enumerate() {
                m[(row, col)] = scratch[i];
            }
        }
    }
}

/// Right-multiplies the embedded adjoint of `gate` into `m` (columns mix).
fn embed_right_mul_dagger(
    m: &mut ComplexMatrix,
    gate: &ComplexMatrix,
    bit_positions: &[usize],
    dim: usize,
) {
    let k = bit_positions.len();
    let bs = 1usize << k;
    let target_mask: usize = bit_positions.iter().map(|&p| 1usize << p).sum();
    let mut idx = vec![0usize; bs];
    let mut scratch = vec![Complex64::ZERO; bs];
    for base in 0..dim {
        if base & target_mask != 0 {
            continue;
        }
        block_indices(base, bit_positions, &mut idx);
        for row in 0..dim {
            for i in 0..bs {
                let mut acc = Complex64::ZERO;
                for j in 0..bs {
                    // (U^dag)_{ji} = conj(U_{ij})
                    acc += m[(row, idx[j])] * gate[(i, j)].conj();
                }
                scratch[i] = acc;
            }
            for (i, &col) in idx.iter().enumerate() {
                m[(row, col)] = scratch[i];
            }
        }
    }
}

/// `U rho U^dag` with `U` embedded on the gate's targets.
pub fn apply_unitary(rho: &DensityMatrix, gate: &GateMatrix) -> Result<DensityMatrix, MatrixError> {
    for &t in gate.targets() {
        rho.check_qubit(t)?;
    }
    let bit_positions: Vec<usize> = gate.targets().iter().map(|&q| rho.bit(q)).collect();
    let dim = rho.dim();
    let mut mat = rho.mat.clone();
    embed_left_mul(&mut mat, gate.matrix(), &bit_positions, dim);
    embed_right_mul_dagger(&mut mat, gate.matrix(), &bit_positions, dim);
    Ok(DensityMatrix { n_qubits: rho.n_qubits, mat })
}

/// `sum_k E_k rho E_k^dag` for single-qubit Kraus operators on `target`.
///
/// The set must be trace preserving: `sum_k E_k^dag E_k = I` within 1e-10.
pub fn apply_kraus(
    rho: &DensityMatrix,
    kraus: &[ComplexMatrix],
    target: usize,
) -> Result<DensityMatrix, MatrixError> {
    rho.check_qubit(target)?;
    let mut completeness = ComplexMatrix::zeros(2, 2);
    for e in kraus {
        if e.rows() != 2 || e.cols() != 2 {
            return Err(MatrixError::Dimension("Kraus operators must be 2x2".into()));
        }
        completeness = completeness.add(&e.adjoint().mul(e));
    }
    if completeness.max_abs_diff(&ComplexMatrix::identity(2)) > 1e-10 {
        return Err(MatrixError::NotCptp(1e-10));
    }
    let bit_positions = [rho.bit(target)];
    let dim = rho.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for e in kraus {
        let mut term = rho.mat.clone();
        embed_left_mul(&mut term, e, &bit_positions, dim);
        embed_right_mul_dagger(&mut term, e, &bit_positions, dim);
        out = out.add(&term);
    }
    Ok(DensityMatrix { n_qubits: rho.n_qubits, mat: out })
}

/// Conjugates by a diagonal unitary given as its `dim` diagonal entries:
/// `rho_ij -> d_i rho_ij conj(d_j)`.
pub fn apply_diagonal_unitary(
    rho: &DensityMatrix,
    diag: &[Complex64],
) -> Result<DensityMatrix, MatrixError> {
    let dim = rho.dim();
    if diag.len() != dim {
        return Err(MatrixError::Dimension(format!(
            "diagonal has {} entries, expected {dim}",
            diag.len()
        )));
    }
    let mut mat = rho.mat.clone();
    for i in 0..dim {
        for j in 0..dim {
            mat[(i, j)] *= diag[i] * diag[j].conj();
        }
    }
    Ok(DensityMatrix { n_qubits: rho.n_qubits, mat })
}

/// Probability of reading `|1>` on `qubit`, i.e.
/// `Tr[rho (|1><1| on qubit x I elsewhere)]`, clamped to [0, 1].
pub fn prob_one(rho: &DensityMatrix, qubit: usize) -> Result<f64, MatrixError> {
    rho.check_qubit(qubit)?;
    let bit = rho.bit(qubit);
    let mut p = 0.0;
    for i in 0..rho.dim() {
        if (i >> bit) & 1 == 1 {
            p += rho.mat[(i, i)].re;
        }
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> GateMatrix {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        GateMatrix::new(m, vec![0]).unwrap()
    }

    fn rz(theta: f64) -> ComplexMatrix {
        ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::from_polar(1.0, -theta / 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                Complex64::from_polar(1.0, theta / 2.0),
            ],
        )
        .unwrap()
    }

    fn sqrt_y() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(-s, 0.0), c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    #[test]
    fn ground_state_examples() {
        let rho1 = init_ground(1).unwrap();
        assert_eq!(rho1.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho1.matrix()[(1, 1)], c(0.0, 0.0));

        let rho2 = init_ground(2).unwrap();
        for i in 0..4 {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert_eq!(rho2.matrix()[(i, i)].re, expect);
        }

        let rho8 = init_ground(8).unwrap();
        assert_eq!(rho8.dim(), 256);
        assert_relative_eq!(rho8.trace().re, 1.0, epsilon = 1e-15);
        let nonzero = (0..256)
            .flat_map(|i| (0..256).map(move |j| (i, j)))
            .filter(|&(i, j)| rho8.matrix()[(i, j)].norm() > 0.0)
            .count();
        assert_eq!(nonzero, 1);

        assert!(init_ground(0).is_err());
        assert!(init_ground(13).is_err());
    }

    #[test]
    fn x_gate_flips_ground() {
        let rho = init_ground(1).unwrap();
        let flipped = apply_unitary(&rho, &pauli_x()).unwrap();
        assert_relative_eq!(flipped.matrix()[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(prob_one(&flipped, 0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rz_leaves_diagonal_states_invariant() {
        let rho = init_ground(1).unwrap();
        for theta in [0.0, 0.3, 1.7, -2.4] {
            let gate = GateMatrix::new(rz(theta), vec![0]).unwrap();
            let out = apply_unitary(&rho, &gate).unwrap();
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn sqrt_y_gives_equal_superposition() {
        let rho = init_ground(1).unwrap();
        let gate = GateMatrix::new(sqrt_y(), vec![0]).unwrap();
        let out = apply_unitary(&rho, &gate).unwrap();
        assert_relative_eq!(prob_one(&out, 0).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn unitary_then_inverse_restores_state() {
        let rho0 = init_ground(2).unwrap();
        let g = GateMatrix::new(sqrt_y(), vec![1]).unwrap();
        let rho1 = apply_unitary(&rho0, &g).unwrap();
        let rho2 = apply_unitary(&rho1, &g.dagger()).unwrap();
        assert!(rho2.matrix().max_abs_diff(rho0.matrix()) < 1e-10);
    }

    #[test]
    fn apply_unitary_rejects_bad_targets() {
        let rho = init_ground(1).unwrap();
        let g = GateMatrix::new(sqrt_y(), vec![1]).unwrap();
        assert!(matches!(apply_unitary(&rho, &g), Err(MatrixError::QubitIndex { .. })));
    }

    #[test]
    fn gate_matrix_rejects_non_unitary() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!(matches!(GateMatrix::new(m, vec![0]), Err(MatrixError::NotUnitary(_))));
    }

    #[test]
    fn identity_kraus_is_noop() {
        let g = GateMatrix::new(sqrt_y(), vec![0]).unwrap();
        let rho = apply_unitary(&init_ground(1).unwrap(), &g).unwrap();
        let out = apply_kraus(&rho, &[ComplexMatrix::identity(2)], 0).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn full_dephasing_kills_off_diagonals() {
        let g = GateMatrix::new(sqrt_y(), vec![0]).unwrap();
        let plus = apply_unitary(&init_ground(1).unwrap(), &g).unwrap();
        // lambda = 1 phase damping
        let e0 = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e1 = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let out = apply_kraus(&plus, &[e0, e1], 0).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(out.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(out.matrix()[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn full_decay_restores_ground() {
        let excited = apply_unitary(&init_ground(1).unwrap(), &pauli_x()).unwrap();
        // gamma = 1 amplitude damping
        let e0 = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e1 = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let out = apply_kraus(&excited, &[e0, e1], 0).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(prob_one(&out, 0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn non_cptp_kraus_rejected() {
        let rho = init_ground(1).unwrap();
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(matches!(apply_kraus(&rho, &[half], 0), Err(MatrixError::NotCptp(_))));
    }

    #[test]
    fn prob_one_marginal_of_two_qubits() {
        // |1>|0>: qubit 0 reads 1, qubit 1 reads 0
        let rho = init_ground(2).unwrap();
        let x0 = GateMatrix::new(pauli_x().matrix().clone(), vec![0]).unwrap();
        let rho = apply_unitary(&rho, &x0).unwrap();
        assert_relative_eq!(prob_one(&rho, 0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(prob_one(&rho, 1).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_unitary_matches_gate_form() {
        let g = GateMatrix::new(sqrt_y(), vec![0]).unwrap();
        let rho = apply_unitary(&init_ground(1).unwrap(), &g).unwrap();
        let theta = 0.7;
        let via_gate = apply_unitary(&rho, &GateMatrix::new(rz(theta), vec![0]).unwrap()).unwrap();
        let diag =
            vec![Complex64::from_polar(1.0, -theta / 2.0), Complex64::from_polar(1.0, theta / 2.0)];
        let via_diag = apply_diagonal_unitary(&rho, &diag).unwrap();
        assert!(via_gate.matrix().max_abs_diff(via_diag.matrix()) < 1e-15);
    }

    #[test]
    fn expm_zero_is_identity() {
        let out = expm(&ComplexMatrix::zeros(3, 3), 1e-12).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn expm_diagonal() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.2, 0.4)],
        )
        .unwrap();
        let out = expm(&m, 1e-12).unwrap();
        assert!((out[(0, 0)] - c(0.3f64.exp(), 0.0)).norm() < 1e-12);
        let expect = Complex64::new(-1.2, 0.4).exp();
        assert!((out[(1, 1)] - expect).norm() < 1e-12);
        assert!(out[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn expm_rotation_generator() {
        let theta = 1.1_f64;
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(-theta, 0.0), c(theta, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let out = expm(&m, 1e-12).unwrap();
        assert_relative_eq!(out[(0, 0)].re, theta.cos(), epsilon = 1e-12);
        assert_relative_eq!(out[(0, 1)].re, -theta.sin(), epsilon = 1e-12);
        assert_relative_eq!(out[(1, 0)].re, theta.sin(), epsilon = 1e-12);
        assert_relative_eq!(out[(1, 1)].re, theta.cos(), epsilon = 1e-12);
    }

    #[test]
    fn expm_rejects_non_square() {
        assert!(expm(&ComplexMatrix::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrix() {
        // eigenvalues of [[2, i], [-i, 2]] are 1 and 3
        let m = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)])
            .unwrap();
        let eig = hermitian_eigenvalues(&m);
        assert_relative_eq!(eig[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(eig[1], 3.0, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn expm_times_expm_of_negation_is_identity(seed in 0u64..64) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
            // keep the 1-norm at or below 5
            let norm = m.one_norm();
            if norm > 5.0 {
                m = m.scale(c(5.0 / norm, 0.0));
            }
            let fwd = expm(&m, 1e-12).unwrap();
            let bwd = expm(&m.scale(c(-1.0, 0.0)), 1e-12).unwrap();
            prop_assert!(fwd.mul(&bwd).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-9);
        }

        #[test]
        fn prob_one_stays_in_unit_interval(theta in 0.0..std::f64::consts::TAU, lam in 0.0f64..1.0) {
            let g = GateMatrix::new(sqrt_y(), vec![0]).unwrap();
            let rho = apply_unitary(&init_ground(1).unwrap(), &g).unwrap();
            let rho = apply_diagonal_unitary(&rho, &[
                Complex64::from_polar(1.0, -theta / 2.0),
                Complex64::from_polar(1.0, theta / 2.0),
            ]).unwrap();
            let e0 = ComplexMatrix::new(2, 2, vec![
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - lam).sqrt(), 0.0),
            ]).unwrap();
            let e1 = ComplexMatrix::new(2, 2, vec![
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(lam.sqrt(), 0.0),
            ]).unwrap();
            let rho = apply_kraus(&rho, &[e0, e1], 0).unwrap();
            let p = prob_one(&rho, 0).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(rho.matrix().hermiticity_error() < 1e-10);
        }
    }
}
