//! Dense polarization-qubit registers.
//!
//! Basis index bit conventions: bit value 0 is `|H⟩`, 1 is `|V⟩`, and qubit 0
//! (the first photon) is the most significant bit of the index. Qubit indices
//! in this API are zero-based.
//!
//! States are immutable values; every operation returns a new state.

mod io;
mod pauli;
mod setting;

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

pub use io::StateDocument;
pub use pauli::{Pauli, PauliString};
pub use setting::{Axis, MeasurementSetting, Plane};

/// Largest register accepted by the constructors.
pub const MAX_QUBITS: usize = 10;
/// Tolerance for unit norm / unit trace / Hermiticity / unitarity checks.
pub const NORM_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted for a density matrix.
pub const EIGEN_TOL: f64 = 1e-8;
/// Projection probabilities at or below this are reported as impossible.
pub const IMPOSSIBLE_TOL: f64 = 1e-12;

pub type Ket1 = [C64; 2];
pub type Mat2 = nalgebra::Matrix2<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QStateError {
    #[error("register size {0} outside 1..={MAX_QUBITS}")]
    RegisterSize(usize),
    #[error("expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },
    #[error("operand acts on {got} qubits but the register has {expected}")]
    QubitCount { expected: usize, got: usize },
    #[error("state is not normalized (norm or trace {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },
    #[error("invalid qubit selection: {0}")]
    Selection(String),
    #[error("impossible outcome (probability {0:e})")]
    ImpossibleOutcome(f64),
    #[error("cannot project the only qubit of a register")]
    LastQubit,
    #[error("block on qubit {qubit} is not unitary (deviation {deviation:e})")]
    NotUnitary { qubit: usize, deviation: f64 },
    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Commonly used single-qubit kets.
pub mod kets {
    use super::*;

    pub const H: Ket1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    pub const V: Ket1 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    pub const PLUS: Ket1 = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
    pub const MINUS: Ket1 = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)];
    pub const L: Ket1 = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)];
    pub const R: Ket1 = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)];
}

/// Commonly used single-qubit gates.
pub mod gates {
    use super::*;

    pub fn identity() -> Mat2 {
        Mat2::identity()
    }

    pub fn hadamard() -> Mat2 {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        Mat2::new(r, r, r, -r)
    }

    /// `√σ_z = diag(1, i)`.
    pub fn sqrt_z() -> Mat2 {
        Mat2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0))
    }

    pub fn pauli(p: Pauli) -> Mat2 {
        p.matrix()
    }
}

fn check_size(n: usize) -> Result<(), QStateError> {
    if n == 0 || n > MAX_QUBITS {
        Err(QStateError::RegisterSize(n))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn bit_pos(n: usize, qubit: usize) -> usize {
    n - 1 - qubit
}

/// Inserts bit `b` at position `pos` of the (n-1)-bit index `r`.
#[inline]
pub(crate) fn insert_bit(r: usize, pos: usize, b: usize) -> usize {
    let low = r & ((1 << pos) - 1);
    let high = r >> pos;
    (high << (pos + 1)) | (b << pos) | low
}

/// Applies `u` to `qubit` of a state vector in place.
pub(crate) fn apply_1q(v: &mut [C64], n: usize, qubit: usize, u: &Mat2) {
    let pos = bit_pos(n, qubit);
    let stride = 1 << pos;
    for r in 0..(v.len() >> 1) {
        let i0 = insert_bit(r, pos, 0);
        let i1 = i0 | stride;
        let (a, b) = (v[i0], v[i1]);
        v[i0] = u[(0, 0)] * a + u[(0, 1)] * b;
        v[i1] = u[(1, 0)] * a + u[(1, 1)] * b;
    }
}

/// `U ρ U†` for a tensor product `U = ⊗ us[q]`.
pub(crate) fn conjugate_local(rho: &DMatrix<C64>, n: usize, us: &[Mat2]) -> DMatrix<C64> {
    let dim = rho.nrows();
    let mut m = rho.clone();
    // left: every column is a state vector
    for col in m.as_mut_slice().chunks_mut(dim) {
        for (q, u) in us.iter().enumerate() {
            apply_1q(col, n, q, u);
        }
    }
    // right: (A U†) mixes columns with conj(u)
    for (q, u) in us.iter().enumerate() {
        let pos = bit_pos(n, q);
        let stride = 1 << pos;
        for r in 0..(dim >> 1) {
            let c0 = insert_bit(r, pos, 0);
            let c1 = c0 | stride;
            for row in 0..dim {
                let (a, b) = (m[(row, c0)], m[(row, c1)]);
                m[(row, c0)] = u[(0, 0)].conj() * a + u[(0, 1)].conj() * b;
                m[(row, c1)] = u[(1, 0)].conj() * a + u[(1, 1)].conj() * b;
            }
        }
    }
    m
}

fn check_unitary(us: &[Mat2]) -> Result<(), QStateError> {
    for (q, u) in us.iter().enumerate() {
        let dev = (u.adjoint() * u - Mat2::identity()).norm();
        if !(dev <= NORM_TOL) {
            return Err(QStateError::NotUnitary { qubit: q, deviation: dev });
        }
    }
    Ok(())
}

fn check_ket(ket: &Ket1) -> Result<(), QStateError> {
    let norm = (ket[0].norm_sqr() + ket[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(QStateError::NotNormalized(norm));
    }
    Ok(())
}

fn check_qubit(index: usize, n: usize) -> Result<(), QStateError> {
    if index >= n {
        Err(QStateError::QubitIndex { index, n })
    } else {
        Ok(())
    }
}

/// Operations shared by pure and mixed registers.
pub trait QuantumState: Sized {
    fn num_qubits(&self) -> usize;

    /// `Tr(ρP)`.
    fn expectation(&self, op: &PauliString) -> Result<f64, QStateError>;

    /// Probabilities of the `2^N` outcomes (qubit 0 = most significant bit).
    fn outcome_distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, QStateError>;

    /// Projects `qubit` onto `ket`; the remaining qubits keep their relative order.
    fn project(&self, qubit: usize, ket: &Ket1) -> Result<(Self, f64), QStateError>;

    fn apply_local(&self, unitaries: &[Mat2]) -> Result<Self, QStateError>;

    fn to_density(&self) -> QubitDensity;

    fn dim(&self) -> usize {
        1 << self.num_qubits()
    }
}

/// Normalized `2^N` amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitPureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl QubitPureState {
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self, QStateError> {
        check_size(num_qubits)?;
        let expected = 1 << num_qubits;
        if amplitudes.len() != expected {
            return Err(QStateError::Length { expected, got: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QStateError::NotNormalized(norm));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self, QStateError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(QStateError::ZeroNorm);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(num_qubits, amplitudes)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, QStateError> {
        check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(QStateError::Length { expected: dim, got: index + 1 });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    /// `⊗ kets[q]`.
    pub fn product(kets: &[Ket1]) -> Result<Self, QStateError> {
        check_size(kets.len())?;
        for k in kets {
            check_ket(k)?;
        }
        let n = kets.len();
        let amplitudes = (0..1usize << n)
            .map(|idx| {
                kets.iter()
                    .enumerate()
                    .map(|(q, k)| k[(idx >> bit_pos(n, q)) & 1])
                    .product()
            })
            .collect();
        Ok(Self { num_qubits: n, amplitudes })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64, QStateError> {
        if self.num_qubits != other.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: other.num_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> Result<f64, QStateError> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

impl QuantumState for QubitPureState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn expectation(&self, op: &PauliString) -> Result<f64, QStateError> {
        if op.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: op.len() });
        }
        let flip = op.flip_mask();
        let sign = op.sign_mask();
        let yp = op.y_phase();
        let v = &self.amplitudes;
        let total: C64 = (0..v.len())
            .map(|j| v[j ^ flip].conj() * op.phase_on(j, sign, yp) * v[j])
            .sum();
        debug_assert!(total.im.abs() <= NORM_TOL, "imaginary residue {}", total.im);
        Ok(total.re)
    }

    fn outcome_distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, QStateError> {
        if setting.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: setting.len() });
        }
        let mut v = self.amplitudes.clone();
        for (q, u) in setting.rotations().iter().enumerate() {
            apply_1q(&mut v, self.num_qubits, q, u);
        }
        Ok(v.iter().map(|a| a.norm_sqr()).collect())
    }

    fn project(&self, qubit: usize, ket: &Ket1) -> Result<(Self, f64), QStateError> {
        check_qubit(qubit, self.num_qubits)?;
        check_ket(ket)?;
        let n = self.num_qubits;
        let pos = bit_pos(n, qubit);
        let reduced: Vec<C64> = (0..(1usize << (n - 1)))
            .map(|r| {
                ket[0].conj() * self.amplitudes[insert_bit(r, pos, 0)]
                    + ket[1].conj() * self.amplitudes[insert_bit(r, pos, 1)]
            })
            .collect();
        let p: f64 = reduced.iter().map(|a| a.norm_sqr()).sum();
        if p <= IMPOSSIBLE_TOL {
            return Err(QStateError::ImpossibleOutcome(p));
        }
        if n == 1 {
            return Err(QStateError::LastQubit);
        }
        let post = Self::normalized(n - 1, reduced)?;
        Ok((post, p.min(1.0)))
    }

    fn apply_local(&self, unitaries: &[Mat2]) -> Result<Self, QStateError> {
        if unitaries.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: unitaries.len() });
        }
        check_unitary(unitaries)?;
        let mut v = self.amplitudes.clone();
        for (q, u) in unitaries.iter().enumerate() {
            apply_1q(&mut v, self.num_qubits, q, u);
        }
        Ok(Self { num_qubits: self.num_qubits, amplitudes: v })
    }

    fn to_density(&self) -> QubitDensity {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        QubitDensity { num_qubits: self.num_qubits, matrix: &v * v.adjoint() }
    }
}

/// Hermitian, unit-trace, positive semidefinite `2^N × 2^N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitDensity {
    num_qubits: usize,
    matrix: DMatrix<C64>,
}

impl QubitDensity {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(num_qubits: usize, matrix: DMatrix<C64>) -> Result<Self, QStateError> {
        check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QStateError::Length { expected: dim * dim, got: matrix.len() });
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > NORM_TOL {
            return Err(QStateError::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(QStateError::NotNormalized(tr.re));
        }
        let min_eig = nalgebra::SymmetricEigen::new(matrix.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_TOL {
            return Err(QStateError::NotPositive(min_eig));
        }
        Ok(Self { num_qubits, matrix })
    }

    /// For matrices produced by trace-preserving operations on valid densities.
    pub(crate) fn from_matrix_unchecked(num_qubits: usize, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << num_qubits);
        Self { num_qubits, matrix }
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self, QStateError> {
        check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        let matrix = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Ok(Self { num_qubits, matrix })
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &QubitDensity)]) -> Result<Self, QStateError> {
        let first = parts.first().ok_or(QStateError::ZeroNorm)?;
        let n = first.1.num_qubits;
        let dim = 1 << n;
        let mut total = 0.0;
        let mut matrix = DMatrix::zeros(dim, dim);
        for &(w, rho) in parts {
            if rho.num_qubits != n {
                return Err(QStateError::QubitCount { expected: n, got: rho.num_qubits });
            }
            if !(w >= 0.0) {
                return Err(QStateError::NotNormalized(w));
            }
            total += w;
            matrix += &rho.matrix * C64::new(w, 0.0);
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(QStateError::NotNormalized(total));
        }
        Ok(Self { num_qubits: n, matrix })
    }

    /// `p |ψ⟩⟨ψ| + (1 - p) I/2^N`.
    pub fn werner(target: &QubitPureState, p: f64) -> Result<Self, QStateError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QStateError::NotNormalized(p));
        }
        let pure = target.to_density();
        let mixed = Self::maximally_mixed(target.num_qubits)?;
        Self::mixture(&[(p, &pure), (1.0 - p, &mixed)])
    }

    /// Keeps only the computational-basis diagonal.
    pub fn dephased(&self) -> Self {
        let diag = self.matrix.diagonal();
        Self { num_qubits: self.num_qubits, matrix: DMatrix::from_diagonal(&diag) }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `Tr(ρ O)` for a dense operator of matching dimension.
    pub fn expectation_dense(&self, op: &DMatrix<C64>) -> Result<f64, QStateError> {
        if op.nrows() != self.matrix.nrows() || op.ncols() != self.matrix.ncols() {
            return Err(QStateError::Length { expected: self.matrix.len(), got: op.len() });
        }
        let t: C64 = self.matrix.iter().zip(op.transpose().iter()).map(|(a, b)| a * b).sum();
        Ok(t.re)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity(&self, target: &QubitPureState) -> Result<f64, QStateError> {
        if target.num_qubits != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: target.num_qubits });
        }
        let v = nalgebra::DVector::from_column_slice(&target.amplitudes);
        let f = (v.adjoint() * &self.matrix * &v)[(0, 0)];
        Ok(f.re.clamp(0.0, 1.0))
    }

    /// Traces out every qubit not in `keep`; output qubit `k` is `keep[k]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self, QStateError> {
        let n = self.num_qubits;
        if keep.is_empty() {
            return Err(QStateError::Selection("no qubits kept".into()));
        }
        for (i, &q) in keep.iter().enumerate() {
            check_qubit(q, n)?;
            if keep[..i].contains(&q) {
                return Err(QStateError::Selection(format!("qubit {q} listed twice")));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let compose = |a: usize, e: usize| -> usize {
            let mut idx = 0;
            for (i, &q) in keep.iter().enumerate() {
                idx |= ((a >> (k - 1 - i)) & 1) << bit_pos(n, q);
            }
            for (i, &q) in traced.iter().enumerate() {
                idx |= ((e >> (traced.len() - 1 - i)) & 1) << bit_pos(n, q);
            }
            idx
        };
        let kd = 1 << k;
        let mut out = DMatrix::zeros(kd, kd);
        for e in 0..(1usize << traced.len()) {
            let full: Vec<usize> = (0..kd).map(|a| compose(a, e)).collect();
            for b in 0..kd {
                for a in 0..kd {
                    out[(a, b)] += self.matrix[(full[a], full[b])];
                }
            }
        }
        Ok(Self { num_qubits: k, matrix: out })
    }

    /// Probability of each computational-basis index.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re.max(0.0)).collect()
    }

    /// Reorders qubits: output qubit `k` is input qubit `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, QStateError> {
        let n = self.num_qubits;
        if order.len() != n {
            return Err(QStateError::QubitCount { expected: n, got: order.len() });
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(QStateError::Selection("not a permutation".into()));
        }
        self.partial_trace(order)
    }
}

impl QuantumState for QubitDensity {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn expectation(&self, op: &PauliString) -> Result<f64, QStateError> {
        if op.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: op.len() });
        }
        let flip = op.flip_mask();
        let sign = op.sign_mask();
        let yp = op.y_phase();
        let total: C64 = (0..self.matrix.nrows())
            .map(|j| self.matrix[(j, j ^ flip)] * op.phase_on(j, sign, yp))
            .sum();
        debug_assert!(total.im.abs() <= NORM_TOL, "imaginary residue {}", total.im);
        Ok(total.re)
    }

    fn outcome_distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, QStateError> {
        if setting.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: setting.len() });
        }
        let rotated = conjugate_local(&self.matrix, self.num_qubits, &setting.rotations());
        Ok(rotated.diagonal().iter().map(|c| c.re.max(0.0)).collect())
    }

    fn project(&self, qubit: usize, ket: &Ket1) -> Result<(Self, f64), QStateError> {
        check_qubit(qubit, self.num_qubits)?;
        check_ket(ket)?;
        let n = self.num_qubits;
        let pos = bit_pos(n, qubit);
        let rd = 1usize << (n - 1);
        let mut out = DMatrix::zeros(rd, rd);
        for s in 0..rd {
            for r in 0..rd {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..2 {
                    for c in 0..2 {
                        acc += ket[b].conj()
                            * ket[c]
                            * self.matrix[(insert_bit(r, pos, b), insert_bit(s, pos, c))];
                    }
                }
                out[(r, s)] = acc;
            }
        }
        let p = out.trace().re;
        if p <= IMPOSSIBLE_TOL {
            return Err(QStateError::ImpossibleOutcome(p));
        }
        if n == 1 {
            return Err(QStateError::LastQubit);
        }
        out /= C64::new(p, 0.0);
        Ok((Self { num_qubits: n - 1, matrix: out }, p.min(1.0)))
    }

    fn apply_local(&self, unitaries: &[Mat2]) -> Result<Self, QStateError> {
        if unitaries.len() != self.num_qubits {
            return Err(QStateError::QubitCount { expected: self.num_qubits, got: unitaries.len() });
        }
        check_unitary(unitaries)?;
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: conjugate_local(&self.matrix, self.num_qubits, unitaries),
        })
    }

    fn to_density(&self) -> QubitDensity {
        self.clone()
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Parity eigenvalue `(-1)^{popcount(outcome & mask)}` of a measured outcome.
pub fn parity_sign(outcome: usize, mask: usize) -> f64 {
    if (outcome & mask).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Renders a basis index as an `H`/`V` string (qubit 0 first).
pub fn basis_label(index: usize, n: usize) -> String {
    (0..n).map(|q| if (index >> bit_pos(n, q)) & 1 == 0 { 'H' } else { 'V' }).collect()
}

/// Renders an outcome index as a `0`/`1` string (qubit 0 first).
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n).map(|q| if (index >> bit_pos(n, q)) & 1 == 0 { '0' } else { '1' }).collect()
}

/// Parses a `0`/`1` string produced by [`bitstring`].
pub fn parse_bitstring(s: &str) -> Result<usize, QStateError> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(QStateError::Parse(format!("not a bit: {other:?}"))),
    })
}
