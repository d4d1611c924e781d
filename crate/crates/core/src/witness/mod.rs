//! Collective-spin witnesses, pairwise correlations, multi-photon correlator
//! scans and the four-qubit GHZ projector witness.
//!
//! `J_a = ½ Σ_k σ_a^{(k)}` and `W(α) = J_x² + J_y² + α J_z²`.

mod seesaw;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dicke::ghz;
use crate::qstate::{
    gates, Axis, Mat2, MeasurementSetting, Pauli, PauliString, QStateError, QuantumState,
    QubitDensity, QubitPureState, parity_sign,
};

pub use seesaw::{
    biseparable_bound, bipartitions, bound_by_bipartition, bound_curve, seesaw_run, BoundEstimate,
    SeesawOptions, SeesawTrace, MAX_BOUND_QUBITS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("witness needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("see-saw supports 2..={max} qubits, got {got}")]
    BoundSize { got: usize, max: usize },
    #[error("expected a {expected}-qubit state, got {got}")]
    QubitCount { expected: usize, got: usize },
    #[error("axis must be x, y or z")]
    IdentityAxis,
    #[error("correlator plane must be xz or yz")]
    CorrelatorPlane,
    #[error("empty grid")]
    EmptyGrid,
    #[error("non-finite parameter {0}")]
    NonFinite(f64),
    #[error("invalid see-saw options: {0}")]
    Options(String),
    #[error("invalid bipartition {0:?}")]
    Bipartition(Vec<usize>),
    #[error(transparent)]
    State(#[from] QStateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinWitnessSpec {
    pub n: usize,
    pub alpha: f64,
}

impl SpinWitnessSpec {
    pub fn new(n: usize, alpha: f64) -> Result<Self, WitnessError> {
        let spec = Self { n, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), WitnessError> {
        if self.n < 2 {
            return Err(WitnessError::TooFewQubits(self.n));
        }
        if !self.alpha.is_finite() {
            return Err(WitnessError::NonFinite(self.alpha));
        }
        Ok(())
    }
}

fn check_axis(axis: Pauli) -> Result<(), WitnessError> {
    if axis == Pauli::I {
        return Err(WitnessError::IdentityAxis);
    }
    Ok(())
}

/// `⟨σ_a^{(j)} σ_a^{(k)}⟩` for all pairs; the diagonal is 1.
pub fn pairwise_corr_matrix<S: QuantumState + Sync>(
    state: &S,
    axis: Pauli,
) -> Result<DMatrix<f64>, WitnessError> {
    check_axis(axis)?;
    let n = state.num_qubits();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    let values = pairs
        .par_iter()
        .map(|&(j, k)| state.expectation(&PauliString::on_qubits(n, axis, &[j, k])))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = DMatrix::identity(n, n);
    for (&(j, k), v) in pairs.iter().zip(values) {
        m[(j, k)] = v;
        m[(k, j)] = v;
    }
    Ok(m)
}

/// `⟨J_a²⟩ = ¼ [N + Σ_{j≠k} ⟨σ_a^{(j)} σ_a^{(k)}⟩]`.
pub fn collective_spin_sq<S: QuantumState + Sync>(state: &S, axis: Pauli) -> Result<f64, WitnessError> {
    let c = pairwise_corr_matrix(state, axis)?;
    let n = state.num_qubits() as f64;
    let off: f64 = c.sum() - n;
    Ok((n + off) / 4.0)
}

/// Dense `J_a`.
pub fn collective_spin(n: usize, axis: Pauli) -> Result<DMatrix<C64>, WitnessError> {
    check_axis(axis)?;
    let dim = 1 << n;
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..n {
        j += PauliString::on_qubits(n, axis, &[k]).to_matrix();
    }
    Ok(j * C64::new(0.5, 0.0))
}

/// `⟨J_a²⟩` as `Tr(ρ J_a J_a)` from the dense operator.
pub fn collective_spin_sq_dense(rho: &QubitDensity, axis: Pauli) -> Result<f64, WitnessError> {
    let j = collective_spin(rho.num_qubits(), axis)?;
    Ok(rho.expectation_dense(&(&j * &j))?)
}

/// Dense `W(α)`.
pub fn witness_operator(spec: &SpinWitnessSpec) -> Result<DMatrix<C64>, WitnessError> {
    spec.validate()?;
    let sq = |a| collective_spin(spec.n, a).map(|j| &j * &j);
    Ok(sq(Pauli::X)? + sq(Pauli::Y)? + sq(Pauli::Z)? * C64::new(spec.alpha, 0.0))
}

/// `⟨W(α)⟩`.
pub fn witness_value<S: QuantumState + Sync>(state: &S, spec: &SpinWitnessSpec) -> Result<f64, WitnessError> {
    spec.validate()?;
    if state.num_qubits() != spec.n {
        return Err(WitnessError::QubitCount { expected: spec.n, got: state.num_qubits() });
    }
    Ok(collective_spin_sq(state, Pauli::X)?
        + collective_spin_sq(state, Pauli::Y)?
        + spec.alpha * collective_spin_sq(state, Pauli::Z)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorSpec {
    /// `xz` scans `cos θ σ_x + sin θ σ_z`, `yz` scans `cos θ σ_y + sin θ σ_z`.
    pub plane: crate::qstate::Plane,
    pub thetas: Vec<f64>,
    pub n: usize,
}

impl CorrelatorSpec {
    pub fn validate(&self) -> Result<(), WitnessError> {
        if self.plane == crate::qstate::Plane::Xy {
            return Err(WitnessError::CorrelatorPlane);
        }
        if self.thetas.is_empty() {
            return Err(WitnessError::EmptyGrid);
        }
        if let Some(&t) = self.thetas.iter().find(|t| !t.is_finite()) {
            return Err(WitnessError::NonFinite(t));
        }
        Ok(())
    }
}

/// `points` evenly spaced angles from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => (0..points).map(|i| start + (end - start) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// `⟨(cos θ σ_i + sin θ σ_z)^{⊗N}⟩` at each grid angle.
pub fn correlator_scan<S: QuantumState + Sync>(
    state: &S,
    spec: &CorrelatorSpec,
) -> Result<Vec<(f64, f64)>, WitnessError> {
    spec.validate()?;
    if state.num_qubits() != spec.n {
        return Err(WitnessError::QubitCount { expected: spec.n, got: state.num_qubits() });
    }
    let full = (1usize << spec.n) - 1;
    spec.thetas
        .par_iter()
        .map(|&theta| {
            let setting = MeasurementSetting::uniform(Axis::InPlane { plane: spec.plane, angle: theta }, spec.n);
            let dist = state.outcome_distribution(&setting)?;
            let v: f64 = dist.iter().enumerate().map(|(o, p)| p * parity_sign(o, full)).sum();
            Ok((theta, v))
        })
        .collect()
}

/// Per-qubit unitaries `σ_z` on qubit 0 followed by `√σ_z ℋ` on every qubit,
/// combined into one matrix per qubit.
pub fn ghz_frame(n: usize) -> Vec<Mat2> {
    let local = gates::sqrt_z() * gates::hadamard();
    (0..n)
        .map(|q| if q == 0 { local * gates::pauli(Pauli::Z) } else { local })
        .collect()
}

/// The four-qubit GHZ state in the frame reached by navigation,
/// locally equivalent to `(|D₄⁽¹⁾⟩ − |D₄⁽³⁾⟩)/√2`.
pub fn rotated_ghz4() -> QubitPureState {
    let g = ghz(4).expect("four-qubit GHZ");
    g.apply_local(&ghz_frame(4)).expect("unitary frame")
}

/// `½ − F(ρ, rotated GHZ₄)`; negative values certify genuine multipartite entanglement.
pub fn ghz_witness(rho: &QubitDensity) -> Result<f64, WitnessError> {
    if rho.num_qubits() != 4 {
        return Err(WitnessError::QubitCount { expected: 4, got: rho.num_qubits() });
    }
    Ok(0.5 - rho.fidelity(&rotated_ghz4())?)
}

#[cfg(test)]
mod tests;
