//! Two-party channels carved out of an N-qubit state: maximal singlet
//! fraction, teleportation and telecloning figures of merit, open-destination
//! teleportation (ODT) and quantum secret sharing (QSS).

mod qss;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{QStateError, QuantumState, QubitDensity, IMPOSSIBLE_TOL};
use crate::rng::stream_rng;

pub use qss::{qss_run, BasisStats, QssResult, QSS_BATCH};

/// Random starts of the singlet-fraction search.
pub const MSF_RESTARTS: usize = 32;
/// Seed of the starting points of the singlet-fraction search.
pub const MSF_SEED: u64 = 0x006d_7366;
pub const MSF_MAX_ITERS: u64 = 4000;
pub const MSF_SD_TOL: f64 = 1e-14;
/// Best teleportation fidelity without entanglement.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("pair ({0}, {1}) is invalid for {2} qubits")]
    Pair(usize, usize, usize),
    #[error("expected a two-qubit state, got {0} qubits")]
    NotTwoQubit(usize),
    #[error("singlet fraction {0} outside [1/4, 1]")]
    MsfRange(f64),
    #[error("{protocol} needs at least {min} qubits, got {got}")]
    TooFewQubits { protocol: &'static str, min: usize, got: usize },
    #[error("open-destination teleportation needs an even number of qubits, got {0}")]
    OddRegister(usize),
    #[error("rounds must be positive")]
    Rounds,
    #[error("no round survived sifting")]
    NoSiftedRounds,
    #[error("optimizer failed: {0}")]
    Optimizer(String),
    #[error(transparent)]
    State(#[from] QStateError),
}

/// `(|HV⟩ + |VH⟩)/√2` on basis indices `00, 01, 10, 11`.
pub fn psi_plus() -> Vector4<C64> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    Vector4::new(C64::new(0.0, 0.0), s, s, C64::new(0.0, 0.0))
}

/// `(|HV⟩ - |VH⟩)/√2`.
pub fn psi_minus() -> Vector4<C64> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    Vector4::new(C64::new(0.0, 0.0), s, -s, C64::new(0.0, 0.0))
}

/// `α|ψ⁺⟩⟨ψ⁺| + (1-α)/2 (|HH⟩⟨HH| + |VV⟩⟨VV|)`.
pub fn alpha_mixture(alpha: f64) -> Result<QubitDensity, ProtocolError> {
    let p = psi_plus();
    let mut m = (p * p.adjoint()).scale(alpha);
    let rest = C64::new((1.0 - alpha) / 2.0, 0.0);
    m[(0, 0)] += rest;
    m[(3, 3)] += rest;
    Ok(QubitDensity::new(2, nalgebra::DMatrix::from_iterator(4, 4, m.iter().copied()))?)
}

/// `N / (2(N-1))`, the weight of `|ψ⁺⟩` in any pair of `D_N^{(N/2)}`.
pub fn alpha_n(n: usize) -> f64 {
    n as f64 / (2.0 * (n as f64 - 1.0))
}

/// Two-qubit reduced state of qubits `i` and `j` (in that order).
pub fn pair_channel<S: QuantumState>(rho: &S, i: usize, j: usize) -> Result<QubitDensity, ProtocolError> {
    let n = rho.num_qubits();
    if i == j || i >= n || j >= n {
        return Err(ProtocolError::Pair(i, j, n));
    }
    Ok(rho.to_density().partial_trace(&[i, j])?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsfResult {
    pub value: f64,
    /// ZYZ angles of side A, then side B.
    pub angles: [f64; 6],
    pub restarts: usize,
    pub converged: bool,
}

fn zyz(a: f64, b: f64, c: f64) -> Matrix2<C64> {
    let rz = |t: f64| {
        Matrix2::new(C64::from_polar(1.0, -t / 2.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, t / 2.0))
    };
    let (s, co) = (b / 2.0).sin_cos();
    let ry = Matrix2::new(C64::new(co, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(co, 0.0));
    rz(a) * ry * rz(c)
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

struct SingletOverlap {
    rho: Matrix4<C64>,
}

impl SingletOverlap {
    /// `⟨ψ⁻|(U_A⊗U_B) ρ (U_A⊗U_B)†|ψ⁻⟩`.
    fn value(&self, p: &[f64]) -> f64 {
        let u = kron(&zyz(p[0], p[1], p[2]), &zyz(p[3], p[4], p[5]));
        let v = u.adjoint() * psi_minus();
        (v.adjoint() * self.rho * v)[(0, 0)].re
    }
}

impl CostFunction for SingletOverlap {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok(-self.value(p))
    }
}

/// Maximal singlet fraction under local unitaries: Nelder-Mead from
/// [`MSF_RESTARTS`] starts (the first at the identity), clamped to `[1/4, 1]`.
pub fn msf(rho2: &QubitDensity) -> Result<MsfResult, ProtocolError> {
    if rho2.num_qubits() != 2 {
        return Err(ProtocolError::NotTwoQubit(rho2.num_qubits()));
    }
    let problem = SingletOverlap { rho: Matrix4::from_iterator(rho2.matrix().iter().copied()) };
    let mut best = (f64::NEG_INFINITY, [0.0; 6], false);
    for r in 0..MSF_RESTARTS {
        let start: Vec<f64> = if r == 0 {
            vec![0.0; 6]
        } else {
            let mut rng = stream_rng(MSF_SEED, r as u64);
            (0..6).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
        };
        let simplex: Vec<Vec<f64>> = std::iter::once(start.clone())
            .chain((0..6).map(|k| {
                let mut p = start.clone();
                p[k] += 0.6;
                p
            }))
            .collect();
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(MSF_SD_TOL)
            .map_err(|e| ProtocolError::Optimizer(e.to_string()))?;
        let res = Executor::new(SingletOverlap { rho: problem.rho }, solver)
            .configure(|s| s.max_iters(MSF_MAX_ITERS))
            .run()
            .map_err(|e| ProtocolError::Optimizer(e.to_string()))?;
        let state = res.state();
        let converged = matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        );
        if let Some(p) = state.get_best_param() {
            let value = problem.value(p);
            if value > best.0 {
                let mut angles = [0.0; 6];
                angles.copy_from_slice(p);
                best = (value, angles, converged);
            }
        }
    }
    Ok(MsfResult { value: best.0.clamp(0.25, 1.0), angles: best.1, restarts: MSF_RESTARTS, converged: best.2 })
}

/// `(2 F_msf + 1) / 3`.
pub fn teleport_fmax(msf_value: f64) -> Result<f64, ProtocolError> {
    if !(0.25 - 1e-12..=1.0 + 1e-12).contains(&msf_value) {
        return Err(ProtocolError::MsfRange(msf_value));
    }
    Ok((2.0 * msf_value + 1.0) / 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFigure {
    pub i: usize,
    pub j: usize,
    pub msf: f64,
    pub f_max: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelecloningReport {
    pub num_qubits: usize,
    pub pairs: Vec<PairFigure>,
    /// Symmetric `N x N` table of `F_max`; the diagonal is `None`.
    pub matrix: Vec<Vec<Option<f64>>>,
    /// `F_max` of every pair of the ideal `D_N^{(N/2)}`.
    pub ideal_line: f64,
    pub classical_line: f64,
    pub min_f_max: f64,
    pub all_above_classical: bool,
}

/// [`msf`] and [`teleport_fmax`] for every unordered pair.
pub fn telecloning_report<S: QuantumState>(rho: &S) -> Result<TelecloningReport, ProtocolError> {
    let n = rho.num_qubits();
    if n < 4 {
        return Err(ProtocolError::TooFewQubits { protocol: "telecloning", min: 4, got: n });
    }
    let dense = rho.to_density();
    let pairs_idx: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pairs = pairs_idx
        .par_iter()
        .map(|&(i, j)| {
            let m = msf(&pair_channel(&dense, i, j)?)?;
            Ok(PairFigure { i, j, msf: m.value, f_max: teleport_fmax(m.value)?, converged: m.converged })
        })
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    let mut matrix = vec![vec![None; n]; n];
    for p in &pairs {
        matrix[p.i][p.j] = Some(p.f_max);
        matrix[p.j][p.i] = Some(p.f_max);
    }
    let min_f_max = pairs.iter().map(|p| p.f_max).fold(f64::INFINITY, f64::min);
    Ok(TelecloningReport {
        num_qubits: n,
        pairs,
        matrix,
        ideal_line: teleport_fmax(alpha_n(n))?,
        classical_line: CLASSICAL_FIDELITY,
        min_f_max,
        all_above_classical: min_f_max > CLASSICAL_FIDELITY,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdtOutcome {
    /// H/V letters of the measured qubits in increasing qubit order.
    pub pattern: String,
    pub probability: f64,
    /// `⟨ψ⁺|ρ'|ψ⁺⟩` of the heralded pair; zero for impossible patterns.
    pub fidelity: f64,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdtResult {
    pub keep: (usize, usize),
    pub p_success: f64,
    /// Heralded fidelity per success pattern.
    pub fidelities: BTreeMap<String, f64>,
    /// Probability-weighted mean over success patterns.
    pub mean_fidelity: f64,
    /// Every pattern, successful or not.
    pub outcomes: Vec<OdtOutcome>,
}

/// Measures every qubit outside `keep` in the H/V basis. A pattern succeeds
/// when it holds `(N-2)/2` V results, which for `D_N^{(N/2)}` leaves one
/// excitation on the kept pair.
pub fn odt<S: QuantumState>(rho: &S, keep: (usize, usize)) -> Result<OdtResult, ProtocolError> {
    let n = rho.num_qubits();
    let (a, b) = keep;
    if a == b || a >= n || b >= n {
        return Err(ProtocolError::Pair(a, b, n));
    }
    if n < 3 {
        return Err(ProtocolError::TooFewQubits { protocol: "open-destination teleportation", min: 3, got: n });
    }
    if n % 2 == 1 {
        return Err(ProtocolError::OddRegister(n));
    }
    let dense = rho.to_density();
    let m = dense.matrix();
    let measured: Vec<usize> = (0..n).filter(|&q| q != a && q != b).collect();
    let k = measured.len();
    let index = |pattern: usize, bits: usize| -> usize {
        let mut idx = 0;
        for (t, &q) in measured.iter().enumerate() {
            idx |= ((pattern >> (k - 1 - t)) & 1) << (n - 1 - q);
        }
        idx | ((bits >> 1) & 1) << (n - 1 - a) | (bits & 1) << (n - 1 - b)
    };
    let psi = psi_plus();
    let outcomes: Vec<OdtOutcome> = (0..1usize << k)
        .map(|pattern| {
            let block = Matrix4::from_fn(|r, c| m[(index(pattern, r), index(pattern, c))]);
            let probability = block.trace().re.max(0.0);
            let fidelity = if probability > IMPOSSIBLE_TOL {
                ((psi.adjoint() * block * psi)[(0, 0)].re / probability).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let label: String = (0..k).map(|t| if (pattern >> (k - 1 - t)) & 1 == 1 { 'V' } else { 'H' }).collect();
            OdtOutcome { pattern: label, probability, fidelity, success: pattern.count_ones() as usize * 2 == k }
        })
        .collect();
    let success: Vec<&OdtOutcome> = outcomes.iter().filter(|o| o.success).collect();
    let p_success: f64 = success.iter().map(|o| o.probability).sum();
    let mean_fidelity = if p_success > IMPOSSIBLE_TOL {
        success.iter().map(|o| o.probability * o.fidelity).sum::<f64>() / p_success
    } else {
        0.0
    };
    let fidelities = success.iter().map(|o| (o.pattern.clone(), o.fidelity)).collect();
    Ok(OdtResult { keep, p_success: p_success.min(1.0), fidelities, mean_fidelity, outcomes })
}

#[cfg(test)]
mod tests;
