//! Pauli decompositions of target projectors, local measurement settings
//! (LMSs) and fidelity estimation from setting-wise counts.
//!
//! Every plan reduces to one score table per setting: the fidelity estimate
//! is `constant + Σ_s mean_s(f_s)`, where `f_s` maps each outcome of setting
//! `s` to a real score and `mean_s` averages it over the recorded events.

mod counts;
mod plan;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{PauliString, QStateError, QuantumState, QubitPureState};

pub use counts::{fidelity_from_counts, CountRecord, CountTable, FidelityEstimate};
pub use plan::{plan_settings, Coverage, SettingPlan, Strategy};

/// Largest register for which the exhaustive `4^N` decomposition is allowed.
pub const MAX_DECOMPOSE_QUBITS: usize = 8;
/// Coefficients at or below this magnitude are dropped.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmsError {
    #[error("decomposition supports up to {max} qubits, got {got}")]
    TooManyQubits { got: usize, max: usize },
    #[error("decomposition is empty")]
    Empty,
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("target is not a GHZ state (overlap {0})")]
    NotGhz(f64),
    #[error("target projector is not permutation symmetric")]
    NotSymmetric,
    #[error("no symmetric-direction solution (residual {0:e})")]
    NoSymmetricSolution(f64),
    #[error("plan and decomposition disagree: {0}")]
    Mismatch(String),
    #[error("no counts for setting {0}")]
    MissingSetting(usize),
    #[error("setting {0} has zero recorded events")]
    ZeroTotal(usize),
    #[error("counts for setting {setting} have {got} outcomes, expected {expected}")]
    OutcomeCount { setting: usize, expected: usize, got: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    State(#[from] QStateError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// `|ψ⟩⟨ψ| = Σ_P c_P P` with `c_P = ⟨ψ|P|ψ⟩ / 2^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliDecomposition {
    pub label: String,
    pub num_qubits: usize,
    /// Includes the identity string; ordered by base-4 string index.
    pub terms: Vec<PauliTerm>,
}

impl PauliDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string (`2^{-N}` for a normalized projector).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().find(|t| t.string.is_identity()).map_or(0.0, |t| t.coefficient)
    }

    /// Terms other than the identity.
    pub fn measured_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| !t.string.is_identity())
    }

    /// Dense `Σ_P c_P P`.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<C64> {
        let dim = 1 << self.num_qubits;
        self.terms.iter().fold(nalgebra::DMatrix::zeros(dim, dim), |acc, t| {
            acc + t.string.to_matrix() * C64::new(t.coefficient, 0.0)
        })
    }

    /// Number of distinct letter-count classes `(#X, #Y, #Z)` among the
    /// terms, i.e. the count of permutation-grouped terms.
    pub fn grouped_len(&self) -> usize {
        let mut keys: Vec<[usize; 3]> = self.terms.iter().map(|t| letter_counts(&t.string)).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, LmsError> {
        serde_json::from_str(s).map_err(|e| LmsError::State(QStateError::Parse(e.to_string())))
    }
}

pub(crate) fn letter_counts(p: &PauliString) -> [usize; 3] {
    use crate::qstate::Pauli;
    let mut c = [0; 3];
    for l in p.letters() {
        match l {
            Pauli::X => c[0] += 1,
            Pauli::Y => c[1] += 1,
            Pauli::Z => c[2] += 1,
            Pauli::I => {}
        }
    }
    c
}

/// Exhaustive decomposition over all `4^N` Pauli strings.
pub fn decompose(target: &QubitPureState, label: &str) -> Result<PauliDecomposition, LmsError> {
    let n = target.num_qubits();
    if n > MAX_DECOMPOSE_QUBITS {
        return Err(LmsError::TooManyQubits { got: n, max: MAX_DECOMPOSE_QUBITS });
    }
    let scale = 1.0 / (1u64 << n) as f64;
    let terms = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|idx| {
            let string = PauliString::from_index(n, idx);
            let c = target.expectation(&string)? * scale;
            Ok((c.abs() > COEFF_TOL).then_some(PauliTerm { coefficient: c, string }))
        })
        .collect::<Result<Vec<_>, QStateError>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(PauliDecomposition { label: label.to_string(), num_qubits: n, terms })
}

/// Published LMS counts per target label.
pub fn reference_lms_table() -> std::collections::BTreeMap<&'static str, usize> {
    [("D6_3", 21), ("D4_2", 9), ("D4_1", 7), ("GHZ4", 5)].into_iter().collect()
}

pub fn reference_lms_count(label: &str) -> Option<usize> {
    reference_lms_table().get(label).copied()
}
