//! JSON documents for saving and loading registers.
//!
//! Pure states: `{"num_qubits": N, "amplitudes": [[re, im], ...]}`.
//! Densities: `{"num_qubits": N, "matrix": [[[re, im], ...], ...]}` (row-major).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{QStateError, QubitDensity, QubitPureState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateDocument {
    Pure { num_qubits: usize, amplitudes: Vec<[f64; 2]> },
    Mixed { num_qubits: usize, matrix: Vec<Vec<[f64; 2]>> },
}

impl From<&QubitPureState> for StateDocument {
    fn from(s: &QubitPureState) -> Self {
        StateDocument::Pure {
            num_qubits: s.num_qubits,
            amplitudes: s.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl From<&QubitDensity> for StateDocument {
    fn from(s: &QubitDensity) -> Self {
        let m = &s.matrix;
        StateDocument::Mixed {
            num_qubits: s.num_qubits,
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }
}

impl StateDocument {
    pub fn num_qubits(&self) -> usize {
        match self {
            StateDocument::Pure { num_qubits, .. } | StateDocument::Mixed { num_qubits, .. } => {
                *num_qubits
            }
        }
    }

    pub fn to_pure(&self) -> Result<QubitPureState, QStateError> {
        match self {
            StateDocument::Pure { num_qubits, amplitudes } => QubitPureState::new(
                *num_qubits,
                amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect(),
            ),
            StateDocument::Mixed { .. } => {
                Err(QStateError::Parse("document holds a density matrix, not a pure state".into()))
            }
        }
    }

    /// Loads either form as a density matrix.
    pub fn to_density(&self) -> Result<QubitDensity, QStateError> {
        match self {
            StateDocument::Pure { .. } => {
                Ok(super::QuantumState::to_density(&self.to_pure()?))
            }
            StateDocument::Mixed { num_qubits, matrix } => {
                let dim = matrix.len();
                if matrix.iter().any(|row| row.len() != dim) {
                    return Err(QStateError::Parse("matrix is not square".into()));
                }
                let m = DMatrix::from_fn(dim, dim, |r, c| C64::new(matrix[r][c][0], matrix[r][c][1]));
                QubitDensity::new(*num_qubits, m)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, QStateError> {
        serde_json::from_str(s).map_err(|e| QStateError::Parse(e.to_string()))
    }
}
