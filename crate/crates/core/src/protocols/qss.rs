//! Parity-based quantum secret sharing with all-same-basis sifting.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::qstate::{Axis, MeasurementSetting, QuantumState};
use crate::rng::stream_rng;

/// Rounds per random stream; batch `b` draws from `stream_rng(seed, b)`.
pub const QSS_BATCH: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BasisStats {
    pub sifted: u64,
    pub errors: u64,
    /// `errors / sifted`, `None` when nothing was sifted in this basis.
    pub error_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QssResult {
    pub num_qubits: usize,
    pub rounds: u64,
    pub sifted_bits: u64,
    pub errors: u64,
    pub qber: f64,
    /// `sifted_bits / rounds`.
    pub sifting_rate: f64,
    pub x: BasisStats,
    pub y: BasisStats,
}

#[derive(Clone, Copy, Default)]
struct Tally {
    sifted: [u64; 2],
    errors: [u64; 2],
}

/// Every party picks x or y uniformly per round. Rounds with a common basis
/// are kept and sampled from the state's outcome distribution in that basis;
/// a kept round is an error when the XOR of all bits is 1, i.e. when
/// `x_1 ≠ ⊕_{i≥2} x_i`.
pub fn qss_run<S: QuantumState>(rho: &S, rounds: u64, seed: u64) -> Result<QssResult, ProtocolError> {
    if rounds == 0 {
        return Err(ProtocolError::Rounds);
    }
    let n = rho.num_qubits();
    let samplers = [Axis::X, Axis::Y]
        .iter()
        .map(|&axis| {
            let dist = rho.outcome_distribution(&MeasurementSetting::uniform(axis, n))?;
            WeightedIndex::new(dist.iter().map(|p| p.max(0.0)))
                .map_err(|e| ProtocolError::State(crate::qstate::QStateError::Parse(e.to_string())))
        })
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    let batches = rounds.div_ceil(QSS_BATCH);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let mut t = Tally::default();
            let len = QSS_BATCH.min(rounds - b * QSS_BATCH);
            for _ in 0..len {
                let first = rng.random::<bool>();
                let mut common = true;
                for _ in 1..n {
                    common &= rng.random::<bool>() == first;
                }
                if !common {
                    continue;
                }
                let basis = usize::from(first);
                let outcome = samplers[basis].sample(&mut rng);
                t.sifted[basis] += 1;
                t.errors[basis] += u64::from(outcome.count_ones() % 2 == 1);
            }
            t
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), |mut acc, t| {
        for k in 0..2 {
            acc.sifted[k] += t.sifted[k];
            acc.errors[k] += t.errors[k];
        }
        acc
    });
    let sifted_bits = total.sifted[0] + total.sifted[1];
    if sifted_bits == 0 {
        return Err(ProtocolError::NoSiftedRounds);
    }
    let errors = total.errors[0] + total.errors[1];
    let stats = |k: usize| BasisStats {
        sifted: total.sifted[k],
        errors: total.errors[k],
        error_rate: (total.sifted[k] > 0).then(|| total.errors[k] as f64 / total.sifted[k] as f64),
    };
    Ok(QssResult {
        num_qubits: n,
        rounds,
        sifted_bits,
        errors,
        qber: errors as f64 / sifted_bits as f64,
        sifting_rate: sifted_bits as f64 / rounds as f64,
        x: stats(0),
        y: stats(1),
    })
}
