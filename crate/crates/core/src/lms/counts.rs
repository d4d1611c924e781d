use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{LmsError, PauliDecomposition, SettingPlan};
use crate::qstate::{bitstring, parse_bitstring};

/// Outcome counts per setting index; each entry has `2^N` bins.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountTable {
    pub num_qubits: usize,
    pub counts: BTreeMap<usize, Vec<u64>>,
}

/// One CSV row: `setting,outcome,count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: usize,
    pub outcome: String,
    pub count: u64,
}

impl CountTable {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, counts: BTreeMap::new() }
    }

    pub fn insert(&mut self, setting: usize, counts: Vec<u64>) -> Result<(), LmsError> {
        let expected = 1 << self.num_qubits;
        if counts.len() != expected {
            return Err(LmsError::OutcomeCount { setting, expected, got: counts.len() });
        }
        self.counts.insert(setting, counts);
        Ok(())
    }

    pub fn total(&self, setting: usize) -> Option<u64> {
        self.counts.get(&setting).map(|c| c.iter().sum())
    }

    /// Writes every bin, zeros included, sorted by setting then outcome.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LmsError> {
        let mut w = csv::Writer::from_writer(out);
        for (&setting, bins) in &self.counts {
            for (o, &count) in bins.iter().enumerate() {
                w.serialize(CountRecord { setting, outcome: bitstring(o, self.num_qubits), count })
                    .map_err(|e| LmsError::Csv(e.to_string()))?;
            }
        }
        w.flush().map_err(|e| LmsError::Csv(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory succeeds");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads `setting,outcome,count` rows; outcomes are bitstrings of length `N`.
    /// Missing bins are zero; repeated rows accumulate.
    pub fn read_csv<R: Read>(input: R, num_qubits: usize) -> Result<Self, LmsError> {
        let mut table = Self::new(num_qubits);
        let dim = 1usize << num_qubits;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        for row in rdr.deserialize::<CountRecord>() {
            let row = row.map_err(|e| LmsError::Csv(e.to_string()))?;
            if row.outcome.len() != num_qubits {
                return Err(LmsError::Csv(format!(
                    "outcome {:?} does not have {num_qubits} bits",
                    row.outcome
                )));
            }
            let o = parse_bitstring(&row.outcome)?;
            table.counts.entry(row.setting).or_insert_with(|| vec![0; dim])[o] += row.count;
        }
        Ok(table)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// `constant + Σ_s mean_s(f_s)`; the variance adds `Var_s(f)/n_s` over
/// independent settings, using the empirical outcome frequencies.
pub fn fidelity_from_counts(
    decomp: &PauliDecomposition,
    plan: &SettingPlan,
    counts: &CountTable,
) -> Result<FidelityEstimate, LmsError> {
    if plan.num_qubits != decomp.num_qubits || counts.num_qubits != plan.num_qubits {
        return Err(LmsError::Mismatch(format!(
            "qubits: decomposition {}, plan {}, counts {}",
            decomp.num_qubits, plan.num_qubits, counts.num_qubits
        )));
    }
    if plan.label != decomp.label {
        return Err(LmsError::Mismatch(format!("labels {:?} and {:?}", plan.label, decomp.label)));
    }
    let mut estimate = plan.constant;
    let mut variance = 0.0;
    for (s, scores) in plan.scores.iter().enumerate() {
        let bins = counts.counts.get(&s).ok_or(LmsError::MissingSetting(s))?;
        if bins.len() != scores.len() {
            return Err(LmsError::OutcomeCount { setting: s, expected: scores.len(), got: bins.len() });
        }
        let total: u64 = bins.iter().sum();
        if total == 0 {
            return Err(LmsError::ZeroTotal(s));
        }
        let n = total as f64;
        let mean: f64 = bins.iter().zip(scores).map(|(&c, f)| c as f64 * f).sum::<f64>() / n;
        let second: f64 = bins.iter().zip(scores).map(|(&c, f)| c as f64 * f * f).sum::<f64>() / n;
        estimate += mean;
        variance += (second - mean * mean).max(0.0) / n;
    }
    Ok(FidelityEstimate { estimate, std_error: variance.sqrt() })
}
