//! Seeded coincidence-count generation from qubit states or the Fock-level
//! threshold model.
//!
//! Every draw comes from [`crate::rng::stream_rng`]: setting `s` of a plan
//! with seed `x` uses stream `(x, s)`, so histograms do not depend on thread
//! scheduling.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::fock::{threshold_counts, FockError, FockMixture, SPATIAL_MODES};
use crate::lms::{CountTable, LmsError};
use crate::qstate::{MeasurementSetting, QStateError, QuantumState, QubitDensity, QubitPureState};
use crate::rng::{stream_rng, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("number of events must be positive")]
    NoEvents,
    #[error("plan has no settings")]
    EmptyPlan,
    #[error("setting {index} has {got} axes, source has {expected} qubits")]
    SettingSize { index: usize, expected: usize, got: usize },
    #[error("source yields no detection events for setting {0}")]
    NoDetection(usize),
    #[error("distribution and counts differ in length ({0} vs {1})")]
    Length(usize, usize),
    #[error("plan: {0}")]
    Plan(String),
    #[error(transparent)]
    State(#[from] QStateError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Lms(#[from] LmsError),
}

/// Outcome counts of one setting; bin `k` is the outcome with bit pattern `k`
/// (qubit 0 = most significant bit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl CoincidenceHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

/// Settings measured `events` times each, sampled with `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub settings: Vec<MeasurementSetting>,
    pub events: u64,
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.settings.is_empty() {
            return Err(SamplerError::EmptyPlan);
        }
        if self.events == 0 {
            return Err(SamplerError::NoEvents);
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SamplerError> {
        let plan: Self = serde_json::from_str(s).map_err(|e| SamplerError::Plan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }
}

/// Anything that yields a normalized outcome distribution per setting.
pub trait OutcomeSource: Sync {
    fn num_qubits(&self) -> usize;
    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, SamplerError>;
}

impl OutcomeSource for QubitDensity {
    fn num_qubits(&self) -> usize {
        QuantumState::num_qubits(self)
    }

    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, SamplerError> {
        Ok(self.outcome_distribution(setting)?)
    }
}

impl OutcomeSource for QubitPureState {
    fn num_qubits(&self) -> usize {
        QuantumState::num_qubits(self)
    }

    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, SamplerError> {
        Ok(self.outcome_distribution(setting)?)
    }
}

/// Threshold-detector sixfold events of a detected Fock mixture.
impl OutcomeSource for FockMixture {
    fn num_qubits(&self) -> usize {
        SPATIAL_MODES
    }

    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>, SamplerError> {
        let (dist, p_event) = threshold_counts(self, setting)?;
        if !(p_event > 0.0) {
            return Err(SamplerError::NoDetection(0));
        }
        Ok(dist)
    }
}

/// Multinomial draw by sequential binomials over the bins.
pub fn multinomial(probs: &[f64], n: u64, rng: &mut Rng) -> Vec<u64> {
    let mut counts = vec![0; probs.len()];
    let mut left = n;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0);
        let q = if k + 1 == probs.len() || mass <= p { 1.0 } else { (p / mass).clamp(0.0, 1.0) };
        let c = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        counts[k] = c;
        left -= c;
        mass -= p;
    }
    counts
}

fn check_setting<S: OutcomeSource + ?Sized>(
    source: &S,
    setting: &MeasurementSetting,
    index: usize,
) -> Result<(), SamplerError> {
    if setting.len() != source.num_qubits() {
        return Err(SamplerError::SettingSize { index, expected: source.num_qubits(), got: setting.len() });
    }
    Ok(())
}

fn sample_stream<S: OutcomeSource + ?Sized>(
    source: &S,
    setting: &MeasurementSetting,
    n_events: u64,
    seed: u64,
    index: usize,
) -> Result<CoincidenceHistogram, SamplerError> {
    if n_events == 0 {
        return Err(SamplerError::NoEvents);
    }
    check_setting(source, setting, index)?;
    let dist = source.distribution(setting).map_err(|e| match e {
        SamplerError::NoDetection(_) => SamplerError::NoDetection(index),
        other => other,
    })?;
    let mut rng = stream_rng(seed, index as u64);
    let counts = multinomial(&dist, n_events, &mut rng);
    Ok(CoincidenceHistogram { setting: setting.clone(), counts, total: n_events })
}

/// `n_events` outcomes of one setting, drawn from stream `(seed, 0)`.
pub fn sample<S: OutcomeSource + ?Sized>(
    source: &S,
    setting: &MeasurementSetting,
    n_events: u64,
    seed: u64,
) -> Result<CoincidenceHistogram, SamplerError> {
    sample_stream(source, setting, n_events, seed, 0)
}

/// One histogram per plan setting, in plan order.
pub fn run_plan<S: OutcomeSource + ?Sized>(
    source: &S,
    plan: &ExperimentPlan,
) -> Result<Vec<CoincidenceHistogram>, SamplerError> {
    plan.validate()?;
    plan.settings
        .par_iter()
        .enumerate()
        .map(|(s, setting)| sample_stream(source, setting, plan.events, plan.seed, s))
        .collect()
}

/// Histogram `s` becomes setting `s` of the table.
pub fn to_count_table(histograms: &[CoincidenceHistogram]) -> Result<CountTable, SamplerError> {
    let first = histograms.first().ok_or(SamplerError::EmptyPlan)?;
    let mut table = CountTable::new(first.setting.len());
    for (s, h) in histograms.iter().enumerate() {
        table.insert(s, h.counts.clone())?;
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonError {
    pub value: f64,
    /// Set for an empty bin, whose error is reported as 1.
    pub flagged: bool,
}

/// `√count`, or a flagged 1 for an empty bin.
pub fn poisson_error(count: u64) -> PoissonError {
    if count == 0 {
        PoissonError { value: 1.0, flagged: true }
    } else {
        PoissonError { value: (count as f64).sqrt(), flagged: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit over bins with positive probability. Counts in a
/// zero-probability bin give an infinite statistic.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> Result<ChiSquareTest, SamplerError> {
    if counts.len() != probs.len() {
        return Err(SamplerError::Length(probs.len(), counts.len()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(SamplerError::NoEvents);
    }
    let mut statistic = 0.0;
    let mut bins = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 0.0 {
            let e = p * n as f64;
            statistic += (c as f64 - e).powi(2) / e;
            bins += 1;
        } else if c > 0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = bins.max(2) - 1;
    let p_value = if statistic.is_finite() {
        ChiSquared::new(dof as f64).expect("positive dof").sf(statistic)
    } else {
        0.0
    };
    Ok(ChiSquareTest { statistic, dof, p_value })
}

/// `½ Σ |f_k - p_k|` between sampled frequencies and a distribution.
pub fn total_variation(counts: &[u64], probs: &[f64]) -> Result<f64, SamplerError> {
    if counts.len() != probs.len() {
        return Err(SamplerError::Length(probs.len(), counts.len()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(SamplerError::NoEvents);
    }
    Ok(0.5 * counts.iter().zip(probs).map(|(&c, p)| (c as f64 / n as f64 - p).abs()).sum::<f64>())
}
