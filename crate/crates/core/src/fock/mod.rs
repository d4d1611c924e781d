//! Sparse Fock-space model of the six-photon source.
//!
//! Modes are indexed `2k + p` for spatial mode `k ∈ 0..6` and polarization
//! `p` (0 = H, 1 = V). Spatial mode 0 doubles as the single source mode fed
//! by the down-converter. A ket maps occupation vectors to amplitudes;
//! amplitudes with modulus below [`PRUNE_TOL`] are dropped after each stage.

mod network;
mod simulate;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{MeasurementSetting, QStateError, QubitDensity};

pub use network::{splitter_network, NetworkUnitary};
pub use simulate::{
    calibration_sweep, detected_mixture, simulate_experiment, Calibration, CalibrationGrid, CalibrationPoint,
    SimulationReport,
};

pub const SPATIAL_MODES: usize = 6;
pub const MODES: usize = 2 * SPATIAL_MODES;
pub const PRUNE_TOL: f64 = 1e-14;
/// Default per-mode occupation cap.
pub const DEFAULT_PHOTON_CAP: u8 = 16;

pub type Occupation = [u8; MODES];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("pair-emission amplitude λ={0} outside [0, 1)")]
    Lambda(f64),
    #[error("maximum emission order must be at least 1")]
    Order,
    #[error("transmission {0} outside [0, 1]")]
    Transmission(f64),
    #[error("network must be 6×6, got {0}×{1}")]
    NetworkShape(usize, usize),
    #[error("network is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("occupation {occupation} exceeds photon cap {cap}")]
    PhotonCap { occupation: u8, cap: u8 },
    #[error("ket has zero norm")]
    ZeroNorm,
    #[error("ket is not normalized (norm² {0})")]
    NotNormalized(f64),
    #[error("mixture weights invalid: {0}")]
    Weights(String),
    #[error("setting must have one axis per spatial mode, got {0}")]
    SettingSize(usize),
    #[error("no sixfold events")]
    NoSixfoldEvents,
    #[error(transparent)]
    State(#[from] QStateError),
}

/// Sparse superposition of Fock basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct FockKet {
    terms: BTreeMap<Occupation, C64>,
    photon_cap: u8,
}

impl FockKet {
    /// Checks the occupation cap and unit norm.
    pub fn new(terms: BTreeMap<Occupation, C64>, photon_cap: u8) -> Result<Self, FockError> {
        let ket = Self::from_terms(terms, photon_cap)?;
        let n2 = ket.norm_sqr();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(FockError::NotNormalized(n2));
        }
        Ok(ket)
    }

    /// Rescales to unit norm.
    pub fn normalized(terms: BTreeMap<Occupation, C64>, photon_cap: u8) -> Result<Self, FockError> {
        let mut ket = Self::from_terms(terms, photon_cap)?;
        let n = ket.norm_sqr().sqrt();
        if !(n > 0.0) {
            return Err(FockError::ZeroNorm);
        }
        ket.terms.values_mut().for_each(|a| *a /= n);
        Ok(ket)
    }

    fn from_terms(mut terms: BTreeMap<Occupation, C64>, photon_cap: u8) -> Result<Self, FockError> {
        terms.retain(|_, a| a.norm() >= PRUNE_TOL);
        for occ in terms.keys() {
            if let Some(&o) = occ.iter().find(|&&o| o > photon_cap) {
                return Err(FockError::PhotonCap { occupation: o, cap: photon_cap });
            }
        }
        Ok(Self { terms, photon_cap })
    }

    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0; MODES], C64::new(1.0, 0.0));
        Self { terms, photon_cap: DEFAULT_PHOTON_CAP }
    }

    pub fn terms(&self) -> &BTreeMap<Occupation, C64> {
        &self.terms
    }

    pub fn photon_cap(&self) -> u8 {
        self.photon_cap
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Probability weight of terms with at least `min` photons in total.
    pub fn weight_with_photons_at_least(&self, min: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(o, _)| total_photons(o) >= min)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Drops terms with fewer than `min` photons and renormalizes.
    pub fn restrict_photons_at_least(&self, min: usize) -> Result<Self, FockError> {
        let terms = self
            .terms
            .iter()
            .filter(|(o, _)| total_photons(o) >= min)
            .map(|(o, a)| (*o, *a))
            .collect();
        Self::normalized(terms, self.photon_cap)
    }

    pub fn is_vacuum(&self) -> bool {
        self.terms.keys().all(|o| total_photons(o) == 0)
    }
}

pub fn total_photons(occ: &Occupation) -> usize {
    occ.iter().map(|&o| o as usize).sum()
}

/// Photons per spatial mode (both polarizations).
pub fn spatial_counts(occ: &Occupation) -> [u8; SPATIAL_MODES] {
    let mut out = [0; SPATIAL_MODES];
    for (k, o) in out.iter_mut().enumerate() {
        *o = occ[2 * k] + occ[2 * k + 1];
    }
    out
}

/// Convex combination of Fock kets.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMixture {
    components: Vec<(f64, FockKet)>,
}

impl FockMixture {
    pub fn new(components: Vec<(f64, FockKet)>) -> Result<Self, FockError> {
        if components.is_empty() {
            return Err(FockError::Weights("empty mixture".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| !(*w >= 0.0)) {
            return Err(FockError::Weights(format!("negative weight {w}")));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(FockError::Weights(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn pure(ket: FockKet) -> Self {
        Self { components: vec![(1.0, ket)] }
    }

    pub fn components(&self) -> &[(f64, FockKet)] {
        &self.components
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdcConfig {
    /// Pair-emission amplitude per order.
    pub lambda: f64,
    /// Highest number of pairs kept in the expansion.
    pub max_order: usize,
}

impl SpdcConfig {
    pub fn new(lambda: f64, max_order: usize) -> Result<Self, FockError> {
        let cfg = Self { lambda, max_order };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FockError> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(FockError::Lambda(self.lambda));
        }
        if self.max_order == 0 {
            return Err(FockError::Order);
        }
        Ok(())
    }
}

impl Default for SpdcConfig {
    fn default() -> Self {
        Self { lambda: 0.1, max_order: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    /// Transmission of an H photon.
    #[serde(rename = "eta_H")]
    pub eta_h: f64,
    /// Transmission of a V photon.
    #[serde(rename = "eta_V")]
    pub eta_v: f64,
}

impl LossConfig {
    pub fn new(eta_h: f64, eta_v: f64) -> Result<Self, FockError> {
        let cfg = Self { eta_h, eta_v };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn symmetric(eta: f64) -> Result<Self, FockError> {
        Self::new(eta, eta)
    }

    pub fn lossless() -> Self {
        Self { eta_h: 1.0, eta_v: 1.0 }
    }

    pub fn validate(&self) -> Result<(), FockError> {
        for eta in [self.eta_h, self.eta_v] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(FockError::Transmission(eta));
            }
        }
        Ok(())
    }
}

/// `Σ_{n ≤ n_max} λⁿ |n_H, n_V⟩` in the source mode, normalized.
pub fn spdc_state(cfg: &SpdcConfig) -> Result<FockKet, FockError> {
    cfg.validate()?;
    let cap = DEFAULT_PHOTON_CAP.max(cfg.max_order as u8);
    let mut terms = BTreeMap::new();
    let mut amp = 1.0;
    for n in 0..=cfg.max_order {
        let mut occ = [0u8; MODES];
        occ[0] = n as u8;
        occ[1] = n as u8;
        terms.insert(occ, C64::new(amp, 0.0));
        amp *= cfg.lambda;
    }
    FockKet::normalized(terms, cap)
}

fn ln_factorial(n: u8) -> f64 {
    (2..=n as u32).map(|k| (k as f64).ln()).sum()
}

/// Substitutes `a†_k → Σ_j modes[j,k] b†_j` for every mode (12×12 matrix).
fn transform_modes(ket: &FockKet, modes: &DMatrix<C64>) -> Result<FockKet, FockError> {
    let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, &amp) in &ket.terms {
        // coefficients of the creation-operator monomial Π_j (b†_j)^{m_j}
        let mut poly: BTreeMap<Occupation, C64> = BTreeMap::new();
        poly.insert([0; MODES], C64::new(1.0, 0.0));
        for (k, &count) in occ.iter().enumerate() {
            for _ in 0..count {
                let mut next: BTreeMap<Occupation, C64> = BTreeMap::new();
                for (mono, coef) in &poly {
                    for j in 0..MODES {
                        let m = modes[(j, k)];
                        if m.norm() == 0.0 {
                            continue;
                        }
                        let mut key = *mono;
                        key[j] += 1;
                        *next.entry(key).or_default() += coef * m;
                    }
                }
                poly = next;
            }
        }
        let input_norm: f64 = occ.iter().map(|&n| ln_factorial(n)).sum::<f64>() * 0.5;
        for (mono, coef) in poly {
            let output_norm: f64 = mono.iter().map(|&n| ln_factorial(n)).sum::<f64>() * 0.5;
            *out.entry(mono).or_default() += amp * coef * (output_norm - input_norm).exp();
        }
    }
    out.retain(|_, a| a.norm() >= PRUNE_TOL);
    if let Some(&o) = out.keys().flat_map(|occ| occ.iter()).find(|&&o| o > ket.photon_cap) {
        return Err(FockError::PhotonCap { occupation: o, cap: ket.photon_cap });
    }
    Ok(FockKet { terms: out, photon_cap: ket.photon_cap })
}

/// Sends every spatial mode through `network`, identically for both polarizations.
pub fn propagate(ket: &FockKet, network: &NetworkUnitary) -> Result<FockKet, FockError> {
    let u = network.matrix();
    let mut modes = DMatrix::zeros(MODES, MODES);
    for j in 0..SPATIAL_MODES {
        for k in 0..SPATIAL_MODES {
            for p in 0..2 {
                modes[(2 * j + p, 2 * k + p)] = u[(j, k)];
            }
        }
    }
    transform_modes(ket, &modes)
}

/// Independent per-photon loss: every mode couples to its own environment
/// mode with transmission `eta_H`/`eta_V`; the environment is traced out, so
/// each pattern of lost photons becomes one mixture component.
pub fn apply_loss(ket: &FockKet, cfg: &LossConfig) -> Result<FockMixture, FockError> {
    cfg.validate()?;
    let mut branches: BTreeMap<Occupation, BTreeMap<Occupation, C64>> = BTreeMap::new();
    for (occ, &amp) in &ket.terms {
        let mut partial: Vec<(Occupation, Occupation, f64)> = vec![([0; MODES], *occ, 1.0)];
        for k in 0..MODES {
            let n = occ[k];
            if n == 0 {
                continue;
            }
            let eta = if k % 2 == 0 { cfg.eta_h } else { cfg.eta_v };
            let mut next = Vec::with_capacity(partial.len() * (n as usize + 1));
            for (lost, kept, f) in &partial {
                for l in 0..=n {
                    let w = crate::dicke::binomial(n as usize, l as usize) as f64
                        * eta.powi((n - l) as i32)
                        * (1.0 - eta).powi(l as i32);
                    if w == 0.0 {
                        continue;
                    }
                    let mut lost2 = *lost;
                    let mut kept2 = *kept;
                    lost2[k] = l;
                    kept2[k] = n - l;
                    next.push((lost2, kept2, f * w.sqrt()));
                }
            }
            partial = next;
        }
        for (lost, kept, f) in partial {
            *branches.entry(lost).or_default().entry(kept).or_default() += amp * f;
        }
    }
    let mut components = Vec::with_capacity(branches.len());
    for (_, mut terms) in branches {
        terms.retain(|_, a| a.norm() >= PRUNE_TOL);
        let w: f64 = terms.values().map(|a| a.norm_sqr()).sum();
        if w > 0.0 {
            components.push((w, FockKet::normalized(terms, ket.photon_cap)?));
        }
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if !(total > 0.0) {
        return Err(FockError::ZeroNorm);
    }
    components.iter_mut().for_each(|(w, _)| *w /= total);
    FockMixture::new(components)
}

/// Maps a one-photon-per-spatial-mode occupation to its qubit basis index
/// (V = 1, spatial mode 0 = most significant bit).
fn qubit_index(occ: &Occupation) -> Option<usize> {
    let mut idx = 0;
    for k in 0..SPATIAL_MODES {
        match (occ[2 * k], occ[2 * k + 1]) {
            (1, 0) => idx <<= 1,
            (0, 1) => idx = (idx << 1) | 1,
            _ => return None,
        }
    }
    Some(idx)
}

/// Kept (unnormalized) six-qubit vector of one component.
fn kept_vector(ket: &FockKet) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << SPATIAL_MODES];
    for (occ, &a) in &ket.terms {
        if let Some(i) = qubit_index(occ) {
            v[i] += a;
        }
    }
    v
}

/// Number-resolved post-selection on exactly one photon per spatial mode.
/// Returns the normalized six-qubit state and the kept probability.
pub fn postselect(mix: &FockMixture) -> Result<(QubitDensity, f64), FockError> {
    let dim = 1 << SPATIAL_MODES;
    let partials: Vec<DMatrix<C64>> = mix
        .components
        .par_iter()
        .map(|(w, ket)| {
            let v = nalgebra::DVector::from_vec(kept_vector(ket));
            (&v * v.adjoint()) * C64::new(*w, 0.0)
        })
        .collect();
    let rho = partials.into_iter().fold(DMatrix::zeros(dim, dim), |acc, m| acc + m);
    let p = rho.trace().re;
    if !(p > 1e-300) {
        return Err(FockError::NoSixfoldEvents);
    }
    let rho = (&rho + rho.adjoint()) * C64::new(0.5 / p, 0.0);
    Ok((QubitDensity::from_matrix_unchecked(SPATIAL_MODES, rho), p))
}

/// Kept probability computed directly from squared amplitudes, without
/// forming a density matrix.
pub fn postselection_probability(mix: &FockMixture) -> f64 {
    mix.components
        .iter()
        .map(|(w, ket)| {
            w * ket
                .terms
                .iter()
                .filter(|(o, _)| qubit_index(o).is_some())
                .map(|(_, a)| a.norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Count-level detection: each spatial mode is analysed in the setting's
/// basis by two threshold detectors. A sixfold event needs exactly one click
/// per spatial mode; outcome bit `k` is 1 when the `-n` detector of mode `k`
/// fired. Returns the conditional outcome distribution and the event
/// probability (distribution is all zeros when no event is possible).
pub fn threshold_counts(
    mix: &FockMixture,
    setting: &MeasurementSetting,
) -> Result<(Vec<f64>, f64), FockError> {
    if setting.len() != SPATIAL_MODES {
        return Err(FockError::SettingSize(setting.len()));
    }
    let mut modes = DMatrix::zeros(MODES, MODES);
    for (k, r) in setting.rotations().iter().enumerate() {
        for s in 0..2 {
            for p in 0..2 {
                modes[(2 * k + s, 2 * k + p)] = r[(s, p)];
            }
        }
    }
    let dim = 1 << SPATIAL_MODES;
    let partials: Vec<Result<Vec<f64>, FockError>> = mix
        .components
        .par_iter()
        .map(|(w, ket)| {
            let mut dist = vec![0.0; dim];
            // polarization rotations keep the photon number of each spatial
            // mode, so terms with an empty spatial mode never give an event
            let terms: BTreeMap<Occupation, C64> = ket
                .terms
                .iter()
                .filter(|(o, _)| spatial_counts(o).iter().all(|&c| c > 0))
                .map(|(o, a)| (*o, *a))
                .collect();
            if terms.is_empty() {
                return Ok(dist);
            }
            let rotated = transform_modes(&FockKet { terms, photon_cap: ket.photon_cap }, &modes)?;
            for (occ, a) in &rotated.terms {
                let mut idx = 0;
                let mut valid = true;
                for k in 0..SPATIAL_MODES {
                    match (occ[2 * k] > 0, occ[2 * k + 1] > 0) {
                        (true, false) => idx <<= 1,
                        (false, true) => idx = (idx << 1) | 1,
                        _ => {
                            valid = false;
                            break;
                        }
                    }
                }
                if valid {
                    dist[idx] += w * a.norm_sqr();
                }
            }
            Ok(dist)
        })
        .collect();
    let mut dist = vec![0.0; dim];
    for part in partials {
        for (d, p) in dist.iter_mut().zip(part?) {
            *d += p;
        }
    }
    let p_event: f64 = dist.iter().sum();
    if p_event > 0.0 {
        dist.iter_mut().for_each(|d| *d /= p_event);
    }
    Ok((dist, p_event))
}

#[cfg(test)]
mod tests;
