//! End-to-end source simulation and the (λ, η) calibration sweep.
//!
//! Only emission orders with at least three pairs can fill six spatial modes,
//! so the pipeline conditions the source on those orders; the discarded
//! weight is reported as `emission_weight`. Different orders never interfere
//! after post-selection: a sixfold event from order `n` needs exactly `2n - 6`
//! photons lost to the environment, which labels the component. The sweep
//! exploits this by computing one unnormalized contribution per order and
//! reweighting it by `λ^{2n}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_loss, kept_vector, propagate, spdc_state, splitter_network, threshold_counts, FockError,
    FockKet, FockMixture, LossConfig, Occupation, SpdcConfig, DEFAULT_PHOTON_CAP, MODES,
    SPATIAL_MODES,
};
use crate::dicke::{dicke, DickeSpec};
use crate::qstate::{Axis, MeasurementSetting, QubitDensity};

/// Lowest emission order that can produce one photon in each of six modes.
pub const MIN_SIXFOLD_ORDER: usize = SPATIAL_MODES / 2;

#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub spdc: SpdcConfig,
    pub loss: LossConfig,
    /// Normalized state after number-resolved sixfold post-selection.
    pub rho_sim: QubitDensity,
    /// Number-resolved sixfold probability, given at least three pairs.
    pub p_exact: f64,
    /// Threshold-detector sixfold probability (all-z analysis), given at least three pairs.
    pub p_event: f64,
    /// Fidelity of `rho_sim` with the six-qubit, three-excitation Dicke state.
    pub fidelity: f64,
    /// Probability that the truncated source emits at least three pairs.
    pub emission_weight: f64,
}

fn target_d63() -> crate::qstate::QubitPureState {
    dicke(DickeSpec::new(SPATIAL_MODES, SPATIAL_MODES / 2).expect("valid spec"))
        .expect("dicke(6,3) constructs")
}

/// spdc_state → propagate → apply_loss → postselect, plus the threshold model.
pub fn simulate_experiment(
    spdc: &SpdcConfig,
    loss: &LossConfig,
) -> Result<SimulationReport, FockError> {
    spdc.validate()?;
    loss.validate()?;
    let source = spdc_state(spdc)?;
    let emission_weight = source.weight_with_photons_at_least(2 * MIN_SIXFOLD_ORDER);
    if !(emission_weight > 0.0) {
        return Err(FockError::NoSixfoldEvents);
    }
    let mix = detected_mixture_from(&source, loss)?;
    let (rho_sim, p_exact) = super::postselect(&mix)?;
    let (_, p_event) = threshold_counts(&mix, &MeasurementSetting::uniform(Axis::Z, SPATIAL_MODES))?;
    let fidelity = rho_sim.fidelity(&target_d63())?;
    Ok(SimulationReport { spdc: *spdc, loss: *loss, rho_sim, p_exact, p_event, fidelity, emission_weight })
}

fn detected_mixture_from(source: &FockKet, loss: &LossConfig) -> Result<FockMixture, FockError> {
    let source = source.restrict_photons_at_least(2 * MIN_SIXFOLD_ORDER)?;
    apply_loss(&propagate(&source, &splitter_network())?, loss)
}

/// Lossy optical state in front of the detectors, restricted to emissions of
/// at least three pairs.
pub fn detected_mixture(spdc: &SpdcConfig, loss: &LossConfig) -> Result<FockMixture, FockError> {
    spdc.validate()?;
    loss.validate()?;
    detected_mixture_from(&spdc_state(spdc)?, loss)
}

/// Unnormalized post-selected matrix and threshold event probability of a
/// single emission order `|n, n⟩`.
#[derive(Clone, Debug)]
struct OrderContribution {
    order: usize,
    kept: DMatrix<C64>,
    threshold: f64,
}

fn order_contribution(order: usize, loss: &LossConfig) -> Result<OrderContribution, FockError> {
    let mut occ: Occupation = [0; MODES];
    occ[0] = order as u8;
    occ[1] = order as u8;
    let mut terms = BTreeMap::new();
    terms.insert(occ, C64::new(1.0, 0.0));
    let ket = FockKet::new(terms, DEFAULT_PHOTON_CAP.max(order as u8))?;
    let mix = apply_loss(&propagate(&ket, &splitter_network())?, loss)?;
    let dim = 1 << SPATIAL_MODES;
    let kept = mix
        .components()
        .iter()
        .map(|(w, k)| {
            let v = nalgebra::DVector::from_vec(kept_vector(k));
            (&v * v.adjoint()) * C64::new(*w, 0.0)
        })
        .fold(DMatrix::zeros(dim, dim), |acc, m| acc + m);
    let (_, threshold) =
        threshold_counts(&mix, &MeasurementSetting::uniform(Axis::Z, SPATIAL_MODES))?;
    Ok(OrderContribution { order, kept, threshold })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub lambda: f64,
    pub eta: f64,
    pub fidelity: f64,
    pub p_exact: f64,
    pub p_event: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationGrid {
    pub lambdas: Vec<f64>,
    /// Polarization-independent transmissions.
    pub etas: Vec<f64>,
    pub max_order: usize,
    pub target_fidelity: f64,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        Self {
            lambdas: (1..=19).map(|i| i as f64 / 20.0).collect(),
            etas: (1..=10).map(|i| i as f64 / 10.0).collect(),
            max_order: 4,
            target_fidelity: 0.61,
        }
    }
}

/// Sweep result with the point closest to the target fidelity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub grid: CalibrationGrid,
    pub points: Vec<CalibrationPoint>,
    pub selected: CalibrationPoint,
}

impl Calibration {
    pub fn spdc(&self) -> SpdcConfig {
        SpdcConfig { lambda: self.selected.lambda, max_order: self.grid.max_order }
    }

    pub fn loss(&self) -> LossConfig {
        LossConfig { eta_h: self.selected.eta, eta_v: self.selected.eta }
    }

    /// Re-runs the full pipeline at the selected point.
    pub fn simulate(&self) -> Result<SimulationReport, FockError> {
        simulate_experiment(&self.spdc(), &self.loss())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Evaluates every (λ, η) grid point and selects the one whose fidelity is
/// closest to the target (ties go to the smaller λ, then the larger η).
pub fn calibration_sweep(grid: &CalibrationGrid) -> Result<Calibration, FockError> {
    if grid.lambdas.is_empty() || grid.etas.is_empty() {
        return Err(FockError::Weights("empty calibration grid".into()));
    }
    for &l in &grid.lambdas {
        SpdcConfig::new(l, grid.max_order)?;
    }
    if grid.max_order < MIN_SIXFOLD_ORDER {
        return Err(FockError::NoSixfoldEvents);
    }
    let target = target_d63();
    let per_eta: Vec<Result<Vec<CalibrationPoint>, FockError>> = grid
        .etas
        .par_iter()
        .map(|&eta| {
            let loss = LossConfig::symmetric(eta)?;
            let contribs = (MIN_SIXFOLD_ORDER..=grid.max_order)
                .map(|n| order_contribution(n, &loss))
                .collect::<Result<Vec<_>, _>>()?;
            grid.lambdas
                .iter()
                .map(|&lambda| point_from_contributions(lambda, eta, &contribs, &target))
                .collect()
        })
        .collect();
    let mut points = Vec::with_capacity(grid.lambdas.len() * grid.etas.len());
    for p in per_eta {
        points.extend(p?);
    }
    let selected = *points
        .iter()
        .min_by(|a, b| {
            let da = (a.fidelity - grid.target_fidelity).abs();
            let db = (b.fidelity - grid.target_fidelity).abs();
            da.total_cmp(&db)
                .then(a.lambda.total_cmp(&b.lambda))
                .then(b.eta.total_cmp(&a.eta))
        })
        .expect("grid is nonempty");
    Ok(Calibration { grid: grid.clone(), points, selected })
}

fn point_from_contributions(
    lambda: f64,
    eta: f64,
    contribs: &[OrderContribution],
    target: &crate::qstate::QubitPureState,
) -> Result<CalibrationPoint, FockError> {
    let weights: Vec<f64> = contribs.iter().map(|c| lambda.powi(2 * c.order as i32)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(FockError::NoSixfoldEvents);
    }
    let dim = 1 << SPATIAL_MODES;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    let mut p_event = 0.0;
    for (c, w) in contribs.iter().zip(&weights) {
        rho += &c.kept * C64::new(w / total, 0.0);
        p_event += w / total * c.threshold;
    }
    let p_exact = rho.trace().re;
    if !(p_exact > 1e-300) {
        return Err(FockError::NoSixfoldEvents);
    }
    let rho = QubitDensity::from_matrix_unchecked(SPATIAL_MODES, rho / C64::new(p_exact, 0.0));
    Ok(CalibrationPoint { lambda, eta, fidelity: rho.fidelity(target)?, p_exact, p_event })
}
