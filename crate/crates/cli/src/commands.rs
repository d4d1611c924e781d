//! One function per subcommand. Each returns a serializable report; files
//! beyond the report (states, counts, plot data) are written here.

use std::path::Path;

use dicke_core::dicke::{dicke, DickeSpec};
use dicke_core::fock::{calibration_sweep, detected_mixture, simulate_experiment, Calibration};
use dicke_core::lms::{decompose, fidelity_from_counts, plan_settings, reference_lms_count, SettingPlan};
use dicke_core::protocols::{odt, qss_run, telecloning_report, OdtResult, QssResult, TelecloningReport};
use dicke_core::qstate::{Axis, MeasurementSetting, Pauli, QuantumState, QubitDensity, StateDocument};
use dicke_core::reference::{self, Comparison};
use dicke_core::sampler::{run_plan, to_count_table, CoincidenceHistogram, ExperimentPlan};
use dicke_core::witness::{
    bound_curve, correlator_scan, ghz_witness, pairwise_corr_matrix, uniform_grid, witness_value, BoundEstimate,
    CorrelatorSpec, SpinWitnessSpec,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{
    load_calibration, BoundSection, CompareSection, LmsSection, ProtocolsSection, SampleSection, ScanSection,
    SimulateSection, SourceSpec, StateSection, WitnessSection,
};
use crate::output::{write_json, write_text};
use crate::CliError;

fn num(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn cfg(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Probabilities of every outcome in the z, x and y bases.
#[derive(Clone, Debug, Serialize)]
pub struct Populations {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn populations(rho: &QubitDensity) -> Result<Populations, CliError> {
    let n = rho.num_qubits();
    let dist = |a| rho.outcome_distribution(&MeasurementSetting::uniform(a, n)).map_err(num);
    Ok(Populations { z: dist(Axis::Z)?, x: dist(Axis::X)?, y: dist(Axis::Y)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct StateReport {
    pub num_qubits: usize,
    pub purity: f64,
    pub populations: Populations,
}

pub fn state(section: &StateSection, out: &Path) -> Result<StateReport, CliError> {
    let rho = section.state.build()?;
    write_text(out, "state.json", &StateDocument::from(&rho).to_json())?;
    let m = rho.matrix();
    let purity = (m * m).trace().re;
    Ok(StateReport { num_qubits: rho.num_qubits(), purity, populations: populations(&rho)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub lambda: f64,
    pub max_order: usize,
    #[serde(rename = "eta_H")]
    pub eta_h: f64,
    #[serde(rename = "eta_V")]
    pub eta_v: f64,
    pub p_exact: f64,
    pub p_event: f64,
    #[serde(rename = "fidelity_vs_D63")]
    pub fidelity: f64,
    pub emission_weight: f64,
    /// Present when a sweep ran.
    pub calibration: Option<Calibration>,
}

pub fn simulate(section: &SimulateSection, out: &Path) -> Result<SimulateReport, CliError> {
    let calibration = match (&section.sweep, &section.calibration) {
        (Some(_), Some(_)) => return Err(CliError::Config("simulate: give either sweep or calibration".into())),
        (Some(grid), None) => Some(calibration_sweep(grid).map_err(num)?),
        (None, Some(path)) => Some(load_calibration(path)?),
        (None, None) => None,
    };
    let (spdc, loss) = match &calibration {
        Some(c) => (c.spdc(), c.loss()),
        None => {
            section.spdc.validate().map_err(cfg)?;
            section.loss.validate().map_err(cfg)?;
            (section.spdc, section.loss)
        }
    };
    let r = simulate_experiment(&spdc, &loss).map_err(num)?;
    write_text(out, "rho_sim.json", &StateDocument::from(&r.rho_sim).to_json())?;
    Ok(SimulateReport {
        lambda: spdc.lambda,
        max_order: spdc.max_order,
        eta_h: loss.eta_h,
        eta_v: loss.eta_v,
        p_exact: r.p_exact,
        p_event: r.p_event,
        fidelity: r.fidelity,
        emission_weight: r.emission_weight,
        calibration: if section.sweep.is_some() { calibration } else { None },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessPoint {
    pub alpha: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub num_qubits: usize,
    pub j_sq: [f64; 3],
    pub values: Vec<WitnessPoint>,
    /// `⟨σ_a σ_a⟩` per pair for a = x, y, z; rows `(j, k, cx, cy, cz)`.
    pub pair_correlations: Vec<(usize, usize, f64, f64, f64)>,
    /// Projector witness of the rotated GHZ frame (four qubits only).
    pub ghz_witness: Option<f64>,
}

pub fn witness(section: &WitnessSection) -> Result<WitnessReport, CliError> {
    let rho = section.state.build()?;
    let n = rho.num_qubits();
    let values = section
        .alphas
        .iter()
        .map(|&alpha| {
            let spec = SpinWitnessSpec::new(n, alpha).map_err(cfg)?;
            Ok(WitnessPoint { alpha, value: witness_value(&rho, &spec).map_err(num)? })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let c: Vec<_> = [Pauli::X, Pauli::Y, Pauli::Z]
        .iter()
        .map(|&a| pairwise_corr_matrix(&rho, a).map_err(num))
        .collect::<Result<_, _>>()?;
    // diagonal entries are 1, so the full sum is N + Σ_{j≠k}
    let j_sq = [0, 1, 2].map(|a| c[a].sum() / 4.0);
    let pair_correlations =
        (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).map(|(j, k)| (j, k, c[0][(j, k)], c[1][(j, k)], c[2][(j, k)])).collect();
    let ghz_witness = if n == 4 { Some(ghz_witness(&rho).map_err(num)?) } else { None };
    Ok(WitnessReport { num_qubits: n, j_sq, values, pair_correlations, ghz_witness })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundPoint {
    pub alpha: f64,
    pub estimate: BoundEstimate,
    pub state_value: f64,
    /// `bound - ⟨W⟩`; negative certifies genuine multipartite entanglement.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub points: Vec<BoundPoint>,
    pub all_converged: bool,
}

pub fn bound(section: &BoundSection) -> Result<BoundReport, CliError> {
    let state = match &section.state {
        Some(s) => s.build()?,
        None => dicke(DickeSpec::new(section.n, section.n / 2).map_err(cfg)?).map_err(cfg)?.to_density(),
    };
    if state.num_qubits() != section.n {
        return Err(CliError::Config(format!("bound: state has {} qubits, n = {}", state.num_qubits(), section.n)));
    }
    let curve = bound_curve(section.n, &section.alphas, &section.seesaw).map_err(|e| match e {
        dicke_core::witness::WitnessError::State(_) => num(e),
        other => cfg(other),
    })?;
    let points = curve
        .into_iter()
        .map(|(alpha, estimate)| {
            let state_value = witness_value(&state, &SpinWitnessSpec::new(section.n, alpha).map_err(cfg)?).map_err(num)?;
            Ok(BoundPoint { alpha, gap: estimate.value - state_value, state_value, estimate })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let all_converged = points.iter().all(|p| p.estimate.converged);
    if !all_converged {
        eprintln!("warning: see-saw did not reach tolerance at every alpha");
    }
    Ok(BoundReport { n: section.n, points, all_converged })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub plane: dicke_core::qstate::Plane,
    /// `(θ, value, ideal)` with `ideal` the curve of `D_N^{(⌊N/2⌋)}`.
    pub points: Vec<(f64, f64, f64)>,
}

pub fn scan(section: &ScanSection) -> Result<ScanReport, CliError> {
    let rho = section.state.build()?;
    let n = rho.num_qubits();
    let spec = CorrelatorSpec { plane: section.plane, thetas: uniform_grid(section.start, section.end, section.points), n };
    spec.validate().map_err(cfg)?;
    let ideal_state = dicke(DickeSpec::new(n, n / 2).map_err(cfg)?).map_err(cfg)?;
    let values = correlator_scan(&rho, &spec).map_err(num)?;
    let ideal = correlator_scan(&ideal_state, &spec).map_err(num)?;
    let points = values.iter().zip(&ideal).map(|(&(t, v), &(_, i))| (t, v, i)).collect();
    Ok(ScanReport { plane: section.plane, points })
}

#[derive(Clone, Debug, Serialize)]
pub struct LmsReport {
    pub label: String,
    pub strategy: dicke_core::lms::Strategy,
    pub terms: usize,
    pub grouped_terms: usize,
    pub settings: usize,
    pub reference_settings: Option<usize>,
}

fn plan_for(target: &QubitDensity, label: &str, strategy: dicke_core::lms::Strategy) -> Result<(dicke_core::lms::PauliDecomposition, SettingPlan), CliError> {
    let pure = pure_target(target)?;
    let dec = decompose(&pure, label).map_err(cfg)?;
    let plan = plan_settings(&dec, strategy).map_err(cfg)?;
    Ok((dec, plan))
}

/// Recovers the pure state of a rank-one density.
fn pure_target(rho: &QubitDensity) -> Result<dicke_core::qstate::QubitPureState, CliError> {
    let eig = rho.matrix().clone().symmetric_eigen();
    let (k, &top) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| CliError::Config("empty target".into()))?;
    if (top - 1.0).abs() > 1e-9 {
        return Err(CliError::Config(format!("target must be a pure state (largest eigenvalue {top})")));
    }
    let v = eig.eigenvectors.column(k);
    // fix the global phase on the largest entry
    let (imax, _) = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).expect("non-empty");
    let phase = v[imax].conj() / v[imax].norm();
    dicke_core::qstate::QubitPureState::normalized(rho.num_qubits(), v.iter().map(|a| a * phase).collect()).map_err(num)
}

pub fn lms(section: &LmsSection, out: &Path) -> Result<LmsReport, CliError> {
    let target = section.target.build()?;
    let (dec, plan) = plan_for(&target, &section.label, section.strategy)?;
    write_text(out, "decomposition.json", &dec.to_json())?;
    write_text(out, "plan.json", &plan.to_json())?;
    Ok(LmsReport {
        label: section.label.clone(),
        strategy: section.strategy,
        terms: dec.len(),
        grouped_terms: dec.grouped_len(),
        settings: plan.len(),
        reference_settings: reference_lms_count(&section.label),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub label: String,
    pub settings: usize,
    pub events: u64,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Exact fidelity of a state source.
    pub direct_fidelity: Option<f64>,
    /// `(estimate - direct) / std_error`.
    pub deviation_se: Option<f64>,
    pub histograms: Vec<CoincidenceHistogram>,
}

pub fn sample(section: &SampleSection, out: &Path) -> Result<SampleReport, CliError> {
    let target = section.target.build()?;
    let (dec, lms_plan) = plan_for(&target, &section.label, section.strategy)?;
    let plan = ExperimentPlan { settings: lms_plan.settings.clone(), events: section.events, seed: section.seed };
    plan.validate().map_err(cfg)?;
    let (histograms, direct) = match &section.source {
        SourceSpec::State { state } => {
            let rho = state.build()?;
            let direct = rho.fidelity(&pure_target(&target)?).map_err(cfg)?;
            (run_plan(&rho, &plan).map_err(num)?, Some(direct))
        }
        SourceSpec::Fock { spdc, loss } => {
            let mix = detected_mixture(spdc, loss).map_err(cfg)?;
            (run_plan(&mix, &plan).map_err(num)?, None)
        }
    };
    let table = to_count_table(&histograms).map_err(num)?;
    write_text(out, "counts.csv", &table.to_csv_string())?;
    write_json(out, "experiment_plan.json", &plan)?;
    let est = fidelity_from_counts(&dec, &lms_plan, &table).map_err(num)?;
    Ok(SampleReport {
        label: section.label.clone(),
        settings: plan.settings.len(),
        events: plan.events,
        seed: plan.seed,
        estimate: est.estimate,
        std_error: est.std_error,
        direct_fidelity: direct,
        deviation_se: direct.map(|d| (est.estimate - d) / est.std_error),
        histograms,
    })
}

pub fn protocols_pairs(section: &ProtocolsSection) -> Result<TelecloningReport, CliError> {
    let rho = section.state.build()?;
    let report = telecloning_report(&rho).map_err(cfg)?;
    if report.pairs.iter().any(|p| !p.converged) {
        eprintln!("warning: singlet-fraction search did not converge for every pair");
    }
    Ok(report)
}

pub fn protocols_odt(section: &ProtocolsSection) -> Result<OdtResult, CliError> {
    let rho = section.state.build()?;
    odt(&rho, (section.keep[0], section.keep[1])).map_err(cfg)
}

pub fn protocols_qss(section: &ProtocolsSection) -> Result<QssResult, CliError> {
    let rho = section.state.build()?;
    qss_run(&rho, section.rounds, section.seed).map_err(|e| match e {
        dicke_core::protocols::ProtocolError::Rounds => cfg(e),
        other => num(other),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub source: String,
    #[serde(flatten)]
    pub comparison: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    /// Artifacts that were looked for and not found.
    pub missing: Vec<String>,
}

fn load_report(out: &Path, name: &str) -> Option<Value> {
    let text = std::fs::read_to_string(out.join(name)).ok()?;
    serde_json::from_str::<Value>(&text).ok()?.get("report").cloned()
}

fn f(v: &Value, ptr: &str) -> Option<f64> {
    v.pointer(ptr).and_then(Value::as_f64)
}

/// Computed values found in `out` next to the published ones.
pub fn compare(section: &CompareSection, out: &Path) -> Result<CompareReport, CliError> {
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    let mut push = |source: &str, key: &str, value: Option<f64>| {
        if let Some(c) = value.and_then(|v| reference::compare(key, v)) {
            rows.push(CompareRow { source: source.into(), comparison: c });
        }
    };
    match load_report(out, "simulate.json") {
        Some(r) => {
            push("simulate.json", "rho_sim_fidelity", f(&r, "/fidelity_vs_D63"));
            push("simulate.json", "postselection_probability", f(&r, "/p_exact"));
            if let Some(rate) = section.rep_rate_hz {
                push("simulate.json", "sixfold_rate_per_s", f(&r, "/p_event").map(|p| p * rate));
            }
        }
        None => missing.push("simulate.json".into()),
    }
    match load_report(out, "bound.json") {
        Some(r) => {
            let n = r.get("n").and_then(Value::as_u64).unwrap_or(0);
            for p in r.get("points").and_then(Value::as_array).into_iter().flatten() {
                let alpha = f(p, "/alpha").unwrap_or(f64::NAN);
                if alpha == 0.0 {
                    push("bound.json", &format!("bound_N{n}"), f(p, "/estimate/value"));
                }
                let gap_key = match n {
                    6 if alpha == -3.0 => Some("witness_gap_D6_3"),
                    5 if alpha == 0.0 => Some("witness_gap_D5_2"),
                    4 if alpha == 0.0 => Some("witness_gap_D4_2"),
                    _ => None,
                };
                if let Some(k) = gap_key {
                    push("bound.json", k, f(p, "/gap"));
                }
            }
        }
        None => missing.push("bound.json".into()),
    }
    match load_report(out, "lms.json") {
        Some(r) => {
            let label = r.get("label").and_then(Value::as_str).unwrap_or_default().to_string();
            push("lms.json", &format!("lms_{label}"), f(&r, "/settings"));
        }
        None => missing.push("lms.json".into()),
    }
    match load_report(out, "sample.json") {
        Some(r) => {
            let label = r.get("label").and_then(Value::as_str).unwrap_or_default().to_string();
            push("sample.json", &format!("fidelity_{label}"), f(&r, "/estimate"));
        }
        None => missing.push("sample.json".into()),
    }
    match load_report(out, "protocols_odt.json") {
        Some(r) => {
            push("protocols_odt.json", "odt_mean_p_success", f(&r, "/p_success"));
            push("protocols_odt.json", "odt_mean_fidelity", f(&r, "/mean_fidelity"));
        }
        None => missing.push("protocols_odt.json".into()),
    }
    let mut qss_found = false;
    for name in ["qss.json", "protocols_qss.json"] {
        if let Some(r) = load_report(out, name) {
            qss_found = true;
            let n = r.get("num_qubits").and_then(Value::as_u64).unwrap_or(0);
            push(name, &format!("qber_N{n}"), f(&r, "/qber"));
        }
    }
    if !qss_found {
        missing.push("qss.json".into());
    }
    Ok(CompareReport { rows, missing })
}
