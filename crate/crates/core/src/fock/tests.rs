use super::*;
use crate::dicke::{dicke, DickeSpec};
use crate::qstate::{max_abs, Axis, QuantumState, QubitDensity};
use proptest::prelude::*;

fn single(occ: &[(usize, u8)]) -> FockKet {
    let mut o = [0u8; MODES];
    for &(m, n) in occ {
        o[m] = n;
    }
    let mut terms = BTreeMap::new();
    terms.insert(o, C64::new(1.0, 0.0));
    FockKet::new(terms, DEFAULT_PHOTON_CAP).unwrap()
}

fn third_order() -> FockKet {
    single(&[(0, 3), (1, 3)])
}

fn d63() -> QubitDensity {
    dicke(DickeSpec::new(6, 3).unwrap()).unwrap().to_density()
}

fn all_z() -> MeasurementSetting {
    MeasurementSetting::uniform(Axis::Z, 6)
}

#[test]
fn spdc_amplitudes_are_geometric() {
    let ket = spdc_state(&SpdcConfig::new(0.1, 3).unwrap()).unwrap();
    let norm = (1.0f64 + 1e-2 + 1e-4 + 1e-6).sqrt();
    for n in 0..=3u8 {
        let mut o = [0u8; MODES];
        o[0] = n;
        o[1] = n;
        let want = 0.1f64.powi(n as i32) / norm;
        assert!((ket.amplitude(&o).re - want).abs() < 1e-15);
    }
    assert_eq!(ket.terms().len(), 4);
}

#[test]
fn spdc_zero_lambda_is_vacuum() {
    assert!(spdc_state(&SpdcConfig::new(0.0, 4).unwrap()).unwrap().is_vacuum());
}

#[test]
fn spdc_rejects_bad_config() {
    assert!(matches!(SpdcConfig::new(1.0, 3), Err(FockError::Lambda(_))));
    assert!(matches!(SpdcConfig::new(-0.1, 3), Err(FockError::Lambda(_))));
    assert!(matches!(SpdcConfig::new(0.1, 0), Err(FockError::Order)));
    assert!(matches!(LossConfig::new(1.1, 0.5), Err(FockError::Transmission(_))));
}

#[test]
fn config_json_keys() {
    let cfg: LossConfig = serde_json::from_str(r#"{"eta_H": 0.8, "eta_V": 0.7}"#).unwrap();
    assert_eq!(cfg, LossConfig { eta_h: 0.8, eta_v: 0.7 });
    let s: SpdcConfig = serde_json::from_str(r#"{"lambda": 0.2, "max_order": 4}"#).unwrap();
    assert_eq!(s, SpdcConfig { lambda: 0.2, max_order: 4 });
    assert!(serde_json::from_str::<LossConfig>(r#"{"eta_H": 1, "eta_V": 1, "x": 0}"#).is_err());
}

#[test]
fn propagate_vacuum_and_identity() {
    let vac = FockKet::vacuum();
    assert_eq!(propagate(&vac, &splitter_network()).unwrap(), vac);
    let k = third_order();
    let same = propagate(&k, &NetworkUnitary::identity()).unwrap();
    assert_eq!(same.terms().len(), 1);
    assert!((same.amplitude(&k.terms().keys().next().copied().unwrap()).re - 1.0).abs() < 1e-12);
}

#[test]
fn propagate_single_photon_is_uniform() {
    let out = propagate(&single(&[(0, 1)]), &splitter_network()).unwrap();
    assert_eq!(out.terms().len(), 6);
    for k in 0..SPATIAL_MODES {
        let mut o = [0u8; MODES];
        o[2 * k] = 1;
        assert!((out.amplitude(&o).norm() - 1.0 / 6f64.sqrt()).abs() < 1e-14);
    }
}

#[test]
fn propagate_respects_photon_cap() {
    let mut terms = BTreeMap::new();
    let mut o = [0u8; MODES];
    o[0] = 3;
    terms.insert(o, C64::new(1.0, 0.0));
    let ket = FockKet::new(terms, 3).unwrap();
    // three H photons can bunch into one output mode only if the cap allows it
    assert!(propagate(&ket, &splitter_network()).is_ok());
    let mut terms = BTreeMap::new();
    o[0] = 4;
    terms.insert(o, C64::new(1.0, 0.0));
    assert!(matches!(FockKet::new(terms, 3), Err(FockError::PhotonCap { .. })));
}

#[test]
fn loss_limits() {
    let k = single(&[(0, 1)]);
    let lossless = apply_loss(&k, &LossConfig::lossless()).unwrap();
    assert_eq!(lossless.components().len(), 1);
    assert_eq!(lossless.components()[0].1, k);
    let dark = apply_loss(&third_order(), &LossConfig::symmetric(0.0).unwrap()).unwrap();
    assert_eq!(dark.components().len(), 1);
    assert!(dark.components()[0].1.is_vacuum());
    assert!((dark.components()[0].0 - 1.0).abs() < 1e-12);
}

#[test]
fn loss_single_photon_binomial() {
    let mix = apply_loss(&single(&[(0, 1)]), &LossConfig::symmetric(0.7).unwrap()).unwrap();
    assert_eq!(mix.components().len(), 2);
    for (w, k) in mix.components() {
        let want = if k.is_vacuum() { 0.3 } else { 0.7 };
        assert!((w - want).abs() < 1e-12);
    }
}

#[test]
fn loss_is_polarization_dependent() {
    let mix = apply_loss(&single(&[(0, 1), (1, 1)]), &LossConfig::new(0.5, 1.0).unwrap()).unwrap();
    let survive: f64 = mix
        .components()
        .iter()
        .filter(|(_, k)| k.terms().keys().all(|o| o[0] == 1))
        .map(|(w, _)| w)
        .sum();
    assert!((survive - 0.5).abs() < 1e-12);
}

#[test]
fn lossless_third_order_gives_d63() {
    let out = propagate(&third_order(), &splitter_network()).unwrap();
    let (rho, p) = postselect(&FockMixture::pure(out.clone())).unwrap();
    assert!((p - 5.0 / 324.0).abs() < 1e-12, "p = {p}");
    let target = dicke(DickeSpec::new(6, 3).unwrap()).unwrap();
    assert!((rho.fidelity(&target).unwrap() - 1.0).abs() < 1e-10);
    assert!(max_abs(&(rho.matrix() - d63().matrix())) < 1e-10);
    assert!((postselection_probability(&FockMixture::pure(out)) - p).abs() < 1e-15);
}

/// Brute-force oracle: expand (Σ_k b†_{kH})³ (Σ_k b†_{kV})³ / (6^3 · 3!) over
/// ordered mode assignments and keep assignments with one photon per mode.
#[test]
fn five_over_324_by_enumeration() {
    let mut amp: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    for h in 0..216usize {
        let hs = [h / 36, (h / 6) % 6, h % 6];
        for v in 0..216usize {
            let vs = [v / 36, (v / 6) % 6, v % 6];
            let mut modes: Vec<usize> = hs.iter().chain(&vs).copied().collect();
            modes.sort();
            modes.dedup();
            if modes.len() == 6 {
                let mut a = hs.to_vec();
                a.sort();
                let mut b = vs.to_vec();
                b.sort();
                *amp.entry((a, b)).or_default() += 1.0;
            }
        }
    }
    // each |1..1⟩ term has unit norm; input |3,3⟩ normalization is 1/3!
    let p: f64 = amp.values().map(|c| (c / (216.0 * 6.0)).powi(2)).sum();
    assert!((p - 5.0 / 324.0).abs() < 1e-15);
}

#[test]
fn postselect_vacuum_has_no_events() {
    assert_eq!(
        postselect(&FockMixture::pure(FockKet::vacuum())).unwrap_err(),
        FockError::NoSixfoldEvents
    );
}

#[test]
fn threshold_matches_ideal_distribution() {
    let out = propagate(&third_order(), &splitter_network()).unwrap();
    let mix = FockMixture::pure(out);
    let target = d63();
    for setting in [all_z(), MeasurementSetting::uniform(Axis::X, 6), MeasurementSetting::from_pauli_axes("xyzxyz").unwrap()] {
        let (dist, p) = threshold_counts(&mix, &setting).unwrap();
        let ideal = target.outcome_distribution(&setting).unwrap();
        assert!(dist.iter().zip(&ideal).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!((p - 5.0 / 324.0).abs() < 1e-12);
    }
}

#[test]
fn threshold_vacuum_is_empty() {
    let (dist, p) = threshold_counts(&FockMixture::pure(FockKet::vacuum()), &all_z()).unwrap();
    assert_eq!(p, 0.0);
    assert!(dist.iter().all(|&d| d == 0.0));
    assert!(threshold_counts(&FockMixture::pure(FockKet::vacuum()), &MeasurementSetting::uniform(Axis::Z, 5)).is_err());
}

#[test]
fn threshold_accepts_contaminated_events() {
    let ket = spdc_state(&SpdcConfig::new(0.3, 4).unwrap()).unwrap();
    let out = propagate(&ket, &splitter_network()).unwrap();
    let mix = apply_loss(&out, &LossConfig::symmetric(0.6).unwrap()).unwrap();
    let (_, p_exact) = postselect(&mix).unwrap();
    let (_, p_event) = threshold_counts(&mix, &all_z()).unwrap();
    assert!(p_event > p_exact, "{p_event} vs {p_exact}");
    assert!((postselection_probability(&mix) - p_exact).abs() < 1e-14);
}

#[test]
fn simulate_lossless_third_order() {
    let rep = simulate_experiment(&SpdcConfig::new(0.2, 3).unwrap(), &LossConfig::lossless()).unwrap();
    assert!((rep.fidelity - 1.0).abs() < 1e-10);
    assert!((rep.p_exact - 5.0 / 324.0).abs() < 1e-12);
    assert!((rep.p_event - 5.0 / 324.0).abs() < 1e-12);
    let w = 0.2f64.powi(6) / (1.0 + 0.04 + 0.04f64.powi(2) + 0.04f64.powi(3));
    assert!((rep.emission_weight - w).abs() < 1e-15);
}

#[test]
fn simulate_needs_three_pairs() {
    assert_eq!(
        simulate_experiment(&SpdcConfig::new(0.2, 2).unwrap(), &LossConfig::lossless()).unwrap_err(),
        FockError::NoSixfoldEvents
    );
}

#[test]
fn rho_sim_is_permutation_symmetric() {
    let rep = simulate_experiment(&SpdcConfig::new(0.4, 4).unwrap(), &LossConfig::symmetric(0.5).unwrap()).unwrap();
    let rho = &rep.rho_sim;
    for order in [[1, 0, 2, 3, 4, 5], [5, 1, 2, 3, 4, 0], [0, 2, 4, 1, 3, 5]] {
        let swapped = rho.permute(&order).unwrap();
        assert!(max_abs(&(swapped.matrix() - rho.matrix())) < 1e-9);
    }
    assert!(rep.fidelity < 1.0);
    assert!(QubitDensity::new(6, rho.matrix().clone()).is_ok());
}

#[test]
fn fidelity_increases_as_lambda_decreases() {
    let grid = CalibrationGrid {
        lambdas: vec![0.05, 0.1, 0.2, 0.4, 0.6, 0.8],
        etas: vec![0.3],
        max_order: 4,
        target_fidelity: 0.61,
    };
    let cal = calibration_sweep(&grid).unwrap();
    let f: Vec<f64> = cal.points.iter().map(|p| p.fidelity).collect();
    assert!(f.windows(2).all(|w| w[0] > w[1]), "{f:?}");
    assert!(f.iter().all(|&x| x < 1.0));
    assert!(f[0] > 0.98, "{f:?}");
}

#[test]
fn sweep_agrees_with_full_pipeline() {
    let grid = CalibrationGrid { lambdas: vec![0.35], etas: vec![0.45], max_order: 4, target_fidelity: 0.61 };
    let cal = calibration_sweep(&grid).unwrap();
    let rep = cal.simulate().unwrap();
    assert!((rep.fidelity - cal.selected.fidelity).abs() < 1e-10);
    assert!((rep.p_exact - cal.selected.p_exact).abs() < 1e-12);
    assert!((rep.p_event - cal.selected.p_event).abs() < 1e-12);
    let back = Calibration::from_json(&cal.to_json()).unwrap();
    assert_eq!(back, cal);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagate_preserves_norm_and_number(
        photons in proptest::collection::vec(0usize..MODES, 1..=6),
    ) {
        let mut o = [0u8; MODES];
        for m in photons {
            o[m] += 1;
        }
        let mut terms = BTreeMap::new();
        terms.insert(o, C64::new(1.0, 0.0));
        let k = FockKet::new(terms, DEFAULT_PHOTON_CAP).unwrap();
        let out = propagate(&k, &splitter_network()).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert!(out.terms().keys().all(|q| total_photons(q) == total_photons(&o)));
    }

    #[test]
    fn loss_weights_sum_to_one(eta_h in 0.0f64..=1.0, eta_v in 0.0f64..=1.0) {
        let out = propagate(&spdc_state(&SpdcConfig::new(0.3, 2).unwrap()).unwrap(), &splitter_network()).unwrap();
        let mix = apply_loss(&out, &LossConfig::new(eta_h, eta_v).unwrap()).unwrap();
        let total: f64 = mix.components().iter().map(|(w, _)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(mix.components().iter().all(|(_, k)| (k.norm_sqr() - 1.0).abs() < 1e-9));
    }
}
