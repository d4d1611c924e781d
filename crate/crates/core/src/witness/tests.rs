use std::f64::consts::PI;

use super::*;
use crate::testutil::random_density;
use crate::dicke::{dicke, navigate, DickeSpec, NavigationStep, Outcome};
use crate::qstate::{kets, Plane};
use proptest::prelude::*;

fn d(n: usize, m: usize) -> QubitPureState {
    dicke(DickeSpec::new(n, m).unwrap()).unwrap()
}

fn horizontal(n: usize) -> QubitPureState {
    QubitPureState::product(&vec![kets::H; n]).unwrap()
}

fn quick() -> SeesawOptions {
    SeesawOptions { restarts: 12, ..SeesawOptions::default() }
}

#[test]
fn collective_spin_examples() {
    let d63 = d(6, 3);
    assert!(collective_spin_sq(&d63, Pauli::Z).unwrap().abs() < 1e-12);
    assert!((collective_spin_sq(&d63, Pauli::X).unwrap() - 6.0).abs() < 1e-12);
    assert!((collective_spin_sq(&d63, Pauli::Y).unwrap() - 6.0).abs() < 1e-12);
    assert!((collective_spin_sq(&horizontal(6), Pauli::X).unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(collective_spin_sq(&d63, Pauli::I).unwrap_err(), WitnessError::IdentityAxis);
}

#[test]
fn collective_spin_paths_agree() {
    for state in [d(6, 3), d(5, 2), horizontal(4), rotated_ghz4()] {
        let rho = state.to_density();
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let a = collective_spin_sq(&rho, axis).unwrap();
            let b = collective_spin_sq_dense(&rho, axis).unwrap();
            assert!((a - b).abs() < 1e-9, "{axis:?}: {a} vs {b}");
        }
    }
}

#[test]
fn witness_examples() {
    for alpha in [-3.0, 0.0, 2.5] {
        let v = witness_value(&d(6, 3), &SpinWitnessSpec::new(6, alpha).unwrap()).unwrap();
        assert!((v - 12.0).abs() < 1e-12);
    }
    let spec5 = SpinWitnessSpec::new(5, 0.0).unwrap();
    assert!((witness_value(&d(5, 2), &spec5).unwrap() - 8.5).abs() < 1e-12);
    let spec4 = SpinWitnessSpec::new(4, 0.0).unwrap();
    assert!((witness_value(&d(4, 1), &spec4).unwrap() - 5.0).abs() < 1e-12);
    assert!(witness_value(&d(5, 2), &spec4).is_err());
    assert!(SpinWitnessSpec::new(1, 0.0).is_err());
    assert!(SpinWitnessSpec::new(4, f64::NAN).is_err());
}

#[test]
fn witness_operator_matches_value() {
    let spec = SpinWitnessSpec::new(4, -1.5).unwrap();
    let w = witness_operator(&spec).unwrap();
    for state in [d(4, 1), d(4, 2), rotated_ghz4()] {
        let rho = state.to_density();
        let dense = rho.expectation_dense(&w).unwrap();
        assert!((dense - witness_value(&rho, &spec).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn pairwise_examples() {
    let cz = pairwise_corr_matrix(&d(6, 3), Pauli::Z).unwrap();
    let cx = pairwise_corr_matrix(&d(6, 3), Pauli::X).unwrap();
    let cp = pairwise_corr_matrix(&horizontal(6), Pauli::X).unwrap();
    for j in 0..6 {
        for k in 0..6 {
            if j == k {
                assert_eq!(cz[(j, k)], 1.0);
                assert_eq!(cp[(j, k)], 1.0);
            } else {
                assert!((cz[(j, k)] + 0.2).abs() < 1e-12);
                assert!((cx[(j, k)] - 0.6).abs() < 1e-12);
                assert!(cp[(j, k)].abs() < 1e-12);
            }
            assert_eq!(cx[(j, k)], cx[(k, j)]);
        }
    }
}

fn scan(state: &(impl QuantumState + Sync), plane: Plane, thetas: Vec<f64>, n: usize) -> Vec<(f64, f64)> {
    correlator_scan(state, &CorrelatorSpec { plane, thetas, n }).unwrap()
}

#[test]
fn correlator_matches_closed_form() {
    let d63 = d(6, 3);
    let grid = uniform_grid(0.0, PI, 100);
    for plane in [Plane::Xz, Plane::Yz] {
        for (t, v) in scan(&d63, plane, grid.clone(), 6) {
            let want = (3.0 * (2.0 * t).cos() + 5.0 * (6.0 * t).cos()) / 8.0;
            assert!((v - want).abs() < 1e-10, "{plane:?} θ={t}: {v} vs {want}");
        }
    }
    let ends = scan(&d63, Plane::Xz, vec![0.0, PI / 2.0], 6);
    assert!((ends[0].1 - 1.0).abs() < 1e-12);
    assert!((ends[1].1 + 1.0).abs() < 1e-12);
}

#[test]
fn correlator_endpoints_match_pauli_expectations() {
    let rho = QubitDensity::werner(&d(4, 2), 0.7).unwrap();
    for (plane, letter) in [(Plane::Xz, Pauli::X), (Plane::Yz, Pauli::Y)] {
        let ends = scan(&rho, plane, vec![0.0, PI / 2.0], 4);
        assert!((ends[0].1 - rho.expectation(&PauliString::uniform(letter, 4)).unwrap()).abs() < 1e-12);
        assert!((ends[1].1 - rho.expectation(&PauliString::uniform(Pauli::Z, 4)).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn dephased_dicke_keeps_only_populations() {
    let dephased = d(6, 3).to_density().dephased();
    for (t, v) in scan(&dephased, Plane::Xz, uniform_grid(0.0, PI, 37), 6) {
        // only the σ_z^⊗6 term is diagonal in the z basis
        assert!((v + t.sin().powi(6)).abs() < 1e-12);
    }
    let t = 0.3;
    let ideal = scan(&d(6, 3), Plane::Xz, vec![t], 6)[0].1;
    let deph = scan(&dephased, Plane::Xz, vec![t], 6)[0].1;
    assert!((ideal - deph).abs() > 0.1);
}

#[test]
fn correlator_rejects_bad_specs() {
    let s = d(4, 2);
    assert_eq!(
        correlator_scan(&s, &CorrelatorSpec { plane: Plane::Xy, thetas: vec![0.0], n: 4 }).unwrap_err(),
        WitnessError::CorrelatorPlane
    );
    assert_eq!(
        correlator_scan(&s, &CorrelatorSpec { plane: Plane::Xz, thetas: vec![], n: 4 }).unwrap_err(),
        WitnessError::EmptyGrid
    );
    assert!(correlator_scan(&s, &CorrelatorSpec { plane: Plane::Xz, thetas: vec![0.0], n: 5 }).is_err());
}

#[test]
fn rotated_ghz_is_navigated_state() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let target = QubitPureState::normalized(
        4,
        d(4, 1).amplitudes().iter().zip(d(4, 3).amplitudes()).map(|(a, b)| (a - b) * r).collect(),
    )
    .unwrap();
    assert!((rotated_ghz4().overlap(&target).unwrap() - 1.0).abs() < 1e-12);
    let steps = [NavigationStep::new(0, Outcome::Plus), NavigationStep::new(1, Outcome::Minus)];
    let (projected, p) = navigate(&d(6, 3).to_density(), &steps).unwrap();
    assert!((p - 0.1).abs() < 1e-12);
    assert!((ghz_witness(&projected).unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn ghz_witness_examples() {
    let mixed = QubitDensity::maximally_mixed(4).unwrap();
    assert!((ghz_witness(&mixed).unwrap() - (0.5 - 1.0 / 16.0)).abs() < 1e-12);
    // F = p + (1 - p)/16 = 0.56
    let p = (0.56 - 1.0 / 16.0) / (15.0 / 16.0);
    let noisy = QubitDensity::werner(&rotated_ghz4(), p).unwrap();
    assert!((ghz_witness(&noisy).unwrap() + 0.06).abs() < 1e-12);
    assert!(ghz_witness(&QubitDensity::maximally_mixed(5).unwrap()).is_err());
}

#[test]
fn bipartition_enumeration() {
    assert_eq!(bipartitions(2), vec![vec![0]]);
    assert_eq!(bipartitions(3), vec![vec![0], vec![0, 1], vec![0, 2]]);
    assert_eq!(bipartitions(6).len(), 31);
    assert!(bipartitions(6).iter().all(|a| a[0] == 0 && a.len() < 6));
}

#[test]
fn four_qubit_bound() {
    let est = biseparable_bound(&SpinWitnessSpec::new(4, 0.0).unwrap(), &SeesawOptions::default()).unwrap();
    assert!((est.value - 5.23).abs() < 0.02, "{est:?}");
    assert!(est.converged);
    // the W state reaches 5 and stays below the biseparable maximum
    assert!(5.0 < est.value);
}

#[test]
fn seesaw_is_monotone() {
    let w = witness_operator(&SpinWitnessSpec::new(5, -1.0).unwrap()).unwrap();
    let mut rng = crate::rng::stream_rng(3, 0);
    use rand::Rng as _;
    for side in bipartitions(5) {
        let a = nalgebra::DVector::from_fn(1 << side.len(), |_, _| C64::new(rng.random(), rng.random()));
        let b = nalgebra::DVector::from_fn(1 << (5 - side.len()), |_, _| C64::new(rng.random(), rng.random()));
        let trace = seesaw_run(&w, 5, &side, a, b, &SeesawOptions::default()).unwrap();
        assert!(trace.values.windows(2).all(|v| v[1] >= v[0] - 1e-10), "{:?}", trace.values);
    }
}

#[test]
fn seesaw_rejects_bad_bipartitions() {
    let w = witness_operator(&SpinWitnessSpec::new(3, 0.0).unwrap()).unwrap();
    let v = |n| nalgebra::DVector::from_element(n, C64::new(1.0, 0.0));
    for side in [vec![], vec![0, 1, 2], vec![0, 0], vec![3]] {
        assert!(seesaw_run(&w, 3, &side, v(2), v(4), &SeesawOptions::default()).is_err());
    }
    assert!(biseparable_bound(&SpinWitnessSpec::new(9, 0.0).unwrap(), &quick()).is_err());
    assert!(biseparable_bound(&SpinWitnessSpec::new(4, 0.0).unwrap(), &SeesawOptions { restarts: 0, ..quick() }).is_err());
}

#[test]
fn bound_beats_random_product_probes() {
    use rand::Rng as _;
    let spec = SpinWitnessSpec::new(4, 0.0).unwrap();
    let bound = biseparable_bound(&spec, &SeesawOptions::default()).unwrap().value;
    let mut rng = crate::rng::stream_rng(11, 0);
    let mut normal = || C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal));
    for _ in 0..10_000 {
        let kets: Vec<crate::qstate::Ket1> = (0..4)
            .map(|_| {
                let (a, b) = (normal(), normal());
                let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
                [a / n, b / n]
            })
            .collect();
        let probe = QubitPureState::product(&kets).unwrap();
        assert!(witness_value(&probe, &spec).unwrap() <= bound + 1e-9);
    }
}

#[test]
fn bound_depends_only_on_cut_size() {
    let all = bound_by_bipartition(&SpinWitnessSpec::new(5, 0.0).unwrap(), &quick()).unwrap();
    for size in 1..3 {
        let vals: Vec<f64> = all
            .iter()
            .filter(|b| b.bipartition.len() == size || b.bipartition.len() == 5 - size)
            .map(|b| b.value)
            .collect();
        let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-6, "size {size}: {vals:?}");
    }
}

#[test]
fn bound_curve_shape() {
    let curve = bound_curve(4, &[-3.0, 0.0, 10.0], &quick()).unwrap();
    let ideal = witness_value(&d(4, 2), &SpinWitnessSpec::new(4, 0.0).unwrap()).unwrap();
    let gap = |i: usize| ideal - curve[i].1.value;
    assert!(gap(0) > 0.0);
    assert!(gap(0) > gap(1));
    assert!(curve[2].1.value > curve[1].1.value);
    let product = witness_value(&horizontal(4), &SpinWitnessSpec::new(4, 10.0).unwrap()).unwrap();
    assert!(curve[2].1.value >= product - 1e-9);
    assert!(bound_curve(4, &[], &quick()).is_err());
}

#[test]
fn bound_is_deterministic() {
    let spec = SpinWitnessSpec::new(4, -3.0).unwrap();
    let a = biseparable_bound(&spec, &quick()).unwrap();
    let b = biseparable_bound(&spec, &quick()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_is_affine_in_alpha(seed in any::<u64>(), a1 in -5.0f64..5.0, a2 in -5.0f64..5.0) {
        let rho = random_density(4, seed);
        let jz = collective_spin_sq(&rho, Pauli::Z).unwrap();
        let w1 = witness_value(&rho, &SpinWitnessSpec::new(4, a1).unwrap()).unwrap();
        let w2 = witness_value(&rho, &SpinWitnessSpec::new(4, a2).unwrap()).unwrap();
        prop_assert!((w1 - w2 - (a1 - a2) * jz).abs() < 1e-9);
    }

    #[test]
    fn correlations_are_bounded(seed in any::<u64>()) {
        let rho = random_density(3, seed);
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let c = pairwise_corr_matrix(&rho, axis).unwrap();
            prop_assert!(c.iter().all(|v| v.abs() <= 1.0 + 1e-12));
            prop_assert!((&c - c.transpose()).abs().max() < 1e-15);
        }
    }
}
