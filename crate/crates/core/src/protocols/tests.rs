use super::*;
use crate::dicke::{binomial, dicke, DickeSpec};
use crate::qstate::{gates, kets, max_abs, Mat2, Pauli, QubitPureState};
use crate::testutil::random_density;
use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

fn d(n: usize, m: usize) -> QubitPureState {
    dicke(DickeSpec::new(n, m).unwrap()).unwrap()
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Reduced pair state summed directly from the amplitudes.
fn brute_pair(psi: &QubitPureState, i: usize, j: usize) -> nalgebra::DMatrix<C64> {
    let n = psi.num_qubits();
    let amp = psi.amplitudes();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mut out = nalgebra::DMatrix::zeros(4, 4);
    for x in 0..amp.len() {
        for y in 0..amp.len() {
            let others_equal = (0..n).filter(|&q| q != i && q != j).all(|q| bit(x, q) == bit(y, q));
            if others_equal {
                out[(2 * bit(x, i) + bit(x, j), 2 * bit(y, i) + bit(y, j))] += amp[x] * amp[y].conj();
            }
        }
    }
    out
}

/// Closed-form fully entangled fraction from the correlation matrix
/// `T_kl = ⟨σ_k ⊗ σ_l⟩`: `(1 + s1 + s2 - sign(det T) s3) / 4`.
fn msf_oracle(rho: &QubitDensity) -> f64 {
    let paulis = [gates::pauli(Pauli::X), gates::pauli(Pauli::Y), gates::pauli(Pauli::Z)];
    let t = nalgebra::Matrix3::from_fn(|k, l| {
        let op = kron(&paulis[k], &paulis[l]);
        let op = nalgebra::DMatrix::from_iterator(4, 4, op.iter().copied());
        rho.expectation_dense(&op).unwrap()
    });
    let mut s = t.svd(false, false).singular_values;
    s.as_mut_slice().sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sign = if t.determinant() > 0.0 { -1.0 } else { 1.0 };
    (1.0 + s[0] + s[1] + sign * s[2]) / 4.0
}

fn random_unitary(seed: u64) -> Mat2 {
    use rand::Rng as _;
    let mut rng = stream_rng(seed, 1);
    let mut a = || rng.random_range(-3.0..3.0);
    zyz(a(), a(), a())
}

#[test]
fn pair_channel_of_d63_is_the_alpha_mixture() {
    let state = d(6, 3);
    let want = alpha_mixture(0.6).unwrap();
    for (i, j) in all_pairs(6) {
        let got = pair_channel(&state, i, j).unwrap();
        assert!(max_abs(&(got.matrix() - want.matrix())) < 1e-12, "({i},{j})");
        assert!(max_abs(&(got.matrix() - brute_pair(&state, i, j))) < 1e-12);
    }
    assert!((alpha_n(6) - 0.6).abs() < 1e-15);
}

#[test]
fn pair_channel_of_d42_and_products() {
    let state = d(4, 2);
    let want = alpha_mixture(2.0 / 3.0).unwrap();
    for (i, j) in all_pairs(4) {
        let got = pair_channel(&state, i, j).unwrap();
        assert!(max_abs(&(got.matrix() - want.matrix())) < 1e-12);
        assert!(max_abs(&(got.matrix() - brute_pair(&state, i, j))) < 1e-12);
    }
    let hhhh = QubitPureState::product(&[kets::H; 4]).unwrap();
    let hh = QubitPureState::product(&[kets::H; 2]).unwrap().to_density();
    assert!(max_abs(&(pair_channel(&hhhh, 1, 3).unwrap().matrix() - hh.matrix())) < 1e-15);
    assert_eq!(pair_channel(&hhhh, 2, 2).unwrap_err(), ProtocolError::Pair(2, 2, 4));
    assert_eq!(pair_channel(&hhhh, 0, 4).unwrap_err(), ProtocolError::Pair(0, 4, 4));
}

#[test]
fn msf_examples() {
    let m = msf(&pair_channel(&d(6, 3), 0, 5).unwrap()).unwrap();
    assert!((m.value - 0.6).abs() < 1e-6, "{m:?}");
    assert!(m.converged);
    assert_eq!(m.restarts, MSF_RESTARTS);

    let singlet = psi_minus();
    let singlet = QubitDensity::new(2, nalgebra::DMatrix::from_iterator(4, 4, (singlet * singlet.adjoint()).iter().copied())).unwrap();
    assert!((msf(&singlet).unwrap().value - 1.0).abs() < 1e-9);
    let mixed = QubitDensity::maximally_mixed(2).unwrap();
    assert!((msf(&mixed).unwrap().value - 0.25).abs() < 1e-12);
    // a product pure state reaches 1/2 once rotated to |HV⟩
    let hh = QubitPureState::product(&[kets::H; 2]).unwrap().to_density();
    assert!((msf(&hh).unwrap().value - 0.5).abs() < 1e-6);
    assert_eq!(msf(&d(4, 2).to_density()).unwrap_err(), ProtocolError::NotTwoQubit(4));
}

#[test]
fn msf_matches_correlation_matrix_oracle() {
    for seed in 0..6 {
        let rho = random_density(2, seed);
        let got = msf(&rho).unwrap().value;
        assert!((got - msf_oracle(&rho).max(0.25)).abs() < 1e-6, "seed {seed}");
    }
    assert!((msf_oracle(&alpha_mixture(0.6).unwrap()) - 0.6).abs() < 1e-12);
}

#[test]
fn msf_is_invariant_under_local_unitaries() {
    for seed in 0..4 {
        let rho = random_density(2, 100 + seed);
        let rotated = rho.apply_local(&[random_unitary(seed), random_unitary(seed + 50)]).unwrap();
        assert!((msf(&rho).unwrap().value - msf(&rotated).unwrap().value).abs() < 1e-6);
    }
}

#[test]
fn teleport_fmax_examples() {
    assert!((teleport_fmax(0.6).unwrap() - 11.0 / 15.0).abs() < 1e-15);
    assert_eq!(teleport_fmax(1.0).unwrap(), 1.0);
    assert_eq!(teleport_fmax(0.25).unwrap(), 0.5);
    assert!((teleport_fmax(0.5).unwrap() - CLASSICAL_FIDELITY).abs() < 1e-15);
    assert_eq!(teleport_fmax(0.2).unwrap_err(), ProtocolError::MsfRange(0.2));
    assert!(teleport_fmax(1.1).is_err());
    let grid: Vec<f64> = (0..=30).map(|k| teleport_fmax(0.25 + 0.025 * k as f64).unwrap()).collect();
    assert!(grid.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn telecloning_of_ideal_d63() {
    let report = telecloning_report(&d(6, 3)).unwrap();
    assert_eq!(report.pairs.len(), 15);
    for p in &report.pairs {
        assert!((p.f_max - 11.0 / 15.0).abs() < 1e-6, "{p:?}");
    }
    assert!((report.ideal_line - 11.0 / 15.0).abs() < 1e-15);
    assert_eq!(report.classical_line, 2.0 / 3.0);
    assert!(report.all_above_classical);
    assert_eq!(report.matrix[2][4], report.matrix[4][2]);
    assert!(report.matrix[3][3].is_none());
}

#[test]
fn telecloning_of_product_sits_at_the_classical_line() {
    let state = QubitPureState::product(&[kets::H; 4]).unwrap();
    let report = telecloning_report(&state).unwrap();
    for p in &report.pairs {
        assert!((p.f_max - 2.0 / 3.0).abs() < 1e-6);
    }
    assert!(!report.all_above_classical);
    let small = d(3, 1);
    assert!(matches!(telecloning_report(&small), Err(ProtocolError::TooFewQubits { .. })));
}

#[test]
fn odt_on_d63() {
    let r = odt(&d(6, 3), (4, 5)).unwrap();
    assert!((r.p_success - 0.6).abs() < 1e-12);
    assert_eq!(r.fidelities.len(), binomial(4, 2) as usize);
    for (pattern, f) in &r.fidelities {
        assert_eq!(pattern.matches('V').count(), 2);
        assert!((f - 1.0).abs() < 1e-12);
    }
    assert!((r.mean_fidelity - 1.0).abs() < 1e-12);
    assert_eq!(r.outcomes.len(), 16);
}

#[test]
fn odt_success_is_alpha_for_every_pair() {
    for n in [4, 6] {
        let state = d(n, n / 2);
        for keep in all_pairs(n) {
            let r = odt(&state, keep).unwrap();
            assert!((r.p_success - alpha_n(n)).abs() < 1e-12);
            // exactly the balanced patterns herald a channel
            for o in &r.outcomes {
                let heralds = o.probability > 1e-12 && o.fidelity > 0.5;
                assert_eq!(heralds, o.success, "{n} {keep:?} {o:?}");
            }
        }
    }
    assert!((odt(&d(4, 2), (0, 2)).unwrap().p_success - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn odt_commutes_with_the_pair_channel() {
    let states = [d(6, 3).to_density(), QubitDensity::werner(&d(4, 2), 0.7).unwrap(), random_density(4, 9)];
    for rho in &states {
        let n = rho.num_qubits();
        let r = odt(rho, (0, n - 1)).unwrap();
        let total: f64 = r.outcomes.iter().map(|o| o.probability * o.fidelity).sum();
        let pair = pair_channel(rho, 0, n - 1).unwrap();
        let p = psi_plus();
        let direct = (p.adjoint() * Matrix4::from_iterator(pair.matrix().iter().copied()) * p)[(0, 0)].re;
        assert!((total - direct).abs() < 1e-12);
        assert!((r.outcomes.iter().map(|o| o.probability).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn odt_errors() {
    assert_eq!(odt(&d(6, 3), (1, 1)).unwrap_err(), ProtocolError::Pair(1, 1, 6));
    assert_eq!(odt(&d(5, 2), (0, 1)).unwrap_err(), ProtocolError::OddRegister(5));
    assert!(matches!(odt(&d(2, 1), (0, 1)), Err(ProtocolError::TooFewQubits { .. })));
}

fn within_sigma(observed: f64, expected: f64, trials: u64, k: f64) -> bool {
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    (observed - expected).abs() <= k * sigma
}

#[test]
fn qss_ideal_has_no_errors() {
    for (n, m) in [(6, 3), (4, 2)] {
        let r = qss_run(&d(n, m), 10_000, 7).unwrap();
        assert_eq!(r.errors, 0);
        assert_eq!(r.qber, 0.0);
        assert!(r.sifted_bits <= r.rounds);
        assert_eq!(r.x.sifted + r.y.sifted, r.sifted_bits);
        assert!(within_sigma(r.sifting_rate, 2f64.powi(1 - n as i32), r.rounds, 3.0), "{r:?}");
    }
}

#[test]
fn qss_werner_qber_is_half_the_noise() {
    for p in [0.5, 0.8] {
        let rho = QubitDensity::werner(&d(6, 3), p).unwrap();
        let r = qss_run(&rho, 200_000, 11).unwrap();
        let expected = (1.0 - p) / 2.0;
        assert!(within_sigma(r.qber, expected, r.sifted_bits, 3.0), "{p}: {r:?}");
    }
}

#[test]
fn qss_is_deterministic_and_validates() {
    let rho = QubitDensity::werner(&d(4, 2), 0.5).unwrap();
    assert_eq!(qss_run(&rho, 9000, 3).unwrap(), qss_run(&rho, 9000, 3).unwrap());
    assert_ne!(qss_run(&rho, 9000, 3).unwrap(), qss_run(&rho, 9000, 4).unwrap());
    assert_eq!(qss_run(&rho, 0, 3).unwrap_err(), ProtocolError::Rounds);
    assert_eq!(qss_run(&d(6, 3), 1, 0).unwrap_err(), ProtocolError::NoSiftedRounds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn msf_dominates_fixed_bell_overlaps(seed in any::<u64>()) {
        let rho = random_density(2, seed);
        let m = msf(&rho).unwrap().value;
        prop_assert!((0.25..=1.0).contains(&m));
        let m4 = Matrix4::from_iterator(rho.matrix().iter().copied());
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        let bells = [
            psi_minus(),
            psi_plus(),
            Vector4::new(s, z, z, s),
            Vector4::new(s, z, z, -s),
        ];
        for b in bells {
            prop_assert!(m >= (b.adjoint() * m4 * b)[(0, 0)].re - 1e-9);
        }
    }
}
