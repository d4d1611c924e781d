//! Dicke, W and GHZ registers and navigation through the Dicke class by
//! single-photon measurements.
//!
//! An excitation is a photon in `|V⟩`: `dicke(N, m)` is the equal-weight
//! superposition of all `N`-bit strings with exactly `m` ones. All amplitudes
//! are real and nonnegative.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{kets, Ket1, QStateError, QuantumState, QubitPureState, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DickeError {
    #[error("invalid Dicke parameters N={n}, m={m}")]
    InvalidSpec { n: usize, m: usize },
    #[error("GHZ state needs at least two qubits, got {0}")]
    GhzSize(usize),
    #[error("navigation measures qubit {0} twice")]
    RepeatedQubit(usize),
    #[error(transparent)]
    State(#[from] QStateError),
}

/// `n!/(k!(n-k)!)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DickeSpec {
    pub n: usize,
    pub m: usize,
}

impl DickeSpec {
    pub fn new(n: usize, m: usize) -> Result<Self, DickeError> {
        if n == 0 || n > MAX_QUBITS || m > n {
            return Err(DickeError::InvalidSpec { n, m });
        }
        Ok(Self { n, m })
    }
}

/// `|D_N^{(m)}⟩`.
pub fn dicke(spec: DickeSpec) -> Result<QubitPureState, DickeError> {
    let DickeSpec { n, m } = DickeSpec::new(spec.n, spec.m)?;
    let amp = C64::new(1.0 / (binomial(n, m) as f64).sqrt(), 0.0);
    let amplitudes = (0..1usize << n)
        .map(|idx| if idx.count_ones() as usize == m { amp } else { C64::new(0.0, 0.0) })
        .collect();
    Ok(QubitPureState::new(n, amplitudes)?)
}

/// Single-excitation W state `|D_N^{(1)}⟩`.
pub fn w_state(n: usize) -> Result<QubitPureState, DickeError> {
    dicke(DickeSpec::new(n, 1)?)
}

/// `(|H⟩^⊗N + |V⟩^⊗N)/√2`.
pub fn ghz(n: usize) -> Result<QubitPureState, DickeError> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(DickeError::GhzSize(n));
    }
    let dim = 1usize << n;
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
    amplitudes[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[dim - 1] = amplitudes[0];
    Ok(QubitPureState::new(n, amplitudes)?)
}

/// `|a⟩ ⊗ |rest⟩` with `a` as the new qubit 0.
fn prepend(a: Ket1, rest: &QubitPureState) -> Vec<C64> {
    a.iter()
        .flat_map(|&c| rest.amplitudes().iter().map(move |&r| c * r))
        .collect()
}

/// Norm of `|D_N^{(m)}⟩` minus its one-photon expansion
/// `C(N,m)^{-1/2} [√C(N-1,m) |H⟩|D_{N-1}^{(m)}⟩ + √C(N-1,m-1) |V⟩|D_{N-1}^{(m-1)}⟩]`.
pub fn recursion_residual(spec: DickeSpec) -> Result<f64, DickeError> {
    let DickeSpec { n, m } = DickeSpec::new(spec.n, spec.m)?;
    if n < 2 || m == 0 || m >= n {
        return Err(DickeError::InvalidSpec { n, m });
    }
    let lhs = dicke(spec)?;
    let scale = 1.0 / (binomial(n, m) as f64).sqrt();
    let h_weight = C64::new(scale * (binomial(n - 1, m) as f64).sqrt(), 0.0);
    let v_weight = C64::new(scale * (binomial(n - 1, m - 1) as f64).sqrt(), 0.0);
    let h_branch = prepend(kets::H, &dicke(DickeSpec::new(n - 1, m)?)?);
    let v_branch = prepend(kets::V, &dicke(DickeSpec::new(n - 1, m - 1)?)?);
    let residual = lhs
        .amplitudes()
        .iter()
        .zip(h_branch.iter().zip(&v_branch))
        .map(|(&l, (&h, &v))| (l - h_weight * h - v_weight * v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    H,
    V,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub fn ket(self) -> Ket1 {
        match self {
            Outcome::H => kets::H,
            Outcome::V => kets::V,
            Outcome::Plus => kets::PLUS,
            Outcome::Minus => kets::MINUS,
        }
    }
}

/// One heralding measurement; `qubit` indexes the register before any step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigationStep {
    pub qubit: usize,
    pub outcome: Outcome,
}

impl NavigationStep {
    pub fn new(qubit: usize, outcome: Outcome) -> Self {
        Self { qubit, outcome }
    }
}

/// Measures the listed qubits in order and returns the normalized remainder
/// (surviving qubits keep their original relative order) with the joint
/// probability of the outcomes.
pub fn navigate<S: QuantumState>(
    state: &S,
    steps: &[NavigationStep],
) -> Result<(S, f64), DickeError> {
    let mut measured: Vec<usize> = Vec::with_capacity(steps.len());
    let mut current: Option<S> = None;
    let mut prob = 1.0;
    for step in steps {
        if measured.contains(&step.qubit) {
            return Err(DickeError::RepeatedQubit(step.qubit));
        }
        let shift = measured.iter().filter(|&&q| q < step.qubit).count();
        let src = current.as_ref().unwrap_or(state);
        if step.qubit >= state.num_qubits() {
            return Err(QStateError::QubitIndex { index: step.qubit, n: state.num_qubits() }.into());
        }
        let (post, p) = src.project(step.qubit - shift, &step.outcome.ket())?;
        prob *= p;
        measured.push(step.qubit);
        current = Some(post);
    }
    match current {
        Some(s) => Ok((s, prob)),
        None => Err(QStateError::Selection("no navigation steps".into()).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{gates, Pauli};

    fn d(n: usize, m: usize) -> QubitPureState {
        dicke(DickeSpec::new(n, m).unwrap()).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(10, 5), 252);
    }

    #[test]
    fn d63_has_twenty_equal_amplitudes() {
        let s = d(6, 3);
        let nz: Vec<_> = s.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 20);
        for a in nz {
            assert!((a.re - 1.0 / 20f64.sqrt()).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn zero_excitations_is_all_h() {
        for n in 1..=6 {
            assert_eq!(d(n, 0), QubitPureState::basis(n, 0).unwrap());
        }
    }

    #[test]
    fn w4_has_four_halves() {
        let s = w_state(4).unwrap();
        let idx: Vec<usize> = (0..16).filter(|&i| s.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(idx, vec![1, 2, 4, 8]);
        assert!(idx.iter().all(|&i| (s.amplitudes()[i].re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn invalid_specs() {
        assert!(DickeSpec::new(4, 5).is_err());
        assert!(DickeSpec::new(11, 2).is_err());
        assert!(DickeSpec::new(0, 0).is_err());
        assert!(recursion_residual(DickeSpec::new(4, 0).unwrap()).is_err());
        assert!(recursion_residual(DickeSpec::new(4, 4).unwrap()).is_err());
        assert!(ghz(1).is_err());
    }

    #[test]
    fn ghz_states() {
        let g = ghz(4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((g.amplitudes()[15].re - r).abs() < 1e-15);
        assert_eq!(g.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 2);
        let bell = ghz(2).unwrap();
        let expect = QubitPureState::normalized(
            2,
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        )
        .unwrap();
        assert!((bell.overlap(&expect).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ghz4_dicke42_overlap_matches_brute_force() {
        // brute force: Σ_j conj(g_j) d_j over explicitly enumerated strings
        let g = ghz(4).unwrap();
        let dk = d(4, 2);
        let brute: f64 = (0..16)
            .map(|j: usize| {
                let gj = if j == 0 || j == 15 { 0.5f64.sqrt() } else { 0.0 };
                let dj = if j.count_ones() == 2 { 1.0 / 6f64.sqrt() } else { 0.0 };
                gj * dj
            })
            .sum::<f64>()
            .powi(2);
        assert_eq!(brute, 0.0);
        assert!((g.overlap(&dk).unwrap() - brute).abs() < 1e-15);
    }

    #[test]
    fn recursion_examples() {
        for (n, m) in [(6, 3), (5, 2), (2, 1)] {
            assert!(recursion_residual(DickeSpec::new(n, m).unwrap()).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn recursion_holds_up_to_eight() {
        for n in 2..=8 {
            for m in 1..n {
                let r = recursion_residual(DickeSpec::new(n, m).unwrap()).unwrap();
                assert!(r <= 1e-12, "N={n} m={m}: {r}");
            }
        }
    }

    #[test]
    fn sigma_x_flips_excitations() {
        for n in 1..=7 {
            for m in 0..=n {
                let flipped = d(n, m).apply_local(&vec![gates::pauli(Pauli::X); n]).unwrap();
                assert_eq!(flipped, d(n, n - m));
            }
        }
    }

    #[test]
    fn navigation_exhaustive() {
        for n in 2..=8 {
            for m in 0..=n {
                let s = d(n, m);
                let c = binomial(n, m) as f64;
                for q in 0..n {
                    let h = navigate(&s, &[NavigationStep::new(q, Outcome::H)]);
                    if m < n {
                        let (post, p) = h.unwrap();
                        assert_eq!(post.num_qubits(), n - 1);
                        assert!((post.overlap(&d(n - 1, m)).unwrap() - 1.0).abs() < 1e-12);
                        assert!((p - binomial(n - 1, m) as f64 / c).abs() < 1e-12);
                    } else {
                        assert!(matches!(h, Err(DickeError::State(QStateError::ImpossibleOutcome(_)))));
                    }
                    let v = navigate(&s, &[NavigationStep::new(q, Outcome::V)]);
                    if m > 0 {
                        let (post, p) = v.unwrap();
                        assert!((post.overlap(&d(n - 1, m - 1)).unwrap() - 1.0).abs() < 1e-12);
                        assert!((p - binomial(n - 1, m - 1) as f64 / c).abs() < 1e-12);
                    } else {
                        assert!(v.is_err());
                    }
                }
            }
        }
    }

    #[test]
    fn navigate_two_photons() {
        let s = d(6, 3);
        let (post, p) = navigate(
            &s,
            &[NavigationStep::new(0, Outcome::H), NavigationStep::new(1, Outcome::V)],
        )
        .unwrap();
        assert!((post.overlap(&d(4, 2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((p - 0.3).abs() < 1e-12);

        // two H outcomes leave three excitations among four photons,
        // i.e. the W state up to σ_x on every photon
        let (post, p) = navigate(
            &s,
            &[NavigationStep::new(0, Outcome::H), NavigationStep::new(1, Outcome::H)],
        )
        .unwrap();
        assert!((post.overlap(&d(4, 3)).unwrap() - 1.0).abs() < 1e-12);
        let w_like = post.apply_local(&vec![gates::pauli(Pauli::X); 4]).unwrap();
        assert!((w_like.overlap(&w_state(4).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((p - 0.2).abs() < 1e-12);
    }

    #[test]
    fn navigate_plus_minus_gives_odd_superposition() {
        let s = d(6, 3);
        let (post, p) = navigate(
            &s,
            &[NavigationStep::new(0, Outcome::Plus), NavigationStep::new(1, Outcome::Minus)],
        )
        .unwrap();
        let target = QubitPureState::normalized(
            4,
            d(4, 1).amplitudes().iter().zip(d(4, 3).amplitudes()).map(|(a, b)| a - b).collect(),
        )
        .unwrap();
        assert!((post.overlap(&target).unwrap() - 1.0).abs() < 1e-12);
        assert!((p - 0.1).abs() < 1e-12);
    }

    #[test]
    fn navigation_reindexes_by_original_position() {
        // measuring qubit 3 then qubit 1 of |HVVHVH⟩ leaves |H V V H⟩ from qubits 0,2,4,5
        let idx = 0b011010;
        let s = QubitPureState::basis(6, idx).unwrap();
        let (post, p) = navigate(
            &s,
            &[NavigationStep::new(3, Outcome::H), NavigationStep::new(1, Outcome::V)],
        )
        .unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(post, QubitPureState::basis(4, 0b0110).unwrap());
        assert!(matches!(
            navigate(&s, &[NavigationStep::new(1, Outcome::V), NavigationStep::new(1, Outcome::V)]),
            Err(DickeError::RepeatedQubit(1))
        ));
    }

    #[test]
    fn navigate_density_matches_pure() {
        let s = d(6, 3);
        let steps = [NavigationStep::new(2, Outcome::Minus), NavigationStep::new(4, Outcome::H)];
        let (pure, p1) = navigate(&s, &steps).unwrap();
        let (mixed, p2) = navigate(&s.to_density(), &steps).unwrap();
        assert!((p1 - p2).abs() < 1e-12);
        assert!((mixed.fidelity(&pure).unwrap() - 1.0).abs() < 1e-12);
    }
}
