use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{letter_counts, LmsError, PauliDecomposition, COEFF_TOL};
use crate::dicke::{binomial, ghz};
use crate::qstate::{parity_sign, Axis, MeasurementSetting, Pauli, PauliString, Plane};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Greedy set cover of the Pauli strings by Pauli-axis settings.
    Greedy,
    /// All-z plus `N` equatorial settings; GHZ targets only.
    GhzSpecial,
    /// Every qubit measured along the same direction; permutation-symmetric
    /// targets only. Weights per support size come from a least-squares fit.
    Symmetric,
}

impl FromStr for Strategy {
    type Err = LmsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "ghz_special" | "ghz-special" => Ok(Strategy::GhzSpecial),
            "symmetric" => Ok(Strategy::Symmetric),
            other => Err(LmsError::UnknownStrategy(other.to_string())),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Greedy => "greedy",
            Strategy::GhzSpecial => "ghz_special",
            Strategy::Symmetric => "symmetric",
        })
    }
}

/// Pauli string evaluated from a setting by marginalizing its outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub string: PauliString,
    pub setting: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingPlan {
    pub label: String,
    pub strategy: Strategy,
    pub num_qubits: usize,
    pub settings: Vec<MeasurementSetting>,
    /// Filled for Pauli-axis plans; empty otherwise.
    pub coverage: Vec<Coverage>,
    /// Per setting, the score of each of the `2^N` outcomes.
    pub scores: Vec<Vec<f64>>,
    /// Part of the fidelity that needs no measurement.
    pub constant: f64,
}

impl SettingPlan {
    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Fidelity implied by exact outcome distributions, one per setting.
    pub fn evaluate(&self, distributions: &[Vec<f64>]) -> f64 {
        self.constant
            + self
                .scores
                .iter()
                .zip(distributions)
                .map(|(f, p)| f.iter().zip(p).map(|(a, b)| a * b).sum::<f64>())
                .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, LmsError> {
        serde_json::from_str(s).map_err(|e| LmsError::Mismatch(e.to_string()))
    }
}

pub fn plan_settings(decomp: &PauliDecomposition, strategy: Strategy) -> Result<SettingPlan, LmsError> {
    if decomp.is_empty() {
        return Err(LmsError::Empty);
    }
    match strategy {
        Strategy::Greedy => Ok(greedy(decomp)),
        Strategy::GhzSpecial => ghz_special(decomp),
        Strategy::Symmetric => symmetric(decomp),
    }
}

/// Per-letter qubit masks; bit `N-1-q` stands for qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Masks {
    x: u32,
    y: u32,
    z: u32,
}

impl Masks {
    fn of(letters: &[Pauli]) -> Self {
        let n = letters.len();
        let mut m = Masks { x: 0, y: 0, z: 0 };
        for (q, l) in letters.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match l {
                Pauli::X => m.x |= bit,
                Pauli::Y => m.y |= bit,
                Pauli::Z => m.z |= bit,
                Pauli::I => {}
            }
        }
        m
    }

    /// Every non-identity letter of `self` agrees with the full setting `s`.
    fn covered_by(&self, s: &Masks) -> bool {
        self.x & !s.x == 0 && self.y & !s.y == 0 && self.z & !s.z == 0
    }

    fn support(&self) -> usize {
        (self.x | self.y | self.z) as usize
    }
}

/// Axis strings over {x, y, z} in lexicographic order (x < y < z).
fn axis_strings(n: usize) -> Vec<Vec<Pauli>> {
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    (0..3usize.pow(n as u32))
        .map(|mut i| {
            let mut s = vec![Pauli::X; n];
            for q in (0..n).rev() {
                s[q] = letters[i % 3];
                i /= 3;
            }
            s
        })
        .collect()
}

fn greedy(decomp: &PauliDecomposition) -> SettingPlan {
    let n = decomp.num_qubits;
    let terms: Vec<_> = decomp.measured_terms().collect();
    let masks: Vec<Masks> = terms.iter().map(|t| Masks::of(t.string.letters())).collect();
    let candidates = axis_strings(n);
    let cand_masks: Vec<Masks> = candidates.iter().map(|c| Masks::of(c)).collect();
    let mut covering: Vec<Option<usize>> = vec![None; terms.len()];
    let mut remaining = terms.len();
    let mut chosen: Vec<usize> = Vec::new();
    while remaining > 0 {
        let mut best = (0usize, usize::MAX);
        for (ci, cm) in cand_masks.iter().enumerate() {
            let gain = masks
                .iter()
                .zip(&covering)
                .filter(|(m, c)| c.is_none() && m.covered_by(cm))
                .count();
            if gain > best.0 {
                best = (gain, ci);
            }
        }
        let setting = chosen.len();
        for (m, c) in masks.iter().zip(covering.iter_mut()) {
            if c.is_none() && m.covered_by(&cand_masks[best.1]) {
                *c = Some(setting);
                remaining -= 1;
            }
        }
        chosen.push(best.1);
    }
    let dim = 1usize << n;
    let mut scores = vec![vec![0.0; dim]; chosen.len()];
    let mut coverage = Vec::with_capacity(terms.len());
    for ((t, m), c) in terms.iter().zip(&masks).zip(&covering) {
        let s = c.expect("every string is covered");
        for (o, f) in scores[s].iter_mut().enumerate() {
            *f += t.coefficient * parity_sign(o, m.support());
        }
        coverage.push(Coverage { string: t.string.clone(), setting: s });
    }
    let settings = chosen
        .iter()
        .map(|&ci| {
            let axes = candidates[ci]
                .iter()
                .map(|l| match l {
                    Pauli::X => Axis::X,
                    Pauli::Y => Axis::Y,
                    _ => Axis::Z,
                })
                .collect();
            MeasurementSetting::new(axes).expect("Pauli axes are valid")
        })
        .collect();
    SettingPlan {
        label: decomp.label.clone(),
        strategy: Strategy::Greedy,
        num_qubits: n,
        settings,
        coverage,
        scores,
        constant: decomp.identity_coefficient(),
    }
}

/// `|GHZ⟩⟨GHZ| = ½(|0…0⟩⟨0…0| + |1…1⟩⟨1…1|) + (1/2N) Σ_k (-1)^k M_k^{⊗N}` with
/// `M_k = cos(kπ/N) σ_x + sin(kπ/N) σ_y`.
fn ghz_special(decomp: &PauliDecomposition) -> Result<SettingPlan, LmsError> {
    let n = decomp.num_qubits;
    if n < 2 {
        return Err(LmsError::NotGhz(0.0));
    }
    let target = ghz(n).map_err(|_| LmsError::NotGhz(0.0))?;
    let reference = super::decompose(&target, "")?;
    // Tr(P_a P_b) = 2^N Σ_P c_P c'_P = |⟨a|b⟩|²
    let coeffs: BTreeMap<String, f64> =
        decomp.terms.iter().map(|t| (t.string.to_string(), t.coefficient)).collect();
    let overlap = (1u64 << n) as f64
        * reference
            .terms
            .iter()
            .map(|t| t.coefficient * coeffs.get(&t.string.to_string()).copied().unwrap_or(0.0))
            .sum::<f64>();
    if (overlap - 1.0).abs() > 1e-9 {
        return Err(LmsError::NotGhz(overlap));
    }
    let dim = 1usize << n;
    let full = dim - 1;
    let mut settings = vec![MeasurementSetting::uniform(Axis::Z, n)];
    let mut z_scores = vec![0.0; dim];
    z_scores[0] = 0.5;
    z_scores[full] = 0.5;
    let mut scores = vec![z_scores];
    for k in 0..n {
        let angle = k as f64 * PI / n as f64;
        settings.push(MeasurementSetting::uniform(Axis::InPlane { plane: Plane::Xy, angle }, n));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        scores.push((0..dim).map(|o| sign * parity_sign(o, full) / (2.0 * n as f64)).collect());
    }
    Ok(SettingPlan {
        label: decomp.label.clone(),
        strategy: Strategy::GhzSpecial,
        num_qubits: n,
        settings,
        coverage: vec![],
        scores,
        constant: 0.0,
    })
}

/// Coefficient per letter-count class, or an error if the projector is not
/// invariant under qubit permutations.
fn symmetric_coefficients(decomp: &PauliDecomposition) -> Result<BTreeMap<[usize; 3], f64>, LmsError> {
    let n = decomp.num_qubits;
    let mut classes: BTreeMap<[usize; 3], (f64, u64)> = BTreeMap::new();
    for t in &decomp.terms {
        let key = letter_counts(&t.string);
        let e = classes.entry(key).or_insert((t.coefficient, 0));
        if (e.0 - t.coefficient).abs() > 1e-10 {
            return Err(LmsError::NotSymmetric);
        }
        e.1 += 1;
    }
    for (key, (_, count)) in &classes {
        let m = key.iter().sum::<usize>();
        let expected = binomial(n, m) * binomial(m, key[0]) * binomial(m - key[0], key[1]);
        if *count != expected {
            return Err(LmsError::NotSymmetric);
        }
    }
    Ok(classes.into_iter().map(|(k, (c, _))| (k, c)).collect())
}

/// z axis plus `⌈N/2⌉` rings at polar angles `jπ/(2⌈N/2⌉)`, `N+2` azimuths each.
fn direction_pool(n: usize) -> Vec<[f64; 3]> {
    let rings = n.div_ceil(2);
    let per_ring = n + 2;
    let mut pool = vec![[0.0, 0.0, 1.0]];
    for j in 1..=rings {
        let theta = j as f64 * PI / (2 * rings) as f64;
        for k in 0..per_ring {
            let phi = 2.0 * PI * k as f64 / per_ring as f64;
            pool.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
        }
    }
    pool
}

/// Least-squares weights `w[M][s]` with `Σ_s w[M][s] n_s^{(p,q,r)} = c(p,q,r)`
/// for every support size `M`, and the largest residual.
fn fit_weights(
    n: usize,
    coeffs: &BTreeMap<[usize; 3], f64>,
    dirs: &[[f64; 3]],
) -> (Vec<Vec<f64>>, f64) {
    let mut weights = vec![vec![0.0; dirs.len()]; n + 1];
    let mut residual: f64 = 0.0;
    for (m, w_m) in weights.iter_mut().enumerate().skip(1) {
        let keys: Vec<[usize; 3]> = (0..=m)
            .flat_map(|p| (0..=m - p).map(move |q| [p, q, m - p - q]))
            .collect();
        let a = DMatrix::from_fn(keys.len(), dirs.len(), |r, s| {
            let [p, q, z] = keys[r];
            let d = dirs[s];
            d[0].powi(p as i32) * d[1].powi(q as i32) * d[2].powi(z as i32)
        });
        let b = DVector::from_iterator(keys.len(), keys.iter().map(|k| coeffs.get(k).copied().unwrap_or(0.0)));
        let svd = a.clone().svd(true, true);
        let w = svd.solve(&b, 1e-12).expect("SVD has both factors");
        residual = residual.max((&a * &w - &b).amax());
        w_m.copy_from_slice(w.as_slice());
    }
    (weights, residual)
}

/// `e_M(±1, …)` for an outcome with `v` results equal to −1 among `n`.
fn elementary_symmetric(n: usize, v: usize, m: usize) -> f64 {
    (0..=m.min(v))
        .filter(|&j| m - j <= n - v)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * binomial(v, j) as f64 * binomial(n - v, m - j) as f64
        })
        .sum()
}

const SYMMETRIC_TOL: f64 = 1e-10;

fn symmetric(decomp: &PauliDecomposition) -> Result<SettingPlan, LmsError> {
    let n = decomp.num_qubits;
    let coeffs = symmetric_coefficients(decomp)?;
    let pool = direction_pool(n);
    let (_, r0) = fit_weights(n, &coeffs, &pool);
    if r0 > SYMMETRIC_TOL {
        return Err(LmsError::NoSymmetricSolution(r0));
    }
    // drop directions from the back while the fit stays exact
    let mut keep: Vec<usize> = (0..pool.len()).collect();
    for i in (0..pool.len()).rev() {
        let trial: Vec<usize> = keep.iter().copied().filter(|&j| j != i).collect();
        let dirs: Vec<[f64; 3]> = trial.iter().map(|&j| pool[j]).collect();
        if !dirs.is_empty() && fit_weights(n, &coeffs, &dirs).1 <= SYMMETRIC_TOL {
            keep = trial;
        }
    }
    let dirs: Vec<[f64; 3]> = keep.iter().map(|&j| pool[j]).collect();
    let (weights, _) = fit_weights(n, &coeffs, &dirs);
    let dim = 1usize << n;
    let scores = (0..dirs.len())
        .map(|s| {
            (0..dim)
                .map(|o| {
                    let v = o.count_ones() as usize;
                    (1..=n).map(|m| weights[m][s] * elementary_symmetric(n, v, m)).sum()
                })
                .collect()
        })
        .collect();
    let settings = dirs
        .iter()
        .map(|d| {
            let axis = if d[0].abs() < COEFF_TOL && d[1].abs() < COEFF_TOL {
                Axis::Z
            } else {
                Axis::Direction { x: d[0], y: d[1], z: d[2] }
            };
            MeasurementSetting::uniform(axis, n)
        })
        .collect();
    Ok(SettingPlan {
        label: decomp.label.clone(),
        strategy: Strategy::Symmetric,
        num_qubits: n,
        settings,
        coverage: vec![],
        scores,
        constant: decomp.identity_coefficient(),
    })
}
