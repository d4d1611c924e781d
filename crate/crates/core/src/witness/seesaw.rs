//! See-saw maximization of `⟨W(α)⟩` over states that are product across a
//! bipartition `A|B`.
//!
//! `W` is linear in ρ, so its maximum over biseparable states is attained on
//! a pure product `|ψ_A⟩|ψ_B⟩` for some bipartition. With `ψ_B` fixed the best
//! `ψ_A` is the top eigenvector of `⟨ψ_B|W|ψ_B⟩`, and vice versa. Each half-step
//! can only increase the objective. The search is multi-start, so the result
//! is a numerical estimate of the maximum, not a certified bound.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{witness_operator, SpinWitnessSpec, WitnessError};
use crate::rng::stream_rng;

pub const MAX_BOUND_QUBITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once a full iteration gains less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 50, max_iter: 500, tol: 1e-10, seed: 0 }
    }
}

impl SeesawOptions {
    fn validate(&self) -> Result<(), WitnessError> {
        if self.restarts == 0 {
            return Err(WitnessError::Options("restarts must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(WitnessError::Options("max_iter must be positive".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(WitnessError::Options(format!("tolerance {} is negative", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub value: f64,
    /// Qubits on side `A`; the rest form side `B`.
    pub bipartition: Vec<usize>,
    pub restarts: usize,
    /// Iterations used by the best run.
    pub iterations: usize,
    /// Whether the best run met the tolerance before `max_iter`.
    pub converged: bool,
}

/// Objective after the initial product state and after every half-step.
#[derive(Clone, Debug, PartialEq)]
pub struct SeesawTrace {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub psi_a: DVector<C64>,
    pub psi_b: DVector<C64>,
}

impl SeesawTrace {
    pub fn value(&self) -> f64 {
        *self.values.last().expect("trace has the initial value")
    }
}

/// Every proper bipartition once: side `A` always contains qubit 0.
pub fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return vec![];
    }
    (0..(1usize << (n - 1)) - 1)
        .map(|mask| {
            std::iter::once(0)
                .chain((1..n).filter(|q| mask >> (q - 1) & 1 == 1))
                .collect()
        })
        .collect()
}

/// Index into the full register for local indices `a` (side A) and `b` (side B).
struct Split {
    dim_a: usize,
    dim_b: usize,
    index: Vec<usize>,
}

impl Split {
    fn new(n: usize, side_a: &[usize]) -> Self {
        let side_b: Vec<usize> = (0..n).filter(|q| !side_a.contains(q)).collect();
        let (dim_a, dim_b) = (1 << side_a.len(), 1 << side_b.len());
        let place = |local: usize, qubits: &[usize]| -> usize {
            qubits
                .iter()
                .enumerate()
                .map(|(i, &q)| ((local >> (qubits.len() - 1 - i)) & 1) << (n - 1 - q))
                .sum()
        };
        let mut index = vec![0; dim_a * dim_b];
        for a in 0..dim_a {
            for b in 0..dim_b {
                index[a * dim_b + b] = place(a, side_a) | place(b, &side_b);
            }
        }
        Self { dim_a, dim_b, index }
    }

    fn at(&self, a: usize, b: usize) -> usize {
        self.index[a * self.dim_b + b]
    }

    /// `⟨ψ_B|W|ψ_B⟩` on side A.
    fn reduce_b(&self, w: &DMatrix<C64>, psi_b: &DVector<C64>) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim_a, self.dim_a, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..self.dim_b {
                let cb = psi_b[b].conj();
                for c in 0..self.dim_b {
                    s += cb * w[(self.at(i, b), self.at(j, c))] * psi_b[c];
                }
            }
            s
        })
    }

    /// `⟨ψ_A|W|ψ_A⟩` on side B.
    fn reduce_a(&self, w: &DMatrix<C64>, psi_a: &DVector<C64>) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim_b, self.dim_b, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..self.dim_a {
                let ca = psi_a[a].conj();
                for c in 0..self.dim_a {
                    s += ca * w[(self.at(a, i), self.at(c, j))] * psi_a[c];
                }
            }
            s
        })
    }

    fn product_value(&self, w: &DMatrix<C64>, psi_a: &DVector<C64>, psi_b: &DVector<C64>) -> f64 {
        (psi_a.adjoint() * self.reduce_b(w, psi_b) * psi_a)[(0, 0)].re
    }
}

/// Top eigenpair of a Hermitian matrix. Among numerically degenerate top
/// eigenvectors the one with the lexicographically largest profile of
/// absolute amplitudes wins; its first non-negligible amplitude is made real
/// and positive.
fn top_eigen(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-10 * top.abs().max(1.0);
    let mut best: Option<DVector<C64>> = None;
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev < top - tie {
            continue;
        }
        let v = eig.eigenvectors.column(k).into_owned();
        let better = match &best {
            None => true,
            Some(b) => {
                let ord = v
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.norm().total_cmp(&y.norm()))
                    .find(|o| o.is_ne());
                ord == Some(std::cmp::Ordering::Greater)
            }
        };
        if better {
            best = Some(v);
        }
    }
    let mut v = best.expect("nonempty spectrum");
    if let Some(lead) = v.iter().find(|a| a.norm() > 1e-12).copied() {
        let phase = lead.conj() / lead.norm();
        v *= phase;
    }
    (top, v)
}

/// One see-saw run from the product state `psi_a ⊗ psi_b`.
pub fn seesaw_run(
    w: &DMatrix<C64>,
    n: usize,
    side_a: &[usize],
    psi_a: DVector<C64>,
    psi_b: DVector<C64>,
    opts: &SeesawOptions,
) -> Result<SeesawTrace, WitnessError> {
    validate_side(n, side_a)?;
    let split = Split::new(n, side_a);
    if w.nrows() != 1 << n || psi_a.len() != split.dim_a || psi_b.len() != split.dim_b {
        return Err(WitnessError::Options("dimension mismatch".into()));
    }
    let (mut psi_a, mut psi_b) = (psi_a.normalize(), psi_b.normalize());
    let mut values = vec![split.product_value(w, &psi_a, &psi_b)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let before = *values.last().expect("initial value");
        let (va, a) = top_eigen(&split.reduce_b(w, &psi_b));
        psi_a = a;
        values.push(va);
        let (vb, b) = top_eigen(&split.reduce_a(w, &psi_a));
        psi_b = b;
        values.push(vb);
        if vb - before < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(SeesawTrace { values, iterations, converged, psi_a, psi_b })
}

fn validate_side(n: usize, side_a: &[usize]) -> Result<(), WitnessError> {
    let mut sorted = side_a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if side_a.is_empty() || side_a.len() >= n || sorted.len() != side_a.len() || sorted.iter().any(|&q| q >= n) {
        return Err(WitnessError::Bipartition(side_a.to_vec()));
    }
    Ok(())
}

fn random_ket(rng: &mut crate::rng::Rng, dim: usize) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .normalize()
}

fn check_size(n: usize) -> Result<(), WitnessError> {
    if !(2..=MAX_BOUND_QUBITS).contains(&n) {
        return Err(WitnessError::BoundSize { got: n, max: MAX_BOUND_QUBITS });
    }
    Ok(())
}

/// Best see-saw value for each bipartition, in [`bipartitions`] order.
pub fn bound_by_bipartition(
    spec: &SpinWitnessSpec,
    opts: &SeesawOptions,
) -> Result<Vec<BoundEstimate>, WitnessError> {
    check_size(spec.n)?;
    opts.validate()?;
    let w = witness_operator(spec)?;
    let parts = bipartitions(spec.n);
    let tasks: Vec<(usize, usize)> =
        (0..parts.len()).flat_map(|p| (0..opts.restarts).map(move |r| (p, r))).collect();
    let runs = tasks
        .par_iter()
        .map(|&(p, r)| {
            let side_a = &parts[p];
            let mut rng = stream_rng(opts.seed, (p * opts.restarts + r) as u64);
            let psi_a = random_ket(&mut rng, 1 << side_a.len());
            let psi_b = random_ket(&mut rng, 1 << (spec.n - side_a.len()));
            seesaw_run(&w, spec.n, side_a, psi_a, psi_b, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<BoundEstimate> = Vec::with_capacity(parts.len());
    for (p, side_a) in parts.iter().enumerate() {
        let chunk = &runs[p * opts.restarts..(p + 1) * opts.restarts];
        let mut best = &chunk[0];
        for run in &chunk[1..] {
            if run.value() > best.value() {
                best = run;
            }
        }
        out.push(BoundEstimate {
            value: best.value(),
            bipartition: side_a.clone(),
            restarts: opts.restarts,
            iterations: best.iterations,
            converged: best.converged,
        });
    }
    Ok(out)
}

/// Maximum of `⟨W(α)⟩` over biseparable states (numerical estimate).
pub fn biseparable_bound(spec: &SpinWitnessSpec, opts: &SeesawOptions) -> Result<BoundEstimate, WitnessError> {
    let all = bound_by_bipartition(spec, opts)?;
    let mut best = all[0].clone();
    for b in &all[1..] {
        if b.value > best.value {
            best = b.clone();
        }
    }
    Ok(best)
}

/// `biseparable_bound` at every α of the grid.
pub fn bound_curve(
    n: usize,
    alphas: &[f64],
    opts: &SeesawOptions,
) -> Result<Vec<(f64, BoundEstimate)>, WitnessError> {
    if alphas.is_empty() {
        return Err(WitnessError::EmptyGrid);
    }
    alphas
        .iter()
        .map(|&alpha| Ok((alpha, biseparable_bound(&SpinWitnessSpec::new(n, alpha)?, opts)?)))
        .collect()
}
