//! Helpers shared by unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng as _;

use crate::qstate::QubitDensity;

/// `G G† / Tr(G G†)` for a random complex `G` with uniform entries.
pub(crate) fn random_density(n: usize, seed: u64) -> QubitDensity {
    let mut rng = crate::rng::stream_rng(seed, 0);
    let dim = 1 << n;
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let m = &g * g.adjoint();
    let tr = m.trace();
    QubitDensity::new(n, m / tr).unwrap()
}
