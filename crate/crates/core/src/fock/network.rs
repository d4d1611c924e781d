use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{FockError, SPATIAL_MODES};

/// Linear-optical network acting on the six spatial modes. The same matrix
/// transforms `H` and `V` creation operators: `a†_k → Σ_j U[j,k] b†_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkUnitary {
    matrix: DMatrix<C64>,
}

impl NetworkUnitary {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, FockError> {
        if matrix.nrows() != SPATIAL_MODES || matrix.ncols() != SPATIAL_MODES {
            return Err(FockError::NetworkShape(matrix.nrows(), matrix.ncols()));
        }
        let dev = (matrix.adjoint() * &matrix - DMatrix::identity(SPATIAL_MODES, SPATIAL_MODES))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(FockError::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: DMatrix::identity(SPATIAL_MODES, SPATIAL_MODES) }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// Source photons enter spatial mode 0, pass a real 1-to-3 coupler (ports
/// 0,1,2; first column `1/√3`) and then three 50:50 beamsplitters that each
/// mix one coupler port with an empty port (3,4,5). Beamsplitter `i` feeds
/// the detected modes `2i` and `2i+1`, so the first column of the resulting
/// unitary has every entry equal to `1/√6`.
pub fn splitter_network() -> NetworkUnitary {
    let r = |x: f64| C64::new(x, 0.0);
    let s3 = 1.0 / 3f64.sqrt();
    let s2 = 1.0 / 2f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let mut coupler = DMatrix::<C64>::identity(SPATIAL_MODES, SPATIAL_MODES);
    let helmert = [[s3, s2, s6], [s3, -s2, s6], [s3, 0.0, -2.0 * s6]];
    for (i, row) in helmert.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            coupler[(i, j)] = r(v);
        }
    }
    let mut splitters = DMatrix::<C64>::zeros(SPATIAL_MODES, SPATIAL_MODES);
    for i in 0..3 {
        let (port, vacuum) = (i, 3 + i);
        let (out_a, out_b) = (2 * i, 2 * i + 1);
        splitters[(out_a, port)] = r(s2);
        splitters[(out_a, vacuum)] = r(s2);
        splitters[(out_b, port)] = r(s2);
        splitters[(out_b, vacuum)] = r(-s2);
    }
    NetworkUnitary::new(splitters * coupler).expect("coupler and splitters are unitary")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_column_is_balanced() {
        let u = splitter_network();
        for k in 0..SPATIAL_MODES {
            assert!((u.matrix()[(k, 0)].norm() - 1.0 / 6f64.sqrt()).abs() < 1e-15);
            // single photon in the source mode exits each port with probability 1/6
            assert!((u.matrix()[(k, 0)].norm_sqr() - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn is_unitary() {
        let u = splitter_network();
        let dev = (u.matrix().adjoint() * u.matrix() - DMatrix::identity(6, 6))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(NetworkUnitary::new(DMatrix::identity(5, 5)).is_err());
        let mut m = DMatrix::<C64>::identity(6, 6);
        m[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(NetworkUnitary::new(m), Err(FockError::NotUnitary(_))));
    }
}
