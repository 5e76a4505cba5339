//! The oblique manifold OB(n, p): n×p complex matrices with unit-norm columns.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::sampling;

const MEMBERSHIP_TOL: f64 = 1e-12;

/// n×p matrix whose columns all have unit 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliquePoint {
    matrix: ComplexMatrix,
}

impl ObliquePoint {
    /// Wraps `matrix` after checking every column norm.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        for j in 0..matrix.cols() {
            let nrm = matrix.column_norm(j);
            if (nrm - 1.0).abs() > MEMBERSHIP_TOL {
                return Err(Error::InvalidInput(format!("column {} has norm {:.15}", j, nrm)));
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn p(&self) -> usize {
        self.matrix.cols()
    }
}

/// Largest |‖x_j‖ − 1| over columns.
pub fn membership_violation(x: &ComplexMatrix) -> f64 {
    (0..x.cols()).map(|j| (x.column_norm(j) - 1.0).abs()).fold(0.0, f64::max)
}

/// Normalizes each column.
pub fn retract(x: &ComplexMatrix) -> Result<ObliquePoint> {
    let mut out = x.clone();
    for j in 0..x.cols() {
        let nrm = x.column_norm(j);
        if nrm <= 0.0 || !nrm.is_finite() {
            return Err(Error::DegenerateColumn(j));
        }
        // Leave unit columns untouched so retraction is exactly idempotent.
        if nrm != 1.0 {
            for i in 0..x.rows() {
                out[(i, j)] = x[(i, j)] / nrm;
            }
        }
    }
    Ok(ObliquePoint { matrix: out })
}

/// G − X·diag(Re diag(X*G)).
pub fn tangent_project(x: &ObliquePoint, g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let xm = x.matrix();
    if xm.shape() != g.shape() {
        return Err(Error::DimensionMismatch(format!(
            "point is {}x{}, direction is {}x{}",
            xm.rows(),
            xm.cols(),
            g.rows(),
            g.cols()
        )));
    }
    let mut out = g.clone();
    for j in 0..xm.cols() {
        let mut r = 0.0;
        for i in 0..xm.rows() {
            let a = xm[(i, j)];
            let b = g[(i, j)];
            r += a.re * b.re + a.im * b.im;
        }
        for i in 0..xm.rows() {
            out[(i, j)] -= xm[(i, j)] * r;
        }
    }
    Ok(out)
}

/// Independent uniform points on the complex unit sphere, deterministic per seed.
pub fn random_oblique(n: usize, p: usize, seed: u64) -> Result<ObliquePoint> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidInput("n and p must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    loop {
        let g = sampling::gaussian_matrix(n, p, &mut rng);
        if let Ok(x) = retract(&g) {
            return Ok(x);
        }
    }
}

/// ‖X*X − I‖_F.
pub fn orthogonality_error(x: &ComplexMatrix) -> f64 {
    let mut g = x.adjoint_mul(x);
    for i in 0..g.rows() {
        g[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    g.fro_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retract_scales_column() {
        let x = ComplexMatrix::from_real(3, 1, &[3.0, 4.0, 0.0]).unwrap();
        let r = retract(&x).unwrap();
        assert!((r.matrix()[(0, 0)].re - 0.6).abs() < 1e-15);
        assert!((r.matrix()[(1, 0)].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn retract_rejects_zero_column() {
        let x = ComplexMatrix::zeros(2, 2);
        assert_eq!(retract(&x), Err(Error::DegenerateColumn(0)));
    }

    #[test]
    fn radial_direction_projects_to_zero() {
        let x = random_oblique(5, 2, 3).unwrap();
        let p = tangent_project(&x, x.matrix()).unwrap();
        assert!(p.fro_norm() < 1e-15);
    }

    #[test]
    fn tangent_vector_unchanged() {
        let x = ObliquePoint::new(ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap()).unwrap();
        let g = ComplexMatrix::from_real(2, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(tangent_project(&x, &g).unwrap(), g);
    }

    #[test]
    fn scalar_columns_have_unit_modulus() {
        let x = random_oblique(1, 3, 11).unwrap();
        for z in x.matrix().as_slice() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_oblique(4, 2, 9).unwrap(), random_oblique(4, 2, 9).unwrap());
        assert_ne!(random_oblique(4, 2, 9).unwrap(), random_oblique(4, 2, 10).unwrap());
    }

    #[test]
    fn two_columns_with_overlap() {
        let c = 0.3;
        let s = (1.0_f64 - c * c).sqrt();
        let x = ComplexMatrix::from_real(2, 2, &[1.0, c, 0.0, s]).unwrap();
        assert!((orthogonality_error(&x) - 2f64.sqrt() * c).abs() < 1e-15);
    }
}
