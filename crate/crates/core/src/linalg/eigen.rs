use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Inputs further than this from Hermitian (relative) are rejected before symmetrizing.
const HERMITIAN_INPUT_TOL: f64 = 1e-8;
/// `generalized_eigh` refuses metrics with λ_min(C) below this fraction of λ_max(C).
pub const METRIC_CONDITION_FLOOR: f64 = 1e-10;

/// Dense Hermitian matrix, symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidInput("non-finite operator entry".into()));
        }
        let norm = matrix.fro_norm();
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_INPUT_TOL * norm.max(1e-300) && defect > 0.0 {
            return Err(Error::NotHermitian(defect / norm.max(1e-300)));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diag_real(d),
        }
    }

    /// Q·diag(d)·Q* for a unitary Q.
    pub fn from_spectrum(q: &ComplexMatrix, d: &[f64]) -> Result<Self> {
        Self::new(q.scale_columns(d).matmul(&q.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn fro_norm(&self) -> f64 {
        self.matrix.fro_norm()
    }

    /// Spectral norm via the eigendecomposition.
    pub fn spectral_norm(&self) -> f64 {
        let e = eigh(self);
        e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.matmul(x)
    }

    /// Largest Gershgorin row bound, an upper bound on λ_max.
    pub fn gershgorin_upper(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| self.matrix[(i, j)].norm()).sum();
                self.matrix[(i, i)].re + off
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// A − c·I.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= Complex64::new(c, 0.0);
        }
        Self { matrix: m }
    }

    /// Shift by g + 1 where g is the Gershgorin bound, making the operator negative definite.
    /// Returns the shifted operator and the shift to add back to eigenvalues.
    pub fn negative_definite_shift(&self) -> (Self, f64) {
        let c = self.gershgorin_upper() + 1.0;
        (self.shifted(c), c)
    }

    pub fn is_negative_definite(&self) -> bool {
        eigh(self).values.last().map(|&v| v < 0.0).unwrap_or(true)
    }
}

/// Ascending eigenvalues and the matching unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn lowest(&self, p: usize) -> (Vec<f64>, ComplexMatrix) {
        (self.values[..p].to_vec(), self.vectors.columns(0, p))
    }
}

/// Complex Jacobi rotation zeroing the (p, q) entry of a Hermitian 2×2 block
/// [[app, b], [conj b, aqq]]. Returns (c, s·e^{iφ}) for J with
/// J_pp = J_qq = c, J_pq = s·e^{iφ}, J_qp = −s·e^{−iφ}.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, b: Complex64) -> Option<(f64, Complex64)> {
    let nb = b.norm();
    if nb == 0.0 {
        return None;
    }
    let phase = b / nb;
    let theta = (aqq - app) / (2.0 * nb);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    Some((c, phase * (t * c)))
}

/// Columns p, q of `m` ← columns p, q of `m·J`.
pub(crate) fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, se: Complex64) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * c - mq * se.conj();
        m[(k, q)] = mp * se + mq * c;
    }
}

/// Rows p, q of `m` ← rows p, q of `J*·m`.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, se: Complex64) {
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = mp * c - mq * se;
        m[(q, k)] = mp * se.conj() + mq * c;
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn eigh(a: &HermitianOperator) -> EigenDecomposition {
    eigh_matrix(a.matrix())
}

/// Same as [`eigh`] for a raw matrix that is already Hermitian.
pub(crate) fn eigh_matrix(a: &ComplexMatrix) -> EigenDecomposition {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.fro_norm();
    if n > 1 && scale > 0.0 {
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let b = m[(p, q)];
                    if b.norm() <= 1e-300 {
                        continue;
                    }
                    if let Some((c, se)) = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, b) {
                        rotate_columns(&mut m, p, q, c, se);
                        rotate_rows(&mut m, p, q, c, se);
                        m[(p, q)] = Complex64::new(0.0, 0.0);
                        m[(q, p)] = Complex64::new(0.0, 0.0);
                        m[(p, p)].im = 0.0;
                        m[(q, q)].im = 0.0;
                        rotate_columns(&mut v, p, q, c, se);
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    EigenDecomposition { values, vectors }
}

/// Checks that `m` is square, Hermitian to working precision and finite.
fn hermitian_input(m: &ComplexMatrix, what: &str) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{} must be square", what)));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput(format!("{} has non-finite entries", what)));
    }
    let n = m.fro_norm();
    if m.hermitian_defect() > HERMITIAN_INPUT_TOL * n.max(1e-300) {
        return Err(Error::NotHermitian(m.hermitian_defect() / n.max(1e-300)));
    }
    Ok(m.hermitian_part())
}

/// Lower-triangular L with C = L·L*.
fn cholesky(c: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = c.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = c[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = c[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves L·Y = B for lower-triangular L.
fn forward_solve(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut y = b.clone();
    for col in 0..b.cols() {
        for i in 0..n {
            let mut s = y[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * y[(k, col)];
            }
            y[(i, col)] = s / l[(i, i)];
        }
    }
    y
}

/// Solves L*·Y = B for lower-triangular L.
fn backward_solve_adjoint(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut y = b.clone();
    for col in 0..b.cols() {
        for i in (0..n).rev() {
            let mut s = y[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * y[(k, col)];
            }
            y[(i, col)] = s / l[(i, i)].conj();
        }
    }
    y
}

/// Solves B·R = C·R·diag(values) with C positive definite; R is C-orthonormal.
pub fn generalized_eigh(b: &ComplexMatrix, c: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let b = hermitian_input(b, "B")?;
    let c = hermitian_input(c, "C")?;
    if b.rows() != c.rows() {
        return Err(Error::DimensionMismatch("B and C differ in size".into()));
    }
    let ce = eigh_matrix(&c);
    let lo = ce.values.first().copied().unwrap_or(1.0);
    let hi = ce.values.last().copied().unwrap_or(1.0);
    if hi <= 0.0 || lo < METRIC_CONDITION_FLOOR * hi {
        return Err(Error::IllConditionedMetric(if hi > 0.0 { lo / hi } else { lo }));
    }
    let l = cholesky(&c).ok_or(Error::IllConditionedMetric(lo / hi))?;
    // M = L⁻¹ B L⁻*
    let lb = forward_solve(&l, &b);
    let m = forward_solve(&l, &lb.adjoint()).hermitian_part();
    let e = eigh_matrix(&m);
    let r = backward_solve_adjoint(&l, &e.vectors);
    Ok((e.values, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorts_with_swap() {
        let a = HermitianOperator::from_real_diagonal(&[-1.0, -2.0]);
        let e = eigh(&a);
        assert_eq!(e.values, vec![-2.0, -1.0]);
        assert_eq!(e.vectors[(1, 0)], c(1.0, 0.0));
        assert_eq!(e.vectors[(0, 1)], c(1.0, 0.0));
    }

    #[test]
    fn pauli_x_spectrum() {
        let a = HermitianOperator::new(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap();
        let e = eigh(&a);
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        let s = 1.0 / 2f64.sqrt();
        assert!((v0[0].norm() - s).abs() < 1e-14);
        assert!((v0[0] + v0[1]).norm() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(-1.0, 0.0)]).unwrap();
        let a = HermitianOperator::new(m).unwrap();
        let e = eigh(&a);
        let r = 5f64.sqrt();
        assert!((e.values[0] + r).abs() < 1e-13 && (e.values[1] - r).abs() < 1e-13);
        let res = &a.apply(&e.vectors) - &e.vectors.scale_columns(&e.values);
        assert!(res.fro_norm() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn generalized_identity_metric() {
        let b = ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
        let (vals, _) = generalized_eigh(&b, &ComplexMatrix::identity(2)).unwrap();
        let plain = eigh_matrix(&b);
        for (x, y) in vals.iter().zip(&plain.values) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_singular_metric() {
        let c0 = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let b = ComplexMatrix::identity(2);
        assert!(matches!(generalized_eigh(&b, &c0), Err(Error::IllConditionedMetric(_))));
    }

    #[test]
    fn gershgorin_shift_makes_negative_definite() {
        let a = HermitianOperator::new(ComplexMatrix::from_real(2, 2, &[3.0, 1.0, 1.0, -2.0]).unwrap()).unwrap();
        let (s, c0) = a.negative_definite_shift();
        assert!((c0 - 5.0).abs() < 1e-15);
        assert!(s.is_negative_definite());
    }
}
