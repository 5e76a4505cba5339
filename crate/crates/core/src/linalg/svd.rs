use num_complex::Complex64;

use super::eigen::{jacobi_rotation, rotate_columns};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest one are treated as zero.
const RANK_TOL: f64 = 1e-12;

/// Reduced SVD X = U·diag(s)·V*, with U: n×r, V: p×r and s descending positive.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.u.scale_columns(&self.s).matmul(&self.v.adjoint())
    }
}

/// Full right factor of an n×p matrix with n ≥ p: all p singular values
/// (descending, zeros included), p×p unitary V, and left vectors for the nonzero ones.
#[derive(Debug, Clone)]
pub(crate) struct FullRightSvd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
    pub rank: usize,
}

/// One-sided Hestenes–Jacobi on the columns of `x` (requires rows ≥ cols).
pub(crate) fn svd_full_right(x: &ComplexMatrix) -> FullRightSvd {
    let (n, p) = x.shape();
    debug_assert!(n >= p);
    let mut w = x.clone();
    let mut v = ComplexMatrix::identity(p);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..p.saturating_sub(1) {
            for j in i + 1..p {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let a = w[(k, i)];
                    let b = w[(k, j)];
                    alpha += a.norm_sqr();
                    beta += b.norm_sqr();
                    gamma += a.conj() * b;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                if let Some((c, se)) = jacobi_rotation(alpha, beta, gamma) {
                    rotate_columns(&mut w, i, j, c, se);
                    rotate_columns(&mut v, i, j, c, se);
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..p).map(|j| w.column_norm(j)).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let smax = order.first().map(|&i| norms[i]).unwrap_or(0.0);
    let rank = order.iter().filter(|&&i| norms[i] > RANK_TOL * smax && norms[i] > 0.0).count();
    let mut s = Vec::with_capacity(p);
    let mut u = ComplexMatrix::zeros(n, rank);
    for (k, &i) in order.iter().enumerate() {
        if k < rank {
            s.push(norms[i]);
            let col: Vec<Complex64> = w.column(i).iter().map(|z| z / norms[i]).collect();
            u.set_column(k, &col);
        } else {
            s.push(0.0);
        }
    }
    FullRightSvd {
        u,
        s,
        v: v.select_columns(&order),
        rank,
    }
}

/// Rank-revealing reduced SVD.
pub fn svd(x: &ComplexMatrix) -> Result<Svd> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    if x.rows() >= x.cols() {
        let f = svd_full_right(x);
        Ok(Svd {
            u: f.u,
            s: f.s[..f.rank].to_vec(),
            v: f.v.columns(0, f.rank),
        })
    } else {
        let f = svd_full_right(&x.adjoint());
        Ok(Svd {
            u: f.v.columns(0, f.rank),
            s: f.s[..f.rank].to_vec(),
            v: f.u,
        })
    }
}

/// Extends orthonormal columns `u` (n×r) to `m` orthonormal columns by
/// Gram–Schmidt against the standard basis, taking the largest residual each time.
pub fn complete_orthonormal(u: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let n = u.rows();
    if m > n || m < u.cols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot complete {} columns to {} in dimension {}",
            u.cols(),
            m,
            n
        )));
    }
    let mut cols: Vec<Vec<Complex64>> = (0..u.cols()).map(|j| u.column(j)).collect();
    while cols.len() < m {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for e in 0..n {
            let mut r = vec![Complex64::new(0.0, 0.0); n];
            r[e] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in &cols {
                    let proj: Complex64 = c.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                    for (ri, ci) in r.iter_mut().zip(c) {
                        *ri -= proj * ci;
                    }
                }
            }
            let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().map(|(b, _)| nr > *b).unwrap_or(true) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.expect("n > 0");
        cols.push(r.iter().map(|z| z / nr).collect());
    }
    ComplexMatrix::from_columns(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_singular_values() {
        let s = svd(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.s.len(), 3);
        for x in &s.s {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let x = ComplexMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        let s = svd(&x).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.s[0] - 2.0).abs() < 1e-14);
        assert!((&s.reconstruct() - &x).fro_norm() < 1e-14);
    }

    #[test]
    fn wide_matrix_goes_through_adjoint() {
        let x = ComplexMatrix::from_fn(2, 4, |i, j| c((i + j) as f64, (i * j) as f64 - 1.0));
        let s = svd(&x).unwrap();
        assert!((&s.reconstruct() - &x).fro_norm() < 1e-12 * x.fro_norm());
    }

    #[test]
    fn completion_is_orthonormal() {
        let u = ComplexMatrix::from_columns(3, &[vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]]).unwrap();
        let q = complete_orthonormal(&u, 3).unwrap();
        let g = q.adjoint_mul(&q);
        assert!((&g - &ComplexMatrix::identity(3)).fro_norm() < 1e-14);
        assert_eq!(q.column(0), u.column(0));
    }
}
