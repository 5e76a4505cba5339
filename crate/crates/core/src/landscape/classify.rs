use num_complex::Complex64;
use serde::Serialize;

use super::CLASSIFY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{eigh, svd, ComplexMatrix, HermitianOperator};
use crate::manifold::{membership_violation, orthogonality_error};
use crate::models::{Model, ModelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Minimizer,
    Saddle,
    NonStationary,
}

/// ‖(I − QQ*)·U‖_F for orthonormal bases Q and U.
pub fn subspace_distance(q: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let proj = q.matmul(&q.adjoint_mul(u));
    (u - &proj).fro_norm()
}

/// Residual of F(X) + X·D with the multipliers estimated as d_j = −Re(x_j*F_j).
fn stationarity_residual(x: &ComplexMatrix, f: &ComplexMatrix) -> f64 {
    let d: Vec<f64> = (0..x.cols())
        .map(|j| -(0..x.rows()).map(|i| x[(i, j)].conj() * f[(i, j)]).sum::<Complex64>().re)
        .collect();
    (f + &x.scale_columns(&d)).fro_norm()
}

/// Classifies X against the closed-form minimizer characterization of each model.
pub fn classify_point(config: &ModelConfig, a: &HermitianOperator, x: &ComplexMatrix) -> Result<PointClass> {
    if x.rows() != a.dim() {
        return Err(Error::DimensionMismatch(format!("point has {} rows, operator {}", x.rows(), a.dim())));
    }
    let p = x.cols();
    if p == 0 || p > a.dim() {
        return Err(Error::InvalidInput("need 1 <= p <= n".into()));
    }
    if membership_violation(x) > CLASSIFY_TOL {
        return Ok(PointClass::NonStationary);
    }
    let eig = eigh(a);
    let lam_p = eig.values[p - 1];
    let a_scale = a.fro_norm().max(1e-300);
    // Extend Q over a degenerate cluster at λ_p so any valid eigenvector choice matches.
    let cluster = eig.values.iter().filter(|&&l| l <= lam_p + 1e-8 * a_scale).count();
    let q = eig.vectors.columns(0, cluster);
    let sv = svd(x)?;
    let full_rank = sv.rank() == p;
    let dist = if full_rank { subspace_distance(&q, &sv.u) } else { f64::INFINITY };
    let ax = a.apply(x);
    let g = x.adjoint_mul(x);
    match config.model {
        Model::Qomm => {
            let f = &(&ax.scale(2.0) - &ax.matmul(&g)) - &x.matmul(&x.adjoint_mul(&ax));
            if stationarity_residual(x, &f) > CLASSIFY_TOL * a_scale {
                return Ok(PointClass::NonStationary);
            }
            if orthogonality_error(x) <= CLASSIFY_TOL && dist <= CLASSIFY_TOL {
                Ok(PointClass::Minimizer)
            } else {
                Ok(PointClass::Saddle)
            }
        }
        Model::Qtpm => {
            let mu = config.mu;
            let f = &ax + &x.matmul(&g).scale(mu);
            if stationarity_residual(x, &f) > CLASSIFY_TOL * (a_scale + mu) {
                return Ok(PointClass::NonStationary);
            }
            let lam = &eig.values[..p];
            let mean = lam.iter().sum::<f64>() / p as f64;
            let mut expect: Vec<f64> = lam.iter().map(|l| 1.0 - (l - mean) / mu).collect();
            expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let profile_ok = full_rank && sv.s.iter().zip(&expect).all(|(s, e)| (s * s - e).abs() <= CLASSIFY_TOL);
            if profile_ok && dist <= CLASSIFY_TOL {
                Ok(PointClass::Minimizer)
            } else {
                Ok(PointClass::Saddle)
            }
        }
        Model::Ql1m | Model::Wql1m => {
            if orthogonality_error(x) > CLASSIFY_TOL {
                return Ok(PointClass::NonStationary);
            }
            let b = x.adjoint_mul(&ax);
            let invariant = (&ax - &x.matmul(&b)).fro_norm() <= CLASSIFY_TOL * a_scale;
            if !invariant {
                return Ok(PointClass::NonStationary);
            }
            let ordered = match config.model {
                Model::Wql1m => (&b - &ComplexMatrix::diag_real(&eig.values[..p])).fro_norm() <= CLASSIFY_TOL * a_scale,
                _ => true,
            };
            if dist <= CLASSIFY_TOL && ordered {
                Ok(PointClass::Minimizer)
            } else {
                Ok(PointClass::Saddle)
            }
        }
    }
}

/// Unit d with d*X = 0 and d*x0 < 0: the normalized residual of projecting x0 onto span(X).
pub fn descent_direction_ql1m(x: &ComplexMatrix, x0: &[Complex64]) -> Result<Vec<Complex64>> {
    if x0.len() != x.rows() {
        return Err(Error::DimensionMismatch("x0 length differs from X rows".into()));
    }
    let nx0 = x0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nx0 == 0.0 {
        return Err(Error::InvalidInput("x0 is zero".into()));
    }
    let basis = svd(x)?.u;
    let coeff = basis.adjoint().matvec(x0);
    let s = basis.matvec(&coeff);
    let r: Vec<Complex64> = s.iter().zip(x0).map(|(a, b)| a - b).collect();
    let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nr <= 1e-10 * nx0 {
        return Err(Error::SpanError(nr));
    }
    Ok(r.iter().map(|z| z / nr).collect())
}
