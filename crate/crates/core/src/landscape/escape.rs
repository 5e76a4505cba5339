use num_complex::Complex64;

use super::classify::{classify_point, PointClass};
use super::StationaryCertificate;
use crate::error::{Error, Result};
use crate::linalg::{
    complete_orthonormal, eigh_matrix, is_strictly_majorized_by_ones, svd_full_right, unit_diagonalizer, ComplexMatrix,
    HermitianOperator,
};
use crate::manifold::{retract, ObliquePoint};
use crate::models::{qomm_value, qtpm_value, Model, ModelConfig};

/// X = U·diag(√s)·V* with U: n×p orthonormal (range of X first, then the
/// lowest Ritz directions of A on the complement) and V: p×p unitary.
struct Frame {
    u: ComplexMatrix,
    s: Vec<f64>,
    v: ComplexMatrix,
    /// diag(U*AU).
    rayleigh: Vec<f64>,
    rank: usize,
    /// Orthonormal complement of the range of X, in ascending Ritz order.
    complement: ComplexMatrix,
    complement_rayleigh: Vec<f64>,
}

impl Frame {
    fn new(a: &HermitianOperator, x: &ComplexMatrix) -> Result<Self> {
        let (n, p) = x.shape();
        if n < p {
            return Err(Error::InvalidInput("perturbations need n >= p".into()));
        }
        let f = svd_full_right(x);
        let r = f.rank;
        let s: Vec<f64> = f.s.iter().map(|x| x * x).collect();
        let mut u = f.u.clone();
        let mut v = f.v.clone();
        // Within clusters of equal singular values, rotate to Ritz vectors of A.
        let mut start = 0;
        while start < r {
            let mut end = start + 1;
            while end < r && (s[end] - s[start]).abs() <= 1e-9 * s[0].max(1.0) {
                end += 1;
            }
            if end - start > 1 {
                let uk = u.columns(start, end);
                let m = uk.adjoint_mul(&a.apply(&uk)).hermitian_part();
                let w = eigh_matrix(&m).vectors;
                let uk2 = uk.matmul(&w);
                let vk2 = v.columns(start, end).matmul(&w);
                for j in 0..end - start {
                    u.set_column(start + j, &uk2.column(j));
                    v.set_column(start + j, &vk2.column(j));
                }
            }
            start = end;
        }
        let full = complete_orthonormal(&u, n)?;
        let qc = full.columns(r, n);
        let (complement, complement_rayleigh) = if n > r {
            let m = qc.adjoint_mul(&a.apply(&qc)).hermitian_part();
            let e = eigh_matrix(&m);
            (qc.matmul(&e.vectors), e.values)
        } else {
            (ComplexMatrix::zeros(n, 0), Vec::new())
        };
        let ubar = ComplexMatrix::hstack(&[&u, &complement.columns(0, p - r)])?;
        let au = a.apply(&ubar);
        let rayleigh = (0..p)
            .map(|k| (0..n).map(|i| ubar[(i, k)].conj() * au[(i, k)]).sum::<Complex64>().re)
            .collect();
        Ok(Self {
            u: ubar,
            s,
            v,
            rayleigh,
            rank: r,
            complement,
            complement_rayleigh,
        })
    }

    /// Point with squared singular values `s` on left frame `u`, rotated back onto the manifold.
    fn point(&self, u: &ComplexMatrix, s: &[f64]) -> Result<ObliquePoint> {
        let h = self.v.scale_columns(s).matmul(&self.v.adjoint());
        let w = unit_diagonalizer(&h)?;
        let sig: Vec<f64> = s.iter().map(|x| x.max(0.0).sqrt()).collect();
        retract(&u.scale_columns(&sig).matmul(&self.v.adjoint()).matmul(&w))
    }
}

/// X̃ = U·Σ̃·Ṽ* sharing the left singular vectors of X, with unit-norm columns.
/// `sigma_tilde_sq` lists the new squared singular values in descending order
/// of the current ones (zeros last); zero directions are filled from an
/// orthonormal completion of the range of X.
pub fn oblique_perturb(x: &ObliquePoint, sigma_tilde_sq: &[f64]) -> Result<(ObliquePoint, f64)> {
    let p = x.p();
    if sigma_tilde_sq.len() != p {
        return Err(Error::DimensionMismatch(format!("{} values for {} columns", sigma_tilde_sq.len(), p)));
    }
    if x.n() < p {
        return Err(Error::InvalidInput("perturbations need n >= p".into()));
    }
    let total: f64 = sigma_tilde_sq.iter().sum();
    let ones = sigma_tilde_sq.iter().all(|s| (s - 1.0).abs() <= 1e-12);
    if sigma_tilde_sq.iter().any(|&s| s < 0.0) || (total - p as f64).abs() > 1e-10 || !(ones || is_strictly_majorized_by_ones(sigma_tilde_sq)) {
        return Err(Error::MajorizationError);
    }
    let f = svd_full_right(x.matrix());
    let u = complete_orthonormal(&f.u, p)?;
    let h = f.v.scale_columns(sigma_tilde_sq).matmul(&f.v.adjoint());
    let w = unit_diagonalizer(&h)?;
    let sig: Vec<f64> = sigma_tilde_sq.iter().map(|s| s.sqrt()).collect();
    let xt = retract(&u.scale_columns(&sig).matmul(&f.v.adjoint()).matmul(&w))?;
    let dist = (xt.matrix() - x.matrix()).fro_norm();
    Ok((xt, dist))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EscapeKind {
    /// σ̃² = (1 − ε)σ² + ε on every direction.
    Blend,
    /// ε of squared singular value moved between two directions.
    Transfer { from: usize, to: usize },
    /// u_from → √(1 − ε²)u_from + ε·c for a complement direction c.
    Swap { from: usize, toward: usize },
}

#[derive(Debug, Clone)]
pub struct EscapeResult {
    pub point: ObliquePoint,
    pub kind: EscapeKind,
    pub value_before: f64,
    pub value_after: f64,
    pub predicted_change: f64,
    pub eps_used: f64,
    pub distance: f64,
}

fn value(model: Model, a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> Result<f64> {
    match model {
        Model::Qomm => qomm_value(a, x),
        Model::Qtpm => qtpm_value(a, x, mu),
        _ => Err(Error::InvalidInput("saddle escape is defined for qOMM and qTPM".into())),
    }
}

/// Contribution of one direction with squared singular value s and Rayleigh quotient ã.
fn term(model: Model, s: f64, at: f64, mu: f64) -> f64 {
    match model {
        Model::Qomm => (2.0 - s) * s * at,
        _ => 0.5 * s * at + 0.25 * mu * s * s,
    }
}

/// Explicit descent perturbation away from a non-minimizing stationary point.
/// Candidate moves (blend, singular-value transfer, eigenvector swap) are ranked
/// by their exact predicted change; ε is reduced tenfold, up to six times, if
/// none of them lowers the objective.
pub fn saddle_escape(model: Model, a: &HermitianOperator, cert: &StationaryCertificate, mu: f64, epsilon: f64) -> Result<EscapeResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput("epsilon must lie in (0, 1)".into()));
    }
    let cfg = match model {
        Model::Qomm => ModelConfig::qomm(),
        Model::Qtpm => ModelConfig::qtpm(mu),
        _ => return Err(Error::InvalidInput("saddle escape is defined for qOMM and qTPM".into())),
    };
    let x = cert.x.matrix();
    if classify_point(&cfg, a, x)? == PointClass::Minimizer {
        return Err(Error::AlreadyMinimal);
    }
    let before = value(model, a, x, mu)?;
    let frame = Frame::new(a, x)?;
    let p = frame.s.len();
    let mut eps = epsilon;
    for _ in 0..7 {
        let mut cands: Vec<(f64, EscapeKind)> = Vec::new();
        let blended: Vec<f64> = frame.s.iter().map(|s| (1.0 - eps) * s + eps).collect();
        if frame.rank < p || model == Model::Qtpm {
            let dv: f64 = (0..p)
                .map(|k| term(model, blended[k], frame.rayleigh[k], mu) - term(model, frame.s[k], frame.rayleigh[k], mu))
                .sum();
            cands.push((dv, EscapeKind::Blend));
        }
        for from in 0..p {
            if frame.s[from] < eps {
                continue;
            }
            for to in 0..p {
                if to == from {
                    continue;
                }
                let (sa, sb) = (frame.s[from], frame.s[to]);
                let (aa, ab) = (frame.rayleigh[from], frame.rayleigh[to]);
                let dv = term(model, sa - eps, aa, mu) - term(model, sa, aa, mu) + term(model, sb + eps, ab, mu) - term(model, sb, ab, mu);
                cands.push((dv, EscapeKind::Transfer { from, to }));
            }
        }
        let ac = a.apply(&frame.complement);
        for from in 0..frame.rank {
            for (toward, &lc) in frame.complement_rayleigh.iter().enumerate() {
                let cross: Complex64 = (0..frame.u.rows())
                    .map(|i| frame.u[(i, from)].conj() * ac[(i, toward)])
                    .sum();
                let new_rq = (1.0 - eps * eps) * frame.rayleigh[from] + eps * eps * lc + 2.0 * eps * (1.0 - eps * eps).sqrt() * cross.re;
                let sa = frame.s[from];
                let dv = term(model, sa, new_rq, mu) - term(model, sa, frame.rayleigh[from], mu);
                cands.push((dv, EscapeKind::Swap { from, toward }));
            }
        }
        cands.retain(|(dv, _)| *dv < 0.0);
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (dv, kind) in cands.into_iter().take(8) {
            let point = match kind {
                EscapeKind::Blend => frame.point(&frame.u, &blended)?,
                EscapeKind::Transfer { from, to } => {
                    let mut s = frame.s.clone();
                    s[from] -= eps;
                    s[to] += eps;
                    frame.point(&frame.u, &s)?
                }
                EscapeKind::Swap { from, toward } => {
                    let mut u = frame.u.clone();
                    let c = frame.complement.column(toward);
                    let col: Vec<Complex64> = u
                        .column(from)
                        .iter()
                        .zip(&c)
                        .map(|(x, y)| x * (1.0 - eps * eps).sqrt() + y * eps)
                        .collect();
                    u.set_column(from, &col);
                    frame.point(&u, &frame.s)?
                }
            };
            let after = value(model, a, point.matrix(), mu)?;
            if after < before {
                let distance = (point.matrix() - x).fro_norm();
                return Ok(EscapeResult {
                    point,
                    kind,
                    value_before: before,
                    value_after: after,
                    predicted_change: dv,
                    eps_used: eps,
                    distance,
                });
            }
        }
        eps /= 10.0;
    }
    Err(Error::EscapeFailed(format!("no decreasing move down to epsilon = {:.1e}", eps * 10.0)))
}
