use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;
const ONES_TOL: f64 = 1e-12;

/// True iff `s` differs from the all-ones vector, sums to its length, and every
/// partial sum of its k smallest entries (k < m) is strictly below k.
pub fn is_strictly_majorized_by_ones(s: &[f64]) -> bool {
    let m = s.len();
    if s.iter().all(|x| (x - 1.0).abs() <= ONES_TOL) {
        return false;
    }
    let total: f64 = s.iter().sum();
    if (total - m as f64).abs() > SUM_TOL {
        return false;
    }
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = 0.0;
    for (k, x) in sorted.iter().take(m.saturating_sub(1)).enumerate() {
        acc += x;
        if acc >= (k + 1) as f64 {
            return false;
        }
    }
    true
}

fn is_ones(s: &[f64]) -> bool {
    s.iter().all(|x| (x - 1.0).abs() <= ONES_TOL)
}

/// Unitary W such that W*·H·W has unit diagonal, for a Hermitian H with trace
/// equal to its dimension. Each step rotates in the plane of the largest
/// remaining diagonal deviation and one of opposite sign, pinning that entry
/// to exactly one, so at most p−1 rotations are applied.
pub fn unit_diagonalizer(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = h.rows();
    if !h.is_square() {
        return Err(Error::DimensionMismatch("unit_diagonalizer needs a square matrix".into()));
    }
    let tr: f64 = (0..p).map(|i| h[(i, i)].re).sum();
    if (tr - p as f64).abs() > SUM_TOL * (p as f64).max(1.0) {
        return Err(Error::MajorizationError);
    }
    let mut h = h.hermitian_part();
    let mut w = ComplexMatrix::identity(p);
    let mut active: Vec<usize> = (0..p).collect();
    while active.len() > 1 {
        let (jpos, &j) = active
            .iter()
            .enumerate()
            .max_by(|a, b| (h[(*a.1, *a.1)].re - 1.0).abs().partial_cmp(&(h[(*b.1, *b.1)].re - 1.0).abs()).unwrap())
            .unwrap();
        let dj = h[(j, j)].re - 1.0;
        if dj.abs() <= 1e-15 {
            break;
        }
        let partner = active
            .iter()
            .copied()
            .filter(|&i| i != j && (h[(i, i)].re - 1.0) * dj < 0.0)
            .max_by(|&a, &b| h[(a, j)].norm().partial_cmp(&h[(b, j)].norm()).unwrap());
        let i = match partner {
            Some(i) => i,
            // Roundoff left a lone deviation; the trace says it is at noise level.
            None => break,
        };
        let a = h[(i, i)].re;
        let d = h[(j, j)].re;
        let b = h[(i, j)];
        let nb = b.norm();
        let e = if nb > 0.0 { b / nb } else { Complex64::new(1.0, 0.0) };
        let beta = nb;
        let half = (d - a) / 2.0;
        let r = (half * half + beta * beta).sqrt();
        let phi0 = beta.atan2(half);
        let kappa = ((1.0 - (a + d) / 2.0) / r).clamp(-1.0, 1.0);
        let acos = kappa.acos();
        let wrap = |t: f64| {
            let mut t = t % (2.0 * std::f64::consts::PI);
            if t > std::f64::consts::PI {
                t -= 2.0 * std::f64::consts::PI;
            } else if t < -std::f64::consts::PI {
                t += 2.0 * std::f64::consts::PI;
            }
            t
        };
        let t1 = wrap(phi0 - acos);
        let t2 = wrap(phi0 + acos);
        let two_theta = if t1.abs() <= t2.abs() { t1 } else { t2 };
        let (s, c) = (two_theta / 2.0).sin_cos();
        // G columns: g_i = c·e_i − s·ē·e_j, g_j = s·e·e_i + c·e_j.
        let mut g = ComplexMatrix::identity(p);
        g[(i, i)] = Complex64::new(c, 0.0);
        g[(j, i)] = -e.conj() * s;
        g[(i, j)] = e * s;
        g[(j, j)] = Complex64::new(c, 0.0);
        h = g.adjoint().matmul(&h).matmul(&g).hermitian_part();
        h[(j, j)] = Complex64::new(1.0, 0.0);
        w = w.matmul(&g);
        active.remove(jpos);
    }
    Ok(w)
}

/// Unitary V with diag(V·diag(s)·V*) = 1.
pub fn schur_horn_unit_diag(s: &[f64]) -> Result<ComplexMatrix> {
    let p = s.len();
    if s.iter().any(|x| !x.is_finite() || *x < -1e-12) {
        return Err(Error::MajorizationError);
    }
    if is_ones(s) {
        return Ok(ComplexMatrix::identity(p));
    }
    if !is_strictly_majorized_by_ones(s) {
        return Err(Error::MajorizationError);
    }
    let w = unit_diagonalizer(&ComplexMatrix::diag_real(s))?;
    Ok(w.adjoint())
}
