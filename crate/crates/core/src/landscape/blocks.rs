use num_complex::Complex64;

use super::{BasisColumn, Block, BlockBasis, BlockSpec, StationaryCertificate, STATIONARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigh, schur_horn_unit_diag, unit_diagonalizer, ComplexMatrix, EigenDecomposition, HermitianOperator};
use crate::manifold::{membership_violation, retract, ObliquePoint};
use crate::models::Model;

/// Orthonormality and eigenvector checks on resolved bases use this relative tolerance.
const BASIS_TOL: f64 = 1e-10;

struct ResolvedBlock {
    size: usize,
    u: ComplexMatrix,
    /// Rayleigh quotients u_j*Au_j.
    rayleigh: Vec<f64>,
    /// Whether each column is an eigenvector of A.
    is_eigen: Vec<bool>,
}

fn resolve_column(eig: &EigenDecomposition, col: &BasisColumn) -> Result<Vec<Complex64>> {
    let n = eig.values.len();
    let q = |i: usize| -> Result<Vec<Complex64>> {
        if i >= n {
            return Err(Error::InconsistentSpec(format!("eigenvector index {} out of range for n = {}", i, n)));
        }
        Ok(eig.vectors.column(i))
    };
    match *col {
        BasisColumn::Eigen(i) => q(i),
        BasisColumn::Mix {
            first,
            second,
            weight_first,
            weight_second,
        } => {
            if first == second || !(weight_first > 0.0) || !(weight_second > 0.0) {
                return Err(Error::InconsistentSpec("mixed column needs two distinct eigenvectors with positive weights".into()));
            }
            let t = weight_first + weight_second;
            let (a, b) = ((weight_first / t).sqrt(), (weight_second / t).sqrt());
            let (qa, qb) = (q(first)?, q(second)?);
            Ok(qa.iter().zip(&qb).map(|(x, y)| x * a + y * b).collect())
        }
    }
}

fn resolve(a: &HermitianOperator, eig: &EigenDecomposition, spec: &BlockSpec) -> Result<Vec<ResolvedBlock>> {
    let n = a.dim();
    let scale = a.fro_norm().max(1e-300);
    let mut out = Vec::with_capacity(spec.blocks.len());
    for (bi, Block { size, basis }) in spec.blocks.iter().enumerate() {
        let r = basis.rank();
        if r == 0 || r > *size {
            return Err(Error::InconsistentSpec(format!("block {} has rank {} for size {}", bi, r, size)));
        }
        let u = match basis {
            BlockBasis::Columns(cols) => {
                let vs = cols.iter().map(|c| resolve_column(eig, c)).collect::<Result<Vec<_>>>()?;
                ComplexMatrix::from_columns(n, &vs)?
            }
            BlockBasis::Matrix(m) => {
                if m.rows() != n {
                    return Err(Error::DimensionMismatch(format!("block {} basis has {} rows, expected {}", bi, m.rows(), n)));
                }
                m.clone()
            }
        };
        let au = a.apply(&u);
        let mut rayleigh = Vec::with_capacity(r);
        let mut is_eigen = Vec::with_capacity(r);
        for j in 0..r {
            let uj = u.column(j);
            let auj = au.column(j);
            let rq: Complex64 = uj.iter().zip(&auj).map(|(x, y)| x.conj() * y).sum();
            let resid: f64 = uj.iter().zip(&auj).map(|(x, y)| (y - x * rq.re).norm_sqr()).sum::<f64>().sqrt();
            rayleigh.push(rq.re);
            is_eigen.push(resid <= BASIS_TOL * scale);
        }
        out.push(ResolvedBlock {
            size: *size,
            u,
            rayleigh,
            is_eigen,
        });
    }
    // All basis columns orthonormal, and A diagonal on their span.
    let parts: Vec<&ComplexMatrix> = out.iter().map(|b| &b.u).collect();
    let all = ComplexMatrix::hstack(&parts)?;
    let g = all.adjoint_mul(&all);
    if (&g - &ComplexMatrix::identity(all.cols())).fro_norm() > BASIS_TOL * all.cols() as f64 {
        return Err(Error::InconsistentSpec("block bases are not orthonormal".into()));
    }
    let b = all.adjoint_mul(&a.apply(&all));
    let mut off = 0.0;
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            if i != j {
                off += b[(i, j)].norm_sqr();
            }
        }
    }
    if off.sqrt() > BASIS_TOL * scale {
        return Err(Error::InconsistentSpec("bases are not A-orthogonal".into()));
    }
    Ok(out)
}

fn check_p(spec: &BlockSpec, expected: Model) -> Result<()> {
    if spec.model != expected {
        return Err(Error::InconsistentSpec(format!("spec is for {}, expected {}", spec.model, expected)));
    }
    if spec.blocks.is_empty() {
        return Err(Error::InconsistentSpec("no blocks".into()));
    }
    Ok(())
}

fn check_distinct(d: &[f64], scale: f64) -> Result<()> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if (d[i] - d[j]).abs() <= STATIONARY_TOL * scale {
                return Err(Error::InconsistentSpec(format!("blocks {} and {} share the multiplier {:.6}", i, j, d[i])));
            }
        }
    }
    Ok(())
}

/// X_i = U_i·Σ_i·V_i* with V_i the first r_i columns of a unit-diagonalizing unitary for (σ², 0, …).
fn assemble(blocks: &[ResolvedBlock], sigma_sq: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let mut parts = Vec::with_capacity(blocks.len());
    for (b, s2) in blocks.iter().zip(sigma_sq) {
        let r = b.u.cols();
        let mut s = s2.clone();
        s.resize(b.size, 0.0);
        let v = schur_horn_unit_diag(&s)?;
        let sig: Vec<f64> = s2.iter().map(|x| x.sqrt()).collect();
        parts.push(b.u.scale_columns(&sig).matmul(&v.columns(0, r).adjoint()));
    }
    let refs: Vec<&ComplexMatrix> = parts.iter().collect();
    ComplexMatrix::hstack(&refs)
}

fn expand_d(blocks: &[ResolvedBlock], d: &[f64]) -> Vec<f64> {
    blocks.iter().zip(d).flat_map(|(b, &di)| std::iter::repeat_n(di, b.size)).collect()
}

fn require_negative_definite(eig: &EigenDecomposition) -> Result<()> {
    match eig.values.last() {
        Some(&top) if top >= 0.0 => Err(Error::NotNegativeDefinite(top)),
        _ => Ok(()),
    }
}

/// Stationary point of qOMM with the given block structure.
pub fn build_qomm_stationary(a: &HermitianOperator, spec: &BlockSpec) -> Result<StationaryCertificate> {
    check_p(spec, Model::Qomm)?;
    let eig = eigh(a);
    require_negative_definite(&eig)?;
    let blocks = resolve(a, &eig, spec)?;
    let scale = a.fro_norm();
    let mut sigma_sq = Vec::with_capacity(blocks.len());
    let mut d = Vec::with_capacity(blocks.len());
    let mut full_rank = 0;
    for (bi, b) in blocks.iter().enumerate() {
        let r = b.u.cols();
        let deficit = (b.size - r) as f64;
        if deficit == 0.0 {
            full_rank += 1;
            if b.is_eigen.iter().any(|e| !e) {
                return Err(Error::InconsistentSpec(format!("full-rank block {} must use eigenvectors", bi)));
            }
            sigma_sq.push(vec![1.0; r]);
            d.push(0.0);
            continue;
        }
        let inv_sum: f64 = b.rayleigh.iter().map(|x| 1.0 / x).sum();
        let s2: Vec<f64> = b.rayleigh.iter().map(|&at| 1.0 + deficit / (at * inv_sum)).collect();
        for (j, (&e, &s)) in b.is_eigen.iter().zip(&s2).enumerate() {
            if !e && (s - 2.0).abs() > 1e-8 {
                return Err(Error::InconsistentSpec(format!(
                    "non-eigenvector column {} of block {} needs sigma^2 = 2, got {:.10}",
                    j, bi, s
                )));
            }
        }
        sigma_sq.push(s2);
        d.push(2.0 * deficit / inv_sum);
    }
    if full_rank > 1 {
        return Err(Error::InconsistentSpec("at most one block may have full rank".into()));
    }
    check_distinct(&d, scale)?;
    let x = assemble(&blocks, &sigma_sq)?;
    let x = retract(&x)?;
    let d = expand_d(&blocks, &d);
    let residual = verify_qomm_stationary(a, x.matrix(), &d);
    if residual > STATIONARY_TOL * scale {
        return Err(Error::InconsistentSpec(format!("assembled point has residual {:.3e}", residual)));
    }
    Ok(StationaryCertificate {
        model: Model::Qomm,
        x,
        d,
        residual,
        mu: None,
    })
}

/// ‖2AX − AXX*X − XX*AX + XD‖_F plus the largest column-norm violation.
pub fn verify_qomm_stationary(a: &HermitianOperator, x: &ComplexMatrix, d: &[f64]) -> f64 {
    assert_eq!(d.len(), x.cols());
    let ax = a.apply(x);
    let g = x.adjoint_mul(x);
    let b = x.adjoint_mul(&ax);
    let r = &(&(&ax.scale(2.0) - &ax.matmul(&g)) - &x.matmul(&b)) + &x.scale_columns(d);
    r.fro_norm() + membership_violation(x)
}

fn check_mu(eig: &EigenDecomposition, mu: f64) -> Result<()> {
    let bound = eig.values.first().copied().unwrap_or(0.0).abs();
    if mu.is_nan() || mu <= bound {
        return Err(Error::MuTooSmall { mu, bound });
    }
    Ok(())
}

/// Stationary point of the quartic qTPM objective with eigenvector blocks.
pub fn build_qtpm_stationary(a: &HermitianOperator, mu: f64, spec: &BlockSpec) -> Result<StationaryCertificate> {
    check_p(spec, Model::Qtpm)?;
    let eig = eigh(a);
    check_mu(&eig, mu)?;
    let blocks = resolve(a, &eig, spec)?;
    let scale = a.fro_norm() + mu;
    let mut sigma_sq = Vec::with_capacity(blocks.len());
    let mut d = Vec::with_capacity(blocks.len());
    for (bi, b) in blocks.iter().enumerate() {
        if b.is_eigen.iter().any(|e| !e) {
            return Err(Error::InconsistentSpec(format!("block {} must use eigenvectors", bi)));
        }
        let r = b.u.cols() as f64;
        let p = b.size as f64;
        let sum: f64 = b.rayleigh.iter().sum();
        let mean = sum / r;
        let s2: Vec<f64> = b.rayleigh.iter().map(|&l| p / r - (l - mean) / mu).collect();
        if s2.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InconsistentSpec(format!("block {} has a nonpositive sigma^2", bi)));
        }
        sigma_sq.push(s2);
        d.push(-(sum + mu * p) / r);
    }
    check_distinct(&d, scale)?;
    let x = retract(&assemble(&blocks, &sigma_sq)?)?;
    let d = expand_d(&blocks, &d);
    let residual = verify_qtpm_stationary(a, x.matrix(), &d, mu);
    if residual > STATIONARY_TOL * scale {
        return Err(Error::InconsistentSpec(format!("assembled point has residual {:.3e}", residual)));
    }
    Ok(StationaryCertificate {
        model: Model::Qtpm,
        x,
        d,
        residual,
        mu: Some(mu),
    })
}

/// ‖AX + μXX*X + XD‖_F plus the largest column-norm violation.
pub fn verify_qtpm_stationary(a: &HermitianOperator, x: &ComplexMatrix, d: &[f64], mu: f64) -> f64 {
    assert_eq!(d.len(), x.cols());
    let g = x.adjoint_mul(x);
    let r = &(&a.apply(x) + &x.matmul(&g).scale(mu)) + &x.scale_columns(d);
    r.fro_norm() + membership_violation(x)
}

fn check_unitary(v: &ComplexMatrix, p: usize) -> Result<()> {
    if v.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!("V must be {}x{}", p, p)));
    }
    if (&v.adjoint_mul(v) - &ComplexMatrix::identity(p)).fro_norm() > 1e-10 * (p as f64).sqrt().max(1.0) {
        return Err(Error::InvalidInput("V is not unitary".into()));
    }
    Ok(())
}

fn lowest_block(a: &HermitianOperator, p: usize) -> Result<(Vec<f64>, ComplexMatrix)> {
    if p == 0 || p > a.dim() {
        return Err(Error::InvalidInput(format!("p = {} must be in 1..={}", p, a.dim())));
    }
    Ok(eigh(a).lowest(p))
}

/// X = Q_p·V*, the qOMM minimizer family.
pub fn build_qomm_minimizer(a: &HermitianOperator, p: usize, v: &ComplexMatrix) -> Result<ObliquePoint> {
    let eig = eigh(a);
    require_negative_definite(&eig)?;
    check_unitary(v, p)?;
    let (_, q) = lowest_block(a, p)?;
    retract(&q.matmul(&v.adjoint()))
}

/// X = Q_p·V*; orthonormal columns spanning the lowest eigenspace minimize qL1M.
pub fn build_ql1m_minimizer(a: &HermitianOperator, p: usize, v: &ComplexMatrix) -> Result<ObliquePoint> {
    check_unitary(v, p)?;
    let (_, q) = lowest_block(a, p)?;
    retract(&q.matmul(&v.adjoint()))
}

/// X = Q_p·(I − (Λ_p − Λ̄_p)/μ)^{1/2}·V*. A V that leaves the column norms off one
/// is adjusted by the unit-diagonalizing rotations of V·S·V*.
pub fn build_qtpm_minimizer(a: &HermitianOperator, mu: f64, p: usize, v: &ComplexMatrix) -> Result<ObliquePoint> {
    let eig = eigh(a);
    check_mu(&eig, mu)?;
    check_unitary(v, p)?;
    let (lam, q) = lowest_block(a, p)?;
    let mean = lam.iter().sum::<f64>() / p as f64;
    let s: Vec<f64> = lam.iter().map(|l| 1.0 - (l - mean) / mu).collect();
    let h = v.scale_columns(&s).matmul(&v.adjoint());
    let off_unit = (0..p).map(|i| (h[(i, i)].re - 1.0).abs()).fold(0.0, f64::max);
    let v = if off_unit > 1e-10 {
        let w = unit_diagonalizer(&h)?;
        w.adjoint().matmul(v)
    } else {
        v.clone()
    };
    let sig: Vec<f64> = s.iter().map(|x| x.sqrt()).collect();
    retract(&q.scale_columns(&sig).matmul(&v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::orthogonality_error;
    use crate::models::{qomm_value, qtpm_penalty_value, qtpm_value};
    use crate::sampling;

    fn diag3() -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[-3.0, -2.0, -1.0])
    }

    #[test]
    fn full_rank_qomm_block_is_minimizer_form() {
        let a = diag3();
        let spec = BlockSpec::new(Model::Qomm, vec![Block::eigen(2, &[0, 1])]);
        let c = build_qomm_stationary(&a, &spec).unwrap();
        assert_eq!(c.d, vec![0.0, 0.0]);
        assert!(c.residual < 1e-14);
        assert!((qomm_value(&a, c.x.matrix()).unwrap() + 5.0).abs() < 1e-14);
    }

    #[test]
    fn qtpm_rank_one_block() {
        let a = diag3();
        let spec = BlockSpec::new(Model::Qtpm, vec![Block::eigen(2, &[0])]);
        let c = build_qtpm_stationary(&a, 4.0, &spec).unwrap();
        let g = c.x.matrix().adjoint_mul(c.x.matrix());
        // X*X = 2·v v* for a unit v, so its trace of squares is 4.
        assert!((g.fro_norm_sq() - 4.0).abs() < 1e-12);
        assert!(c.residual < 1e-10);
    }

    #[test]
    fn qtpm_singletons_are_orthonormal() {
        let a = diag3();
        let spec = BlockSpec::new(Model::Qtpm, vec![Block::eigen(1, &[0]), Block::eigen(1, &[1])]);
        let c = build_qtpm_stationary(&a, 4.0, &spec).unwrap();
        assert!(orthogonality_error(c.x.matrix()) < 1e-14);
        assert!(c.residual < 1e-10);
    }

    #[test]
    fn qtpm_minimizer_small_diagonal() {
        let a = diag3();
        let x = build_qtpm_minimizer(&a, 4.0, 2, &ComplexMatrix::identity(2)).unwrap();
        let s = crate::linalg::svd(x.matrix()).unwrap().s;
        assert!((s[0] * s[0] - 1.125).abs() < 1e-12 && (s[1] * s[1] - 0.875).abs() < 1e-12);
        assert!((qtpm_penalty_value(&a, x.matrix(), 4.0).unwrap() + 2.53125).abs() < 1e-12);
        assert!((qtpm_value(&a, x.matrix(), 4.0).unwrap() + 0.53125).abs() < 1e-12);
        assert!((orthogonality_error(x.matrix()) - 0.5f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mu_too_small_rejected() {
        let a = diag3();
        let spec = BlockSpec::new(Model::Qtpm, vec![Block::eigen(1, &[0])]);
        assert!(matches!(build_qtpm_stationary(&a, 3.0, &spec), Err(Error::MuTooSmall { .. })));
    }

    #[test]
    fn two_full_rank_blocks_rejected() {
        let a = HermitianOperator::from_real_diagonal(&[-4.0, -3.0, -2.0, -1.0]);
        let spec = BlockSpec::new(Model::Qomm, vec![Block::eigen(1, &[0]), Block::eigen(1, &[1])]);
        assert!(matches!(build_qomm_stationary(&a, &spec), Err(Error::InconsistentSpec(_))));
    }

    #[test]
    fn mixed_column_needs_sigma_two() {
        let a = HermitianOperator::from_real_diagonal(&[-7.0, -6.0, -5.0, -4.0, -3.0, -2.0, -1.0]);
        let bad = BasisColumn::Mix {
            first: 6,
            second: 1,
            weight_first: 0.5,
            weight_second: 0.5,
        };
        let spec = BlockSpec::new(
            Model::Qomm,
            vec![Block {
                size: 5,
                basis: BlockBasis::Columns(vec![BasisColumn::Eigen(5), bad]),
            }],
        );
        assert!(matches!(build_qomm_stationary(&a, &spec), Err(Error::InconsistentSpec(_))));
    }

    #[test]
    fn negative_control_residual() {
        let mut rng = sampling::rng(5);
        let a = sampling::random_negative_definite(6, &mut rng);
        let x = crate::manifold::random_oblique(6, 3, 1).unwrap();
        let d = vec![0.0; 3];
        assert!(verify_qomm_stationary(&a, x.matrix(), &d) > 1e-2);
    }
}
