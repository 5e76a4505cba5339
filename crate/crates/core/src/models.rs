//! The three orthogonality-embedding objectives and their gradients.
//!
//! Gradients follow the convention that the directional derivative of the
//! value along Δ is Re tr(G*·Δ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

/// Default smoothing for |z| in the l1 penalty.
pub const DEFAULT_SMOOTHING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[serde(alias = "QOMM")]
    Qomm,
    #[serde(alias = "QTPM")]
    Qtpm,
    #[serde(alias = "QL1M")]
    Ql1m,
    #[serde(alias = "WQL1M", alias = "weighted_ql1m")]
    Wql1m,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qomm" => Ok(Model::Qomm),
            "qtpm" => Ok(Model::Qtpm),
            "ql1m" => Ok(Model::Ql1m),
            "wql1m" | "weighted_ql1m" => Ok(Model::Wql1m),
            other => Err(Error::Parse(format!("unknown model '{}'", other))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Model::Qomm => "qomm",
            Model::Qtpm => "qtpm",
            Model::Ql1m => "ql1m",
            Model::Wql1m => "wql1m",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model: Model,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub mu1: f64,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default = "default_delta")]
    pub smoothing_delta: f64,
}

fn one() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    DEFAULT_SMOOTHING
}

impl ModelConfig {
    pub fn qomm() -> Self {
        Self::new(Model::Qomm)
    }

    pub fn qtpm(mu: f64) -> Self {
        Self { mu, ..Self::new(Model::Qtpm) }
    }

    pub fn ql1m(mu1: f64) -> Self {
        Self { mu1, ..Self::new(Model::Ql1m) }
    }

    pub fn wql1m(mu1: f64, weights: Vec<f64>) -> Self {
        Self {
            mu1,
            weights,
            ..Self::new(Model::Wql1m)
        }
    }

    fn new(model: Model) -> Self {
        Self {
            model,
            mu: 1.0,
            mu1: 1.0,
            weights: Vec::new(),
            smoothing_delta: DEFAULT_SMOOTHING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            Model::Qomm => Ok(()),
            Model::Qtpm if !(self.mu > 0.0) => Err(Error::InvalidInput("mu must be positive".into())),
            Model::Qtpm => Ok(()),
            Model::Ql1m | Model::Wql1m if !(self.mu1 > 0.0) => Err(Error::InvalidInput("mu1 must be positive".into())),
            Model::Ql1m => Ok(()),
            Model::Wql1m => check_weights(&self.weights),
        }
        .and_then(|_| {
            if self.smoothing_delta >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput("smoothing delta must be nonnegative".into()))
            }
        })
    }

    /// Objective value on the matrix backend. qTPM uses the penalty form
    /// ½tr(X*AX) + (μ/4)‖X*X − I‖², which is what the circuit objective measures.
    pub fn value(&self, a: &HermitianOperator, x: &ComplexMatrix) -> Result<f64> {
        match self.model {
            Model::Qomm => qomm_value(a, x),
            Model::Qtpm => qtpm_penalty_value(a, x, self.mu),
            Model::Ql1m => ql1m_value(a, x, self.mu1),
            Model::Wql1m => weighted_ql1m_value(a, x, &self.weights, self.mu1),
        }
    }

    /// Euclidean gradient of [`ModelConfig::value`] (smoothed for the l1 models).
    pub fn gradient(&self, a: &HermitianOperator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self.model {
            Model::Qomm => Ok(qomm_grad(a, x)),
            Model::Qtpm => Ok(qtpm_penalty_grad(a, x, self.mu)),
            Model::Ql1m => Ok(ql1m_subgrad(a, x, self.mu1, self.smoothing_delta)),
            Model::Wql1m => weighted_ql1m_subgrad(a, x, &self.weights, self.mu1, self.smoothing_delta),
        }
    }

    /// Smoothed value consistent with [`ModelConfig::gradient`].
    pub fn smooth_value(&self, a: &HermitianOperator, x: &ComplexMatrix) -> Result<f64> {
        match self.model {
            Model::Ql1m => ql1m_smoothed_value(a, x, self.mu1, self.smoothing_delta),
            Model::Wql1m => {
                check_weights(&self.weights)?;
                let w = weighted_trace(a, x, &self.weights)?;
                Ok(w + self.mu1 * offdiag_penalty(&x.adjoint_mul(x), self.smoothing_delta))
            }
            _ => self.value(a, x),
        }
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() || w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) || w.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidWeights);
    }
    Ok(())
}

/// Real part of a trace that should be real, rejecting a significant imaginary part.
fn real_trace(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-8 * z.re.abs() + 1e-10 {
        return Err(Error::ImaginaryResidue { real: z.re, imag: z.im });
    }
    Ok(z.re)
}

fn check_shapes(a: &HermitianOperator, x: &ComplexMatrix) {
    assert_eq!(a.dim(), x.rows(), "operator dimension {} vs point rows {}", a.dim(), x.rows());
}

/// tr((2I − X*X)·X*AX).
pub fn qomm_value(a: &HermitianOperator, x: &ComplexMatrix) -> Result<f64> {
    check_shapes(a, x);
    let ax = a.apply(x);
    let b = x.adjoint_mul(&ax);
    let g = x.adjoint_mul(x);
    let t = b.trace() * 2.0 - g.matmul(&b).trace();
    real_trace(t)
}

/// 2·(2AX − AX·X*X − X·X*AX).
pub fn qomm_grad(a: &HermitianOperator, x: &ComplexMatrix) -> ComplexMatrix {
    check_shapes(a, x);
    let ax = a.apply(x);
    let g = x.adjoint_mul(x);
    let b = x.adjoint_mul(&ax);
    let t = &(&ax.scale(2.0) - &ax.matmul(&g)) - &x.matmul(&b);
    t.scale(2.0)
}

/// ½tr(X*AX) + (μ/4)tr((X*X)²).
pub fn qtpm_value(a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> Result<f64> {
    check_shapes(a, x);
    let b = x.adjoint_mul(&a.apply(x));
    let g = x.adjoint_mul(x);
    let t = b.trace() * 0.5 + Complex64::new(0.25 * mu * g.fro_norm_sq(), 0.0);
    real_trace(t)
}

/// AX + μ·X·X*X.
pub fn qtpm_grad(a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> ComplexMatrix {
    check_shapes(a, x);
    let g = x.adjoint_mul(x);
    &a.apply(x) + &x.matmul(&g).scale(mu)
}

/// ½tr(X*AX) + (μ/4)‖X*X − I‖²_F.
pub fn qtpm_penalty_value(a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> Result<f64> {
    check_shapes(a, x);
    let b = x.adjoint_mul(&a.apply(x));
    let mut g = x.adjoint_mul(x);
    for i in 0..g.rows() {
        g[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    let t = b.trace() * 0.5 + Complex64::new(0.25 * mu * g.fro_norm_sq(), 0.0);
    real_trace(t)
}

/// AX + μ·X(X*X − I).
pub fn qtpm_penalty_grad(a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> ComplexMatrix {
    &qtpm_grad(a, x, mu) - &x.scale(mu)
}

/// Σ_{i<j} φ(|m_ij|) with φ(t) = √(t² + δ²) (δ = 0 gives |m_ij|).
fn offdiag_penalty(m: &ComplexMatrix, delta: f64) -> f64 {
    let p = m.rows();
    let mut s = 0.0;
    for i in 0..p {
        for j in i + 1..p {
            let z = m[(i, j)];
            s += if delta > 0.0 { (z.norm_sqr() + delta * delta).sqrt() } else { z.norm() };
        }
    }
    s
}

/// W_ij = m_ij/√(|m_ij|² + δ²) off the diagonal, zero on it; 0 at m_ij = 0 when δ = 0.
fn offdiag_weights(m: &ComplexMatrix, delta: f64) -> ComplexMatrix {
    let p = m.rows();
    ComplexMatrix::from_fn(p, p, |i, j| {
        if i == j {
            return Complex64::new(0.0, 0.0);
        }
        let z = m[(i, j)];
        let d = (z.norm_sqr() + delta * delta).sqrt();
        if d > 0.0 {
            z / d
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// tr(X*AX) + μ₁Σ_{i<j}|(X*X)_ij|.
pub fn ql1m_value(a: &HermitianOperator, x: &ComplexMatrix, mu1: f64) -> Result<f64> {
    check_shapes(a, x);
    let t = real_trace(x.adjoint_mul(&a.apply(x)).trace())?;
    Ok(t + mu1 * offdiag_penalty(&x.adjoint_mul(x), 0.0))
}

/// qL1M value with each |z| replaced by √(|z|² + δ²).
pub fn ql1m_smoothed_value(a: &HermitianOperator, x: &ComplexMatrix, mu1: f64, delta: f64) -> Result<f64> {
    check_shapes(a, x);
    let t = real_trace(x.adjoint_mul(&a.apply(x)).trace())?;
    Ok(t + mu1 * offdiag_penalty(&x.adjoint_mul(x), delta))
}

/// 2AX + μ₁·X·W, the gradient of the δ-smoothed qL1M value.
pub fn ql1m_subgrad(a: &HermitianOperator, x: &ComplexMatrix, mu1: f64, delta: f64) -> ComplexMatrix {
    check_shapes(a, x);
    let w = offdiag_weights(&x.adjoint_mul(x), delta);
    &a.apply(x).scale(2.0) + &x.matmul(&w).scale(mu1)
}

fn weighted_trace(a: &HermitianOperator, x: &ComplexMatrix, w: &[f64]) -> Result<f64> {
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} columns", w.len(), x.cols())));
    }
    let b = x.adjoint_mul(&a.apply(x));
    let t: Complex64 = (0..w.len()).map(|i| b[(i, i)] * w[i]).sum();
    real_trace(t)
}

/// tr(X*AX·W) + μ₁Σ_{i<j}|(X*X)_ij| for strictly decreasing positive weights.
pub fn weighted_ql1m_value(a: &HermitianOperator, x: &ComplexMatrix, w: &[f64], mu1: f64) -> Result<f64> {
    check_shapes(a, x);
    check_weights(w)?;
    Ok(weighted_trace(a, x, w)? + mu1 * offdiag_penalty(&x.adjoint_mul(x), 0.0))
}

/// 2AX·W + μ₁·X·W_δ.
pub fn weighted_ql1m_subgrad(a: &HermitianOperator, x: &ComplexMatrix, w: &[f64], mu1: f64, delta: f64) -> Result<ComplexMatrix> {
    check_shapes(a, x);
    check_weights(w)?;
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} columns", w.len(), x.cols())));
    }
    let wd = offdiag_weights(&x.adjoint_mul(x), delta);
    Ok(&a.apply(x).scale_columns(w).scale(2.0) + &x.matmul(&wd).scale(mu1))
}

/// Shifted low-rank product form (μ/4)‖XX* − (I − A/μ)‖²_F.
pub fn slrp_value(a: &HermitianOperator, x: &ComplexMatrix, mu: f64) -> Result<f64> {
    check_shapes(a, x);
    if !(mu > 0.0) {
        return Err(Error::InvalidInput("mu must be positive".into()));
    }
    let n = a.dim();
    let mut target = a.matrix().scale(-1.0 / mu);
    for i in 0..n {
        target[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let r = &x.matmul(&x.adjoint()) - &target;
    Ok(0.25 * mu * r.fro_norm_sq())
}

/// ½‖XX* − A‖²_F.
pub fn slrp_plain_value(a: &HermitianOperator, x: &ComplexMatrix) -> f64 {
    check_shapes(a, x);
    0.5 * (&x.matmul(&x.adjoint()) - a.matrix()).fro_norm_sq()
}

/// Values at the local minima in terms of the lowest-p eigenvalues (ascending):
/// tr(Λ_p) for qOMM and qL1M, Σ w_i λ_i for weighted qL1M, and
/// tr(Λ_p)/2 + tr(Λ̄_p² − Λ_p²)/(4μ) for the qTPM penalty form.
pub fn reference_value(config: &ModelConfig, lowest: &[f64]) -> f64 {
    let p = lowest.len() as f64;
    let tr: f64 = lowest.iter().sum();
    match config.model {
        Model::Qomm | Model::Ql1m => tr,
        Model::Wql1m => lowest.iter().zip(&config.weights).map(|(l, w)| l * w).sum(),
        Model::Qtpm => {
            let mean = tr / p;
            let sq: f64 = lowest.iter().map(|l| l * l).sum();
            tr / 2.0 + (p * mean * mean - sq) / (4.0 * config.mu)
        }
    }
}

/// The same local-minimum value for the quartic form ½tr(X*AX) + (μ/4)tr((X*X)²),
/// which differs from the penalty form by μp/4 on the manifold.
pub fn qtpm_quartic_reference(lowest: &[f64], mu: f64) -> f64 {
    reference_value(&ModelConfig::qtpm(mu), lowest) + mu * lowest.len() as f64 / 4.0
}
