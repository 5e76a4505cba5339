use num_complex::Complex64;

use super::{minimize_scalar_field_observed, IterationRecord, Method, OptimizationTrace, OptimizerOptions, TerminationStatus};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::manifold::{orthogonality_error, retract, tangent_project, ObliquePoint};
use crate::models::{Model, ModelConfig};

const MAX_BACKTRACKS: usize = 50;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueMinimum {
    pub point: ObliquePoint,
    /// Unsmoothed model value at `point`.
    pub value: f64,
    pub trace: OptimizationTrace,
    pub accepted_moves: usize,
}

/// Minimizes a model over OB(n, p). RIEMANNIAN_GD uses projected gradients with
/// Barzilai–Borwein steps and Armijo backtracking; the derivative-free methods
/// run on the chart Y ↦ normalized columns of Y.
pub fn minimize_oblique(
    config: &ModelConfig,
    a: &HermitianOperator,
    x0: &ObliquePoint,
    opts: &OptimizerOptions,
) -> Result<ObliqueMinimum> {
    minimize_oblique_observed(config, a, x0, opts, |_, _| {})
}

/// As [`minimize_oblique`], with `observer` annotating each trace record from the iterate.
pub fn minimize_oblique_observed<O>(
    config: &ModelConfig,
    a: &HermitianOperator,
    x0: &ObliquePoint,
    opts: &OptimizerOptions,
    mut observer: O,
) -> Result<ObliqueMinimum>
where
    O: FnMut(&ComplexMatrix, &mut IterationRecord),
{
    config.validate()?;
    opts.validate()?;
    if x0.n() != a.dim() {
        return Err(Error::DimensionMismatch(format!("point has {} rows, operator {}", x0.n(), a.dim())));
    }
    match opts.method {
        Method::RiemannianGd => gradient_descent(config, a, x0, opts, &mut observer),
        Method::Simplex | Method::ModelTrustRegion => chart_search(config, a, x0, opts, &mut observer),
    }
}

fn to_real(x: &ComplexMatrix) -> Vec<f64> {
    x.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_real(rows: usize, cols: usize, v: &[f64]) -> Result<ComplexMatrix> {
    let data = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    ComplexMatrix::from_row_major(rows, cols, data)
}

fn chart_search(
    config: &ModelConfig,
    a: &HermitianOperator,
    x0: &ObliquePoint,
    opts: &OptimizerOptions,
    observer: &mut dyn FnMut(&ComplexMatrix, &mut IterationRecord),
) -> Result<ObliqueMinimum> {
    let (n, p) = (x0.n(), x0.p());
    let f = |v: &[f64]| -> Result<f64> { config.value(a, retract(&from_real(n, p, v)?)?.matrix()) };
    let obs = |v: &[f64], rec: &mut IterationRecord| {
        if let Ok(x) = from_real(n, p, v).and_then(|m| retract(&m)) {
            rec.orthogonality_error = Some(orthogonality_error(x.matrix()));
            observer(x.matrix(), rec);
        }
    };
    let m = minimize_scalar_field_observed(f, &to_real(x0.matrix()), opts, obs)?;
    let point = retract(&from_real(n, p, &m.x)?)?;
    let accepted_moves = m.trace.records.windows(2).filter(|w| w[1].objective < w[0].objective).count();
    Ok(ObliqueMinimum {
        value: config.value(a, point.matrix())?,
        point,
        trace: m.trace,
        accepted_moves,
    })
}

/// (μ₁, δ) schedule. The l1 models first solve at a moderate μ₁ near ‖A‖₂, where
/// the penalty is well conditioned, then raise μ₁ tenfold per stage to the target
/// (minimizers do not move once μ₁ exceeds the exact-penalty threshold), and
/// finally shrink δ from 1e-2 to the configured value.
fn continuation_stages(config: &ModelConfig, a: &HermitianOperator) -> Vec<(f64, f64)> {
    match config.model {
        Model::Ql1m | Model::Wql1m if config.smoothing_delta > 0.0 => {
            let mut v = Vec::new();
            let mut mu1 = config.mu1.min(a.spectral_norm());
            while mu1 < config.mu1 / 1.0001 {
                v.push((mu1, 1e-2));
                mu1 *= 10.0;
            }
            let mut d = 1e-2;
            while d > config.smoothing_delta * 1.0001 {
                v.push((config.mu1, d));
                d *= 0.1;
            }
            v.push((config.mu1, config.smoothing_delta));
            v
        }
        _ => vec![(config.mu1, config.smoothing_delta)],
    }
}

fn gradient_descent(
    config: &ModelConfig,
    a: &HermitianOperator,
    x0: &ObliquePoint,
    opts: &OptimizerOptions,
    observer: &mut dyn FnMut(&ComplexMatrix, &mut IterationRecord),
) -> Result<ObliqueMinimum> {
    let scale = a.fro_norm().max(f64::MIN_POSITIVE);
    let tol = opts.grad_tol.unwrap_or(1e-6 * scale);
    let stages = continuation_stages(config, a);
    let mut x = x0.clone();
    let mut records = Vec::new();
    let mut iters = 0usize;
    let mut evals = 0usize;
    let mut accepted = 0usize;
    let mut status = TerminationStatus::MaxIters;
    let record = |iter: usize, obj: f64, evals: usize, x: &ObliquePoint, observer: &mut dyn FnMut(&ComplexMatrix, &mut IterationRecord)| {
        let mut rec = IterationRecord::new(iter, obj, evals);
        rec.orthogonality_error = Some(orthogonality_error(x.matrix()));
        observer(x.matrix(), &mut rec);
        rec
    };
    // Traces report the target objective, not the stage surrogate.
    let shown = |f: f64, x: &ObliquePoint| -> Result<f64> {
        match config.model {
            Model::Ql1m | Model::Wql1m => config.value(a, x.matrix()),
            _ => Ok(f),
        }
    };
    let mut step = 1.0 / scale;
    for (si, &(mu1, delta)) in stages.iter().enumerate() {
        let last_stage = si + 1 == stages.len();
        let cfg = ModelConfig {
            mu1,
            smoothing_delta: delta,
            ..config.clone()
        };
        let value = |x: &ObliquePoint| -> Result<f64> {
            let v = cfg.smooth_value(a, x.matrix())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteObjective)
            }
        };
        let rgrad = |x: &ObliquePoint| -> Result<ComplexMatrix> { tangent_project(x, &cfg.gradient(a, x.matrix())?) };
        let mut f = value(&x)?;
        evals += 1;
        let mut r = rgrad(&x)?;
        if records.is_empty() {
            records.push(record(0, shown(f, &x)?, evals, &x, observer));
        }
        let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
        // Earlier smoothing stages only need a rough solve.
        let stage_tol = if last_stage { tol } else { tol.max(1e-3 * scale * delta.sqrt()) };
        loop {
            let gn2 = r.fro_norm_sq();
            if gn2.sqrt() <= stage_tol {
                status = TerminationStatus::RadiusConverged;
                break;
            }
            if iters >= opts.max_iters {
                status = TerminationStatus::MaxIters;
                break;
            }
            if let Some((px, pr)) = &prev {
                let s = x.matrix() - px;
                let y = &r - pr;
                let sy = s.real_inner(&y);
                if sy > 0.0 {
                    step = if iters.is_multiple_of(2) { s.fro_norm_sq() / sy } else { sy / y.fro_norm_sq() };
                }
            }
            step = step.clamp(1e-14 / scale, 1e14 / scale);
            let mut t = step;
            let mut next = None;
            for _ in 0..MAX_BACKTRACKS {
                let cand = retract(&(x.matrix() - &r.scale(t)))?;
                let fc = value(&cand)?;
                evals += 1;
                if fc <= f - ARMIJO * t * gn2 {
                    next = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, fnew)) = next else {
                // Decrease below rounding level: the iterate is as good as arithmetic allows.
                if t * gn2 <= 1e-13 * f.abs().max(1.0) {
                    status = TerminationStatus::RadiusConverged;
                    break;
                }
                return Err(Error::LineSearchFailure(MAX_BACKTRACKS));
            };
            iters += 1;
            accepted += 1;
            let rn = rgrad(&xn)?;
            prev = Some((x.into_matrix(), std::mem::replace(&mut r, rn)));
            x = xn;
            f = fnew;
            step = t;
            records.push(record(iters, shown(f, &x)?, evals, &x, observer));
        }
        if status == TerminationStatus::MaxIters {
            break;
        }
    }
    Ok(ObliqueMinimum {
        value: config.value(a, x.matrix())?,
        point: x,
        trace: OptimizationTrace {
            records,
            status,
            evaluations: evals,
        },
        accepted_moves: accepted,
    })
}
