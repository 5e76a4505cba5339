//! Derivative-free minimizers over circuit parameters and Riemannian descent
//! on the oblique manifold.

mod dense;
mod riemannian;
mod simplex;
mod solve;
mod trust;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use riemannian::{minimize_oblique, ObliqueMinimum};
pub use solve::{solve_eigenpairs, Backend, EigenSolution, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Simplex,
    ModelTrustRegion,
    RiemannianGd,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simplex" | "nelder-mead" => Ok(Method::Simplex),
            "trust" | "model_trust_region" | "bobyqa" => Ok(Method::ModelTrustRegion),
            "gd" | "riemannian_gd" | "riemannian" => Ok(Method::RiemannianGd),
            other => Err(Error::Parse(format!("unknown optimizer '{}'", other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub method: Method,
    pub rho_begin: f64,
    pub rho_end: f64,
    /// Objective evaluations for the derivative-free methods, gradient steps for RIEMANNIAN_GD.
    pub max_iters: usize,
    pub seed: u64,
    /// Riemannian gradient threshold; defaults to 1e-6·‖A‖_F.
    #[serde(default)]
    pub grad_tol: Option<f64>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            method: Method::ModelTrustRegion,
            rho_begin: 1e-1,
            rho_end: 1e-7,
            max_iters: 600,
            seed: 0,
            grad_tol: None,
        }
    }
}

impl OptimizerOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_end > 0.0 && self.rho_end < self.rho_begin && self.rho_begin.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need 0 < rho_end < rho_begin, got {} and {}",
                self.rho_end, self.rho_begin
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if let Some(t) = self.grad_tol {
            if !(t > 0.0) {
                return Err(Error::InvalidInput("grad_tol must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationStatus {
    RadiusConverged,
    MaxIters,
}

/// One row of a trace. `objective` is the best value seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub relative_objective_error: Option<f64>,
    pub orthogonality_error: Option<f64>,
    pub eigenvalue_rel_error: Option<f64>,
    pub evaluations: usize,
}

impl IterationRecord {
    fn new(iter: usize, objective: f64, evaluations: usize) -> Self {
        Self {
            iter,
            objective,
            relative_objective_error: None,
            orthogonality_error: None,
            eigenvalue_rel_error: None,
            evaluations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<IterationRecord>,
    pub status: TerminationStatus,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub trace: OptimizationTrace,
}

/// A run stopped by an error; `partial` holds the best point found before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct Aborted {
    pub error: Error,
    pub partial: Minimum,
}

impl From<Aborted> for Error {
    fn from(a: Aborted) -> Self {
        a.error
    }
}

/// Fills trace metrics for the current best point.
pub type Observer<'a> = dyn FnMut(&[f64], &mut IterationRecord) + 'a;

/// Counts evaluations, keeps the incumbent and writes one record per evaluation.
pub(crate) struct Tracker<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    observer: Option<&'a mut Observer<'a>>,
    pub evals: usize,
    pub max_evals: usize,
    pub best_x: Vec<f64>,
    pub best_f: f64,
    records: Vec<IterationRecord>,
}

impl<'a> Tracker<'a> {
    fn new(f: &'a mut dyn FnMut(&[f64]) -> Result<f64>, observer: Option<&'a mut Observer<'a>>, max_evals: usize, x0: &[f64]) -> Self {
        Self {
            f,
            observer,
            evals: 0,
            max_evals,
            best_x: x0.to_vec(),
            best_f: f64::INFINITY,
            records: Vec::new(),
        }
    }

    pub fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        self.evals += 1;
        let improved = v < self.best_f;
        if improved {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        let mut rec = IterationRecord::new(self.evals, self.best_f, self.evals);
        match (&mut self.observer, improved, self.records.last()) {
            (Some(obs), true, _) | (Some(obs), _, None) => obs(&self.best_x, &mut rec),
            (Some(_), false, Some(prev)) => {
                rec.relative_objective_error = prev.relative_objective_error;
                rec.orthogonality_error = prev.orthogonality_error;
                rec.eigenvalue_rel_error = prev.eigenvalue_rel_error;
            }
            _ => {}
        }
        self.records.push(rec);
        Ok(v)
    }

    fn finish(self, status: TerminationStatus) -> Minimum {
        Minimum {
            x: self.best_x,
            value: self.best_f,
            trace: OptimizationTrace {
                records: self.records,
                status,
                evaluations: self.evals,
            },
        }
    }
}

/// Minimizes f from x0 with SIMPLEX or MODEL_TRUST_REGION.
pub fn minimize_scalar_field<F>(mut f: F, x0: &[f64], opts: &OptimizerOptions) -> std::result::Result<Minimum, Aborted>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    run(&mut f, None, x0, opts)
}

/// As [`minimize_scalar_field`], letting `observer` annotate each trace record.
pub fn minimize_scalar_field_observed<F, O>(
    mut f: F,
    x0: &[f64],
    opts: &OptimizerOptions,
    mut observer: O,
) -> std::result::Result<Minimum, Aborted>
where
    F: FnMut(&[f64]) -> Result<f64>,
    O: FnMut(&[f64], &mut IterationRecord),
{
    run(&mut f, Some(&mut observer), x0, opts)
}

fn run<'a>(
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    observer: Option<&'a mut Observer<'a>>,
    x0: &[f64],
    opts: &OptimizerOptions,
) -> std::result::Result<Minimum, Aborted> {
    let mut t = Tracker::new(f, observer, opts.max_iters, x0);
    let outcome = opts.validate().and_then(|_| {
        if x0.is_empty() {
            return Err(Error::InvalidInput("empty starting point".into()));
        }
        match opts.method {
            Method::Simplex => simplex::nelder_mead(&mut t, x0, opts),
            Method::ModelTrustRegion => trust::model_trust_region(&mut t, x0, opts),
            Method::RiemannianGd => Err(Error::InvalidInput(
                "RIEMANNIAN_GD needs a manifold objective; use minimize_oblique".into(),
            )),
        }
    });
    match outcome {
        Ok(status) => Ok(t.finish(status)),
        Err(error) => Err(Aborted {
            error,
            partial: t.finish(TerminationStatus::MaxIters),
        }),
    }
}
