use serde::{Deserialize, Serialize};

use super::riemannian::minimize_oblique_observed;
use super::{minimize_scalar_field_observed, IterationRecord, Method, OptimizationTrace, OptimizerOptions};
use crate::error::{Error, Result};
use crate::linalg::{eigh, generalized_eigh, ComplexMatrix, HermitianOperator};
use crate::manifold::{orthogonality_error, random_oblique, ObliquePoint};
use crate::models::{reference_value, Model, ModelConfig};
use crate::quantum::{
    hamiltonian_matrix, prepare_states, rayleigh_ritz, states_to_matrix, vqe_objective, AnsatzCircuit, PauliHamiltonian,
    QuantumState, DENSE_QUBIT_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Matrix,
    Statevector,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matrix" => Ok(Backend::Matrix),
            "statevector" => Ok(Backend::Statevector),
            other => Err(Error::Parse(format!("unknown backend '{}'", other))),
        }
    }
}

pub enum Problem<'a> {
    Matrix {
        a: &'a HermitianOperator,
        p: usize,
        /// Random point from the options seed when absent.
        start: Option<ObliquePoint>,
    },
    Statevector {
        h: &'a PauliHamiltonian,
        circuits: &'a [AnsatzCircuit],
        initial: &'a [QuantumState],
        /// All zeros when absent.
        params: Option<Vec<f64>>,
    },
}

impl Problem<'_> {
    pub fn backend(&self) -> Backend {
        match self {
            Problem::Matrix { .. } => Backend::Matrix,
            Problem::Statevector { .. } => Backend::Statevector,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Rayleigh–Ritz values on the final span, ascending.
    pub eigenvalues: Vec<f64>,
    /// Ritz vectors as columns.
    pub vectors: ComplexMatrix,
    /// Optimized columns (matrix backend) or final statevectors.
    pub states: ComplexMatrix,
    pub params: Option<Vec<f64>>,
    /// Model value at the optimum, on the shifted operator when `shift` ≠ 0.
    pub objective: f64,
    pub reference_objective: Option<f64>,
    pub reference_eigenvalues: Option<Vec<f64>>,
    pub eigenvalue_rel_error: Option<f64>,
    pub orthogonality_error: f64,
    /// qOMM runs on A − shift·I when A is not negative definite.
    pub shift: f64,
    pub trace: OptimizationTrace,
}

/// ‖λ − λ_ref‖₂ / ‖λ_ref‖₂.
pub fn relative_l2_error(values: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = values.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn relative_error(v: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        v.abs()
    } else {
        ((v - reference) / reference).abs()
    }
}

/// Weighted qL1M without explicit weights uses p, p−1, …, 1.
fn effective_config(config: &ModelConfig, p: usize) -> ModelConfig {
    let mut c = config.clone();
    if c.model == Model::Wql1m && c.weights.is_empty() {
        c.weights = (0..p).map(|i| (p - i) as f64).collect();
    }
    c
}

fn ritz(a: &HermitianOperator, x: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let b = x.adjoint_mul(&a.apply(x));
    let c = x.adjoint_mul(x);
    let (vals, r) = generalized_eigh(&b, &c)?;
    Ok((vals, x.matmul(&r)))
}

/// Minimizes the model on the chosen backend and extracts eigenpairs by Rayleigh–Ritz.
pub fn solve_eigenpairs(config: &ModelConfig, problem: Problem, opts: &OptimizerOptions) -> Result<EigenSolution> {
    opts.validate()?;
    match problem {
        Problem::Matrix { a, p, start } => solve_matrix(config, a, p, start, opts),
        Problem::Statevector { h, circuits, initial, params } => solve_statevector(config, h, circuits, initial, params, opts),
    }
}

fn solve_matrix(
    config: &ModelConfig,
    a: &HermitianOperator,
    p: usize,
    start: Option<ObliquePoint>,
    opts: &OptimizerOptions,
) -> Result<EigenSolution> {
    let n = a.dim();
    if p == 0 || p > n {
        return Err(Error::InvalidInput(format!("need 1 <= p <= {}, got {}", n, p)));
    }
    let config = effective_config(config, p);
    config.validate()?;
    let (work, shift) = if config.model == Model::Qomm && !a.is_negative_definite() {
        a.negative_definite_shift()
    } else {
        (a.clone(), 0.0)
    };
    let spectrum = eigh(a).values;
    let lowest = spectrum[..p].to_vec();
    let shifted: Vec<f64> = lowest.iter().map(|l| l - shift).collect();
    let ref_obj = reference_value(&config, &shifted);
    let x0 = match start {
        Some(x) => {
            if x.n() != n || x.p() != p {
                return Err(Error::DimensionMismatch("start point shape".into()));
            }
            x
        }
        None => random_oblique(n, p, opts.seed)?,
    };
    let observer = |x: &ComplexMatrix, rec: &mut IterationRecord| {
        rec.relative_objective_error = Some(relative_error(rec.objective, ref_obj));
        rec.eigenvalue_rel_error = ritz(a, x).ok().map(|(v, _)| relative_l2_error(&v, &lowest));
    };
    let m = minimize_oblique_observed(&config, &work, &x0, opts, observer)?;
    let x = m.point.into_matrix();
    let (eigenvalues, vectors) = ritz(a, &x)?;
    Ok(EigenSolution {
        eigenvalue_rel_error: Some(relative_l2_error(&eigenvalues, &lowest)),
        eigenvalues,
        vectors,
        orthogonality_error: orthogonality_error(&x),
        states: x,
        params: None,
        objective: m.value,
        reference_objective: Some(ref_obj),
        reference_eigenvalues: Some(lowest),
        shift,
        trace: m.trace,
    })
}

fn solve_statevector(
    config: &ModelConfig,
    h: &PauliHamiltonian,
    circuits: &[AnsatzCircuit],
    initial: &[QuantumState],
    params: Option<Vec<f64>>,
    opts: &OptimizerOptions,
) -> Result<EigenSolution> {
    if opts.method == Method::RiemannianGd {
        return Err(Error::InvalidInput("the statevector backend needs a derivative-free optimizer".into()));
    }
    let p = initial.len();
    if p == 0 || circuits.len() != p {
        return Err(Error::InvalidInput(format!("{} circuits for {} initial states", circuits.len(), p)));
    }
    for s in initial {
        if s.num_qubits() != h.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "initial state on {} qubits, Hamiltonian on {}",
                s.num_qubits(),
                h.num_qubits
            )));
        }
    }
    let config = effective_config(config, p);
    config.validate()?;
    let dense = if h.num_qubits <= DENSE_QUBIT_LIMIT { Some(hamiltonian_matrix(h)?) } else { None };
    let lowest = dense.as_ref().map(|d| eigh(d).values[..p.min(d.dim())].to_vec());
    let shift = if config.model == Model::Qomm {
        match &dense {
            Some(d) if d.is_negative_definite() => 0.0,
            Some(d) => d.gershgorin_upper() + 1.0,
            // Σ|c_k| bounds the spectral radius.
            None => h.terms.iter().map(|t| t.coeff.abs()).sum::<f64>() + 1.0,
        }
    } else {
        0.0
    };
    let work = if shift != 0.0 { h.with_identity_offset(-shift) } else { h.clone() };
    let ref_obj = lowest.as_ref().filter(|l| l.len() == p).map(|l| {
        let shifted: Vec<f64> = l.iter().map(|v| v - shift).collect();
        reference_value(&config, &shifted)
    });
    let total: usize = circuits.iter().map(|c| c.num_params).sum();
    let x0 = params.unwrap_or_else(|| vec![0.0; total]);
    if x0.len() != total {
        return Err(Error::DimensionMismatch(format!("{} starting parameters, circuits need {}", x0.len(), total)));
    }
    let f = |theta: &[f64]| vqe_objective(&config, &work, circuits, initial, theta);
    let observer = |theta: &[f64], rec: &mut IterationRecord| {
        rec.relative_objective_error = ref_obj.map(|r| relative_error(rec.objective, r));
        if let Ok(states) = prepare_states(circuits, initial, theta) {
            if let Ok(x) = states_to_matrix(&states) {
                rec.orthogonality_error = Some(orthogonality_error(&x));
            }
            if let (Some(l), Ok((v, _))) = (&lowest, rayleigh_ritz(&states, h)) {
                rec.eigenvalue_rel_error = Some(relative_l2_error(&v, l));
            }
        }
    };
    if x0.is_empty() {
        return Err(Error::InvalidInput("the ansatz has no parameters".into()));
    }
    let m = minimize_scalar_field_observed(f, &x0, opts, observer)?;
    let states = prepare_states(circuits, initial, &m.x)?;
    let x = states_to_matrix(&states)?;
    let (eigenvalues, r) = rayleigh_ritz(&states, h)?;
    Ok(EigenSolution {
        eigenvalue_rel_error: lowest.as_ref().map(|l| relative_l2_error(&eigenvalues, l)),
        eigenvalues,
        vectors: x.matmul(&r),
        orthogonality_error: orthogonality_error(&x),
        states: x,
        params: Some(m.x),
        objective: m.value,
        reference_objective: ref_obj,
        reference_eigenvalues: lowest,
        shift,
        trace: m.trace,
    })
}
