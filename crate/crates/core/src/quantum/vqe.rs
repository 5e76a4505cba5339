use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{apply_circuit, AnsatzCircuit, QuantumState};
use super::pauli::PauliHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{generalized_eigh, ComplexMatrix};
use crate::models::{Model, ModelConfig};

fn check_qubits(a: &QuantumState, b: &QuantumState) -> Result<()> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "states on {} and {} qubits",
            a.num_qubits(),
            b.num_qubits()
        )));
    }
    Ok(())
}

fn check_hamiltonian(h: &PauliHamiltonian, s: &QuantumState) -> Result<()> {
    if h.num_qubits != s.num_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian on {} qubits, state on {}",
            h.num_qubits,
            s.num_qubits()
        )));
    }
    Ok(())
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// ⟨ψ|φ⟩.
pub fn overlap(psi: &QuantumState, phi: &QuantumState) -> Result<Complex64> {
    check_qubits(psi, phi)?;
    Ok(inner(psi.amplitudes(), phi.amplitudes()))
}

/// ⟨ψ|H|φ⟩.
pub fn transition(psi: &QuantumState, h: &PauliHamiltonian, phi: &QuantumState) -> Result<Complex64> {
    check_qubits(psi, phi)?;
    check_hamiltonian(h, phi)?;
    Ok(inner(psi.amplitudes(), &h.apply(phi.amplitudes())))
}

/// ⟨ψ|H|ψ⟩.
pub fn expectation(h: &PauliHamiltonian, psi: &QuantumState) -> Result<f64> {
    let z = transition(psi, h, psi)?;
    if z.im.abs() > 1e-10 * (1.0 + z.re.abs()) {
        return Err(Error::ImaginaryResidue { real: z.re, imag: z.im });
    }
    Ok(z.re)
}

/// Runs circuit i on initial state i, each taking its slice of the concatenated parameters.
pub fn prepare_states(circuits: &[AnsatzCircuit], initial: &[QuantumState], params: &[f64]) -> Result<Vec<QuantumState>> {
    if circuits.len() != initial.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} circuits for {} initial states",
            circuits.len(),
            initial.len()
        )));
    }
    let total: usize = circuits.iter().map(|c| c.num_params).sum();
    if params.len() != total {
        return Err(Error::DimensionMismatch(format!("{} parameters, circuits need {}", params.len(), total)));
    }
    let mut offset = 0;
    let mut out = Vec::with_capacity(circuits.len());
    for (c, s) in circuits.iter().zip(initial) {
        out.push(apply_circuit(c, &params[offset..offset + c.num_params], s)?);
        offset += c.num_params;
    }
    Ok(out)
}

/// The statevectors as columns of a 2^q × p matrix.
pub fn states_to_matrix(states: &[QuantumState]) -> Result<ComplexMatrix> {
    let first = states.first().ok_or_else(|| Error::InvalidInput("no states".into()))?;
    for s in states {
        check_qubits(first, s)?;
    }
    let cols: Vec<Vec<Complex64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
    ComplexMatrix::from_columns(first.amplitudes().len(), &cols)
}

/// B_ij = ⟨ψ_i|H|ψ_j⟩ and C_ij = ⟨ψ_i|ψ_j⟩, filling the lower triangles by conjugation.
pub fn subspace_matrices(h: &PauliHamiltonian, states: &[QuantumState]) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let p = states.len();
    let mut b = ComplexMatrix::zeros(p, p);
    let mut c = ComplexMatrix::zeros(p, p);
    let hs: Vec<Vec<Complex64>> = states
        .iter()
        .map(|s| {
            check_hamiltonian(h, s)?;
            Ok(h.apply(s.amplitudes()))
        })
        .collect::<Result<_>>()?;
    for i in 0..p {
        for j in i..p {
            check_qubits(&states[i], &states[j])?;
            let bij = inner(states[i].amplitudes(), &hs[j]);
            let cij = inner(states[i].amplitudes(), states[j].amplitudes());
            b[(i, j)] = bij;
            c[(i, j)] = cij;
            if i != j {
                b[(j, i)] = bij.conj();
                c[(j, i)] = cij.conj();
            } else {
                b[(i, i)] = Complex64::new(bij.re, 0.0);
                c[(i, i)] = Complex64::new(cij.re, 0.0);
            }
        }
    }
    Ok((b, c))
}

/// Model objective assembled from the measured quantities B and C.
pub fn objective_from_subspace(config: &ModelConfig, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    config.validate()?;
    let p = b.rows();
    let diag_b: Vec<f64> = (0..p).map(|i| b[(i, i)].re).collect();
    let upper = |f: &dyn Fn(Complex64) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..p {
            for j in i + 1..p {
                s += f(c[(i, j)]);
            }
        }
        s
    };
    let v = match config.model {
        Model::Qomm => {
            // tr((2I − C)B) = 2Σ B_ii − Σ_ij C_ij B_ji
            let mut t = Complex64::new(2.0 * diag_b.iter().sum::<f64>(), 0.0);
            for i in 0..p {
                for j in 0..p {
                    t -= c[(i, j)] * b[(j, i)];
                }
            }
            t.re
        }
        Model::Qtpm => {
            let diag_c: f64 = (0..p).map(|i| (c[(i, i)].re - 1.0).powi(2)).sum();
            0.5 * diag_b.iter().sum::<f64>() + 0.5 * config.mu * upper(&|z| z.norm_sqr()) + 0.25 * config.mu * diag_c
        }
        Model::Ql1m => diag_b.iter().sum::<f64>() + config.mu1 * upper(&|z| z.norm()),
        Model::Wql1m => {
            if config.weights.len() != p {
                return Err(Error::DimensionMismatch(format!("{} weights for {} states", config.weights.len(), p)));
            }
            diag_b.iter().zip(&config.weights).map(|(b, w)| b * w).sum::<f64>() + config.mu1 * upper(&|z| z.norm())
        }
    };
    if !v.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(v)
}

/// VQE cost for p parameterized states |ψ_i⟩ = U_i(θ_i)|φ_i⟩.
pub fn vqe_objective(
    config: &ModelConfig,
    h: &PauliHamiltonian,
    circuits: &[AnsatzCircuit],
    initial: &[QuantumState],
    params: &[f64],
) -> Result<f64> {
    let states = prepare_states(circuits, initial, params)?;
    let (b, c) = subspace_matrices(h, &states)?;
    objective_from_subspace(config, &b, &c)
}

/// Inner-product test circuits a hardware run needs per objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub model: Model,
    pub hamiltonian_circuits: u64,
    pub regularization_circuits: u64,
}

pub fn resource_count(model: Model, p: u64, num_terms: u64) -> ResourceReport {
    let (hamiltonian_circuits, regularization_circuits) = match model {
        Model::Qomm => (p * p * num_terms, p * p.saturating_sub(1)),
        Model::Qtpm | Model::Ql1m | Model::Wql1m => (p * num_terms, p * p.saturating_sub(1) / 2),
    };
    ResourceReport {
        model,
        hamiltonian_circuits,
        regularization_circuits,
    }
}

/// Solves BR = CRΛ on span{ψ_i}; eigenvalues ascending.
pub fn rayleigh_ritz(states: &[QuantumState], h: &PauliHamiltonian) -> Result<(Vec<f64>, ComplexMatrix)> {
    if states.is_empty() {
        return Err(Error::InvalidInput("no states".into()));
    }
    let (b, c) = subspace_matrices(h, states)?;
    generalized_eigh(&b, &c)
}
