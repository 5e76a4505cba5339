//! Statevector emulation: Pauli Hamiltonians, ansatz circuits, and the
//! inner products the variational objectives are built from.

mod circuit;
mod pauli;
mod vqe;

pub use circuit::{apply_circuit, AnsatzCircuit, Gate, GateKind, QuantumState};
pub use pauli::{hamiltonian_matrix, PauliHamiltonian, PauliMask, PauliTerm, DENSE_QUBIT_LIMIT};
pub use vqe::{
    expectation, objective_from_subspace, overlap, prepare_states, rayleigh_ritz, resource_count, states_to_matrix,
    subspace_matrices, transition, vqe_objective, ResourceReport,
};

/// Parses a JSON list of bitstrings into basis states.
pub fn initial_states_from_json(text: &str) -> crate::Result<Vec<QuantumState>> {
    let bits: Vec<String> = serde_json::from_str(text).map_err(|e| crate::Error::Parse(e.to_string()))?;
    bits.iter().map(|b| QuantumState::from_bitstring(b)).collect()
}
