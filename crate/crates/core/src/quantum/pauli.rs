use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

/// Dense matrices are only built up to this many qubits.
pub const DENSE_QUBIT_LIMIT: usize = 12;

/// A Pauli string compiled to bit masks. Character k acts on qubit k, and qubit 0
/// is the least significant bit of the amplitude index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMask {
    /// Qubits carrying X or Y.
    pub flip: usize,
    /// Qubits carrying Z or Y.
    pub phase: usize,
    pub num_y: u32,
}

impl PauliMask {
    /// Parses a string over {I, X, Y, Z} placing character k on `qubits[k]`.
    pub fn on_qubits(pauli: &str, qubits: &[usize]) -> Result<Self> {
        if pauli.chars().count() != qubits.len() {
            return Err(Error::Parse(format!("pauli '{}' does not match {} qubits", pauli, qubits.len())));
        }
        let mut m = PauliMask { flip: 0, phase: 0, num_y: 0 };
        for (ch, &q) in pauli.chars().zip(qubits) {
            let bit = 1usize << q;
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => m.flip |= bit,
                'Y' => {
                    m.flip |= bit;
                    m.phase |= bit;
                    m.num_y += 1;
                }
                'Z' => m.phase |= bit,
                other => return Err(Error::Parse(format!("invalid Pauli character '{}'", other))),
            }
        }
        Ok(m)
    }

    pub fn parse(pauli: &str) -> Result<Self> {
        let q: Vec<usize> = (0..pauli.chars().count()).collect();
        Self::on_qubits(pauli, &q)
    }

    fn y_phase(&self) -> Complex64 {
        match self.num_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// out += c·P·psi, using P|b⟩ = i^{nY}·(−1)^{|b ∧ phase|}·|b ⊕ flip⟩.
    pub fn apply_add(&self, c: Complex64, psi: &[Complex64], out: &mut [Complex64]) {
        let f = c * self.y_phase();
        for (b, &amp) in psi.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let sign = if (b & self.phase).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ self.flip] += amp * f * sign;
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_add(Complex64::new(1.0, 0.0), psi, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub pauli: String,
    pub coeff: f64,
}

/// H = Σ_k c_k·P_k with real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PauliHamiltonian {
    pub num_qubits: usize,
    pub terms: Vec<PauliTerm>,
    #[serde(skip)]
    masks: Vec<PauliMask>,
}

impl PauliHamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize - 1 {
            return Err(Error::InvalidInput(format!("unsupported qubit count {}", num_qubits)));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("Hamiltonian has no terms".into()));
        }
        let mut masks = Vec::with_capacity(terms.len());
        for t in &terms {
            if t.pauli.chars().count() != num_qubits {
                return Err(Error::Parse(format!("term '{}' has length != {}", t.pauli, num_qubits)));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidInput(format!("term '{}' has a non-finite coefficient", t.pauli)));
            }
            masks.push(PauliMask::parse(&t.pauli)?);
        }
        Ok(Self { num_qubits, terms, masks })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            num_qubits: usize,
            terms: Vec<PauliTerm>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.num_qubits, raw.terms)
    }

    /// N_U, the number of Pauli terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    /// H·psi.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (t, m) in self.terms.iter().zip(&self.masks) {
            m.apply_add(Complex64::new(t.coeff, 0.0), psi, &mut out);
        }
        out
    }

    /// H + c·I.
    pub fn with_identity_offset(&self, c: f64) -> Self {
        let mut terms = self.terms.clone();
        terms.push(PauliTerm {
            pauli: "I".repeat(self.num_qubits),
            coeff: c,
        });
        Self::new(self.num_qubits, terms).expect("valid identity term")
    }
}

/// Dense matrix Σ c_k·P_k, built column by column.
pub fn hamiltonian_matrix(h: &PauliHamiltonian) -> Result<HermitianOperator> {
    if h.num_qubits > DENSE_QUBIT_LIMIT {
        return Err(Error::TooLarge(h.num_qubits));
    }
    let n = h.dim();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for b in 0..n {
        e[b] = Complex64::new(1.0, 0.0);
        let col = h.apply(&e);
        m.set_column(b, &col);
        e[b] = Complex64::new(0.0, 0.0);
    }
    HermitianOperator::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ham(terms: &[(&str, f64)]) -> PauliHamiltonian {
        let q = terms[0].0.len();
        PauliHamiltonian::new(
            q,
            terms
                .iter()
                .map(|(p, c)| PauliTerm {
                    pauli: p.to_string(),
                    coeff: *c,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_z() {
        let m = hamiltonian_matrix(&ham(&[("Z", 1.0)])).unwrap();
        assert_eq!(m.matrix()[(0, 0)].re, 1.0);
        assert_eq!(m.matrix()[(1, 1)].re, -1.0);
    }

    #[test]
    fn xx_is_antidiagonal() {
        let m = hamiltonian_matrix(&ham(&[("XX", 0.5)])).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 0.5 } else { 0.0 };
                assert_eq!(m.matrix()[(i, j)], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn y_matrix() {
        let m = hamiltonian_matrix(&ham(&[("Y", 1.0)])).unwrap();
        assert_eq!(m.matrix()[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m.matrix()[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn character_zero_is_qubit_zero() {
        // "ZI": Z on qubit 0, which is the low bit of the index.
        let m = hamiltonian_matrix(&ham(&[("ZI", 1.0)])).unwrap();
        let d: Vec<f64> = m.matrix().diag().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn rejects_bad_strings() {
        assert!(PauliHamiltonian::new(2, vec![PauliTerm { pauli: "XQ".into(), coeff: 1.0 }]).is_err());
        assert!(PauliHamiltonian::new(2, vec![PauliTerm { pauli: "X".into(), coeff: 1.0 }]).is_err());
    }

    #[test]
    fn too_large_for_dense() {
        let h = ham(&[(&"Z".repeat(13), 1.0)]);
        assert_eq!(hamiltonian_matrix(&h), Err(Error::TooLarge(13)));
    }
}
