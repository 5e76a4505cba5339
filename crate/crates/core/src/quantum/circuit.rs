use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::PauliMask;
use crate::error::{Error, Result};

/// Normalized statevector on `num_qubits` qubits (qubit 0 = lowest index bit).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                num_qubits
            )));
        }
        let nrm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("state norm {:.15} is not one", nrm)));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// |b⟩ with character k of `bits` giving qubit k.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let q = bits.chars().count();
        if q == 0 || q > 30 {
            return Err(Error::Parse(format!("bitstring '{}' has unsupported length", bits)));
        }
        let mut idx = 0usize;
        for (k, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => idx |= 1 << k,
                _ => return Err(Error::Parse(format!("invalid bit '{}' in '{}'", ch, bits))),
            }
        }
        Ok(Self::basis(q, idx))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
    PauliRot,
}

/// One gate. Rotation angle θ = angle + scale·params[param]; rotations are exp(−iθP/2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// Target qubit for RX/RY/RZ, [control, target] for CNOT, and the qubits the
    /// Pauli string acts on for PAULI_ROT (all qubits in order when empty).
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(default = "unit_scale")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

fn unit_scale() -> f64 {
    1.0
}

impl Gate {
    pub fn pauli_rot(pauli: &str, param: usize, scale: f64) -> Self {
        Self {
            kind: GateKind::PauliRot,
            qubits: Vec::new(),
            pauli: Some(pauli.to_string()),
            param: Some(param),
            scale,
            angle: None,
        }
    }

    pub fn single(kind: GateKind, qubit: usize, param: usize) -> Self {
        Self {
            kind,
            qubits: vec![qubit],
            pauli: None,
            param: Some(param),
            scale: 1.0,
            angle: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
            pauli: None,
            param: None,
            scale: 1.0,
            angle: None,
        }
    }

    fn theta(&self, params: &[f64]) -> f64 {
        self.angle.unwrap_or(0.0) + self.param.map(|k| self.scale * params[k]).unwrap_or(0.0)
    }

    fn mask(&self, num_qubits: usize) -> Result<PauliMask> {
        let single = |c: &str| -> Result<PauliMask> {
            if self.qubits.len() != 1 {
                return Err(Error::InvalidInput("single-qubit rotation needs exactly one qubit".into()));
            }
            PauliMask::on_qubits(c, &self.qubits)
        };
        match self.kind {
            GateKind::Rx => single("X"),
            GateKind::Ry => single("Y"),
            GateKind::Rz => single("Z"),
            GateKind::PauliRot => {
                let p = self
                    .pauli
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput("PAULI_ROT needs a pauli string".into()))?;
                if self.qubits.is_empty() {
                    let all: Vec<usize> = (0..num_qubits).collect();
                    PauliMask::on_qubits(p, &all)
                } else {
                    PauliMask::on_qubits(p, &self.qubits)
                }
            }
            GateKind::Cnot => Err(Error::InvalidInput("CNOT is not a rotation".into())),
        }
    }
}

/// Ordered gate list acting on `num_qubits` qubits with `num_params` parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzCircuit {
    pub num_qubits: usize,
    pub num_params: usize,
    pub gates: Vec<Gate>,
}

impl AnsatzCircuit {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            for &q in &g.qubits {
                if q >= self.num_qubits {
                    return Err(Error::IndexError {
                        index: q,
                        num_qubits: self.num_qubits,
                    });
                }
            }
            if let Some(k) = g.param {
                if k >= self.num_params {
                    return Err(Error::InvalidInput(format!("param index {} >= {}", k, self.num_params)));
                }
            } else if g.kind != GateKind::Cnot && g.angle.is_none() {
                return Err(Error::InvalidInput("rotation gate needs a param index or a fixed angle".into()));
            }
            match g.kind {
                GateKind::Cnot => {
                    if g.qubits.len() != 2 || g.qubits[0] == g.qubits[1] {
                        return Err(Error::InvalidInput("CNOT needs two distinct qubits".into()));
                    }
                }
                _ => {
                    g.mask(self.num_qubits)?;
                }
            }
        }
        Ok(())
    }
}

/// ψ ← (cos(θ/2)·I − i·sin(θ/2)·P)·ψ.
fn apply_rotation(mask: &PauliMask, theta: f64, psi: &mut Vec<Complex64>) {
    let (s, c) = (theta / 2.0).sin_cos();
    let mut out: Vec<Complex64> = psi.iter().map(|z| z * c).collect();
    mask.apply_add(Complex64::new(0.0, -s), psi, &mut out);
    *psi = out;
}

fn apply_cnot(control: usize, target: usize, psi: &mut [Complex64]) {
    let (cb, tb) = (1usize << control, 1usize << target);
    for b in 0..psi.len() {
        if b & cb != 0 && b & tb == 0 {
            psi.swap(b, b | tb);
        }
    }
}

/// U(θ)|state⟩.
pub fn apply_circuit(circuit: &AnsatzCircuit, params: &[f64], state: &QuantumState) -> Result<QuantumState> {
    if params.len() != circuit.num_params {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for a circuit with {}",
            params.len(),
            circuit.num_params
        )));
    }
    if state.num_qubits() != circuit.num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, circuit {}",
            state.num_qubits(),
            circuit.num_qubits
        )));
    }
    let mut psi = state.amplitudes().to_vec();
    for g in &circuit.gates {
        for &q in &g.qubits {
            if q >= circuit.num_qubits {
                return Err(Error::IndexError {
                    index: q,
                    num_qubits: circuit.num_qubits,
                });
            }
        }
        match g.kind {
            GateKind::Cnot => {
                if g.qubits.len() != 2 {
                    return Err(Error::InvalidInput("CNOT needs two qubits".into()));
                }
                apply_cnot(g.qubits[0], g.qubits[1], &mut psi);
            }
            _ => {
                if let Some(k) = g.param {
                    if k >= params.len() {
                        return Err(Error::InvalidInput(format!("param index {} out of range", k)));
                    }
                }
                let m = g.mask(circuit.num_qubits)?;
                apply_rotation(&m, g.theta(params), &mut psi);
            }
        }
    }
    Ok(QuantumState {
        num_qubits: state.num_qubits,
        amplitudes: psi,
    })
}
