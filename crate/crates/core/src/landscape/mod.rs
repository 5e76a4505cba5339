//! Closed-form stationary points, local minimizers and escape directions of the
//! qOMM and qTPM landscapes, with numerical verifiers and a point classifier.

mod blocks;
mod classify;
mod escape;

pub use blocks::{
    build_ql1m_minimizer, build_qomm_minimizer, build_qomm_stationary, build_qtpm_minimizer, build_qtpm_stationary,
    verify_qomm_stationary, verify_qtpm_stationary,
};
pub use classify::{classify_point, descent_direction_ql1m, subspace_distance, PointClass};
pub use escape::{oblique_perturb, saddle_escape, EscapeKind, EscapeResult};

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::manifold::ObliquePoint;
use crate::models::Model;

/// Relative residual bound for a certificate to count as stationary.
pub const STATIONARY_TOL: f64 = 1e-8;
/// Tolerance for matching the closed-form minimizer characterization.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// One column of a block basis, given through the eigenvectors of A
/// (indices refer to ascending eigenvalue order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisColumn {
    Eigen(usize),
    /// √w₁·q_first + √w₂·q_second, with the weights normalized to sum one.
    Mix {
        first: usize,
        second: usize,
        weight_first: f64,
        weight_second: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockBasis {
    Columns(Vec<BasisColumn>),
    /// Explicit n×r_i basis with orthonormal columns.
    Matrix(ComplexMatrix),
}

impl BlockBasis {
    pub fn rank(&self) -> usize {
        match self {
            BlockBasis::Columns(c) => c.len(),
            BlockBasis::Matrix(m) => m.cols(),
        }
    }
}

/// A block of p_i columns of rank r_i spanned by `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub size: usize,
    pub basis: BlockBasis,
}

impl Block {
    pub fn eigen(size: usize, indices: &[usize]) -> Self {
        Self {
            size,
            basis: BlockBasis::Columns(indices.iter().map(|&i| BasisColumn::Eigen(i)).collect()),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub model: Model,
    pub blocks: Vec<Block>,
}

impl BlockSpec {
    pub fn new(model: Model, blocks: Vec<Block>) -> Self {
        Self { model, blocks }
    }

    pub fn p(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// A point and diagonal Lagrange multipliers satisfying a first-order condition.
#[derive(Debug, Clone)]
pub struct StationaryCertificate {
    pub model: Model,
    pub x: ObliquePoint,
    /// Diagonal of D, one entry per column.
    pub d: Vec<f64>,
    pub residual: f64,
    /// Penalty parameter for qTPM certificates.
    pub mu: Option<f64>,
}
