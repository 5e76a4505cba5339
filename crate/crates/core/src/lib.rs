//! Eigensolvers that embed orthogonality into a cost function on the
//! oblique manifold (unit-norm columns), with landscape certificates and a
//! statevector emulation of the variational workflow.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod landscape;
pub mod linalg;
pub mod manifold;
pub mod models;
pub mod optimize;
pub mod quantum;
pub mod sampling;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, HermitianOperator};
pub use manifold::ObliquePoint;
pub use models::{Model, ModelConfig};
