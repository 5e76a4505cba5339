//! Dense complex linear algebra: Jacobi eigensolver, one-sided Jacobi SVD,
//! generalized Hermitian eigenproblems and unit-diagonal unitary construction.

mod eigen;
mod matrix;
mod schur_horn;
mod svd;

pub use eigen::{eigh, generalized_eigh, EigenDecomposition, HermitianOperator, METRIC_CONDITION_FLOOR};
pub use matrix::{ComplexMatrix, MatrixFile};
pub use schur_horn::{is_strictly_majorized_by_ones, schur_horn_unit_diag, unit_diagonalizer};
pub use svd::{complete_orthonormal, svd, Svd};

pub(crate) use eigen::eigh_matrix;
pub(crate) use svd::svd_full_right;
