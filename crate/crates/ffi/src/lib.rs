//! C ABI over the matrix backend of `oblique-vqe`.
//!
//! Handles are opaque and owned by the caller once returned; free them with the
//! matching `*_free` function. Every call returns an [`OvqStatus`], and the
//! message of the last failure on the calling thread is available through
//! [`ovq_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oblique_vqe::linalg::MatrixFile;
use oblique_vqe::optimize::{solve_eigenpairs, EigenSolution, Method, OptimizerOptions, Problem};
use oblique_vqe::quantum::resource_count;
use oblique_vqe::{Error, HermitianOperator, Model, ModelConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    NotNegativeDefinite = 5,
    MuTooSmall = 6,
    InvalidWeights = 7,
    NumericalFailure = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvqModel {
    Qomm = 0,
    Qtpm = 1,
    Ql1m = 2,
    Wql1m = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvqMethod {
    Simplex = 0,
    TrustRegion = 1,
    RiemannianGd = 2,
}

/// Solver settings. `weights` may be null for the default p, p-1, ..., 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OvqSolveOptions {
    pub model: OvqModel,
    pub method: OvqMethod,
    pub p: usize,
    pub mu: f64,
    pub mu1: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub weights: *const f64,
    pub num_weights: usize,
}

/// Hermitian operator handle.
pub struct OvqOperator(HermitianOperator);

/// Result of [`ovq_solve`].
pub struct OvqSolution(EigenSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OvqStatus {
    match e {
        Error::DimensionMismatch(_) => OvqStatus::DimensionMismatch,
        Error::NotHermitian(_) => OvqStatus::NotHermitian,
        Error::NotNegativeDefinite(_) => OvqStatus::NotNegativeDefinite,
        Error::MuTooSmall { .. } => OvqStatus::MuTooSmall,
        Error::InvalidWeights => OvqStatus::InvalidWeights,
        e if e.is_input_error() => OvqStatus::InvalidInput,
        _ => OvqStatus::NumericalFailure,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (OvqStatus, String)>) -> OvqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OvqStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            OvqStatus::Panic
        }
    }
}

fn fail(e: Error) -> (OvqStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OvqStatus, String) {
    (OvqStatus::NullPointer, format!("{} is null", what))
}

impl From<OvqModel> for Model {
    fn from(m: OvqModel) -> Self {
        match m {
            OvqModel::Qomm => Model::Qomm,
            OvqModel::Qtpm => Model::Qtpm,
            OvqModel::Ql1m => Model::Ql1m,
            OvqModel::Wql1m => Model::Wql1m,
        }
    }
}

impl From<OvqMethod> for Method {
    fn from(m: OvqMethod) -> Self {
        match m {
            OvqMethod::Simplex => Method::Simplex,
            OvqMethod::TrustRegion => Method::ModelTrustRegion,
            OvqMethod::RiemannianGd => Method::RiemannianGd,
        }
    }
}

/// Defaults: gradient descent, p = 1, mu = mu1 = 1, 600 iterations, seed 0.
#[no_mangle]
pub extern "C" fn ovq_default_options(model: OvqModel) -> OvqSolveOptions {
    OvqSolveOptions {
        model,
        method: OvqMethod::RiemannianGd,
        p: 1,
        mu: 1.0,
        mu1: 1.0,
        max_iters: OptimizerOptions::default().max_iters,
        seed: 0,
        weights: ptr::null(),
        num_weights: 0,
    }
}

/// Builds an n×n operator from row-major real and (nullable) imaginary parts.
///
/// # Safety
/// `re` and, when non-null, `im` must point to n·n readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovq_operator_new(n: usize, re: *const f64, im: *const f64, out: *mut *mut OvqOperator) -> OvqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if re.is_null() {
            return Err(null("re"));
        }
        if n == 0 {
            return Err((OvqStatus::InvalidInput, "n must be positive".into()));
        }
        let len = n.checked_mul(n).ok_or((OvqStatus::InvalidInput, "n is too large".into()))?;
        let rows = |p: *const f64| -> Vec<Vec<f64>> { std::slice::from_raw_parts(p, len).chunks(n).map(<[f64]>::to_vec).collect() };
        let file = MatrixFile {
            rows: n,
            cols: n,
            real: rows(re),
            imag: if im.is_null() { None } else { Some(rows(im)) },
        };
        let a = file.to_matrix().and_then(HermitianOperator::new).map_err(fail)?;
        *out = Box::into_raw(Box::new(OvqOperator(a)));
        Ok(())
    })
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle from [`ovq_operator_new`].
#[no_mangle]
pub unsafe extern "C" fn ovq_operator_dim(op: *const OvqOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// # Safety
/// `op` must be null or a handle from [`ovq_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ovq_operator_free(op: *mut OvqOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Minimizes the chosen model and extracts the p lowest eigenpairs.
///
/// # Safety
/// `op` must be a live operator, `opts` readable, `out` writable, and
/// `opts.weights` null or pointing to `opts.num_weights` doubles.
#[no_mangle]
pub unsafe extern "C" fn ovq_solve(op: *const OvqOperator, opts: *const OvqSolveOptions, out: *mut *mut OvqSolution) -> OvqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let a = &op.as_ref().ok_or_else(|| null("op"))?.0;
        let o = *opts.as_ref().ok_or_else(|| null("opts"))?;
        let weights: Vec<f64> = if o.weights.is_null() {
            (0..o.p).map(|i| (o.p - i) as f64).collect()
        } else {
            std::slice::from_raw_parts(o.weights, o.num_weights).to_vec()
        };
        let config = match Model::from(o.model) {
            Model::Qomm => ModelConfig::qomm(),
            Model::Qtpm => ModelConfig::qtpm(o.mu),
            Model::Ql1m => ModelConfig::ql1m(o.mu1),
            Model::Wql1m => ModelConfig::wql1m(o.mu1, weights),
        };
        config.validate().map_err(fail)?;
        if config.model == Model::Wql1m && config.weights.len() != o.p {
            return Err((OvqStatus::InvalidWeights, format!("{} weights for p = {}", config.weights.len(), o.p)));
        }
        let options = OptimizerOptions {
            method: o.method.into(),
            max_iters: o.max_iters,
            seed: o.seed,
            ..OptimizerOptions::default()
        };
        let sol = solve_eigenpairs(&config, Problem::Matrix { a, p: o.p, start: None }, &options).map_err(fail)?;
        *out = Box::into_raw(Box::new(OvqSolution(sol)));
        Ok(())
    })
}

/// Number of eigenvalues in the solution, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle from [`ovq_solve`].
#[no_mangle]
pub unsafe extern "C" fn ovq_solution_count(sol: *const OvqSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.eigenvalues.len())
}

/// Copies the ascending Ritz values into `out`, which holds `len` doubles.
///
/// # Safety
/// `sol` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ovq_solution_eigenvalues(sol: *const OvqSolution, out: *mut f64, len: usize) -> OvqStatus {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("sol"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = &s.eigenvalues;
        if len < v.len() {
            return Err((OvqStatus::BufferTooSmall, format!("need {} doubles, got {}", v.len(), len)));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Writes the objective, the eigenvalue relative error and the orthogonality
/// error; any output pointer may be null.
///
/// # Safety
/// `sol` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovq_solution_metrics(
    sol: *const OvqSolution,
    objective: *mut f64,
    eigenvalue_rel_error: *mut f64,
    orthogonality_error: *mut f64,
) -> OvqStatus {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("sol"))?.0;
        if let Some(o) = objective.as_mut() {
            *o = s.objective;
        }
        if let Some(o) = eigenvalue_rel_error.as_mut() {
            *o = s.eigenvalue_rel_error.unwrap_or(f64::NAN);
        }
        if let Some(o) = orthogonality_error.as_mut() {
            *o = s.orthogonality_error;
        }
        Ok(())
    })
}

/// Objective evaluations spent, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle from [`ovq_solve`].
#[no_mangle]
pub unsafe extern "C" fn ovq_solution_evaluations(sol: *const OvqSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.trace.evaluations)
}

/// # Safety
/// `sol` must be null or a handle from [`ovq_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ovq_solution_free(sol: *mut OvqSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Inner-product circuits per objective evaluation for `num_terms` Pauli terms.
///
/// # Safety
/// Both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovq_resource_count(
    model: OvqModel,
    p: u64,
    num_terms: u64,
    hamiltonian_circuits: *mut u64,
    regularization_circuits: *mut u64,
) -> OvqStatus {
    guard(|| {
        if hamiltonian_circuits.is_null() || regularization_circuits.is_null() {
            return Err(null("output"));
        }
        if p == 0 || num_terms == 0 {
            return Err((OvqStatus::InvalidInput, "p and num_terms must be positive".into()));
        }
        let r = resource_count(model.into(), p, num_terms);
        *hamiltonian_circuits = r.hamiltonian_circuits;
        *regularization_circuits = r.regularization_circuits;
        Ok(())
    })
}

/// Copies the last error message of this thread, NUL-terminated and truncated
/// to `len` bytes. Returns the buffer size needed, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or have room for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ovq_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ovq_status_name(status: OvqStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        OvqStatus::Ok => b"ok\0",
        OvqStatus::NullPointer => b"null pointer\0",
        OvqStatus::InvalidInput => b"invalid input\0",
        OvqStatus::DimensionMismatch => b"dimension mismatch\0",
        OvqStatus::NotHermitian => b"not hermitian\0",
        OvqStatus::NotNegativeDefinite => b"not negative definite\0",
        OvqStatus::MuTooSmall => b"mu too small\0",
        OvqStatus::InvalidWeights => b"invalid weights\0",
        OvqStatus::NumericalFailure => b"numerical failure\0",
        OvqStatus::BufferTooSmall => b"buffer too small\0",
        OvqStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}
