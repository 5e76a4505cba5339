use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use serde::Serialize;

use super::{emit, load_hamiltonian, load_matrix, read_file, timestamp, to_json, write_file, SolveArgs};
use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::models::{Model, ModelConfig};
use crate::optimize::{
    solve_eigenpairs, Backend, EigenSolution, IterationRecord, Method, OptimizerOptions, Problem, TerminationStatus,
};
use crate::quantum::{initial_states_from_json, AnsatzCircuit, PauliHamiltonian, QuantumState};
use crate::sampling;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub model: Model,
    pub backend: Backend,
    pub p: usize,
    pub mu: f64,
    pub mu1: f64,
    pub weights: Vec<f64>,
    pub optimizer: OptimizerOptions,
    pub starts: usize,
    pub best_start: usize,
    pub eigenvalues: Vec<f64>,
    pub reference_eigenvalues: Option<Vec<f64>>,
    pub eigenvalue_rel_error: Option<f64>,
    pub objective: f64,
    pub reference_objective: Option<f64>,
    pub relative_objective_error: Option<f64>,
    pub orthogonality_error: f64,
    pub shift: f64,
    pub status: TerminationStatus,
    pub evaluations: usize,
    pub params: Option<Vec<f64>>,
    pub trace: Vec<IterationRecord>,
}

enum Inputs {
    Matrix(HermitianOperator, usize),
    Statevector(PauliHamiltonian, Vec<AnsatzCircuit>, Vec<QuantumState>),
}

fn parse_init(spec: &str) -> Result<Vec<QuantumState>> {
    let path = Path::new(spec);
    if path.is_file() {
        return initial_states_from_json(&read_file(path)?);
    }
    if spec.trim_start().starts_with('[') {
        return initial_states_from_json(spec);
    }
    spec.split(',').map(|b| QuantumState::from_bitstring(b.trim())).collect()
}

fn load_inputs(args: &SolveArgs) -> Result<Inputs> {
    match args.backend {
        Backend::Matrix => {
            if args.hamiltonian.is_some() || args.ansatz.is_some() || args.init.is_some() {
                return Err(Error::InvalidInput("the matrix backend takes --matrix only".into()));
            }
            let path = args.matrix.as_ref().ok_or_else(|| Error::InvalidInput("--matrix is required".into()))?;
            let a = load_matrix(path)?;
            let p = args.p.unwrap_or(1);
            if p == 0 || p > a.dim() {
                return Err(Error::InvalidInput(format!("need 1 <= p <= {}", a.dim())));
            }
            Ok(Inputs::Matrix(a, p))
        }
        Backend::Statevector => {
            if args.matrix.is_some() {
                return Err(Error::InvalidInput("the statevector backend does not take --matrix".into()));
            }
            let (Some(hp), Some(ap), Some(init)) = (&args.hamiltonian, &args.ansatz, &args.init) else {
                return Err(Error::InvalidInput("--hamiltonian, --ansatz and --init are required".into()));
            };
            let h = load_hamiltonian(hp)?;
            let circuit = AnsatzCircuit::from_json(&read_file(ap)?).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {}", ap.display(), m)),
                other => other,
            })?;
            if circuit.num_qubits != h.num_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "ansatz on {} qubits, Hamiltonian on {}",
                    circuit.num_qubits, h.num_qubits
                )));
            }
            let states = parse_init(init)?;
            if let Some(p) = args.p {
                if p != states.len() {
                    return Err(Error::InvalidInput(format!("--p {} but {} initial states", p, states.len())));
                }
            }
            let circuits = vec![circuit; states.len()];
            Ok(Inputs::Statevector(h, circuits, states))
        }
    }
}

fn model_config(args: &SolveArgs, p: usize) -> ModelConfig {
    match args.model {
        Model::Qomm => ModelConfig::qomm(),
        Model::Qtpm => ModelConfig::qtpm(args.mu),
        Model::Ql1m => ModelConfig::ql1m(args.mu1),
        Model::Wql1m if args.weights.is_empty() => ModelConfig::wql1m(args.mu1, (0..p).map(|i| (p - i) as f64).collect()),
        Model::Wql1m => ModelConfig::wql1m(args.mu1, args.weights.clone()),
    }
}

fn one_start(config: &ModelConfig, inputs: &Inputs, opts: &OptimizerOptions, k: usize) -> Result<EigenSolution> {
    let opts = OptimizerOptions {
        seed: opts.seed.wrapping_add(k as u64),
        ..opts.clone()
    };
    let problem = match inputs {
        Inputs::Matrix(a, p) => Problem::Matrix { a, p: *p, start: None },
        Inputs::Statevector(h, circuits, initial) => {
            let params = if k == 0 {
                None
            } else {
                let total: usize = circuits.iter().map(|c| c.num_params).sum();
                let mut rng = sampling::rng(opts.seed);
                Some((0..total).map(|_| rng.gen_range(-0.5..0.5)).collect())
            };
            Problem::Statevector { h, circuits, initial, params }
        }
    };
    solve_eigenpairs(config, problem, &opts)
}

fn csv_rows(trace: &[IterationRecord]) -> String {
    let cell = |v: Option<f64>| v.map(|x| format!("{:e}", x)).unwrap_or_default();
    let mut s = String::from("iteration,objective_rel_err,eig_rel_err,ortho_err\n");
    for r in trace {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.iter,
            cell(r.relative_objective_error),
            cell(r.eigenvalue_rel_error),
            cell(r.orthogonality_error)
        ));
    }
    s
}

pub fn run_solve(args: &SolveArgs) -> Result<i32> {
    let inputs = load_inputs(args)?;
    let p = match &inputs {
        Inputs::Matrix(_, p) => *p,
        Inputs::Statevector(_, _, states) => states.len(),
    };
    let config = model_config(args, p);
    config.validate()?;
    if args.model == Model::Wql1m && config.weights.len() != p {
        return Err(Error::InvalidInput(format!("{} weights for p = {}", config.weights.len(), p)));
    }
    let method = args.optimizer.unwrap_or(match args.backend {
        Backend::Matrix => Method::RiemannianGd,
        Backend::Statevector => Method::ModelTrustRegion,
    });
    let opts = OptimizerOptions {
        method,
        rho_begin: args.rhobeg,
        rho_end: args.rhoend,
        max_iters: args.max_iters,
        seed: args.seed,
        grad_tol: args.grad_tol,
    };
    opts.validate()?;
    if args.starts == 0 || args.jobs == 0 {
        return Err(Error::InvalidInput("--starts and --jobs must be at least 1".into()));
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<EigenSolution>>>> = Mutex::new(vec![None; args.starts]);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(args.starts) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= args.starts {
                    break;
                }
                let r = one_start(&config, &inputs, &opts, k);
                results.lock().expect("result slot")[k] = Some(r);
            });
        }
    });
    let results: Vec<Result<EigenSolution>> = results
        .into_inner()
        .expect("results")
        .into_iter()
        .map(|r| r.expect("every start ran"))
        .collect();
    let mut best: Option<(usize, &EigenSolution)> = None;
    for (k, r) in results.iter().enumerate() {
        if let Ok(s) = r {
            if best.is_none_or(|(_, b)| s.objective < b.objective) {
                best = Some((k, s));
            }
        }
    }
    let Some((best_start, sol)) = best else {
        return Err(results.into_iter().find_map(|r| r.err()).expect("an error"));
    };
    for (k, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("start {} failed: {}", k, e);
        }
    }

    let report = SolveReport {
        timestamp: if args.no_timestamp { None } else { Some(timestamp()) },
        model: args.model,
        backend: args.backend,
        p,
        mu: config.mu,
        mu1: config.mu1,
        weights: config.weights.clone(),
        optimizer: opts.clone(),
        starts: args.starts,
        best_start,
        eigenvalues: sol.eigenvalues.clone(),
        reference_eigenvalues: sol.reference_eigenvalues.clone(),
        eigenvalue_rel_error: sol.eigenvalue_rel_error,
        objective: sol.objective,
        reference_objective: sol.reference_objective,
        relative_objective_error: sol
            .reference_objective
            .map(|r| if r == 0.0 { sol.objective.abs() } else { ((sol.objective - r) / r).abs() }),
        orthogonality_error: sol.orthogonality_error,
        shift: sol.shift,
        status: sol.trace.status,
        evaluations: sol.trace.evaluations,
        params: sol.params.clone(),
        trace: sol.trace.records.clone(),
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    if args.csv {
        let rows = csv_rows(&report.trace);
        match &args.out {
            Some(p) => write_file(&p.with_extension("csv"), &rows)?,
            None => print!("{}", rows),
        }
    }
    eprintln!(
        "{} {:?}: eigenvalues {:?}, eigenvalue rel error {}, {} evaluations",
        args.model,
        args.backend,
        report.eigenvalues,
        report.eigenvalue_rel_error.map(|e| format!("{:.3e}", e)).unwrap_or_else(|| "n/a".into()),
        report.evaluations
    );
    match (args.tol, report.eigenvalue_rel_error) {
        (Some(t), Some(e)) if !(e <= t) => {
            eprintln!("eigenvalue error {:.3e} exceeds tolerance {:.3e}", e, t);
            Ok(1)
        }
        _ => Ok(0),
    }
}
