//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use oblique_vqe::landscape::{
    build_ql1m_minimizer, build_qomm_minimizer, build_qomm_stationary, build_qtpm_minimizer, build_qtpm_stationary,
    classify_point, saddle_escape, verify_qomm_stationary, verify_qtpm_stationary, BasisColumn, Block, BlockBasis,
    BlockSpec, PointClass, StationaryCertificate,
};
use oblique_vqe::linalg::{eigh, generalized_eigh, is_strictly_majorized_by_ones, schur_horn_unit_diag, svd};
use oblique_vqe::manifold::{orthogonality_error, random_oblique};
use oblique_vqe::optimize::{solve_eigenpairs, Method, OptimizerOptions, Problem};
use oblique_vqe::quantum::{
    hamiltonian_matrix, initial_states_from_json, prepare_states, resource_count, states_to_matrix, vqe_objective,
    AnsatzCircuit, Gate, GateKind, PauliHamiltonian, PauliTerm, QuantumState,
};
use oblique_vqe::sampling::{gaussian_matrix, random_hermitian, random_unitary, random_with_spectrum_in, rng};
use oblique_vqe::{ComplexMatrix, HermitianOperator, Model, ModelConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn spectral_norm(d: &[f64]) -> f64 {
    d.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn fro(a: &HermitianOperator) -> f64 {
    a.matrix().fro_norm()
}

fn rel_l2(x: &[f64], r: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = r.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

// Closed-form local-minimum values, written out independently of the library.
fn oracle_qomm(l: &[f64]) -> f64 {
    l.iter().sum()
}

fn oracle_qtpm(l: &[f64], mu: f64) -> f64 {
    // ½tr(X*AX) + (μ/4)‖X*X − I‖² at X = Q_p(I − (Λ_p − Λ̄_p)/μ)^{1/2}V*.
    let p = l.len() as f64;
    let mean = l.iter().sum::<f64>() / p;
    let half_trace: f64 = l.iter().map(|&li| 0.5 * li * (1.0 - (li - mean) / mu)).sum();
    let defect: f64 = l.iter().map(|&li| ((li - mean) / mu).powi(2)).sum();
    half_trace + mu / 4.0 * defect
}

fn criterion_1() -> Outcome {
    let d = [-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0];
    let q = random_unitary(7, &mut rng(20240601));
    let a = HermitianOperator::from_spectrum(&q, &d).unwrap();
    let spec = BlockSpec::new(
        Model::Qomm,
        vec![Block {
            size: 5,
            basis: BlockBasis::Columns(vec![
                BasisColumn::Eigen(5),
                BasisColumn::Mix {
                    first: 6,
                    second: 1,
                    weight_first: 0.4,
                    weight_second: 0.6,
                },
            ]),
        }],
    );
    let cert = match build_qomm_stationary(&a, &spec) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("construction failed: {}", e)),
    };
    let x = cert.x.matrix();
    let residual = verify_qomm_stationary(&a, x, &[-8.0; 5]);
    let value = ModelConfig::qomm().value(&a, x).unwrap();
    let sv = svd(x).unwrap().s;
    let sigma_ok = sv.len() == 2 && (sv[0] - 3f64.sqrt()).abs() < 1e-10 && (sv[1] - 2f64.sqrt()).abs() < 1e-10;
    outcome(
        residual <= 1e-10 * fro(&a) && (value - 6.0).abs() <= 1e-9 && sigma_ok,
        format!("residual/|A|_F {:.2e}, value {:.12}, sigma {:?}", residual / fro(&a), value, sv),
    )
}

fn criterion_2() -> Outcome {
    let (mut worst_spread, mut worst_ref) = (0.0f64, 0.0f64);
    for k in 0..20u64 {
        let mut r = rng(1000 + k);
        let (a, d) = random_with_spectrum_in(16, -10.0, -1.0, &mut r);
        let p = 1 + (k as usize % 5);
        let l = &d[..p];
        let mu = 2.0 * spectral_norm(&d);
        let models = [
            (ModelConfig::qomm(), oracle_qomm(l)),
            (ModelConfig::qtpm(mu), oracle_qtpm(l, mu)),
            (ModelConfig::ql1m(1.0), oracle_qomm(l)),
        ];
        for (config, expect) in models {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..50 {
                let v = random_unitary(p, &mut r);
                let x = match config.model {
                    Model::Qomm => build_qomm_minimizer(&a, p, &v),
                    Model::Qtpm => build_qtpm_minimizer(&a, mu, p, &v),
                    _ => build_ql1m_minimizer(&a, p, &v),
                }
                .unwrap();
                let f = config.value(&a, x.matrix()).unwrap();
                lo = lo.min(f);
                hi = hi.max(f);
                worst_ref = worst_ref.max((f - expect).abs());
            }
            worst_spread = worst_spread.max(hi - lo);
        }
    }
    outcome(
        worst_spread <= 1e-10 && worst_ref <= 1e-10,
        format!("max spread {:.2e}, max |value - formula| {:.2e}", worst_spread, worst_ref),
    )
}

struct RunStats {
    worst_obj: f64,
    worst_plateau: f64,
    worst_l1_gap: f64,
    worst_l1_ortho: f64,
    failures: Vec<String>,
}

fn matrix_runs() -> RunStats {
    let mut s = RunStats {
        worst_obj: 0.0,
        worst_plateau: 0.0,
        worst_l1_gap: 0.0,
        worst_l1_ortho: 0.0,
        failures: Vec::new(),
    };
    let (n, p) = (16, 3);
    for k in 0..20u64 {
        let (a, d) = random_with_spectrum_in(n, -10.0, -1.0, &mut rng(5000 + k));
        let l = &d[..p];
        let norm2 = spectral_norm(&d);
        let opts = OptimizerOptions {
            max_iters: 20000,
            seed: k,
            grad_tol: Some(1e-9 * fro(&a)),
            ..OptimizerOptions::with_method(Method::RiemannianGd)
        };
        let mu = 2.0 * norm2;
        let runs = [
            (ModelConfig::qomm(), oracle_qomm(l)),
            (ModelConfig::qtpm(mu), oracle_qtpm(l, mu)),
            (ModelConfig::ql1m(1.01 * 16.0 * p as f64 * norm2), oracle_qomm(l)),
        ];
        for (config, expect) in runs {
            let start = random_oblique(n, p, 700 + k).unwrap();
            let problem = Problem::Matrix { a: &a, p, start: Some(start) };
            let sol = match solve_eigenpairs(&config, problem, &opts) {
                Ok(s) => s,
                Err(e) => {
                    s.failures.push(format!("{} seed {}: {}", config.model, k, e));
                    continue;
                }
            };
            let x = &sol.states;
            let value = config.value(&a, x).unwrap();
            match config.model {
                Model::Ql1m => {
                    s.worst_l1_gap = s.worst_l1_gap.max(((value - expect) / expect).abs());
                    s.worst_l1_ortho = s.worst_l1_ortho.max(orthogonality_error(x));
                }
                _ => s.worst_obj = s.worst_obj.max(((value - expect) / expect).abs()),
            }
            if config.model == Model::Qtpm {
                let mean = l.iter().sum::<f64>() / p as f64;
                let predicted = l.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt() / mu;
                s.worst_plateau = s.worst_plateau.max((orthogonality_error(x) - predicted).abs());
            }
        }
    }
    s
}

fn criterion_3(s: &RunStats) -> Outcome {
    outcome(
        s.failures.is_empty() && s.worst_obj <= 1e-6 && s.worst_l1_gap <= 1e-6 && s.worst_l1_ortho <= 1e-6,
        format!(
            "qOMM/qTPM max rel objective error {:.2e}; qL1M max rel gap {:.2e}, max orthogonality {:.2e}{}",
            s.worst_obj,
            s.worst_l1_gap,
            s.worst_l1_ortho,
            if s.failures.is_empty() { String::new() } else { format!("; errors: {:?}", s.failures) }
        ),
    )
}

fn criterion_4(s: &RunStats) -> Outcome {
    outcome(
        s.failures.is_empty() && s.worst_plateau <= 1e-6,
        format!("max |ortho - predicted plateau| {:.2e}", s.worst_plateau),
    )
}

fn random_spec<R: Rng>(model: Model, n: usize, r: &mut R) -> BlockSpec {
    let nblocks = r.gen_range(1..=3);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(r);
    let mut next = idx.into_iter();
    let mut blocks = Vec::new();
    for _ in 0..nblocks {
        let size = r.gen_range(1..=3);
        let rank = if model == Model::Qtpm { 1 } else { r.gen_range(1..=size) };
        let cols: Vec<usize> = next.by_ref().take(rank).collect();
        if cols.len() < rank {
            break;
        }
        blocks.push(Block::eigen(size, &cols));
    }
    BlockSpec::new(model, blocks)
}

fn criterion_5() -> Outcome {
    let mut r = rng(777);
    let (mut done, mut decreased, mut attempts) = (0, 0, 0);
    let mut worst = String::new();
    while done < 100 && attempts < 100_000 {
        attempts += 1;
        let model = if done % 2 == 0 { Model::Qomm } else { Model::Qtpm };
        let n = r.gen_range(6..=9);
        let (a, d) = random_with_spectrum_in(n, -10.0, -1.0, &mut r);
        let mu = 2.0 * spectral_norm(&d);
        let spec = random_spec(model, n, &mut r);
        if spec.blocks.is_empty() || spec.p() >= n {
            continue;
        }
        let built: Result<StationaryCertificate, _> = match model {
            Model::Qomm => build_qomm_stationary(&a, &spec),
            _ => build_qtpm_stationary(&a, mu, &spec),
        };
        let Ok(cert) = built else { continue };
        let config = if model == Model::Qomm { ModelConfig::qomm() } else { ModelConfig::qtpm(mu) };
        let scale = fro(&a) + if model == Model::Qtpm { mu } else { 0.0 };
        let residual = match model {
            Model::Qomm => verify_qomm_stationary(&a, cert.x.matrix(), &cert.d),
            _ => verify_qtpm_stationary(&a, cert.x.matrix(), &cert.d, mu),
        };
        if residual > 1e-10 * scale || classify_point(&config, &a, cert.x.matrix()).unwrap() == PointClass::Minimizer {
            continue;
        }
        done += 1;
        match saddle_escape(model, &a, &cert, mu, 1e-3) {
            Ok(e) if e.value_after < e.value_before => decreased += 1,
            Ok(e) => worst = format!("{}: {} -> {}", model, e.value_before, e.value_after),
            Err(e) => worst = format!("{}: {}", model, e),
        }
    }
    outcome(
        done == 100 && decreased == 100,
        format!("{}/{} escapes decreased the objective{}", decreased, done, if worst.is_empty() { String::new() } else { format!("; {}", worst) }),
    )
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let mut r = rng(9000 + k);
        let n = r.gen_range(4..=24);
        let p = r.gen_range(1..=n.min(6));
        let (a, d) = {
            let q = random_unitary(n, &mut r);
            let mut d: Vec<f64> = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
            d.sort_by(|x, y| x.partial_cmp(y).unwrap());
            (HermitianOperator::from_spectrum(&q, &d).unwrap(), (q, d))
        };
        let (q, d) = d;
        // S = U·diag(s)·W with singular values spread over [1e-3, 1], so κ(S) ≤ 1e3.
        let s: Vec<f64> = (0..p).map(|i| if p == 1 { 1.0 } else { 10f64.powf(-3.0 * i as f64 / (p - 1) as f64) }).collect();
        let mix = random_unitary(p, &mut r).scale_columns(&s).matmul(&random_unitary(p, &mut r));
        let y = q.columns(0, p).matmul(&mix);
        let b = y.adjoint_mul(&a.apply(&y));
        let c = y.adjoint_mul(&y);
        match generalized_eigh(&b, &c) {
            Ok((vals, _)) => {
                for (v, e) in vals.iter().zip(&d[..p]) {
                    worst = worst.max((v - e).abs() / e.abs().max(1.0));
                }
            }
            Err(e) => return outcome(false, format!("instance {}: {}", k, e)),
        }
    }
    outcome(worst <= 1e-8, format!("max eigenvalue error {:.2e} over 200 instances", worst))
}

fn criterion_7() -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for p in 1..=10u64 {
        for nu in 1..=100u64 {
            for model in [Model::Qomm, Model::Qtpm, Model::Ql1m, Model::Wql1m] {
                let expect = match model {
                    Model::Qomm => (p * p * nu, p * (p - 1)),
                    _ => (p * nu, p * (p - 1) / 2),
                };
                let got = resource_count(model, p, nu);
                checks += 1;
                if (got.hamiltonian_circuits, got.regularization_circuits) != expect {
                    bad.push((model, p, nu));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{} checks, {} mismatches", checks, bad.len()))
}

fn random_hamiltonian<R: Rng>(q: usize, r: &mut R) -> PauliHamiltonian {
    let terms = (0..r.gen_range(1..=12))
        .map(|_| PauliTerm {
            pauli: (0..q).map(|_| *['I', 'X', 'Y', 'Z'].choose(r).unwrap()).collect(),
            coeff: r.gen_range(-1.0..1.0),
        })
        .collect();
    PauliHamiltonian::new(q, terms).unwrap()
}

fn random_circuit<R: Rng>(q: usize, r: &mut R) -> AnsatzCircuit {
    let mut gates = Vec::new();
    let mut np = 0;
    for layer in 0..2 {
        for k in 0..q {
            gates.push(Gate::single(GateKind::Ry, k, np));
            gates.push(Gate::single(GateKind::Rz, k, np + 1));
            np += 2;
        }
        for k in 0..q.saturating_sub(1) {
            gates.push(Gate::cnot(k + layer % 2, (k + 1 - layer % 2) % q.max(1)));
        }
        let word: String = (0..q).map(|_| *['I', 'X', 'Y', 'Z'].choose(r).unwrap()).collect();
        gates.push(Gate::pauli_rot(&word, np, 0.5));
        np += 1;
    }
    gates.retain(|g| g.kind != GateKind::Cnot || g.qubits[0] != g.qubits[1]);
    AnsatzCircuit {
        num_qubits: q,
        num_params: np,
        gates,
    }
}

fn criterion_8() -> Outcome {
    let mut r = rng(4242);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let q = r.gen_range(1..=6);
        let p = r.gen_range(1..=4.min(1 << q));
        let h = random_hamiltonian(q, &mut r);
        let mut basis: Vec<usize> = (0..1 << q).collect();
        basis.shuffle(&mut r);
        let initial: Vec<QuantumState> = basis[..p].iter().map(|&i| QuantumState::basis(q, i)).collect();
        let circuits: Vec<AnsatzCircuit> = (0..p).map(|_| random_circuit(q, &mut r)).collect();
        let total: usize = circuits.iter().map(|c| c.num_params).sum();
        let params: Vec<f64> = (0..total).map(|_| r.gen_range(-3.0..3.0)).collect();
        let config = match k % 4 {
            0 => ModelConfig::qomm(),
            1 => ModelConfig::qtpm(r.gen_range(0.5..5.0)),
            2 => ModelConfig::ql1m(r.gen_range(0.5..5.0)),
            _ => ModelConfig::wql1m(r.gen_range(0.5..5.0), (0..p).map(|i| (p - i) as f64).collect()),
        };
        let a = hamiltonian_matrix(&h).unwrap();
        let states = prepare_states(&circuits, &initial, &params).unwrap();
        let x = states_to_matrix(&states).unwrap();
        let dense = config.value(&a, &x).unwrap();
        let sv = vqe_objective(&config, &h, &circuits, &initial, &params).unwrap();
        worst = worst.max((dense - sv).abs() / dense.abs().max(1.0));
    }
    outcome(worst <= 1e-10, format!("max |statevector - matrix| {:.2e} over 100 cases", worst))
}

fn criterion_9() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let read = |f: &str| std::fs::read_to_string(data.join(f)).unwrap();
    let h = PauliHamiltonian::from_json(&read("h2.json")).unwrap();
    let circuit = AnsatzCircuit::from_json(&read("h2_uccsd.json")).unwrap();
    let initial = initial_states_from_json(&read("h2_init.json")).unwrap();
    let circuits = vec![circuit; initial.len()];
    let oracle = eigh(&hamiltonian_matrix(&h).unwrap()).values[..3].to_vec();
    let opts = OptimizerOptions {
        rho_begin: 1e-1,
        rho_end: 1e-7,
        max_iters: 600,
        ..OptimizerOptions::with_method(Method::ModelTrustRegion)
    };
    let mut lines = Vec::new();
    let mut pass = true;
    for config in [ModelConfig::qomm(), ModelConfig::qtpm(1.0), ModelConfig::ql1m(1.0)] {
        let problem = Problem::Statevector {
            h: &h,
            circuits: &circuits,
            initial: &initial,
            params: None,
        };
        match solve_eigenpairs(&config, problem, &opts) {
            Ok(sol) => {
                let err = rel_l2(&sol.eigenvalues, &oracle);
                pass &= err <= 1e-4;
                lines.push(format!("{} {:.2e} ({} evals)", config.model, err, sol.trace.evaluations));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("{} error: {}", config.model, e));
            }
        }
    }
    outcome(pass, format!("eigenvalue rel l2 error: {}", lines.join(", ")))
}

fn majorized_brute(s: &[f64]) -> bool {
    let m = s.len() as f64;
    if (s.iter().sum::<f64>() - m).abs() > 1e-10 || s.iter().all(|&x| (x - 1.0).abs() <= 1e-12) {
        return false;
    }
    let mut v = s.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = 0.0;
    v[..v.len() - 1].iter().enumerate().all(|(k, x)| {
        acc += x;
        acc < (k + 1) as f64 - 1e-12
    })
}

fn criterion_10() -> Outcome {
    let mut r = rng(31337);
    let (mut worst_diag, mut worst_unit) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = r.gen_range(1..=12);
        let raw: Vec<f64> = (0..p).map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..1.0) }).collect();
        let total: f64 = raw.iter().sum();
        if total == 0.0 {
            continue;
        }
        let s: Vec<f64> = raw.iter().map(|x| x * p as f64 / total).collect();
        let v = match schur_horn_unit_diag(&s) {
            Ok(v) => v,
            Err(e) => return outcome(false, format!("{:?}: {}", s, e)),
        };
        let m = v.scale_columns(&s).matmul(&v.adjoint());
        for i in 0..p {
            worst_diag = worst_diag.max((m[(i, i)].re - 1.0).abs().max(m[(i, i)].im.abs()));
        }
        let vv = v.adjoint_mul(&v);
        worst_unit = worst_unit.max((&vv - &ComplexMatrix::identity(p)).fro_norm());
    }
    // Grid: entries in {0, 0.5, ..., 3}, lengths 1..=5, rescaled copies included.
    let mut grid_checks = 0;
    let mut grid_bad = 0;
    let vals = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    for len in 1..=5usize {
        let mut idx = vec![0usize; len];
        loop {
            let s: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
            grid_checks += 1;
            if is_strictly_majorized_by_ones(&s) != majorized_brute(&s) {
                grid_bad += 1;
            }
            let mut k = 0;
            while k < len && idx[k] == vals.len() - 1 {
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
            idx[k] += 1;
        }
    }
    // Eigendecomposition and SVD residuals on random Hermitian and rectangular inputs.
    let mut worst_eig = 0.0f64;
    let mut worst_svd = 0.0f64;
    for _ in 0..1000 {
        let n = r.gen_range(1..=32);
        let a = random_hermitian(n, &mut r);
        let e = eigh(&a);
        let res = (&a.apply(&e.vectors) - &e.vectors.scale_columns(&e.values)).fro_norm() / fro(&a);
        let unit = (&e.vectors.adjoint_mul(&e.vectors) - &ComplexMatrix::identity(n)).fro_norm();
        worst_eig = worst_eig.max(res).max(unit);
        let p = r.gen_range(1..=n.min(8));
        let x = gaussian_matrix(n, p, &mut r);
        let f = svd(&x).unwrap();
        worst_svd = worst_svd.max((&f.reconstruct() - &x).fro_norm() / x.fro_norm());
    }
    outcome(
        worst_diag <= 1e-10 && worst_unit <= 1e-12 && grid_bad == 0 && worst_eig <= 1e-10 && worst_svd <= 1e-10,
        format!(
            "schur-horn diag {:.2e}, unitarity {:.2e}; majorization grid {}/{} agree; eigh {:.2e}, svd {:.2e}",
            worst_diag,
            worst_unit,
            grid_checks - grid_bad,
            grid_checks,
            worst_eig,
            worst_svd
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut r = rng(2718);
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let n = r.gen_range(2..=8);
        let p = r.gen_range(1..=n.min(4));
        let a = random_hermitian(n, &mut r);
        let x = gaussian_matrix(n, p, &mut r).scale(0.5);
        let dir = gaussian_matrix(n, p, &mut r);
        let configs = [ModelConfig::qomm(), ModelConfig::qtpm(r.gen_range(0.5..5.0)), ModelConfig::ql1m(r.gen_range(0.5..5.0))];
        for (k, config) in configs.iter().enumerate() {
            let h = 1e-5;
            let f = |t: f64| config.smooth_value(&a, &(&x + &dir.scale(t))).unwrap();
            let fd = (f(h) - f(-h)) / (2.0 * h);
            let g = config.gradient(&a, &x).unwrap().real_inner(&dir);
            let rel = (fd - g).abs() / g.abs().max(fd.abs()).max(1e-12);
            worst[k] = worst[k].max(rel);
        }
    }
    outcome(
        worst.iter().all(|&w| w <= 1e-5),
        format!("max rel error qOMM {:.2e}, qTPM {:.2e}, smoothed qL1M {:.2e}", worst[0], worst[1], worst[2]),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, budget: Duration, run: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = run();
        let took = t.elapsed();
        let pass = o.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {}: {} ({:.2}s, budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            id,
            name,
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    };
    let s = |x| Duration::from_secs(x);
    report(1, "7x5 saddle certificate", s(1), &mut criterion_1);
    report(2, "global-value flatness", s(30), &mut criterion_2);
    let t = Instant::now();
    let stats = matrix_runs();
    let runs_time = t.elapsed();
    report(3, "matrix-backend convergence", s(120), &mut || {
        let mut o = criterion_3(&stats);
        if runs_time > s(120) {
            o.pass = false;
        }
        o.detail = format!("{} [runs took {:.1}s]", o.detail, runs_time.as_secs_f64());
        o
    });
    report(4, "qTPM orthogonality plateau", s(1), &mut || criterion_4(&stats));
    report(5, "saddle escape", s(60), &mut criterion_5);
    report(6, "Rayleigh-Ritz extraction", s(5), &mut criterion_6);
    report(7, "resource accounting", s(1), &mut criterion_7);
    report(8, "backend equivalence", s(30), &mut criterion_8);
    report(9, "H2 statevector reproduction", s(600), &mut criterion_9);
    report(10, "Schur-Horn and majorization", s(10), &mut criterion_10);
    report(11, "gradient correctness", s(10), &mut criterion_11);
    if failed > 0 {
        println!("{} criteria failed", failed);
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
