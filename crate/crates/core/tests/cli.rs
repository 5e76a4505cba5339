use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oblique-vqe"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{}: {}", e, String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn resource_count_prints_formulas() {
    let out = run(&["resource-count", "--model", "qomm", "--p", "3", "--num-terms", "15"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["hamiltonian_circuits"], 135);
    assert_eq!(v["regularization_circuits"], 6);

    let h = data("h2.json");
    let out = run(&["resource-count", "--model", "qtpm", "--p", "3", "--hamiltonian", h.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["num_terms"], 15);
    assert_eq!(v["hamiltonian_circuits"], 45);
    assert_eq!(v["regularization_circuits"], 3);
}

#[test]
fn saddle_7x5_scenario_passes_deterministically() {
    let s = data("saddle_7x5_scenario.json");
    let a = run(&["verify-landscape", s.to_str().unwrap(), "--no-timestamp"]);
    let b = run(&["verify-landscape", s.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert!(v.get("timestamp").is_none());
    let case = &v["cases"][0];
    assert!((case["value"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert_eq!(case["class"], "Saddle");
    assert!(case["escape"]["value_after"].as_f64().unwrap() < case["escape"]["value_before"].as_f64().unwrap());

    let stamped = run(&["verify-landscape", s.to_str().unwrap()]);
    assert!(json(&stamped)["timestamp"].as_u64().is_some());
}

#[test]
fn escape_scenario_decreases_everywhere() {
    let s = data("escape_scenario.json");
    let out_file = tmp("escape.json");
    let out = run(&["verify-landscape", s.to_str().unwrap(), "--no-timestamp", "--out", out_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    for case in v["cases"].as_array().unwrap() {
        assert_eq!(case["pass"], true, "{}", case["name"]);
    }
}

#[test]
fn malformed_and_missing_inputs_exit_2() {
    let bad = tmp("bad_scenario.json");
    std::fs::write(&bad, "{\"model\": \"qomm\", \"operator\": ").unwrap();
    assert_eq!(run(&["verify-landscape", bad.to_str().unwrap()]).status.code(), Some(2));

    let wrong = tmp("wrong_block.json");
    std::fs::write(
        &wrong,
        r#"{"model": "qomm", "operator": {"spectrum": [-3, -2, -1]}, "cases": [{"name": "x", "blocks": [{"size": 1, "columns": [{"eigen": 9}]}]}]}"#,
    )
    .unwrap();
    assert_eq!(run(&["verify-landscape", wrong.to_str().unwrap()]).status.code(), Some(2));

    let missing = tmp("does_not_exist.json");
    assert_eq!(run(&["verify-landscape", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--model", "qomm", "--matrix", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--model", "qomm"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--model", "nonsense", "--matrix", "x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let m = data("demo_matrix.json");
    assert_eq!(run(&["solve", "--model", "qtpm", "--mu", "-1", "--matrix", m.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--model", "wql1m", "--weights", "1,2,3", "--p", "3", "--matrix", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn matrix_solve_reports_eigenvalues() {
    let m = data("demo_matrix.json");
    let args = ["solve", "--model", "qomm", "--matrix", m.to_str().unwrap(), "--p", "3", "--no-timestamp"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, run(&args).stdout);
    let v = json(&a);
    assert!(v["eigenvalue_rel_error"].as_f64().unwrap() < 1e-8);
    let ev: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(ev.len(), 3);
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));

    let starved = run(&["solve", "--model", "qomm", "--matrix", m.to_str().unwrap(), "--p", "3", "--max-iters", "1", "--tol", "1e-6"]);
    assert_eq!(starved.status.code(), Some(1));
}

#[test]
fn multi_start_picks_lowest_objective() {
    let m = data("demo_matrix.json");
    let out = run(&[
        "solve", "--model", "qtpm", "--mu", "10", "--matrix", m.to_str().unwrap(), "--p", "2", "--starts", "4", "--jobs", "2",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["starts"], 4);
    assert!(v["best_start"].as_u64().unwrap() < 4);
}

#[test]
fn statevector_solve_writes_csv() {
    let out_file = tmp("h2.json");
    let out = run(&[
        "solve",
        "--model",
        "qtpm",
        "--backend",
        "statevector",
        "--hamiltonian",
        data("h2.json").to_str().unwrap(),
        "--ansatz",
        data("h2_uccsd.json").to_str().unwrap(),
        "--init",
        "1010,0110,1001",
        "--no-timestamp",
        "--csv",
        "--out",
        out_file.to_str().unwrap(),
        "--tol",
        "1e-4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_file.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iteration,objective_rel_err,eig_rel_err,ortho_err"));
    assert!(lines.count() > 10);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(v["p"], 3);
    assert!(v["params"].as_array().unwrap().len() == 9);
}
