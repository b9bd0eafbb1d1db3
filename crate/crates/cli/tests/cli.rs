use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn trap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trap"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn example(name: &str) -> String {
    format!("../../docs/examples/{name}")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn json_of(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data(v: &Value, key: &str) -> Vec<f64> {
    v["amplitude"][key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn duplicate_input_fails_validation_with_line() {
    let path = scratch("dup.trapg");
    std::fs::write(&path, "backend graph\nvertex a : x in=2 out=0\ninput 1 -> a.in[1]\ninput 1 -> a.in[2]\n").unwrap();
    let out = trap(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dup.trapg:4:1: semantic error"), "{err}");
}

#[test]
fn shipped_examples_validate() {
    for name in ["ladder.trapg", "heat_ladder.trapg", "heat_ladder_sum.trapg", "matrix_chain.trapg", "trace.trapg", "theta.trapg"] {
        let out = trap(&["validate", &example(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(trap(&["amplitude"]).status.code(), Some(2));
    assert_eq!(trap(&["validate", "--bogus"]).status.code(), Some(2));
    assert_eq!(trap(&["amplitude", "no/such/file.trapg"]).status.code(), Some(2));
    assert_eq!(trap(&["axioms", "--trials", "1"]).status.code(), Some(2));
    assert_eq!(trap(&["amplitude", &example("ladder.trapg"), "--backend", "graph"]).status.code(), Some(2));
}

#[test]
fn amplitude_is_deterministic_given_seed() {
    let args = ["amplitude", &example("ladder.trapg"), "--dim", "4", "--seed", "7"];
    let (a, b) = (trap(&args), trap(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["amplitude"]["shape"], serde_json::json!([4, 4]));
    let c = trap(&["amplitude", &example("ladder.trapg"), "--dim", "4", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn documented_values() {
    let chain = json_of(&trap(&["amplitude", &example("matrix_chain.trapg")]));
    assert_eq!(data(&chain, "data"), vec![1.0, 3.0, 0.0, 1.0]);
    let tr = json_of(&trap(&["amplitude", &example("trace.trapg")]));
    assert!((tr["amplitude"]["value"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    let theta = json_of(&trap(&["amplitude", &example("theta.trapg")]));
    assert!((theta["amplitude"]["value"].as_f64().unwrap() - 9.0).abs() < 1e-12);

    let ladder = json_of(&trap(&["amplitude", &example("heat_ladder.trapg")]));
    let single = json_of(&trap(&["amplitude", &example("heat_ladder_sum.trapg")]));
    let expected: f64 = (-7..=7).map(|f: i32| (-0.75 * f64::from(f * f)).exp()).sum();
    assert!((ladder["amplitude"]["trace"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!((ladder["amplitude"]["trace"].as_f64().unwrap() - 2.046661304276072).abs() < 1e-12);
    let (a, b) = (data(&ladder, "samples"), data(&single, "samples"));
    assert_eq!(a.len(), 225);
    assert!((a[0] - 0.3257362634104424).abs() < 1e-12);
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn explain_includes_the_plan() {
    let v = json_of(&trap(&["amplitude", &example("matrix_chain.trapg"), "--explain"]));
    let steps = v["plan"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert_eq!(steps[0]["action"], "merge");
    assert!(json_of(&trap(&["amplitude", &example("matrix_chain.trapg")])).get("plan").is_none());
}

#[test]
fn json_out_writes_a_file() {
    let path = scratch("trace.json");
    let out = trap(&["amplitude", &example("trace.trapg"), "--json-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["amplitude"]["value"], 5.0);
}

#[test]
fn compose_and_trace_print_documents() {
    let composed = scratch("composed.trapg");
    let out = trap(&["compose", &example("matrix_chain.trapg"), &example("matrix_chain.trapg")]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&composed, &out.stdout).unwrap();
    let v = json_of(&trap(&["amplitude", composed.to_str().unwrap()]));
    assert_eq!(data(&v, "data"), vec![1.0, 6.0, 0.0, 1.0]);

    let traced = scratch("traced.trapg");
    let out = trap(&["trace", &example("matrix_chain.trapg"), "--input", "1", "--output", "1"]);
    std::fs::write(&traced, &out.stdout).unwrap();
    let v = json_of(&trap(&["amplitude", traced.to_str().unwrap()]));
    assert_eq!(v["amplitude"]["value"], 2.0);

    let full = trap(&["trace", &example("matrix_chain.trapg")]);
    assert_eq!(full.stdout, out.stdout);
    assert_eq!(trap(&["trace", &example("trace.trapg"), "--input", "1", "--output", "1"]).status.code(), Some(1));
    let graph_json = scratch("chain.json");
    let out = trap(&["trace", &example("matrix_chain.trapg"), "--json-out", graph_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(trap(&["validate", graph_json.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn dot_output() {
    let out = trap(&["dot", &example("heat_ladder.trapg")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("in1 -> v0:i1:n"), "{text}");
    assert!(text.contains("gauss_heat(0.1)"), "{text}");
}

#[test]
fn axioms_pass_on_every_backend() {
    let runs: [&[&str]; 4] = [
        &["axioms", "--backend", "homv", "--dim", "3", "--trials", "500", "--seed", "1"],
        &["axioms", "--backend", "graph", "--trials", "50", "--seed", "2"],
        &["axioms", "--backend", "kernel", "--n-points", "5", "--trials", "30", "--max-legs", "6"],
        &["axioms", "--backend", "upgr-kernel", "--n-points", "4", "--trials", "30", "--max-legs", "6"],
    ];
    for args in runs {
        let v = json_of(&trap(args));
        assert!(v["axioms"].as_array().unwrap().iter().all(|a| a["failures"].as_array().unwrap().is_empty()), "{args:?}");
    }
}

#[test]
fn impossible_tolerance_fails_axioms() {
    let out = trap(&["axioms", "--backend", "homv", "--dim", "4", "--tolerance", "0", "--trials", "200", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_cap_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_trap"))
            .args(["amplitude", &example("heat_ladder.trapg")])
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .env("TRAP_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, trap(&["amplitude", &example("heat_ladder.trapg")]).stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
