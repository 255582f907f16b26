use std::path::Path;
use std::process::{Command, Output};

fn ptfreeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptfreeze")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const RUNNING: &str = r#"{
  "initial_tree": "->(*(X(->(a,b),+(c,d)),tau),+(e,a))",
  "traces": [["d","c","a","b","a","e"], ["a","b","e","a"], ["c","d","a","e","a","a","e"]],
  "previously_added": [["d","c","a","b","a","e"], ["a","b","e","a"]],
  "steps": [{"trace": ["c","d","a","e","a","a","e"], "frozen": [[1]], "algorithm": "advanced"}]
}"#;

fn write_scenario(dir: &Path, body: &str) -> String {
    let p = dir.join("scenario.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn parse_prints_canonical_form() {
    let o = ptfreeze(&["parse", "-> ( a , X(b, tau) )"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "->(a,X(b,tau))");
    let o = ptfreeze(&["parse", "--language", "->(a,X(b,tau))"]);
    assert_eq!(stdout(&o), "->(a,X(b,tau))\na\na,b\n");
    let o = ptfreeze(&["--format", "json", "parse", "*(a,tau)", "--language", "--loop-bound", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["language"], serde_json::json!([["a"], ["a", "a"]]));
}

#[test]
fn bad_tree_is_an_input_error() {
    let o = ptfreeze(&["parse", "->(a,"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
}

#[test]
fn align_table_and_json() {
    let o = ptfreeze(&["align", "*(X(->(a,b),+(c,d)),tau)", "a,b,c,f"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cost: 2"));
    let o = ptfreeze(&["--format", "json", "align", "*(X(->(a,b),+(c,d)),tau)", "a,b,c,f"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cost"], 2);
    assert!(v["moves"].as_array().unwrap().iter().any(|m| m["kind"] == "log_move" && m["log"] == "f"));
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = ptfreeze(&["--search-budget", "3", "align", "+(a,b,c,d)", "d,c,b,a,x"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn metrics_on_a_log_file() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(&log, "case_id,activity,timestamp\n1,b,2021-01-01T10:05:00Z\n1,a,2021-01-01T10:00:00Z\n2,a,2021-01-02T10:00:00Z\n2,b,2021-01-02T11:00:00Z\n").unwrap();
    let o = ptfreeze(&["metrics", "->(a,b)", log.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "increment,fitness,precision,f_measure\n0,1.000000,1.000000,1.000000\n");
    let o = ptfreeze(&["metrics", "->(a,b)", "/nonexistent.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_dot() {
    let o = ptfreeze(&["export-dot", "X(a,tau)"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn run_writes_deterministic_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), RUNNING);
    let mut outputs = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let o = ptfreeze(&["run", &scenario, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let files: Vec<Vec<u8>> = ["step_000.tree", "step_001.tree", "metrics.csv", "summary.json"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    let last = String::from_utf8(outputs[0][1].clone()).unwrap();
    let t = ptfreeze::parse_tree(last.trim()).unwrap();
    assert!(ptfreeze::is_subtree(&ptfreeze::parse_tree("+(e,a)").unwrap(), &t));
    let csv = String::from_utf8(outputs[0][2].clone()).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn contract_violation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        r#"{"initial_tree": "->(a,b)", "previously_added": [["b"]], "steps": [{"trace": ["a"]}]}"#,
    );
    let o = ptfreeze(&["run", &scenario, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}

#[test]
fn unknown_ipda_and_bad_selector_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), RUNNING);
    let out = dir.path().join("o");
    let o = ptfreeze(&["--ipda", "nope", "run", &scenario, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let scenario = write_scenario(dir.path(), r#"{"initial_tree": "a", "steps": [{"trace": ["a"], "frozen": [[4]]}]}"#);
    let o = ptfreeze(&["run", &scenario, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}
