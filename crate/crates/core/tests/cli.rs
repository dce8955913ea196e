mod common;

use std::path::Path;
use std::process::{Command, Output};

use bddnet::bnet::{validate_bdd_shape, BayesNet};
use bddnet::inference::propagate;
use bddnet::Assignment;
use serde_json::Value;

fn bddnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bddnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn table_of_worked_example() {
    let o = bddnet(&["--expr", "(x1|x2)&x3", "--n", "3", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[3], "0 1 1 | 1");
    assert_eq!(rows.iter().filter(|r| r.ends_with("| 1")).count(), 3);
}

#[test]
fn table_of_constant() {
    let o = bddnet(&["--expr", "0", "--n", "1", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 | 0\n1 | 0\n");
}

#[test]
fn syntax_error_exit_code() {
    let o = bddnet(&["--expr", "(x1|", "--n", "3", "table"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("offset 4"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(bddnet(&["--n", "3", "table"]).status.code(), Some(2));
    assert_eq!(
        bddnet(&["--expr", "x1", "frobnicate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bddnet(&["--expr", "x4", "--n", "3", "table"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bddnet(&["--expr", "x1", "--n", "2", "--order", "0,0", "bdd"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bddnet(&["--expr", "x1", "--n", "4", "--cap", "3", "table"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn arity_defaults_to_highest_variable() {
    let o = bddnet(&["--expr", "x2", "table"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn expression_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "(x1 | x2) & x3\n").unwrap();
    let o = bddnet(&["--file", path.to_str().unwrap(), "--n", "3", "bdd"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("internal nodes: 3"), "{text}");
    assert!(text.contains("total nodes: 5"));
    assert!(text.contains("satisfying assignments: 3"));
}

#[test]
fn tree_dot_is_well_formed() {
    let o = bddnet(&["--expr", "(x1|x2)&x3", "--n", "3", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(common::parse_dot(&stdout(&o)), Ok((15, 14)));
}

#[test]
fn verify_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bddnet(&["--expr", "(x1|x2)&x3", "--n", "3", "--out", out, "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let bdd = read_json(dir.path(), "bdd.json");
    assert_eq!(bdd["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(bdd["order"], serde_json::json!([0, 1, 2]));

    let report = read_json(dir.path(), "report.json");
    assert_eq!(report["checked"], 8);
    assert_eq!(report["mode"], "exhaustive");
    assert_eq!(report["counterexamples"], serde_json::json!([]));
    assert_eq!(report["shape"]["pass"], true);

    let bdd_dot = std::fs::read_to_string(dir.path().join("bdd.dot")).unwrap();
    assert_eq!(common::parse_dot(&bdd_dot), Ok((5, 6)));
    let net_dot = std::fs::read_to_string(dir.path().join("bnet.dot")).unwrap();
    assert_eq!(common::parse_dot(&net_dot), Ok((5, 6)));

    // reloaded net gives the same verdict and the same marginals
    let text = std::fs::read_to_string(dir.path().join("bnet.json")).unwrap();
    let net = BayesNet::from_json_str(&text).unwrap();
    assert!(validate_bdd_shape(&net).pass);
    for x in Assignment::all(3) {
        let p1 = propagate(&net, &x).unwrap().p_true(net.root);
        let x_bits = x.bits();
        let expect = (x_bits[0] || x_bits[1]) && x_bits[2];
        assert_eq!(p1 == 1.0, expect);
    }
}

#[test]
fn artifacts_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = bddnet(&[
            "--expr",
            "x1 ? x2 & x4 : !x3",
            "--out",
            dir.path().to_str().unwrap(),
            "verify",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in [
        "bdd.dot",
        "bdd.json",
        "bnet.dot",
        "bnet.json",
        "report.json",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn verify_constant_notes_degenerate_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = bddnet(&[
        "--expr",
        "1",
        "--n",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
        "verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(dir.path(), "report.json");
    assert!(report["shape"]["note"].is_string());
    assert_eq!(report["checked"], 4);
    let net = read_json(dir.path(), "bnet.json");
    assert_eq!(net["nodes"].as_array().unwrap().len(), 1);
}

#[test]
fn injected_fault_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
        "verify",
        "--inject-fault",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report = read_json(dir.path(), "report.json");
    assert!(!report["counterexamples"].as_array().unwrap().is_empty());
    assert_eq!(report["counterexamples"][0], serde_json::json!([0, 0, 0]));
}

#[test]
fn sampled_mode_above_cap() {
    let dir = tempfile::tempdir().unwrap();
    let o = bddnet(&[
        "--expr",
        "x1 & x2 | x3 & x4",
        "--cap",
        "2",
        "--seed",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
        "verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(dir.path(), "report.json")["mode"], "sampled");
}

#[test]
fn compile_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = bddnet(&[
        "--expr",
        "x1 & !x2",
        "--out",
        dir.path().to_str().unwrap(),
        "compile",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["bdd.dot", "bdd.json", "bnet.dot", "bnet.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(stdout(&o).contains("shape: pass"));
}

#[test]
fn custom_order_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "--order",
        "2,0,1",
        "--out",
        dir.path().to_str().unwrap(),
        "bdd",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bdd = read_json(dir.path(), "bdd.json");
    assert_eq!(bdd["order"], serde_json::json!([2, 0, 1]));
    let root = bdd["root"].as_u64().unwrap();
    let top = bdd["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|n| n["id"] == root)
        .unwrap();
    assert_eq!(top["var"], 2);
}

#[test]
fn marginal_outputs() {
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "marginal",
        "--p",
        "0.5,0.5,0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3/8\n");
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "marginal",
        "--p",
        "1,1,1",
    ]);
    assert_eq!(stdout(&o), "1\n");
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "marginal",
        "--p",
        "1/3,0.25,1",
    ]);
    assert_eq!(stdout(&o), "1/2\n");
}

#[test]
fn marginal_errors() {
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "marginal",
        "--p",
        "0.5,0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bddnet(&[
        "--expr",
        "(x1|x2)&x3",
        "--n",
        "3",
        "marginal",
        "--p",
        "0.5,1.5,0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bddnet(&["--expr", "x1", "marginal", "--p", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
}
