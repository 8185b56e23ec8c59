use std::process::{Command, Output};

fn dpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn decompile_cpo() {
    let o = dpa(&["decompile", "--loss", "p(theta,yw)/p(theta,yl)"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("P  := (implies theta:yl theta:yw)"), "{text}");
    assert!(text.contains("PC := (or theta:yl theta:yw)"));
    assert!(text.contains("PA := (and theta:yw theta:yl)"));
}

#[test]
fn decompile_dpo_by_name() {
    let o = dpa(&["--format", "json", "decompile", "--loss", "DPO"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["structure"]["P"],
        "(implies (and theta:yl ref:yw) (and theta:yw ref:yl))"
    );
    assert_eq!(v["structure"]["atoms"].as_array().unwrap().len(), 4);
}

#[test]
fn non_disjoint_equation_exits_3() {
    let o = dpa(&["decompile", "--loss", "p(theta,yw)+p(theta,yl) / p(theta,yl)"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta:yw=T, theta:yl=T"));
}

#[test]
fn parse_error_exits_2() {
    assert_eq!(code(&dpa(&["decompile", "--loss", "p(theta,yw / p(theta,yl)"])), 2);
}

#[test]
fn compile_forms() {
    let o = dpa(&["compile", "--structure", "unCPO"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o)
        .contains("equation: ((1 - p(theta,yl)) + p(theta,yw) * p(theta,yl)) / ((1 - p(theta,yw)) * p(theta,yl))"));
    let o = dpa(&["compile", "--structure", "CPO", "--f", "sl-margin", "--beta", "1"]);
    assert!(stdout(&o).contains("loss: max(0, 1 - log(p(theta,yw) / p(theta,yl)))"));
    let o = dpa(&["compile", "--structure", "CPO", "--fuzzy"]);
    assert!(stdout(&o).contains("loss: -log min(1, p(theta,yw) / p(theta,yl))"));
}

#[test]
fn trivial_structure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trivial.json");
    std::fs::write(
        &path,
        r#"{"atoms":["theta:yw","theta:yl"],"P":"true","PC":"true","PA":"false"}"#,
    )
    .unwrap();
    let o = dpa(&["compile", "--structure", path.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eval_values() {
    let o = dpa(&[
        "eval",
        "--structure",
        "CPO",
        "--weights",
        r#"{"theta:yw":0.6,"theta:yl":0.3}"#,
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("0.693147181") && text.contains("0.405465108"), "{text}");
    let o = dpa(&[
        "eval",
        "--structure",
        "CPO",
        "--weights",
        r#"{"theta:yw":0.4,"theta:yl":0.4}"#,
    ]);
    assert!(stdout(&o).contains("0.693147181"));
    let o = dpa(&[
        "eval",
        "--structure",
        "unCPO",
        "--weights",
        r#"{"theta:yw":0.5,"theta:yl":0.5}"#,
    ]);
    assert!(stdout(&o).contains("1.09861229"));
}

#[test]
fn missing_weight_exits_2() {
    let o = dpa(&["eval", "--structure", "CPO", "--weights", r#"{"theta:yw":0.6}"#]);
    assert_eq!(code(&o), 2);
}

#[test]
fn entail_verdicts() {
    assert_eq!(
        stdout(&dpa(&["entail", "CPO", "unCPO"])).trim(),
        "CPO strictly entails unCPO"
    );
    assert_eq!(
        stdout(&dpa(&["entail", "CPO", "CPO"])).trim(),
        "CPO is equivalent to CPO"
    );
    assert_eq!(
        stdout(&dpa(&["entail", "CPO", "ORPO"])).trim(),
        "CPO and ORPO are incomparable"
    );
}

#[test]
fn unknown_name_exits_2_with_suggestion() {
    let o = dpa(&["entail", "DPQ", "CPO"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("DPO"));
}

#[test]
fn lattice_dot_has_16_nodes() {
    let o = dpa(&["lattice", "--lower", "CEUnl", "--upper", "unCPO", "--dot"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("digraph"));
    let nodes = text
        .lines()
        .filter(|l| l.trim_start().starts_with('n') && l.contains("[label="))
        .count();
    assert_eq!(nodes, 16);
    assert!(text.contains("label=\"CPO\""));
}

#[test]
fn count_and_catalog() {
    assert_eq!(stdout(&dpa(&["count", "4"])).trim(), "4294967296");
    assert_eq!(code(&dpa(&["count", "0"])), 2);
    let list = stdout(&dpa(&["catalog", "list"]));
    assert!(list.contains("ORPO") && list.contains("DPOP"));
    assert!(stdout(&dpa(&["catalog", "show", "ORPO"])).contains("xor"));
}

#[test]
fn out_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.dot");
    let o = dpa(&[
        "--out",
        path.to_str().unwrap(),
        "lattice",
        "--lower",
        "CEUnl",
        "--upper",
        "unCPO",
        "--dot",
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let again = dpa(&["lattice", "--lower", "CEUnl", "--upper", "unCPO", "--dot"]);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);
    let a = dpa(&["--seed", "7", "selfcheck", "--samples", "50"]);
    let b = dpa(&["--seed", "7", "selfcheck", "--samples", "50"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
