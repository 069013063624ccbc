use std::path::PathBuf;
use std::process::{Command, Output};

use ramsey_core::formats::RunReport;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arrow(ambient: &str, extra: &[&str]) -> Output {
    let (c, b, a) = (data(ambient), data("chain3.struct"), data("chain2.struct"));
    let mut args = vec![
        "arrow-check", "--ambient", &c, "--big", &b, "--small", &a, "-k", "2", "-l", "1",
    ];
    args.extend_from_slice(extra);
    ramsey(&args)
}

#[test]
fn ramsey_boundary_exit_codes() {
    assert_eq!(arrow("chain6.struct", &[]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.col");
    let out = arrow("chain5.struct", &["--witness", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&w).unwrap();
    assert!(text.starts_with("coloring k=2"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn parallel_run_agrees() {
    let seq = arrow("chain5.struct", &[]);
    let par = ramsey(&[
        "--threads", "4", "arrow-check", "--ambient", &data("chain5.struct"), "--big",
        &data("chain3.struct"), "--small", &data("chain2.struct"), "-k", "2", "-l", "1",
    ]);
    assert_eq!(par.status.code(), Some(1));
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(arrow("missing.struct", &[]).status.code(), Some(2));
    assert_eq!(ramsey(&["devlin-enumerate", "-n", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(ramsey(&["--threads", "0", "w0", "--depth", "9"]).status.code(), Some(2));
    let out = ramsey(&["arrow-check", "--ambient", &data("cycle5.struct"), "--big",
        &data("chain3.struct"), "--small", &data("chain2.struct"), "-k", "2", "-l", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn devlin_enumerate_lists_two_pair_types() {
    let out = ramsey(&["devlin-enumerate", "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
    let out = ramsey(&["devlin-enumerate", "-n", "3", "--depth", "6"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 16);
}

#[test]
fn devlin_color_sentinel() {
    let out = ramsey(&["devlin-color", "--set", &data("non_devlin.tree"), "-n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ramsey(&["devlin-color", "--set", &data("pair_types.tree"), "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("type "));
}

#[test]
fn w0_and_prune() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w0.tree");
    let out = ramsey(&["w0", "--depth", "30", "--out", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let tree = ramsey_core::formats::parse_tree_set(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(tree.len(), 10);
    let out = ramsey(&["tree-prune", "--in", w.to_str().unwrap(), "--levels", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn ultra_subcommands() {
    let out = ramsey(&["ultra-eval", "--seq", &data("chain.seq"), "--formula",
        &data("pair_exists.qf"), "--horizon", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ramsey(&["ultra-color", "--seq", &data("chain.seq"), "--colorings",
        &data("constant.rule"), "--copy", &data("pair.elem")]);
    assert_eq!(out.status.code(), Some(0));
    let out = ramsey(&["transfer-shadow", "--seq", &data("chain.seq"), "-A",
        &data("chain2.struct"), "-B", &data("chain3.struct"), "-k", "2", "-d", "1",
        "--horizon", "20", "--colorings", &data("constant.rule")]);
    assert_eq!(out.status.code(), Some(0));
    let out = ramsey(&["chain-build", "--class", "chains", "--length", "5"]);
    let seq = ramsey_core::formats::parse_sequence(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(seq.unwrap().prefix_len(), 5);
}

fn report_of(args: &[&str]) -> RunReport {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut full = vec!["--report", path.to_str().unwrap()];
    full.extend_from_slice(args);
    ramsey(&full);
    RunReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn reports_are_deterministic() {
    let c = data("chain5.struct");
    let (b, a) = (data("chain3.struct"), data("chain2.struct"));
    let args = ["arrow-check", "--ambient", &c, "--big", &b, "--small", &a, "-k", "2", "-l", "1"];
    let mut r1 = report_of(&args);
    let mut r2 = report_of(&args);
    assert_eq!(r1.subcommand, "arrow-check");
    assert_eq!(r1.exit_code, 1);
    assert_eq!(r1.inputs_digest.len(), 64);
    r1.elapsed_ms = 0;
    r2.elapsed_ms = 0;
    assert_eq!(r1, r2);
    assert_eq!(RunReport::from_json(&r1.to_json()).unwrap(), r1);
    let r3 = report_of(&["--seed", "5", "transfer-shadow", "--seq", &data("chain.seq"), "-A",
        &a, "-B", &b, "-k", "2", "-d", "1", "--horizon", "15"]);
    let r4 = report_of(&["--seed", "5", "transfer-shadow", "--seq", &data("chain.seq"), "-A",
        &a, "-B", &b, "-k", "2", "-d", "1", "--horizon", "15"]);
    assert_eq!(r3.result, r4.result);
    assert_eq!(r3.inputs_digest, r4.inputs_digest);
}

#[test]
fn errors_are_reported() {
    let r = report_of(&["devlin-color", "--set", &data("missing.tree"), "-n", "2"]);
    assert_eq!(r.exit_code, 2);
    assert!(r.result["error"].is_string());
}
