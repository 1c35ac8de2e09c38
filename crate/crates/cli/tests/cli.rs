//! End-to-end tests of the `ccvar` binary: exit codes, report shape,
//! and the construct commands' output documents.

use std::path::{Path, PathBuf};
use std::process::Command;

use ccvar_core::matched::{extract_from_endos, m_bmset, terminal_bmset};
use ccvar_core::schema::{doc_to_json, BmsetDoc, Doc, MatchedPairDoc};
use ccvar_core::Limits;

fn workdir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    std::fs::create_dir_all(&dir).expect("fixture directory");
    dir
}

fn write(name: &str, text: &str) -> PathBuf {
    let path = workdir().join(name);
    std::fs::write(&path, text).expect("fixture write");
    path
}

/// Run the binary; returns (exit code, stdout, stderr).
fn ccvar(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ccvar")).args(args).output().expect("spawn ccvar");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("stdout utf8"),
        String::from_utf8(out.stderr).expect("stderr utf8"),
    )
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("JSON output")
}

fn pair_fixture(name: &str) -> PathBuf {
    let pair = extract_from_endos(2, &Limits::default()).expect("two-point pair");
    write(name, &doc_to_json(&Doc::MatchedPair(MatchedPairDoc::of(&pair))))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

#[test]
fn check_accepts_a_valid_pair() {
    let file = pair_fixture("pair_ok.json");
    let (code, stdout, _) = ccvar(&["check", path_str(&file)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let report = json(&stdout);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["command"], "check");
    assert!(report["failures"].as_array().unwrap().is_empty());
}

#[test]
fn check_flags_a_mutated_action_cell_with_a_witness() {
    let file = pair_fixture("pair_mutated.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let cell = doc["bset_on_m"]["action"][1][0][0].clone();
    assert_ne!(doc["bset_on_m"]["action"][1][0][1], cell, "mutation must change the cell");
    doc["bset_on_m"]["action"][1][0][1] = cell;
    let file = write("pair_mutated.json", &doc.to_string());

    let (code, stdout, _) = ccvar(&["check", path_str(&file)]);
    assert_eq!(code, 1, "stdout: {stdout}");
    let report = json(&stdout);
    assert_eq!(report["status"], "fail");
    let witnesses = report["witnesses"].as_array().unwrap();
    assert!(!witnesses.is_empty());
    assert!(witnesses[0]["law"].as_str().unwrap().contains('.'), "law should be named");
    assert!(!witnesses[0]["bindings"].as_array().unwrap().is_empty());
}

#[test]
fn check_rejects_malformed_json_as_invalid_input() {
    let file = write("garbage.json", "{oops");
    let (code, stdout, _) = ccvar(&["check", path_str(&file)]);
    assert_eq!(code, 2, "stdout: {stdout}");
    assert_eq!(json(&stdout)["status"], "error");
}

#[test]
fn check_reports_schema_violations_with_pointer_paths() {
    let file = write(
        "short_row.json",
        r#"{"kind": "monoid", "size": 2, "identity": 0, "table": [[0, 1], [1]]}"#,
    );
    let (code, stdout, _) = ccvar(&["check", path_str(&file)]);
    assert_eq!(code, 2, "stdout: {stdout}");
    let report = json(&stdout);
    assert_eq!(report["status"], "error");
    assert!(report["checked"][0]["tag"].as_str().unwrap().contains("/table/1"));
}

#[test]
fn extract_endos_builds_the_four_element_pair() {
    let out = workdir().join("extracted_pair.json");
    let (code, stdout, _) =
        ccvar(&["construct", "extract-endos", "--size", "2", "--out", path_str(&out)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert_eq!(json(&stdout)["status"], "pass");

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["kind"], "matched_pair");
    assert_eq!(doc["monoid"]["size"], 4);
    assert_eq!(doc["boolean"]["atoms"], 2);
    assert!(doc["certificate"]["failures"].as_array().unwrap().is_empty());

    // The emitted structure replays through the checker.
    let (code, _, _) = ccvar(&["check", path_str(&out)]);
    assert_eq!(code, 0);
}

#[test]
fn exponential_into_the_terminal_object_is_terminal() {
    let limits = Limits::default();
    let pair = extract_from_endos(2, &limits).unwrap();
    let y = write(
        "exp_y.json",
        &doc_to_json(&Doc::Bmset(BmsetDoc::of(&m_bmset(&pair, &limits).unwrap()))),
    );
    let z = write(
        "exp_z.json",
        &doc_to_json(&Doc::Bmset(BmsetDoc::of(&terminal_bmset(&pair, &limits).unwrap()))),
    );
    let (code, stdout, _) = ccvar(&["construct", "exp", "--y", path_str(&y), "--z", path_str(&z)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let doc = json(&stdout);
    assert_eq!(doc["kind"], "bmset");
    assert_eq!(doc["carrier"], 1, "hom-set into the one-point object has one element");
    assert!(doc["certificate"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_reports_the_parts_and_uniqueness() {
    let file = write(
        "swap_flip.json",
        r#"{"kind": "dual_op", "base": 2, "arity": 2, "map": [[0, 1], [1, 0]]}"#,
    );
    let (code, stdout, _) = ccvar(&["construct", "decompose", path_str(&file)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let doc = json(&stdout);
    assert_eq!(doc["unique"], true);
    assert_eq!(doc["hyperaffine"]["kind"], "dual_op");
    assert_eq!(doc["unary"]["kind"], "dual_op");

    // Both parts replay through the checker on their own.
    for part in ["hyperaffine", "unary"] {
        let path = write(&format!("part_{part}.json"), &doc[part].to_string());
        let (code, _, _) = ccvar(&["check", path_str(&path)]);
        assert_eq!(code, 0, "{part} part should check clean");
    }
}

#[test]
fn capacity_errors_name_the_bound_and_limit() {
    let (code, stdout, _) =
        ccvar(&["construct", "extract-endos", "--size", "3", "--max-monoid", "12"]);
    assert_eq!(code, 2, "stdout: {stdout}");
    let report = json(&stdout);
    assert_eq!(report["status"], "error");
    let tag = report["checked"][0]["tag"].as_str().unwrap();
    assert!(tag.contains("capacity"), "tag: {tag}");
    assert!(tag.contains("12"), "tag should name the limit: {tag}");
}

#[test]
fn reports_are_byte_identical_and_seed_is_ignored() {
    let file = pair_fixture("pair_stable.json");
    let (c1, first, _) = ccvar(&["check", path_str(&file)]);
    let (c2, second, _) = ccvar(&["check", path_str(&file)]);
    let (c3, seeded, _) = ccvar(&["check", path_str(&file), "--seed", "42"]);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(first, second);
    assert_eq!(first, seeded);
}

#[test]
fn suite_quick_passes() {
    let (code, stdout, stderr) = ccvar(&["suite", "--level", "quick"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report = json(&stdout);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["command"], "suite quick");
    // One progress line per criterion on stderr.
    assert_eq!(stderr.lines().filter(|l| l.contains(": pass")).count(), 9);
}
