//! End-to-end CLI tests: documented invocations, exit codes, and byte-for-byte
//! output determinism.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan-fibers"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn build_dot_has_eleven_nodes_for_ns_29() {
    let dot = stdout_of(&["build", "--family", "ns", "--p", "29", "--format", "dot"]);
    let nodes = dot
        .lines()
        .filter(|l| l.trim_start().starts_with('c') && !l.contains("--"))
        .count();
    assert_eq!(nodes, 11);
}

#[test]
fn build_rejects_composite_p_with_exit_2() {
    let out = run(&["build", "--family", "s+", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p must be a prime >= 5"), "{err}");
}

#[test]
fn build_fine_family_emits_seven_components() {
    let text = stdout_of(&[
        "build", "--family", "ns-fine", "--s-p", "2", "--p", "7", "--format", "json",
    ]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["components"].as_array().unwrap().len(), 7);
    assert_eq!(value["family"], "ns-fine:2");
}

#[test]
fn fine_family_without_s_p_is_a_usage_error() {
    let out = run(&["build", "--family", "ns-fine", "--p", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inconsistent_fine_chain_count_is_a_usage_error_for_compgroup() {
    // s_P = 1 at p = 7 leaves the Igusa self-intersection non-integral, so
    // there is no intersection matrix to take a cokernel of
    let out = run(&["compgroup", "--family", "ns-fine", "--s-p", "1", "--p", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not integral"), "{err}");
    // building and exporting the same fiber still works
    let out = run(&["build", "--family", "ns-fine", "--s-p", "1", "--p", "7"]);
    assert!(out.status.success());
}

#[test]
fn compgroup_single_cell_prints_the_group() {
    assert_eq!(
        stdout_of(&["compgroup", "--family", "ns", "--p", "17"]).trim(),
        "Z/3 x Z/72"
    );
    assert_eq!(
        stdout_of(&["compgroup", "--family", "s+", "--p", "13"]).trim(),
        "trivial"
    );
}

#[test]
fn contract_ns_plus_29_trace_order() {
    let text = stdout_of(&[
        "contract", "--family", "ns+", "--p", "29", "--target", "minimal", "--trace",
    ]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["fiber"]["components"].as_array().unwrap().len(), 3);
    let labels: Vec<&str> = value["trace"]["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["contracted_label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["D_1", "D_2", "E_1", "E_2", "A", "D_0", "E_0"]);
}

#[test]
fn contract_s_17_ncd_keeps_five_components() {
    let text = stdout_of(&["contract", "--family", "s", "--p", "17", "--target", "ncd"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let labels: Vec<&str> = value["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["A", "E", "F", "B", "D_0"]);
}

#[test]
fn contract_s_plus_5_reaches_one_component() {
    let text = stdout_of(&[
        "contract", "--family", "s+", "--p", "5", "--target", "minimal",
    ]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["components"].as_array().unwrap().len(), 1);
}

#[test]
fn snf_of_matrix_files() {
    let mut f = tempfile_path("m1");
    writeln!(f.0, "[[2,0],[0,3]]").unwrap();
    let text = stdout_of(&["snf", "--input", &f.1, "--format", "table"]);
    assert_eq!(text.trim(), "divisors (1,6)\nrank 2");

    // the 5x5 minimal-ncd matrix of the split family at p = 17
    let mut g = tempfile_path("m2");
    writeln!(
        g.0,
        "[[-23,1,1,0,1],[1,-23,1,0,1],[1,1,-1,1,1],[0,0,1,-2,0],[1,1,1,0,-3]]"
    )
    .unwrap();
    let text = stdout_of(&["snf", "--input", &g.1, "--format", "table"]);
    assert_eq!(text.trim(), "divisors (1,1,1,12)\nrank 4");

    let json_text = stdout_of(&["snf", "--input", &g.1, "--transforms"]);
    let value: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    assert_eq!(value["rank"], 4);
    assert!(value["u"].is_object() && value["v"].is_object());

    let empty = tempfile_path("m3");
    let out = run(&["snf", "--input", &empty.1]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_range_without_the_degenerate_prime_passes() {
    let out = run(&["verify", "--family", "all", "--p-range", "7..101"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_range_including_p_5_reports_the_known_failures() {
    let out = run(&["verify", "--family", "all", "--p-range", "5..13"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let failing: Vec<&str> = text.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 3, "{text}");
    assert!(failing.iter().all(|l| l.starts_with("p=5")));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["build", "--family", "ns", "--p", "29"],
        vec!["build", "--family", "s", "--p", "41", "--format", "dot"],
        vec![
            "contract", "--family", "ns+", "--p", "29", "--target", "minimal", "--trace",
        ],
        vec![
            "compgroup",
            "--family",
            "all",
            "--p-range",
            "17..41",
            "--format",
            "json",
        ],
        vec![
            "verify",
            "--family",
            "all",
            "--p-range",
            "17..31",
            "--format",
            "json",
        ],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn export_writes_dot_files() {
    let path = std::env::temp_dir().join("cartan_fibers_export_test.dot");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "export", "--family", "s+", "--p", "17", "--target", "minimal", "--out", path_str,
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    // initial fiber plus one graph per contraction step
    assert_eq!(text.matches("graph step_").count(), 6);
    std::fs::remove_file(path).ok();
}

fn tempfile_path(tag: &str) -> (std::fs::File, String) {
    let path = std::env::temp_dir().join(format!(
        "cartan_fibers_cli_{tag}_{}.json",
        std::process::id()
    ));
    let file = std::fs::File::create(&path).unwrap();
    (file, path.to_str().unwrap().to_string())
}
