use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use smnc_core::fixtures;
use tempfile::TempDir;

fn smnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smnc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_butterfly() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "b.json", &fixtures::butterfly_doc().to_canonical_json());
    let report = dir.path().join("r.json");
    let sol = dir.path().join("s.json");
    let dot = dir.path().join("g.dot");
    let out = smnc(&[
        "solve",
        s(&inst),
        "--json",
        s(&report),
        "--solution",
        s(&sol),
        "--dot",
        s(&dot),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("verdict: solvable"));
    assert!(text.contains("field: GF(2)"));
    assert!(text.contains("encoding links: 3"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["field_order"], 2);
    assert_eq!(r["encoding_link_count"], 3);
    assert!(std::fs::read_to_string(&dot).unwrap().contains("fillcolor=gold"));

    let out = smnc(&["verify", s(&inst), s(&sol)]);
    assert_eq!(code(&out), 0);
}

#[test]
fn solve_bottleneck_names_singular_regions() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "n.json", &fixtures::bottleneck_doc().to_canonical_json());
    let out = smnc(&["solve", s(&inst), "--oracle"]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("verdict: unsolvable"));
    assert!(text.contains("singular regions: R3"));
    assert!(text.contains("oracle: agrees"));
}

#[test]
fn errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&smnc(&["solve", s(&dir.path().join("missing.json"))])), 1);
    let bad = write(&dir, "bad.json", "{\"nodes\": [");
    let out = smnc(&["solve", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let inst = write(&dir, "b.json", &fixtures::butterfly_doc().to_canonical_json());
    assert_eq!(code(&smnc(&["solve", s(&inst), "--field", "6"])), 1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "t.json", &fixtures::two_chains().to_canonical_json());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    smnc(&["solve", s(&inst), "--minimize", "--json", s(&a)]);
    smnc(&["solve", s(&inst), "--minimize", "--json", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn tampered_solution_fails_verification() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "b.json", &fixtures::butterfly_doc().to_canonical_json());
    let sol = dir.path().join("s.json");
    smnc(&["solve", s(&inst), "--solution", s(&sol)]);
    let text = std::fs::read_to_string(&sol)
        .unwrap()
        .replace("\"9\": \"(1,1)\"", "\"9\": \"(1,0)\"");
    let bad = write(&dir, "bad.json", &text);
    let out = smnc(&["verify", s(&inst), s(&bad)]);
    assert_ne!(code(&out), 0);
    assert!(stdout(&out).contains("violation at e9"));
}

#[test]
fn gen_tight_field_round_trip() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("tf.json");
    assert_eq!(code(&smnc(&["gen", "--tight-field", "4", "-o", s(&inst)])), 0);
    let out = smnc(&["solve", s(&inst), "--minimize"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("field: GF(5)"), "{text}");
    assert!(text.contains("(11 sinks)"));
    assert!(text.contains("chromatic number 6"));

    // a spec file is accepted wherever an instance is
    let spec = dir.path().join("spec.json");
    assert_eq!(
        code(&smnc(&["gen", "--tight-encoding", "3", "--emit-spec", "-o", s(&spec)])),
        0
    );
    assert!(std::fs::read_to_string(&spec).unwrap().contains("region_spec"));
    assert_eq!(code(&smnc(&["solve", s(&spec)])), 0);
}

#[test]
fn gen_is_seed_deterministic() {
    let a = smnc(&["gen", "--nodes", "10", "--links", "30", "--seed", "5"]);
    let b = smnc(&["gen", "--nodes", "10", "--links", "30", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&smnc(&["gen", "--nodes", "2", "--links", "3"])), 1);
}

#[test]
fn minimize_and_bounds() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "b.json", &fixtures::butterfly_doc().to_canonical_json());
    let dot = dir.path().join("m.dot");
    let out = smnc(&["minimize", s(&inst), "--dot", s(&dot)]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["chromatic_number"], 3);
    assert!(report["audits"].as_array().unwrap().iter().all(|a| a["passed"] == true));
    assert!(std::fs::read_to_string(&dot)
        .unwrap()
        .starts_with("digraph region_graph"));

    let out = smnc(&["bounds", s(&inst)]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["bound_encoding"], 3);

    let bottleneck = write(&dir, "n.json", &fixtures::bottleneck_doc().to_canonical_json());
    assert_eq!(code(&smnc(&["bounds", s(&bottleneck)])), 2);
}

#[test]
fn decompose_prints_regions() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "b.json", &fixtures::butterfly_doc().to_canonical_json());
    let line = dir.path().join("l.dot");
    let out = smnc(&["decompose", s(&inst), "--line-dot", s(&line)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("1: 1 3 4\n2: 2 5 6\n7: 7 8 9\n10: 10\n11: 11\n"));
    assert_eq!(std::fs::read_to_string(&line).unwrap().matches(" -> ").count(), 12);
}

#[test]
fn bench_prints_one_row_per_size() {
    let out = smnc(&["bench", "--sizes", "500,1000,2000", "--runs", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(3).unwrap().trim_start().starts_with("2000"));
    assert_eq!(code(&smnc(&["bench", "--sizes", "2000,1000"])), 1);
}
