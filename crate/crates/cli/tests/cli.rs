//! End-to-end runs of the binary against the shipped corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conecount"))
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn polytopes() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../polytopes")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn corpus_gate_all_verify() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    assert!(files.len() >= 8, "corpus ships at least eight cone files");
    for f in files {
        let out = run(&["verify", f.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}: exit {:?}\n{}{}",
            f.display(),
            out.status.code(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn count_example_at_k4() {
    let f = corpus().join("example.json");
    let out = run(&["count", f.to_str().unwrap(), "--xi", "1,1", "--k", "4"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "11");
}

#[test]
fn reeb_example_certifies() {
    let f = corpus().join("example.json");
    let out = run(&["reeb", f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("certified rational direction: (0, 1)"), "{text}");
}

#[test]
fn verify_example_default_xi_is_reeb() {
    let f = corpus().join("example.json");
    let out = run(&["verify", f.to_str().unwrap(), "--kmax", "60"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("xi: (0, 1) [reeb-certified]"), "{text}");
    assert!(text.contains("[1, 5/2, 3/2]"), "{text}");
}

#[test]
fn verify_json_reports_are_deterministic_and_round_trip() {
    let dir = std::env::temp_dir();
    let f = corpus().join("hexagon_cone.json");
    let out1 = dir.join("hexagon-report-1.json");
    let out2 = dir.join("hexagon-report-2.json");
    for out in [&out1, &out2] {
        let r = run(&[
            "verify",
            f.to_str().unwrap(),
            "--json",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "reports not byte-identical");
    let parsed =
        conecount::verify::VerificationReport::from_json(&String::from_utf8(a).unwrap()).unwrap();
    assert_eq!(parsed.to_json().as_bytes(), b.as_slice());
    assert!(parsed.pass);
    assert!(parsed.orbifold_rays.iter().any(|r| r.g == 3));
    std::fs::remove_file(out1).ok();
    std::fs::remove_file(out2).ok();
}

#[test]
fn ehrhart_polytopes() {
    let f = polytopes().join("triangle.json");
    let out = run(&["ehrhart", f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("a_(n-2): 1  bound: 1  margin: 0"), "{text}");
    let f = polytopes().join("square.json");
    let out = run(&["ehrhart", f.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn malformed_files_exit_2() {
    let dir = std::env::temp_dir();
    let bad = dir.join("bad-cone-spec.json");
    std::fs::write(&bad, r#"{"name": "bad", "dim": 2, "rays": [[1, 0, 0]]}"#).unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(msg.contains("rays"), "{msg}");
    std::fs::remove_file(bad).ok();

    let missing = dir.join("no-such-file.json");
    let out = run(&["verify", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hypothesis_failures_exit_2() {
    let dir = std::env::temp_dir();
    // a facet whose rays span an index-3 sublattice: smoothness fails
    let nonsmooth = dir.join("nonsmooth-cone.json");
    std::fs::write(
        &nonsmooth,
        r#"{"name": "nonsmooth", "dim": 3, "rays": [[1, 0, 0], [-1, 3, 0], [0, 0, 1]], "xi": [0, 1, 1]}"#,
    )
    .unwrap();
    let out = run(&["verify", nonsmooth.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(msg.contains("smooth"), "{msg}");
    std::fs::remove_file(nonsmooth).ok();
}

#[test]
fn failed_inequality_exits_1() {
    // lopsided quadrilateral cone: the bound overshoots at the vertical
    // direction, so the verifier must report failure honestly
    let dir = std::env::temp_dir();
    let f = dir.join("lopsided-cone.json");
    std::fs::write(
        &f,
        r#"{"name": "lopsided", "dim": 3, "rays": [[2, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]], "xi": [0, 0, 1]}"#,
    )
    .unwrap();
    let out = run(&["verify", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("pass: false"), "{text}");
    std::fs::remove_file(f).ok();
}
