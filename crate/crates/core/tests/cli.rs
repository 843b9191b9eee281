use std::io::Write;
use std::process::{Command, Stdio};

use ilp_core::cli;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/grid_moves.txt");

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["ilp"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn solve_fixture() {
    let (code, out, err) = run(&["solve", FIXTURE, "--backend", "native"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("#attempt\n"));
    assert!(out.ends_with("VALID(0)\nINVALID(1)\n"), "{out}");
}

#[test]
fn report_is_json_lines() {
    let dir = std::env::temp_dir().join(format!("ilp-report-{}", std::process::id()));
    let (code, _, _) = run(&[
        "solve",
        FIXTURE,
        "--backend",
        "native",
        "--report",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&dir).unwrap();
    std::fs::remove_file(&dir).ok();
    let events: Vec<String> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["event"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert!(events.contains(&"attempt".to_string()));
    assert_eq!(events.last().map(String::as_str), Some("done"));
}

#[test]
fn malformed_instance() {
    let path = std::env::temp_dir().join(format!("ilp-bad-{}.txt", std::process::id()));
    std::fs::write(&path, "#Example(0)\n#valid_moves\nvalid_move((0,0),0).\n").unwrap();
    let (code, out, err) = run(&["solve", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn missing_file_and_bad_flags() {
    assert_eq!(run(&["solve", "/nonexistent/instance.txt"]).0, 1);
    assert_eq!(run(&["solve", FIXTURE, "--maxvars", "-1"]).0, 1);
    assert_eq!(
        run(&["solve", FIXTURE, "--climit-min", "5", "--climit-max", "3"]).0,
        1
    );
    assert_eq!(run(&["hypspace"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
}

#[test]
fn no_attempt_within_a_tiny_limit() {
    let (code, out, _) = run(&[
        "solve",
        FIXTURE,
        "--backend",
        "native",
        "--climit-min",
        "1",
        "--climit-max",
        "2",
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
}

#[test]
fn hypspace_backends_print_the_same_listing() {
    let (c1, asp, _) = run(&["hypspace", "--instance", FIXTURE, "--climit", "6"]);
    let (c2, native, _) = run(&[
        "hypspace",
        "--instance",
        FIXTURE,
        "--climit",
        "6",
        "--backend",
        "native",
    ]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(asp, native);
    assert_eq!(asp.lines().count(), 29);
    let (_, decl, _) = run(&[
        "hypspace",
        "--target",
        "valid_move(cell,time)",
        "--relevant",
        "gap(cell)",
        "--relevant",
        "agent_at(cell,time)",
        "--relevant",
        "h_adjacent(cell,cell)",
        "--relevant",
        "v_adjacent(cell,cell)",
        "--backend",
        "native",
    ]);
    assert_eq!(decl, native);
}

#[test]
fn encoding_runs_standalone() {
    let (code, program, _) = run(&["encode", "--instance", FIXTURE, "--climit", "6"]);
    assert_eq!(code, 0);
    let mut child = Command::new(std::env::var("ILP_CLINGO").unwrap_or_else(|_| "clingo".into()))
        .args(["-n0", "-q", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(program.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("SATISFIABLE") && !text.contains("UNSATISFIABLE"),
        "{text}"
    );
    assert!(text.contains("Models       : 29"), "{text}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ilp");
    let ok = Command::new(bin)
        .args(["solve", FIXTURE, "--backend", "native"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("#attempt"));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    let bad = Command::new(bin).args(["solve"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
