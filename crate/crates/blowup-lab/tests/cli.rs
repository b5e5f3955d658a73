use std::path::PathBuf;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup-lab"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn fixture_path(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    p.display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("blowup-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn passing_replay_exits_zero() {
    let o = lab(&["replay", &fixture_path("sec3_char2.bl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: ok"));
}

#[test]
fn failed_expectation_exits_one_and_names_the_source() {
    let path = scratch(
        "wrong.bl",
        "ring 3 x,y,z,w;\nideal x^3+z^13-z*w^18;\nexpect order = 4;\n",
    );
    let o = lab(&["replay", &path]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("expected 4, got 3"), "{out}");
    assert!(out.contains("order_at_origin"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let missing = lab(&["replay", "/nonexistent/script.bl"]);
    assert_eq!(missing.status.code(), Some(2));

    let path = scratch("bad.bl", "ring 4 x;\n");
    let o = lab(&["replay", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("4 is not prime"), "{err}");

    let o = lab(&["fixtures", "--show", "no_such_fixture"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_report_is_valid_and_deterministic() {
    let path = fixture_path("ex1_IX2.bl");
    let a = lab(&["replay", &path, "--json"]);
    let b = lab(&["replay", &path, "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_object());
    let text = stdout(&a);
    assert!(text.contains("a_refined"), "{text}");
}

#[test]
fn degree_bound_is_accepted() {
    let o = lab(&[
        "replay",
        &fixture_path("ex1_IX2.bl"),
        "--degree-bound",
        "12",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("free degree <= 12"));
}

#[test]
fn analyze_prints_the_final_state() {
    let o = lab(&["analyze", &fixture_path("sec3_char2.bl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order"));
}

#[test]
fn fixture_verification_lists_every_fixture() {
    let o = lab(&["fixtures", "--verify"]);
    let out = stdout(&o);
    for name in [
        "ex1_IX1",
        "ex1_IX2",
        "ex1_IX3",
        "sec3_char2",
        "sec4_1312",
        "sec4_2312",
    ] {
        assert!(out.contains(name), "{out}");
    }
    let all_ok = !out.contains("FAILED");
    assert_eq!(o.status.code(), Some(if all_ok { 0 } else { 1 }));
}

#[test]
fn search_output_does_not_depend_on_jobs() {
    let cfg = scratch(
        "tiny.cfg",
        "name = tiny\nchar = 3\nvars = x,y,z,w\nseed a = x^3+z^13-z*w^18\nseed b = x^2*y+z^13-z*w^18\n",
    );
    let one = lab(&[
        "search", &cfg, "--depth", "3", "--budget", "60", "--jobs", "1",
    ]);
    let two = lab(&[
        "search", &cfg, "--depth", "3", "--budget", "60", "--jobs", "2",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    assert!(stdout(&one).starts_with("format=blowup-lab-catalog/1\n"));

    let bad = scratch("bad.cfg", "char = 3\nvars = x\nnonsense\n");
    let o = lab(&["search", &bad, "--depth", "1", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
