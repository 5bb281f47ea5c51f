use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use propcheck::documents::{from_json, to_json, BranchOpDocument, OutcomeDocument, ReportDocument};

fn propcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propcheck"))
        .args(args)
        .env_remove("PROPCHECK_SEED")
        .output()
        .unwrap()
}

fn oracle(level: &str, checker: &str, input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_propcheck"))
        .args(["oracle", "--level", level, "--checker", checker])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> ReportDocument {
    from_json(stdout(out).trim()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("propcheck-{}-{name}.json", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn correct_sum_passes_check() {
    let out = propcheck(&["run", "--mode", "check", "--trusted", "boundz:sum=15", "--tested", "sum-bc", "--seed", "42", "--tests", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r.passed);
    assert_eq!((r.tests_run, r.seed.as_str(), r.mode.as_str()), (100, "42", "check"));
    assert!(r.counterexample.is_none());
}

#[test]
fn reversed_bound_is_caught_and_replays() {
    let out = propcheck(&["run", "--mode", "check", "--trusted", "boundz:sum=15", "--tested", "sum-bc+bug:REVERSED_BOUND", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let cx = r.counterexample.as_ref().unwrap();
    assert!(!r.passed && cx.minimal);
    assert!(cx.transcript.is_none());

    let failing = scratch("reversed", &stdout(&out));
    assert_eq!(propcheck(&["replay", "--report", failing.to_str().unwrap()]).status.code(), Some(1));

    let mut fixed = r.clone();
    fixed.tested = Some("sum-bc=15".into());
    let fixed_path = scratch("reversed-fixed", &to_json(&fixed));
    assert_eq!(propcheck(&["replay", "--report", fixed_path.to_str().unwrap()]).status.code(), Some(4));

    let mut passing = r;
    passing.passed = true;
    passing.counterexample = None;
    let passing_path = scratch("passing", &to_json(&passing));
    assert_eq!(propcheck(&["replay", "--report", passing_path.to_str().unwrap()]).status.code(), Some(2));
    for p in [failing, fixed_path, passing_path] {
        std::fs::remove_file(p).unwrap();
    }
}

#[test]
fn stronger_hierarchy_passes() {
    let out = propcheck(&["run", "--mode", "stronger", "--trusted", "boundz:alldiff", "--tested", "arc:alldiff"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).mode, "stronger");
    let fc = propcheck(&["run", "--mode", "stronger", "--trusted", "alldiff-fc", "--tested", "alldiff-ac"]);
    assert_eq!(fc.status.code(), Some(0));
}

#[test]
fn fc_skip_last_is_caught_against_correct_fc() {
    let out = propcheck(&["run", "--mode", "check", "--trusted", "alldiff-fc", "--tested", "alldiff-fc+bug:FC_SKIP_LAST"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dives_pass_for_the_correct_propagator() {
    let out = propcheck(&["dive", "--trusted", "boundz:sum=15", "--tested", "sum-bc", "--dives", "20", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).mode, "dives");
}

#[test]
fn trail_bug_transcript_ends_with_a_pop() {
    let out = propcheck(&["dive", "--trusted", "boundz:sum=15", "--tested", "sum-bc+bug:TRAIL_NO_RESTORE", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let cx = r.counterexample.as_ref().unwrap();
    assert_eq!(cx.transcript.as_ref().unwrap().last(), Some(&BranchOpDocument::Pop));
    let path = scratch("trail", &stdout(&out));
    assert_eq!(propcheck(&["replay", "--report", path.to_str().unwrap()]).status.code(), Some(1));

    let mut fixed = r;
    fixed.tested = Some("sum-bc=15".into());
    let fixed_path = scratch("trail-fixed", &to_json(&fixed));
    assert_eq!(propcheck(&["replay", "--report", fixed_path.to_str().unwrap()]).status.code(), Some(4));
    std::fs::remove_file(path).unwrap();
    std::fs::remove_file(fixed_path).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(propcheck(&["dive", "--trusted", "boundz:sum=15", "--tested", "sum-bc", "--dives", "0"]).status.code(), Some(2));
    let bad = propcheck(&["run", "--mode", "check", "--trusted", "arc:gcc", "--tested", "alldiff-ac"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("alldiff, sum=<c>"));
    assert!(bad.stdout.is_empty());
    let recipe = propcheck(&["run", "--mode", "check", "--trusted", "arc:alldiff", "--tested", "alldiff-zz"]);
    assert_eq!(recipe.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&recipe.stderr).contains("alldiff-fc"));
    assert_eq!(propcheck(&["run", "--mode", "check", "--trusted", "arc:alldiff", "--tested", "alldiff-ac", "--density", "0"]).status.code(), Some(2));
    assert_eq!(propcheck(&["run", "--mode", "sideways", "--trusted", "arc:alldiff", "--tested", "alldiff-ac"]).status.code(), Some(2));
    assert_eq!(propcheck(&["run", "--mode", "check", "--trusted", "arc:alldiff", "--tested", "alldiff-ac+bug:REVERSED_BOUND"]).status.code(), Some(2));
}

#[test]
fn oversized_instances_exit_3() {
    let out = propcheck(&["run", "--mode", "check", "--trusted", "arc:alldiff", "--tested", "alldiff-ac", "--vars", "8", "--density", "1", "--tests", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_seed_is_the_fallback() {
    let run = |seed: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_propcheck"));
        c.args(args).env_remove("PROPCHECK_SEED");
        if let Some(s) = seed {
            c.env("PROPCHECK_SEED", s);
        }
        c.output().unwrap()
    };
    let base = ["run", "--mode", "check", "--trusted", "boundz:sum=0", "--tested", "sum-bc", "--tests", "5"];
    assert_eq!(report(&run(Some("123"), &base)).seed, "123");
    let mut explicit = base.to_vec();
    explicit.extend(["--seed", "9"]);
    assert_eq!(report(&run(Some("123"), &explicit)).seed, "9");
    assert_eq!(report(&run(None, &base)).seed, "0");
}

#[test]
fn oracle_examples() {
    let out = oracle("arc", "alldiff", r#"{"domains":[[1,2],[1,2],[1,2,3]]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), r#"{"status":"filtered","domains":[[1,2],[1,2],[3]]}"#);

    let out = oracle("arc", "alldiff", r#"{"domains":[[]],"allowEmpty":true}"#);
    assert_eq!(stdout(&out).trim(), r#"{"status":"inconsistent"}"#);

    let out = oracle("boundz", "sum=15", r#"{"domains":[[1,2,3,4,5,6,7,8,9,10],[2,3],[2,3]]}"#);
    assert_eq!(stdout(&out).trim(), r#"{"status":"filtered","domains":[[9,10],[2,3],[2,3]]}"#);
    let parsed: OutcomeDocument = from_json(stdout(&out).trim()).unwrap();
    assert!(matches!(parsed, OutcomeDocument::Filtered { .. }));
}

#[test]
fn oracle_rejects_bad_input() {
    assert_eq!(oracle("arc", "alldiff", r#"{"domains":[[]]}"#).status.code(), Some(2));
    assert_eq!(oracle("arc", "alldiff", "not json").status.code(), Some(2));
    assert_eq!(oracle("hyper", "alldiff", r#"{"domains":[[1]]}"#).status.code(), Some(2));
}
