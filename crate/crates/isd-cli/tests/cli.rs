//! End-to-end checks of the `isd` binary: exit codes, golden outputs,
//! determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn golden(name: &str) -> String {
    let path = fixture("golden").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("isd-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let file = dir.join(name);
    fs::write(&file, contents).unwrap();
    file
}

#[test]
fn fmt_prints_the_canonical_form_and_is_idempotent() {
    let first = run(&["fmt", path(&fixture("fig1.isd"))]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first), golden("fig1_fmt.golden"));

    let sugared = scratch_file(
        "sugared.isd",
        "lifelines l1 l2; messages m1 m2;\nalt( strict(l1!m1, l2?m1, l2!m2),\n     0 )\n",
    );
    let once = run(&["fmt", path(&sugared)]);
    assert_eq!(code(&once), 0);
    assert_eq!(stdout(&once), "alt(strict(l1!m1,strict(l2?m1,l2!m2)),0)\n");
    let canonical = scratch_file("sugared_canonical.isd", &stdout(&once));
    let twice = run(&["fmt", path(&canonical)]);
    assert_eq!(stdout(&twice), stdout(&once));
}

#[test]
fn fmt_reports_parse_errors_with_position() {
    let bad = scratch_file("bad.isd", "strict(l1!m1");
    let output = run(&["fmt", path(&bad)]);
    assert_eq!(code(&output), 2);
    assert!(stdout(&output).is_empty());
    let diagnostics = stderr(&output);
    assert!(diagnostics.contains("1:13"), "stderr was: {diagnostics}");
    assert!(diagnostics.contains("expected"), "stderr was: {diagnostics}");
}

#[test]
fn traces_of_the_basic_interaction_match_the_golden_under_both_semantics() {
    let fig1 = fixture("fig1.isd");
    let op = run(&["traces", path(&fig1), "--max-len", "4", "--semantics", "op"]);
    let den = run(&["traces", path(&fig1), "--max-len", "4", "--semantics", "den"]);
    assert_eq!(code(&op), 0);
    assert_eq!(code(&den), 0);
    assert_eq!(stdout(&op), golden("fig1_traces.golden"));
    assert_eq!(op.stdout, den.stdout);
}

#[test]
fn traces_of_the_empty_interaction() {
    let output = run(&["traces", path(&fixture("zero.isd")), "--max-len", "3"]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output), "eps\n");
}

#[test]
fn traces_listings_of_the_two_loops_differ_exactly_on_the_overtaking_trace() {
    let weak = run(&["traces", path(&fixture("fig6_loopS.isd")), "--max-len", "3"]);
    let head = run(&["traces", path(&fixture("fig6_loopH.isd")), "--max-len", "3"]);
    let weak_text = stdout(&weak);
    let head_text = stdout(&head);
    assert_eq!(weak_text, golden("fig6_loopS_traces_len3.golden"));
    assert_eq!(head_text, golden("fig6_loopH_traces_len3.golden"));
    let head_set: std::collections::BTreeSet<&str> = head_text.lines().collect();
    let extra: Vec<&str> = weak_text
        .lines()
        .filter(|line| !head_set.contains(line))
        .collect();
    assert_eq!(extra, vec!["l1!m1.l2!m2.l2?m1"]);
}

#[test]
fn traces_guardrail_requires_explicit_confirmation() {
    let zero = fixture("zero.isd");
    let refused = run(&["traces", path(&zero), "--max-len", "11"]);
    assert_eq!(code(&refused), 2);
    assert!(stderr(&refused).contains("--allow-large"));
    let allowed = run(&["traces", path(&zero), "--max-len", "11", "--allow-large"]);
    assert_eq!(code(&allowed), 0);
    assert_eq!(stdout(&allowed), "eps\n");
}

#[test]
fn check_accepts_and_rejects_with_exit_codes() {
    let trace = "l1!m1.l2!m2.l2?m1";
    let accepted = run(&["check", path(&fixture("fig6_seq.isd")), "--trace", trace]);
    assert_eq!(code(&accepted), 0);
    assert_eq!(stdout(&accepted), "accepted\n");

    let weak = run(&["check", path(&fixture("fig6_loopS.isd")), "--trace", trace]);
    assert_eq!(code(&weak), 0);

    let rejected = run(&["check", path(&fixture("fig6_loopH.isd")), "--trace", trace]);
    assert_eq!(code(&rejected), 1);
    assert_eq!(stdout(&rejected), "rejected\n");
}

#[test]
fn check_of_the_empty_trace_matches_termination() {
    let terminating = run(&["check", path(&fixture("zero.isd")), "--trace", "eps"]);
    assert_eq!(code(&terminating), 0);
    let nonterminating = run(&["check", path(&fixture("act.isd")), "--trace", "eps"]);
    assert_eq!(code(&nonterminating), 1);
}

#[test]
fn check_witness_lists_one_step_per_action() {
    let output = run(&[
        "check",
        path(&fixture("fig6_loopS.isd")),
        "--trace",
        "l1!m1.l2!m2.l2?m1",
        "--witness",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "accepted");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("l1!m1 → "));
    assert!(lines[2].starts_with("l2!m2 → "));
    assert!(lines[3].starts_with("l2?m1 → "));
}

#[test]
fn check_rejects_malformed_traces_as_usage_errors() {
    let output = run(&["check", path(&fixture("zero.isd")), "--trace", "l1*m1"]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("invalid trace"));
}

#[test]
fn frontier_listings() {
    let act = run(&["frontier", path(&fixture("act.isd"))]);
    assert_eq!(code(&act), 0);
    assert_eq!(stdout(&act), "l1!m1 → 0\n");

    let empty = run(&["frontier", path(&fixture("zero.isd"))]);
    assert_eq!(code(&empty), 0);
    assert!(stdout(&empty).is_empty());

    let looped = run(&["frontier", path(&fixture("fig6_loopS.isd"))]);
    assert_eq!(stdout(&looped), golden("fig6_loopS_frontier.golden"));
}

#[test]
fn prune_prints_the_pruned_term_or_reports_collision() {
    let pruned = run(&["prune", path(&fixture("fig3_4.isd")), "--lifeline", "l2"]);
    assert_eq!(code(&pruned), 0);
    assert_eq!(stdout(&pruned), golden("fig3_4_pruned_l2.golden"));

    let collision = run(&["prune", path(&fixture("act.isd")), "--lifeline", "l1"]);
    assert_eq!(code(&collision), 1);
    assert_eq!(stdout(&collision), "collision on lifeline l1\n");
}

#[test]
fn eval_answers_predicates_with_matching_exit_codes() {
    let terminates = run(&["eval", path(&fixture("zero.isd")), "--query", "terminates"]);
    assert_eq!(code(&terminates), 0);
    assert_eq!(stdout(&terminates), "true\n");

    let collides = run(&["eval", path(&fixture("act.isd")), "--query", "terminates"]);
    assert_eq!(code(&collides), 1);
    assert_eq!(stdout(&collides), "false\n");

    let evades = run(&[
        "eval",
        path(&fixture("fig3_4.isd")),
        "--query",
        "evades",
        "--lifeline",
        "l2",
    ]);
    assert_eq!(code(&evades), 0);
    assert_eq!(stdout(&evades), "true\n");

    let missing = run(&["eval", path(&fixture("fig3_4.isd")), "--query", "evades"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn equiv_rejects_zero_cases() {
    let output = run(&["equiv", "--cases", "0"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn equiv_reports_per_case_status_and_a_summary() {
    let output = run(&[
        "equiv",
        "--seed",
        "7",
        "--cases",
        "25",
        "--max-depth",
        "3",
        "--max-len",
        "4",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26);
    assert!(lines[0].contains("ok"));
    assert_eq!(*lines.last().unwrap(), "25/25 equivalent");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let file = fixture("fig6_loopS.isd");
    let args = ["traces", path(&file), "--max-len", "5"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(code(&first), code(&second));
}

#[test]
fn missing_file_is_a_usage_error() {
    let output = run(&["fmt", "no-such-file.isd"]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("cannot read"));
}
