//! Command-line contract: exit codes, config precedence, artefact chaining.

use std::path::Path;
use std::process::{Command, Output};

fn p2d2(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p2d2"))
        .args(args)
        .env("P2D2_OUT_DIR", dir)
        .output()
        .expect("spawn p2d2")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&p2d2(dir.path(), &["--help"])), 0);
    assert_eq!(code(&p2d2(dir.path(), &["--version"])), 0);
    assert_eq!(code(&p2d2(dir.path(), &["plan", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&p2d2(dir.path(), &[])), 1);
    assert_eq!(code(&p2d2(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&p2d2(dir.path(), &["plan"])), 1);
    assert_eq!(code(&p2d2(dir.path(), &["plan", "--env", "mountaincar", "--demos", "many"])), 1);
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = p2d2(dir.path(), &["expert", "--env", "acrobot"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not implemented"));
    assert_eq!(code(&p2d2(dir.path(), &["env-info", "--env", "lunarlander"])), 2);
    assert_eq!(code(&p2d2(dir.path(), &["complexity-check", "--env", "mountaincar"])), 2);
    assert_eq!(code(&p2d2(dir.path(), &["eval", "--policy", "missing.policy"])), 2);
    assert_eq!(code(&p2d2(dir.path(), &["plan", "--env", "mountaincar", "--goal-bias", "2"])), 2);
    // the default grid has a single budget strictly between all-fail and all-succeed
    let o = p2d2(dir.path(), &["failure-curve", "--env", "mountaincar", "--k-grid", "100,200", "--seeds", "30"]);
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("failure_curve.csv").exists());
}

#[test]
fn shortfall_and_time_cap_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = p2d2(dir.path(), &["plan", "--env", "acrobot", "--demos", "2", "--budget-k", "50", "--attempt-cap", "2"]);
    assert_eq!(code(&o), 3);
    let text = std::fs::read_to_string(dir.path().join("plan_summary.csv")).unwrap();
    assert!(text.contains("shortfall,true"));
    let o = p2d2(dir.path(), &["--time-cap", "0", "plan", "--env", "mountaincar", "--demos", "2"]);
    assert_eq!(code(&o), 3);
    let text = std::fs::read_to_string(dir.path().join("plan_summary.csv")).unwrap();
    assert!(text.contains("timed_out,true"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[planner]\nbudget_k = 9000\nseed = 5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = p2d2(dir.path(), &["--config", cfg, "plan", "--env", "mountaincar", "--demos", "1", "--seed", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let header = std::fs::read_to_string(dir.path().join("mountaincar.demos")).unwrap();
    let first = header.lines().next().unwrap();
    assert!(first.contains("\"budget_k\":9000") && first.contains("\"seed\":6"), "{first}");
    std::fs::write(dir.path().join("bad.toml"), "[planner]\nbudget = 1\n").unwrap();
    let bad = dir.path().join("bad.toml");
    assert_eq!(code(&p2d2(dir.path(), &["--config", bad.to_str().unwrap(), "env-info", "--env", "pendulum"])), 2);
}

#[test]
fn plan_imitate_eval_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&p2d2(d, &["plan", "--env", "pendulum", "--demos", "3", "--budget-k", "5000"])), 0);
    let demos = d.join("pendulum.demos");
    assert_eq!(code(&p2d2(d, &["imitate", "--demos", demos.to_str().unwrap(), "--features", "100"])), 0);
    let policy = d.join("pendulum.policy");
    assert_eq!(code(&p2d2(d, &["eval", "--policy", policy.to_str().unwrap(), "--episodes", "5"])), 0);
    let episodes = std::fs::read_to_string(d.join("eval_episodes.csv")).unwrap();
    assert_eq!(episodes.lines().count(), 6);
    assert!(episodes.starts_with("episode,success,undisc_return,steps\n"));
}
