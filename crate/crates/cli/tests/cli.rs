use std::process::Command;

use eyedoc_testkit::javadoc::{snapshot, write_tree};
use serde_json::Value;

fn inject_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eyedoc-inject"))
}

fn metrics_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eyedoc-metrics"))
}

fn report(out: &std::process::Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn inject_rerun_and_restore() {
    let dir = tempfile::tempdir().unwrap();
    write_tree(dir.path(), 50).unwrap();
    let before = snapshot(dir.path());
    let root = dir.path().to_str().unwrap();
    let args = ["--root", root, "--script-url", "/overlay.js", "--service-url", "http://127.0.0.1:7070", "--backup"];

    let out = inject_cmd().args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["modified"], 50);

    let out = inject_cmd().args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!((r["modified"].as_u64(), r["skipped_already_injected"].as_u64()), (Some(0), Some(50)));

    let out = inject_cmd().args(["restore", "--root", root]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["modified"], 50);
    assert_eq!(snapshot(dir.path()), before);
}

#[test]
fn dry_run_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html><head></head></html>").unwrap();
    let root = dir.path().to_str().unwrap();
    let out = inject_cmd()
        .args(["--root", root, "--script-url", "s.js", "--service-url", "http://h", "--profile", "doxygen", "--dry-run"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["modified"], 1);
    assert_eq!(std::fs::read_to_string(dir.path().join("index.html")).unwrap(), "<html><head></head></html>");

    let out = inject_cmd().args(["--root", root, "--script-url", "s.js", "--service-url", "http://h", "--profile", "doxygen"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let page = std::fs::read_to_string(dir.path().join("index.html")).unwrap();
    assert_eq!(
        page,
        r#"<html><head><script src="s.js" data-eyedoc-service="http://h" data-eyedoc-profile="doxygen" data-eyedoc-marker="1"></script></head></html>"#
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(inject_cmd().args(["--root", "/tmp"]).output().unwrap().status.code(), Some(2));
    let out = inject_cmd()
        .args(["--root", "/no/such/dir", "--script-url", "a", "--service-url", "b"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(inject_cmd().args(["--root", "/tmp", "--script-url", "a", "--service-url", "b", "--profile", "sphinx"]).output().unwrap().status.code(), Some(2));
    assert_eq!(metrics_cmd().output().unwrap().status.code(), Some(2));
}

#[test]
fn metrics_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("session.jsonl");
    std::fs::write(
        &log,
        concat!(
            "{\"seq\":1,\"t_ms\":400,\"type\":\"lookaway_start\"}\n",
            "{\"seq\":2,\"t_ms\":1000,\"type\":\"lookaway_end\"}\n",
            "{\"seq\":3,\"t_ms\":1500,\"type\":\"target_enter\",\"target_id\":\"a\"}\n",
            "{\"seq\":4,\"t_ms\":2200,\"type\":\"selection\",\"target_id\":\"a\",\"trigger\":\"dwell\"}\n",
        ),
    )
    .unwrap();
    let out = metrics_cmd().args(["--log", log.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["selections_total"], 1);
    assert_eq!(r["switch_latencies_ms"], serde_json::json!([1200]));

    let out = metrics_cmd().args(["--log", log.to_str().unwrap(), "--format", "csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");

    std::fs::write(&log, "{\"seq\":2,\"t_ms\":0,\"type\":\"source_end\"}\n").unwrap();
    let out = metrics_cmd().args(["--log", log.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seq"));
}
