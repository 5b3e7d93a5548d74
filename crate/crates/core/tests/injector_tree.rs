//! Injection over a generated JavaDoc tree.

use std::fs;

use eyedoc_core::inject::{inject, restore, script_tag, InjectError, InjectOptions, Profile, BACKUP_SUFFIX};
use eyedoc_testkit::javadoc::{snapshot, write_tree};

fn opts() -> InjectOptions {
    InjectOptions {
        script_url: "http://localhost:7070/overlay.js".into(),
        service_url: "http://localhost:7070".into(),
        profile: Profile::Javadoc,
        dry_run: false,
        backup: false,
    }
}

#[test]
fn fifty_files_then_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let html = write_tree(dir.path(), 50).unwrap();
    assert_eq!(html.len(), 50);
    let before = snapshot(dir.path());

    let first = inject(dir.path(), &opts()).unwrap();
    assert_eq!(first.modified, 50);
    assert_eq!(first.skipped_already_injected, 0);
    assert!(first.warnings.is_empty(), "{:?}", first.warnings);
    assert!(first.is_balanced());
    let once = snapshot(dir.path());

    let second = inject(dir.path(), &opts()).unwrap();
    assert_eq!(second.modified, 0);
    assert_eq!(second.skipped_already_injected, 50);
    assert!(second.is_balanced());
    assert_eq!(snapshot(dir.path()), once, "second run changed bytes");

    // each HTML file differs from the original by exactly one tag, inserted before </head>
    let tag = script_tag(&opts().script_url, &opts().service_url, Profile::Javadoc);
    for ((path, old), (_, new)) in before.iter().zip(&once) {
        let is_html = matches!(path.extension().and_then(|e| e.to_str()), Some("html" | "htm"));
        if !is_html {
            assert_eq!(old, new, "{} touched", path.display());
            continue;
        }
        assert_eq!(new.len(), old.len() + tag.len());
        let at = new.windows(tag.len()).position(|w| w == tag.as_bytes()).unwrap();
        assert_eq!(&new[..at], &old[..at]);
        assert_eq!(&new[at + tag.len()..], &old[at..]);
        assert!(old[at..].to_ascii_lowercase().starts_with(b"</head>"));
    }
}

#[test]
fn backup_then_restore_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    write_tree(dir.path(), 50).unwrap();
    let before = snapshot(dir.path());

    let with_backup = InjectOptions { backup: true, ..opts() };
    assert_eq!(inject(dir.path(), &with_backup).unwrap().modified, 50);
    // re-runs never overwrite the first backup
    inject(dir.path(), &InjectOptions { script_url: "other.js".into(), ..with_backup.clone() }).unwrap();

    let report = restore(dir.path()).unwrap();
    assert_eq!(report.modified, 50);
    assert!(report.is_balanced());
    assert_eq!(snapshot(dir.path()), before);
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write_tree(dir.path(), 50).unwrap();
    let before = snapshot(dir.path());
    let report = inject(dir.path(), &InjectOptions { dry_run: true, backup: true, ..opts() }).unwrap();
    assert_eq!(report.modified, 50);
    assert_eq!(snapshot(dir.path()), before);
}

#[test]
fn missing_head_is_warned() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("frag.html"), "<html><body>x</body></html>").unwrap();
    fs::write(dir.path().join("bare.htm"), "<p>no markup</p>").unwrap();
    let report = inject(dir.path(), &opts()).unwrap();
    assert_eq!(report.modified, 2);
    assert_eq!(report.warnings.len(), 2);
    let frag = fs::read_to_string(dir.path().join("frag.html")).unwrap();
    assert!(frag.starts_with("<html><script "));
    let bare = fs::read_to_string(dir.path().join("bare.htm")).unwrap();
    assert!(bare.starts_with("<script ") && bare.ends_with("<p>no markup</p>"));
}

#[test]
fn restore_without_backups_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write_tree(dir.path(), 50).unwrap();
    let report = restore(dir.path()).unwrap();
    assert!(report.scanned > 0);
    assert_eq!(report.modified, 0);
}

#[test]
fn orphan_backup_is_restored() {
    let dir = tempfile::tempdir().unwrap();
    let bak = dir.path().join(format!("gone.html{BACKUP_SUFFIX}"));
    fs::write(&bak, "<html></html>").unwrap();
    let report = restore(dir.path()).unwrap();
    assert_eq!(report.modified, 1);
    assert_eq!(fs::read_to_string(dir.path().join("gone.html")).unwrap(), "<html></html>");
    assert!(!bak.exists());
}

#[test]
fn missing_root() {
    let err = inject(std::path::Path::new("/definitely/not/here"), &opts()).unwrap_err();
    assert!(matches!(err, InjectError::RootNotFound(_)));
}
