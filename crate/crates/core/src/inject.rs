//! Byte-level insertion of the overlay script tag into HTML documentation trees.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

pub const MARKER_ATTR: &str = "data-eyedoc-marker";
pub const BACKUP_SUFFIX: &str = ".eyedoc.bak";

#[derive(Debug, Error)]
pub enum InjectError {
    #[error("root directory {0} not found")]
    RootNotFound(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Javadoc,
    Doxygen,
    Generic,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Javadoc => "javadoc",
            Profile::Doxygen => "doxygen",
            Profile::Generic => "generic",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "javadoc" => Ok(Profile::Javadoc),
            "doxygen" => Ok(Profile::Doxygen),
            "generic" => Ok(Profile::Generic),
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectOptions {
    pub script_url: String,
    pub service_url: String,
    pub profile: Profile,
    pub dry_run: bool,
    pub backup: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub path: String,
    pub message: String,
}

/// `scanned` always equals `modified` plus every skip counter plus `failed`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectReport {
    pub scanned: u64,
    pub modified: u64,
    pub skipped_already_injected: u64,
    pub skipped_no_html: u64,
    pub skipped_no_backup: u64,
    pub failed: u64,
    pub warnings: Vec<Warning>,
}

impl InjectReport {
    pub fn is_balanced(&self) -> bool {
        self.scanned
            == self.modified + self.skipped_already_injected + self.skipped_no_html + self.skipped_no_backup + self.failed
    }

    fn warn(&mut self, root: &Path, path: &Path, message: impl Into<String>) {
        self.warnings.push(Warning { path: display_rel(root, path), message: message.into() });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    BeforeHeadClose,
    AfterHtmlOpen,
    Prepended,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Splice {
    AlreadyInjected,
    Injected { bytes: Vec<u8>, placement: Placement },
}

fn escape_attr(v: &str) -> String {
    let mut out = String::with_capacity(v.len());
    for c in v.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

pub fn script_tag(script_url: &str, service_url: &str, profile: Profile) -> String {
    format!(
        r#"<script src="{}" data-eyedoc-service="{}" data-eyedoc-profile="{}" {MARKER_ATTR}="1"></script>"#,
        escape_attr(script_url),
        escape_attr(service_url),
        profile.as_str()
    )
}

fn find_ci(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w.eq_ignore_ascii_case(needle))
}

/// Position just past the first `<html ...>` start tag.
fn after_html_open(content: &[u8]) -> Option<usize> {
    let mut from = 0;
    while let Some(rel) = find_ci(&content[from..], b"<html") {
        let start = from + rel;
        let next = content.get(start + 5).copied();
        if matches!(next, Some(b'>' | b'/') | Some(b' ' | b'\t' | b'\r' | b'\n')) {
            let close = content[start..].iter().position(|&b| b == b'>')?;
            return Some(start + close + 1);
        }
        from = start + 5;
    }
    None
}

/// Inserts `tag` before the first `</head>`, else after `<html ...>`, else at the start.
pub fn splice(content: &[u8], tag: &str) -> Splice {
    if find_ci(content, MARKER_ATTR.as_bytes()).is_some() {
        return Splice::AlreadyInjected;
    }
    let (at, placement) = if let Some(i) = find_ci(content, b"</head>") {
        (i, Placement::BeforeHeadClose)
    } else if let Some(i) = after_html_open(content) {
        (i, Placement::AfterHtmlOpen)
    } else {
        (0, Placement::Prepended)
    };
    let mut bytes = Vec::with_capacity(content.len() + tag.len());
    bytes.extend_from_slice(&content[..at]);
    bytes.extend_from_slice(tag.as_bytes());
    bytes.extend_from_slice(&content[at..]);
    Splice::Injected { bytes, placement }
}

fn is_html(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
}

fn backup_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(BACKUP_SUFFIX);
    PathBuf::from(name)
}

fn display_rel(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// Regular files under `root`, sorted by path.
fn files(root: &Path) -> Vec<PathBuf> {
    WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect()
}

pub fn inject(root: &Path, opts: &InjectOptions) -> Result<InjectReport, InjectError> {
    if !root.is_dir() {
        return Err(InjectError::RootNotFound(root.to_path_buf()));
    }
    let tag = script_tag(&opts.script_url, &opts.service_url, opts.profile);
    let mut report = InjectReport::default();
    for path in files(root) {
        report.scanned += 1;
        if !is_html(&path) {
            report.skipped_no_html += 1;
            continue;
        }
        let content = match fs::read(&path) {
            Ok(c) => c,
            Err(e) => {
                report.failed += 1;
                report.warn(root, &path, format!("UnwritableFile: cannot read: {e}"));
                continue;
            }
        };
        let (bytes, placement) = match splice(&content, &tag) {
            Splice::AlreadyInjected => {
                report.skipped_already_injected += 1;
                continue;
            }
            Splice::Injected { bytes, placement } => (bytes, placement),
        };
        match placement {
            Placement::BeforeHeadClose => {}
            Placement::AfterHtmlOpen => report.warn(root, &path, "no </head>; inserted after <html>"),
            Placement::Prepended => report.warn(root, &path, "no </head> or <html>; prepended"),
        }
        if opts.dry_run {
            report.modified += 1;
            continue;
        }
        match write_injected(&path, &content, &bytes, opts.backup) {
            Ok(()) => report.modified += 1,
            Err(e) => {
                report.failed += 1;
                report.warn(root, &path, format!("UnwritableFile: {e}"));
            }
        }
    }
    Ok(report)
}

fn write_injected(path: &Path, original: &[u8], bytes: &[u8], backup: bool) -> std::io::Result<()> {
    if backup {
        let bak = backup_path(path);
        if !bak.exists() {
            fs::write(&bak, original)?;
        }
    }
    fs::write(path, bytes)
}

/// Moves every `*.eyedoc.bak` back over its original. Backups win even when the original is gone.
pub fn restore(root: &Path) -> Result<InjectReport, InjectError> {
    if !root.is_dir() {
        return Err(InjectError::RootNotFound(root.to_path_buf()));
    }
    let mut report = InjectReport::default();
    let all = files(root);
    for path in &all {
        let name = path.to_string_lossy();
        if let Some(original) = name.strip_suffix(BACKUP_SUFFIX) {
            let original = PathBuf::from(original);
            if original.exists() {
                // counted with its original below
                continue;
            }
            report.scanned += 1;
            restore_one(root, path, &original, &mut report);
            continue;
        }
        report.scanned += 1;
        let bak = backup_path(path);
        if bak.exists() {
            restore_one(root, &bak, path, &mut report);
        } else if is_html(path) {
            report.skipped_no_backup += 1;
        } else {
            report.skipped_no_html += 1;
        }
    }
    Ok(report)
}

fn restore_one(root: &Path, bak: &Path, original: &Path, report: &mut InjectReport) {
    match fs::rename(bak, original) {
        Ok(()) => report.modified += 1,
        Err(e) => {
            report.failed += 1;
            report.warn(root, original, format!("UnwritableFile: cannot restore: {e}"));
        }
    }
}
