//! Sequence-numbered, append-only session event log.

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interaction::{InteractionEvent, ScrollDirection, Trigger};

/// Upper bound on entries returned by one poll.
pub const PAGE_SIZE: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("since={since} is beyond the latest sequence number {latest}")]
    BadSeq { since: u64, latest: u64 },
    #[error("log line {line}: {message}")]
    LogParseError { line: usize, message: String },
    #[error("log line {line}: expected seq {expected}, found {found}")]
    SeqGap { line: usize, expected: u64, found: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LogRecord {
    TargetEnter { target_id: String },
    TargetLeave { target_id: String },
    DwellProgress { target_id: String, fraction: f64 },
    Selection { target_id: String, trigger: Trigger },
    ScrollCommand { direction: ScrollDirection },
    Blink { t_end_ms: u64 },
    LookawayStart,
    LookawayEnd,
    SmoothedPoint { x: f64, y: f64 },
    /// Live-source backpressure dropped `count` samples.
    SamplesDropped { count: u64 },
    /// The source finished (replay/scenario) and the pipeline was flushed.
    SourceEnd,
    SourceError { detail: String },
}

impl LogRecord {
    pub fn from_interaction(ev: &InteractionEvent) -> (u64, Self) {
        let rec = match ev {
            InteractionEvent::TargetEnter { target_id, .. } => LogRecord::TargetEnter { target_id: target_id.clone() },
            InteractionEvent::TargetLeave { target_id, .. } => LogRecord::TargetLeave { target_id: target_id.clone() },
            InteractionEvent::DwellProgress { target_id, fraction, .. } => {
                LogRecord::DwellProgress { target_id: target_id.clone(), fraction: *fraction }
            }
            InteractionEvent::Selection { target_id, trigger, .. } => {
                LogRecord::Selection { target_id: target_id.clone(), trigger: *trigger }
            }
            InteractionEvent::ScrollCommand { direction, .. } => LogRecord::ScrollCommand { direction: *direction },
        };
        (ev.t_ms(), rec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub t_ms: u64,
    #[serde(flatten)]
    pub record: LogRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventPage {
    pub events: Vec<LogEntry>,
    pub next_seq: u64,
}

/// Appends happen under a short write lock held only for the push; readers
/// never wait on pipeline processing.
#[derive(Debug, Default)]
pub struct EventLog {
    entries: RwLock<Vec<LogEntry>>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends and returns the assigned sequence number (first is 1).
    pub fn append(&self, t_ms: u64, record: LogRecord) -> u64 {
        let mut entries = self.entries.write();
        let seq = entries.len() as u64 + 1;
        entries.push(LogEntry { seq, t_ms, record });
        seq
    }

    pub fn latest_seq(&self) -> u64 {
        self.entries.read().len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.latest_seq() == 0
    }

    /// Entries with `seq > since`, at most `limit`. `next_seq` is one past the
    /// last returned seq (or `since + 1` when nothing is new).
    pub fn poll(&self, since: u64, limit: usize) -> Result<EventPage, LogError> {
        let entries = self.entries.read();
        let latest = entries.len() as u64;
        if since > latest {
            return Err(LogError::BadSeq { since, latest });
        }
        let start = since as usize;
        let end = (start + limit).min(entries.len());
        let events = entries[start..end].to_vec();
        Ok(EventPage { next_seq: end as u64 + 1, events })
    }

    pub fn snapshot(&self) -> Vec<LogEntry> {
        self.entries.read().clone()
    }

    pub fn export_jsonl(&self) -> String {
        export_jsonl(&self.entries.read())
    }
}

pub fn export_jsonl(entries: &[LogEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).expect("log entries serialise"));
        out.push('\n');
    }
    out
}

/// Parses an exported log, requiring seq to start at 1 and increase by 1.
pub fn parse_log(text: &str) -> Result<Vec<LogEntry>, LogError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let entry: LogEntry =
            serde_json::from_str(raw).map_err(|e| LogError::LogParseError { line, message: e.to_string() })?;
        let expected = out.len() as u64 + 1;
        if entry.seq != expected {
            return Err(LogError::SeqGap { line, expected, found: entry.seq });
        }
        out.push(entry);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(n: u64) -> EventLog {
        let log = EventLog::new();
        for t in 0..n {
            log.append(t * 10, LogRecord::LookawayEnd);
        }
        log
    }

    #[test]
    fn poll_semantics() {
        let log = filled(3);
        let page = log.poll(0, PAGE_SIZE).unwrap();
        assert_eq!(page.events.len(), 3);
        assert_eq!(page.next_seq, 4);
        assert_eq!(page.events[0].seq, 1);
        let empty = log.poll(3, PAGE_SIZE).unwrap();
        assert!(empty.events.is_empty());
        assert_eq!(log.poll(8, PAGE_SIZE), Err(LogError::BadSeq { since: 8, latest: 3 }));
    }

    #[test]
    fn poll_is_paged() {
        let log = filled(1203);
        let mut since = 0;
        let mut all = Vec::new();
        loop {
            let page = log.poll(since, PAGE_SIZE).unwrap();
            if page.events.is_empty() {
                break;
            }
            assert!(page.events.len() <= PAGE_SIZE);
            since = page.next_seq - 1;
            all.extend(page.events);
        }
        assert_eq!(all, log.snapshot());
    }

    #[test]
    fn entry_wire_shape() {
        let e = LogEntry {
            seq: 4,
            t_ms: 2200,
            record: LogRecord::Selection { target_id: "m3".into(), trigger: Trigger::Dwell },
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"seq":4,"t_ms":2200,"type":"selection","target_id":"m3","trigger":"dwell"}"#
        );
        let unit = LogEntry { seq: 1, t_ms: 0, record: LogRecord::LookawayStart };
        assert_eq!(serde_json::to_string(&unit).unwrap(), r#"{"seq":1,"t_ms":0,"type":"lookaway_start"}"#);
    }

    #[test]
    fn parse_rejects_gaps() {
        let text = filled(3).export_jsonl();
        assert_eq!(parse_log(&text).unwrap().len(), 3);
        let gap: Vec<_> = text.lines().filter(|l| !l.contains("\"seq\":2")).collect();
        assert!(matches!(parse_log(&gap.join("\n")), Err(LogError::SeqGap { expected: 2, found: 3, .. })));
        assert!(matches!(parse_log("{nope"), Err(LogError::LogParseError { line: 1, .. })));
    }
}
