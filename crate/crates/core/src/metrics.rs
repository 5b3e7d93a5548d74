//! Offline measures computed from an exported session log.
//!
//! A context switch is operationalised as the latency from a look-away ending
//! to the next selection, counted only when no new look-away starts first.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interaction::Trigger;
use crate::session::{parse_log, LogEntry, LogError, LogRecord};

pub const REPORT_NOTE: &str = "log-derived measures only; task completion time and perceived workload need \
external instrumentation; switch latency = look-away end to next selection";

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("log line {line}: {message}")]
    LogParseError { line: usize, message: String },
    #[error("log line {line}: expected seq {expected}, found {found}")]
    SeqGap { line: usize, expected: u64, found: u64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<LogError> for MetricsError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::LogParseError { line, message } => MetricsError::LogParseError { line, message },
            LogError::SeqGap { line, expected, found } => MetricsError::SeqGap { line, expected, found },
            LogError::BadSeq { .. } => unreachable!("parse_log never reports BadSeq"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub note: String,
    pub selections_total: u64,
    pub selections_by_trigger: BTreeMap<Trigger, u64>,
    pub scroll_commands_total: u64,
    pub mean_engagement_to_selection_ms: Option<f64>,
    pub dwell_resets: u64,
    pub lookaway_episodes: u64,
    pub switch_latencies_ms: Vec<u64>,
    pub mean_switch_latency_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Default)]
struct Engagement {
    entered_ms: u64,
    progressed: bool,
    selected: bool,
}

fn mean(values: impl ExactSizeIterator<Item = u64>) -> Option<f64> {
    let n = values.len();
    (n > 0).then(|| values.map(|v| v as f64).sum::<f64>() / n as f64)
}

pub fn compute_metrics(log_text: &str) -> Result<MetricsReport, MetricsError> {
    Ok(compute_metrics_from_entries(&parse_log(log_text)?))
}

pub fn compute_metrics_from_entries(entries: &[LogEntry]) -> MetricsReport {
    let mut by_trigger: BTreeMap<Trigger, u64> = [(Trigger::Dwell, 0), (Trigger::Blink, 0)].into();
    let mut engagements: HashMap<&str, Engagement> = HashMap::new();
    let mut engagement_times = Vec::new();
    let mut scrolls = 0;
    let mut dwell_resets = 0;
    let mut lookaways = 0;
    let mut latencies = Vec::new();
    let mut returned_at: Option<u64> = None;

    for e in entries {
        match &e.record {
            LogRecord::TargetEnter { target_id } => {
                engagements.insert(target_id, Engagement { entered_ms: e.t_ms, ..Default::default() });
            }
            LogRecord::DwellProgress { target_id, fraction } if *fraction > 0.0 => {
                if let Some(g) = engagements.get_mut(target_id.as_str()) {
                    g.progressed = true;
                }
            }
            LogRecord::Selection { target_id, trigger } => {
                *by_trigger.entry(*trigger).or_default() += 1;
                if let Some(g) = engagements.get_mut(target_id.as_str()) {
                    g.selected = true;
                    engagement_times.push(e.t_ms - g.entered_ms);
                }
                if let Some(back) = returned_at.take() {
                    latencies.push(e.t_ms - back);
                }
            }
            LogRecord::TargetLeave { target_id } => {
                if let Some(g) = engagements.remove(target_id.as_str()) {
                    if g.progressed && !g.selected {
                        dwell_resets += 1;
                    }
                }
            }
            LogRecord::ScrollCommand { .. } => scrolls += 1,
            LogRecord::LookawayStart => {
                lookaways += 1;
                returned_at = None;
            }
            LogRecord::LookawayEnd => returned_at = Some(e.t_ms),
            _ => {}
        }
    }

    MetricsReport {
        note: REPORT_NOTE.to_string(),
        selections_total: by_trigger.values().sum(),
        selections_by_trigger: by_trigger,
        scroll_commands_total: scrolls,
        mean_engagement_to_selection_ms: mean(engagement_times.iter().copied()),
        dwell_resets,
        lookaway_episodes: lookaways,
        mean_switch_latency_ms: mean(latencies.iter().copied()),
        switch_latencies_ms: latencies,
    }
}

const CSV_HEADER: [&str; 10] = [
    "selections_total",
    "selections_dwell",
    "selections_blink",
    "scroll_commands_total",
    "mean_engagement_to_selection_ms",
    "dwell_resets",
    "lookaway_episodes",
    "mean_switch_latency_ms",
    "switch_index",
    "switch_latency_ms",
];

/// JSON (pretty, field order fixed by the struct) or CSV with one row per switch latency.
pub fn export_report(report: &MetricsReport, format: ReportFormat) -> Result<String, MetricsError> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialise");
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            let count = |t: Trigger| report.selections_by_trigger.get(&t).copied().unwrap_or(0).to_string();
            for (i, latency) in report.switch_latencies_ms.iter().enumerate() {
                w.write_record([
                    report.selections_total.to_string(),
                    count(Trigger::Dwell),
                    count(Trigger::Blink),
                    report.scroll_commands_total.to_string(),
                    opt(report.mean_engagement_to_selection_ms),
                    report.dwell_resets.to_string(),
                    report.lookaway_episodes.to_string(),
                    opt(report.mean_switch_latency_ms),
                    i.to_string(),
                    latency.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}
