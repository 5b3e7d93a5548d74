//! Source producers. Each runs on its own thread and feeds its session in
//! timestamp order; the session lock serializes them with API calls.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use eyedoc_core::sources::tracker::{TrackerClient, TrackerError};
use eyedoc_core::sources::{generate_scenario, pacing_delay, read_trace};
use eyedoc_core::{GazeSample, Session, SessionError, SourceDescriptor};
use parking_lot::{Condvar, Mutex};
use tracing::{debug, warn};

/// Live sources drop their oldest samples past this backlog.
pub const QUEUE_CAPACITY: usize = 1000;

/// Samples of a finite trace are handed over in slices of at most this many.
const REPLAY_CHUNK: usize = 256;

/// A source that passed its startup checks but has not begun producing.
pub enum Prepared {
    Trace { samples: Vec<GazeSample>, speed: f64 },
    Tracker(TrackerClient),
    Api,
}

impl Prepared {
    /// Live trackers start at creation; finite traces wait for the first poll.
    pub fn starts_immediately(&self) -> bool {
        matches!(self, Prepared::Tracker(_))
    }
}

pub fn prepare(source: &SourceDescriptor) -> Result<Prepared, SessionError> {
    source.validate().map_err(SessionError::InvalidConfig)?;
    match source {
        SourceDescriptor::Replay { path, speed } => {
            let samples = read_trace(path).map_err(|e| SessionError::SourceUnavailable(e.to_string()))?;
            Ok(Prepared::Trace { samples, speed: *speed })
        }
        SourceDescriptor::Scenario { spec, seed, speed } => {
            let samples = generate_scenario(spec, *seed).map_err(|e| SessionError::InvalidConfig(e.to_string()))?;
            Ok(Prepared::Trace { samples, speed: *speed })
        }
        SourceDescriptor::Tracker { .. } => {
            let opts = source.tracker_options().expect("tracker source");
            let client = TrackerClient::connect(opts).map_err(|e| SessionError::SourceUnavailable(e.to_string()))?;
            Ok(Prepared::Tracker(client))
        }
        SourceDescriptor::Api => Ok(Prepared::Api),
    }
}

pub fn spawn(prepared: Prepared, session: Arc<Mutex<Session>>, stop: Arc<AtomicBool>) -> Vec<JoinHandle<()>> {
    match prepared {
        Prepared::Api => Vec::new(),
        Prepared::Trace { samples, speed } => {
            vec![thread::spawn(move || play_trace(&samples, speed, &session, &stop))]
        }
        Prepared::Tracker(client) => spawn_tracker(client, session, stop),
    }
}

fn play_trace(samples: &[GazeSample], speed: f64, session: &Mutex<Session>, stop: &AtomicBool) {
    let started = Instant::now();
    let t0 = samples.first().map_or(0, |s| s.t_ms);
    let mut i = 0;
    while i < samples.len() {
        if stop.load(Ordering::Acquire) {
            return;
        }
        // everything already due goes in one batch
        let mut j = i + 1;
        while j < samples.len() && j - i < REPLAY_CHUNK && due_at(samples[j].t_ms - t0, speed) <= started.elapsed() {
            j += 1;
        }
        if let Err(e) = session.lock().ingest(&samples[i..j]) {
            warn!("replay stopped: {e}");
            session.lock().record_source_error(e.to_string());
            return;
        }
        i = j;
        if let Some(next) = samples.get(i) {
            let wait = due_at(next.t_ms - t0, speed).saturating_sub(started.elapsed());
            if !wait.is_zero() {
                thread::sleep(wait);
            }
        }
    }
    if let Err(e) = session.lock().end_of_stream() {
        warn!("flush failed: {e}");
    }
}

/// Offset from the start of playback at which a sample is due.
fn due_at(offset_ms: u64, speed: f64) -> Duration {
    pacing_delay(offset_ms, speed).unwrap_or(Duration::ZERO)
}

/// Bounded hand-off between the tracker reader and the session.
#[derive(Default)]
struct Backlog {
    queue: Mutex<BacklogState>,
    ready: Condvar,
}

#[derive(Default)]
struct BacklogState {
    samples: VecDeque<GazeSample>,
    dropped: u64,
    closed: bool,
}

impl Backlog {
    fn push(&self, s: GazeSample) {
        let mut q = self.queue.lock();
        if q.samples.len() >= QUEUE_CAPACITY {
            q.samples.pop_front();
            q.dropped += 1;
        }
        q.samples.push_back(s);
        self.ready.notify_one();
    }

    fn close(&self) {
        self.queue.lock().closed = true;
        self.ready.notify_one();
    }

    /// Waits for work; `None` once closed and drained.
    fn take(&self, stop: &AtomicBool) -> Option<(Vec<GazeSample>, u64)> {
        let mut q = self.queue.lock();
        loop {
            if !q.samples.is_empty() || q.dropped > 0 {
                let dropped = std::mem::take(&mut q.dropped);
                return Some((q.samples.drain(..).collect(), dropped));
            }
            if q.closed || stop.load(Ordering::Acquire) {
                return None;
            }
            self.ready.wait_for(&mut q, Duration::from_millis(50));
        }
    }
}

fn spawn_tracker(mut client: TrackerClient, session: Arc<Mutex<Session>>, stop: Arc<AtomicBool>) -> Vec<JoinHandle<()>> {
    let backlog = Arc::new(Backlog::default());
    let reader = {
        let backlog = Arc::clone(&backlog);
        let session = Arc::clone(&session);
        let stop = Arc::clone(&stop);
        thread::spawn(move || {
            let result = client.run(&stop, &mut |s| backlog.push(s));
            if let Err(TrackerError::TrackerUnreachable { endpoint, reason }) = result {
                warn!(%endpoint, "tracker lost: {reason}");
                session.lock().record_source_error(format!("TrackerUnreachable: {endpoint}: {reason}"));
            }
            debug!(stats = ?client.stats(), "tracker reader finished");
            backlog.close();
        })
    };
    let feeder = thread::spawn(move || {
        while let Some((samples, dropped)) = backlog.take(&stop) {
            let mut s = session.lock();
            if dropped > 0 {
                s.record_dropped(dropped);
            }
            if let Err(e) = s.ingest(&samples) {
                warn!("tracker samples rejected: {e}");
            }
        }
        if let Err(e) = session.lock().end_of_stream() {
            warn!("flush failed: {e}");
        }
    });
    vec![reader, feeder]
}
