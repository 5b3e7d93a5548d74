//! Tracker adapter protocol: newline-delimited JSON over TCP.
//!
//! The client sends `{"cmd":"subscribe"}` once per connection; the server then
//! pushes frames `{"ts":<int ms>,"x":<number>,"y":<number>,"ok":<bool>}` with
//! `x`/`y` omitted when `ok` is false.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::{debug, warn};

use crate::pipeline::GazeSample;
use crate::scalar::Scalar;

pub const SUBSCRIBE: &str = r#"{"cmd":"subscribe"}"#;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("tracker at {endpoint} unreachable: {reason}")]
    TrackerUnreachable { endpoint: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed tracker frame: {0}")]
pub struct FrameError(pub String);

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Frame {
    ts: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    ok: bool,
}

pub fn encode_frame<T: Scalar>(s: &GazeSample<T>) -> String {
    let frame = Frame {
        ts: s.t_ms,
        x: s.point.map(|p| p.x.as_f64()),
        y: s.point.map(|p| p.y.as_f64()),
        ok: s.is_valid(),
    };
    serde_json::to_string(&frame).expect("frames serialise")
}

/// Maps one frame to a sample stamped with the frame's own `ts`.
pub fn decode_frame<T: Scalar>(line: &str) -> Result<GazeSample<T>, FrameError> {
    let frame: Frame = serde_json::from_str(line.trim()).map_err(|e| FrameError(e.to_string()))?;
    if !frame.ok {
        return Ok(GazeSample::invalid(frame.ts));
    }
    match (frame.x, frame.y) {
        (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Ok(GazeSample::valid(frame.ts, T::lit(x), T::lit(y))),
        _ => Err(FrameError("ok frame without finite x and y".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerOptions {
    pub endpoint: String,
    /// Consecutive failed reconnect attempts tolerated before giving up.
    pub retry_budget: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub connect_timeout_ms: u64,
}

impl Default for TrackerOptions {
    fn default() -> Self {
        Self {
            endpoint: "127.0.0.1:6555".into(),
            retry_budget: 5,
            initial_backoff_ms: 100,
            max_backoff_ms: 5000,
            connect_timeout_ms: 1000,
        }
    }
}

impl TrackerOptions {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self { endpoint: endpoint.into(), ..Self::default() }
    }

    /// Delay before reconnect attempt `attempt` (0-based): doubling, capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.initial_backoff_ms.saturating_mul(1u64 << attempt.min(32));
        Duration::from_millis(ms.min(self.max_backoff_ms))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrackerStats {
    pub frames: u64,
    pub malformed: u64,
    /// Frames dropped because their timestamp did not increase.
    pub stale: u64,
    pub reconnects: u64,
}

const READ_POLL: Duration = Duration::from_millis(100);

pub struct TrackerClient {
    opts: TrackerOptions,
    reader: BufReader<TcpStream>,
    line: Vec<u8>,
    last_ts: Option<u64>,
    stats: TrackerStats,
}

impl TrackerClient {
    /// Single connection attempt plus subscribe.
    pub fn connect(opts: TrackerOptions) -> Result<Self, TrackerError> {
        let reader = open(&opts)?;
        Ok(Self { opts, reader, line: Vec::new(), last_ts: None, stats: TrackerStats::default() })
    }

    pub fn stats(&self) -> TrackerStats {
        self.stats
    }

    /// Streams samples into `sink` until `stop` is set or the reconnect budget runs out.
    ///
    /// While disconnected a single invalid sample is emitted just after the last
    /// timestamp, so downstream sees a gap rather than frozen gaze.
    pub fn run<T: Scalar>(&mut self, stop: &AtomicBool, sink: &mut dyn FnMut(GazeSample<T>)) -> Result<(), TrackerError> {
        while !stop.load(Ordering::Relaxed) {
            match self.reader.read_until(b'\n', &mut self.line) {
                Ok(0) => self.reconnect(stop, sink)?,
                Ok(_) if !self.line.ends_with(b"\n") => self.reconnect(stop, sink)?,
                Ok(_) => {
                    let text = String::from_utf8_lossy(&self.line).into_owned();
                    self.line.clear();
                    self.accept(&text, sink);
                }
                Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
                Err(e) => {
                    debug!("tracker read failed: {e}");
                    self.reconnect(stop, sink)?;
                }
            }
        }
        Ok(())
    }

    fn accept<T: Scalar>(&mut self, text: &str, sink: &mut dyn FnMut(GazeSample<T>)) {
        if text.trim().is_empty() {
            return;
        }
        match decode_frame::<T>(text) {
            Ok(s) if self.last_ts.is_some_and(|last| s.t_ms <= last) => self.stats.stale += 1,
            Ok(s) => {
                self.stats.frames += 1;
                self.last_ts = Some(s.t_ms);
                sink(s);
            }
            Err(e) => {
                self.stats.malformed += 1;
                warn!("skipping frame: {e}");
            }
        }
    }

    fn reconnect<T: Scalar>(&mut self, stop: &AtomicBool, sink: &mut dyn FnMut(GazeSample<T>)) -> Result<(), TrackerError> {
        self.line.clear();
        if let Some(last) = self.last_ts {
            let marker = last + 1;
            sink(GazeSample::invalid(marker));
            self.last_ts = Some(marker);
        }
        let mut last_err = String::from("connection closed");
        for attempt in 0..self.opts.retry_budget {
            if stop.load(Ordering::Relaxed) {
                return Ok(());
            }
            thread::sleep(self.opts.backoff(attempt));
            match open(&self.opts) {
                Ok(reader) => {
                    self.reader = reader;
                    self.stats.reconnects += 1;
                    return Ok(());
                }
                Err(TrackerError::TrackerUnreachable { reason, .. }) => last_err = reason,
            }
        }
        Err(TrackerError::TrackerUnreachable { endpoint: self.opts.endpoint.clone(), reason: last_err })
    }
}

fn open(opts: &TrackerOptions) -> Result<BufReader<TcpStream>, TrackerError> {
    let unreachable = |reason: String| TrackerError::TrackerUnreachable { endpoint: opts.endpoint.clone(), reason };
    let addr = opts
        .endpoint
        .to_socket_addrs()
        .map_err(|e| unreachable(e.to_string()))?
        .next()
        .ok_or_else(|| unreachable("endpoint resolved to no address".into()))?;
    let mut stream = TcpStream::connect_timeout(&addr, Duration::from_millis(opts.connect_timeout_ms.max(1)))
        .map_err(|e| unreachable(e.to_string()))?;
    stream.set_read_timeout(Some(READ_POLL)).map_err(|e| unreachable(e.to_string()))?;
    stream.set_nodelay(true).ok();
    stream
        .write_all(format!("{SUBSCRIBE}\n").as_bytes())
        .map_err(|e| unreachable(e.to_string()))?;
    Ok(BufReader::new(stream))
}

/// Scripted tracker server for tests and demos.
///
/// Each accepted connection plays the next script (after checking the
/// subscribe line) and is then closed, except the last one when `hold_open` is
/// set. Once the scripts are used up the listener closes, so later connection
/// attempts are refused.
pub struct FakeTracker {
    addr: SocketAddr,
    subscribes: Arc<Mutex<Vec<String>>>,
    handle: Option<JoinHandle<()>>,
}

#[derive(Debug, Clone, Default)]
pub struct FakeTrackerScript {
    pub connections: Vec<Vec<String>>,
    pub line_interval: Duration,
    pub hold_open: bool,
}

impl FakeTracker {
    pub fn spawn(script: FakeTrackerScript) -> io::Result<Self> {
        Self::spawn_on("127.0.0.1:0", script)
    }

    pub fn spawn_on(bind: &str, script: FakeTrackerScript) -> io::Result<Self> {
        let listener = TcpListener::bind(bind)?;
        let addr = listener.local_addr()?;
        let subscribes = Arc::new(Mutex::new(Vec::new()));
        let seen = Arc::clone(&subscribes);
        let handle = thread::spawn(move || {
            let n = script.connections.len();
            for (i, lines) in script.connections.into_iter().enumerate() {
                let Ok((stream, _)) = listener.accept() else { return };
                let last = i + 1 == n;
                if serve_one(stream, &lines, script.line_interval, last && script.hold_open, &seen).is_err() {
                    debug!("fake tracker connection {i} ended early");
                }
            }
        });
        Ok(Self { addr, subscribes, handle: Some(handle) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn endpoint(&self) -> String {
        self.addr.to_string()
    }

    /// Subscribe lines received so far, one per connection.
    pub fn subscribes(&self) -> Vec<String> {
        self.subscribes.lock().unwrap().clone()
    }

    pub fn join(mut self) {
        if let Some(h) = self.handle.take() {
            h.join().ok();
        }
    }
}

fn serve_one(
    stream: TcpStream,
    lines: &[String],
    interval: Duration,
    hold_open: bool,
    seen: &Mutex<Vec<String>>,
) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    seen.lock().unwrap().push(first.trim_end().to_string());
    if first.trim_end() != SUBSCRIBE {
        return Ok(());
    }
    let mut writer = stream;
    for line in lines {
        if !interval.is_zero() {
            thread::sleep(interval);
        }
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    if hold_open {
        let mut rest = Vec::new();
        // returns once the client hangs up
        let _ = io::Read::read_to_end(&mut reader, &mut rest);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_field_mapping() {
        assert_eq!(
            decode_frame::<f64>(r#"{"ts":100,"x":10.0,"y":20.0,"ok":true}"#).unwrap(),
            GazeSample::valid(100, 10.0, 20.0)
        );
        assert_eq!(decode_frame::<f64>(r#"{"ts":120,"ok":false}"#).unwrap(), GazeSample::invalid(120));
        assert!(decode_frame::<f64>(r#"{"ts":1,"ok":true}"#).is_err());
        assert!(decode_frame::<f64>("garbage").is_err());
    }

    #[test]
    fn frame_encoding_is_exact() {
        assert_eq!(encode_frame(&GazeSample::valid(100, 10.0f64, 20.0)), r#"{"ts":100,"x":10.0,"y":20.0,"ok":true}"#);
        assert_eq!(encode_frame(&GazeSample::<f64>::invalid(120)), r#"{"ts":120,"ok":false}"#);
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let o = TrackerOptions::default();
        let ms: Vec<_> = (0..8).map(|a| o.backoff(a).as_millis()).collect();
        assert_eq!(ms, vec![100, 200, 400, 800, 1600, 3200, 5000, 5000]);
    }

    #[test]
    fn unreachable_endpoint() {
        // bind then drop to get a port nobody listens on
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let err = TrackerClient::connect(TrackerOptions::new(format!("127.0.0.1:{port}")));
        assert!(matches!(err, Err(TrackerError::TrackerUnreachable { .. })));
    }
}
