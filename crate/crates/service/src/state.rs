//! Session registry and per-session handles.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use eyedoc_core::session::new_session_id;
use eyedoc_core::{EventLog, Session, SessionError};
use parking_lot::{Mutex, RwLock};
use tracing::{info, warn};

use crate::config::ServiceConfig;
use crate::runner::{self, Prepared};

pub type IdGenerator = Arc<dyn Fn() -> String + Send + Sync>;

pub struct SessionHandle {
    /// Pipeline and engine run behind this lock, one step at a time.
    pub session: Arc<Mutex<Session>>,
    /// Shared with the session; polled without taking the session lock.
    pub log: Arc<EventLog>,
    pub stop: Arc<AtomicBool>,
    started: AtomicBool,
    pending: Mutex<Option<Prepared>>,
    threads: Mutex<Vec<std::thread::JoinHandle<()>>>,
}

impl SessionHandle {
    fn new(session: Session, prepared: Prepared) -> Self {
        let log = Arc::clone(session.log());
        Self {
            session: Arc::new(Mutex::new(session)),
            log,
            stop: Arc::new(AtomicBool::new(false)),
            started: AtomicBool::new(false),
            pending: Mutex::new(Some(prepared)),
            threads: Mutex::new(Vec::new()),
        }
    }

    /// Starts the source once; replayed and generated traces wait for this.
    pub fn start(&self) {
        if self.started.swap(true, Ordering::AcqRel) {
            return;
        }
        if let Some(prepared) = self.pending.lock().take() {
            let handles = runner::spawn(prepared, Arc::clone(&self.session), Arc::clone(&self.stop));
            self.threads.lock().extend(handles);
        }
    }

    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::Release);
        self.pending.lock().take();
        for h in self.threads.lock().drain(..) {
            if h.join().is_err() {
                warn!("source thread panicked");
            }
        }
    }
}

pub struct AppState {
    pub config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<SessionHandle>>>,
    id_gen: IdGenerator,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self::with_id_generator(config, Arc::new(new_session_id))
    }

    /// Deterministic ids are useful in tests; production ids carry 128 random bits.
    pub fn with_id_generator(config: ServiceConfig, id_gen: IdGenerator) -> Self {
        Self { config, sessions: RwLock::new(HashMap::new()), id_gen }
    }

    pub fn create(&self, spec: eyedoc_core::SessionSpec) -> Result<String, SessionError> {
        let prepared = runner::prepare(&spec.source)?;
        let id = (self.id_gen)();
        let session = Session::new(id.clone(), spec)?;
        let handle = Arc::new(SessionHandle::new(session, prepared));
        if handle.pending.lock().as_ref().is_some_and(Prepared::starts_immediately) {
            handle.start();
        }
        info!(session = %id, "session created");
        self.sessions.write().insert(id.clone(), handle);
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionHandle>, SessionError> {
        self.sessions.read().get(id).cloned().ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Stops the source, writes the export if configured and forgets the session.
    pub fn remove(&self, id: &str) -> Result<(), SessionError> {
        let handle = self.sessions.write().remove(id).ok_or_else(|| SessionError::UnknownSession(id.to_string()))?;
        handle.shutdown();
        if let Some(dir) = &self.config.export_dir {
            let path = dir.join(format!("{id}.jsonl"));
            let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, handle.log.export_jsonl()));
            match written {
                Ok(()) => info!(session = %id, path = %path.display(), "log exported"),
                Err(e) => warn!(session = %id, "log export failed: {e}"),
            }
        }
        Ok(())
    }

    pub fn shutdown_all(&self) {
        let ids: Vec<String> = self.sessions.read().keys().cloned().collect();
        for id in ids {
            self.remove(&id).ok();
        }
    }
}
