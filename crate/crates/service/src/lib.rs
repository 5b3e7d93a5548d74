//! HTTP+JSON front of the gaze pipeline: clients create sessions, register
//! on-screen targets and short-poll for interaction events.

pub mod config;
pub mod error;
pub mod routes;
pub mod runner;
pub mod state;

pub use config::{ConfigError, ServiceConfig};
pub use routes::router;
pub use state::{AppState, IdGenerator};
