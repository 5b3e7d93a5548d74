//! Gaze-driven documentation navigation.
//!
//! Raw tracker samples flow through [`pipeline`] (calibration, median
//! smoothing, dispersion-threshold fixations, blink and look-away detection)
//! into [`interaction`] (dwell/blink selection over registered page targets).
//! [`session`] ties a [`sources`] stream to both and records an append-only
//! event log that [`metrics`] turns into reports. [`inject`] prepares HTML
//! documentation trees for the browser overlay.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, with `*F32` variants for the single-precision build.

pub mod geometry;
pub mod inject;
pub mod interaction;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod session;
pub mod sources;

pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type Rect = geometry::Rect<f64>;
pub type GazeSample = pipeline::GazeSample<f64>;
pub type GazeEvent = pipeline::GazeEvent<f64>;
pub type Calibration = pipeline::Calibration<f64>;
pub type PipelineConfig = pipeline::PipelineConfig<f64>;
pub type GazePipeline = pipeline::GazePipeline<f64>;
pub type TargetRegion = interaction::TargetRegion<f64>;
pub type TargetRegistry = interaction::TargetRegistry<f64>;
pub type InteractionConfig = interaction::InteractionConfig<f64>;
pub type InteractionEngine = interaction::InteractionEngine<f64>;
pub type ScenarioSpec = sources::ScenarioSpec<f64>;
pub type SourceDescriptor = sources::SourceDescriptor<f64>;
pub type Session = session::Session<f64>;
pub type SessionSpec = session::SessionSpec<f64>;
pub type TargetsPayload = session::TargetsPayload<f64>;

pub type GazeSampleF32 = pipeline::GazeSample<f32>;
pub type GazeEventF32 = pipeline::GazeEvent<f32>;
pub type PipelineConfigF32 = pipeline::PipelineConfig<f32>;
pub type GazePipelineF32 = pipeline::GazePipeline<f32>;
pub type InteractionEngineF32 = interaction::InteractionEngine<f32>;
pub type SessionF32 = session::Session<f32>;

pub use interaction::{InteractionEvent, NavigationStyle, ScrollDirection, TargetKind, Trigger};
pub use metrics::{compute_metrics, export_report, MetricsReport, ReportFormat};
pub use session::{EventLog, LogEntry, LogRecord, SessionError};
