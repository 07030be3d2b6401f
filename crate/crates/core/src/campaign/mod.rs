//! From raw receiver logs to a fitted path-loss model: ingestion and geodesy,
//! experimental path loss, small-scale separation, least-squares fit,
//! relative standard error and benchmark comparison.

mod compare;
mod fit;
mod geo;
mod ingest;
mod separate;

pub use compare::{compare_models, ModelComparison};
pub use fit::{fit_model, rse, rse_value, FitExport, FitResult, ResidualSummary, RseBinning, RseReport, RseRow};
pub use geo::{compose_d3d, geodesic_distance};
pub use ingest::{
    experimental_pl, read_geo_log, read_range_log, GeoSidecar, LogSchema, Position, RawLogRecord,
};
pub use separate::{separate_small_scale, PLSample};

use thiserror::Error;

use crate::channel::ChannelError;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("coordinate out of range: {0}")]
    InvalidCoordinate(String),
    #[error("RSSI of exactly 0 dBm at t = {timestamp_s} s looks like a missing datum")]
    SuspiciousRssi { timestamp_s: f64 },
    #[error("line {line}: {reason}")]
    Ingest { line: u64, reason: String },
    #[error("no samples")]
    Empty,
    #[error("{parameter} unidentifiable: {reason}")]
    Unidentifiable {
        parameter: &'static str,
        reason: String,
    },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("wavelength must be positive and finite, got {0}")]
    InvalidWavelength(f64),
    #[error("geo schema record without a UAV anchor")]
    MissingAnchor,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
