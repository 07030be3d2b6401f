//! Forward Monte Carlo link simulation: per-message RSSI/SNR traces along a
//! walk path, packet delivery ratio and radio range.

mod mission;
mod range;
mod trace;

pub use mission::{MissionSpec, UavPosition};
pub use range::{radio_range, summarize_heights, sweep_heights, HeightSummary, RangeDefinition};
pub use trace::{
    height_seed, pdr, pdr_by_distance, synthesize_trace, synthesize_trace_with_workers,
    write_small_scale_csv, write_trace_csv, PdrBin, SimRecord, SimTrace, SubSeeding,
};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::fading::FadingError;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid mission: {0}")]
    InvalidMission(String),
    #[error("empty trace")]
    EmptyTrace,
    #[error("no finite radio range: {0}")]
    NoFiniteRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}
