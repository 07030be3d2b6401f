//! Small-scale fading statistics: empirical CDFs, fade depth, maximum
//! likelihood fits of five envelope families, best-fit selection and random
//! generators for each family.

mod ecdf;
mod family;
mod mle;
pub mod special;

pub use ecdf::{fade_depth, nearest_rank_quantile, EmpiricalCdf, FadeDepthReport};
pub use family::{FadingFamily, FamilyKind};
pub use mle::{best_fit, fit_family, is_worse_than_rayleigh, sample_family, BestFit, FadingFit};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FadingError {
    #[error("no samples")]
    Empty,
    #[error("sample {index} = {value} is not a finite positive envelope value")]
    NonPositive { index: usize, value: f64 },
    #[error("sample {index} is NaN")]
    NaN { index: usize },
    #[error("zero-variance input cannot be fitted")]
    Degenerate,
    #[error("{family} fit did not converge; last iterate {last:?}")]
    NonConvergence {
        family: FamilyKind,
        last: FadingFamily,
    },
    #[error("{family} estimate out of range: {reason}")]
    OutOfRange { family: FamilyKind, reason: String },
    #[error("invalid {family} parameters: {reason}")]
    InvalidParameters { family: FamilyKind, reason: String },
    #[error("no family could be fitted: {0}")]
    NoFit(String),
}
