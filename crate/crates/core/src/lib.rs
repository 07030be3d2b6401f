//! Body-to-UAV LoRa channel toolkit for forest links.
//!
//! - [`channel`]: log-distance path loss with a height term, link-budget
//!   correction, receiver model and the model registry.
//! - [`antenna`]: polarization loss and CCDF-guaranteed effective gains of a
//!   body-worn antenna.
//! - [`campaign`]: receiver-log ingestion, small-scale separation, model
//!   fitting, relative standard error and model comparison.
//! - [`fading`]: fade-depth statistics and envelope distribution fits.
//! - [`sim`]: trace synthesis, packet delivery and radio range.

pub mod antenna;
pub mod campaign;
pub mod channel;
pub mod defaults;
pub mod fading;
pub mod sim;

pub use channel::{
    corrective_factor, mean_path_loss, CorrectionInputs, LinkGeometry, PathLossModel, RadioConfig,
};
