//! Every tunable constant of the toolkit, in one place.
//!
//! The radio figures marked "measured" come from the forest campaign the
//! bundled model was fitted on. The receiver thresholds are typical LoRa
//! SF7 / 125 kHz transceiver datasheet values and can be overridden through
//! a radio config file or the CLI.

/// Reference distance of the log-distance model, meters.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

pub const SPEED_OF_LIGHT_MPS: f64 = 299_792_458.0;

/// LoRa EU868 carrier.
pub const CARRIER_HZ: f64 = 868.0e6;

/// Carrier wavelength, about 0.34538 m. The small-scale window spans half of
/// it on each side of a sample.
pub const WAVELENGTH_M: f64 = SPEED_OF_LIGHT_MPS / CARRIER_HZ;

/// Transmit power (measured campaign setting).
pub const TX_POWER_DBM: f64 = 14.0;

/// UAV antenna gain towards the ground (measured campaign setting).
pub const TX_GAIN_DBI: f64 = 0.0;

/// Body-worn receiver effective gain, 75% CCDF level.
pub const RX_GAIN_DBI: f64 = -11.0;

/// Polarization loss factor, 75% CCDF level.
pub const PLF_DB: f64 = -6.2;

/// Minimum decodable RSSI (datasheet figure, SF7 / 125 kHz).
pub const SENSITIVITY_DBM: f64 = -123.0;

/// Minimum decodable SNR for SF7.
pub const SNR_FLOOR_DB: f64 = -7.5;

/// -174 dBm/Hz + 10 log10(125 kHz) + 6 dB noise figure.
pub const NOISE_FLOOR_DBM: f64 = -117.0;

/// Receiver antenna height above ground (jacket pocket of a standing adult).
pub const RX_HEIGHT_M: f64 = 1.3;

/// Fraction of angular arrangements an effective gain must be guaranteed in.
pub const CCDF_LEVEL: f64 = 0.75;

/// One message every four seconds.
pub const MSG_RATE_HZ: f64 = 0.25;

pub const RSE_BIN_WIDTH_M: f64 = 10.0;
pub const RSE_HEIGHTS_M: [f64; 3] = [3.0, 10.0, 30.0];

/// Mean Earth radius used by the haversine distance.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Iterative maximum-likelihood fits stop when the relative parameter change
/// drops below this, or after [`FIT_MAX_ITER`] iterations.
pub const FIT_REL_TOL: f64 = 1e-8;
pub const FIT_MAX_ITER: usize = 500;

/// Fade-depth reports below this many samples carry a reliability warning.
pub const FADE_DEPTH_MIN_SAMPLES: usize = 100;

/// Monte Carlo message count for outage-based radio range estimates.
pub const OUTAGE_MESSAGES: usize = 100_000;

/// Environment variable pointing at an alternative model registry file.
pub const REGISTRY_ENV: &str = "CANOPY_MODELS";
