//! Domain types and the closed-form channel equations: log-distance mean path
//! loss with an altitude term, the instantaneous path loss built on top of it,
//! the RSSI/SNR corrective factor, and the registry of benchmark models.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defaults;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("d3d = {0} m is below the 1 m reference distance")]
    BelowReferenceDistance(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid path loss model `{name}`: {reason}")]
    InvalidModel { name: String, reason: String },
    #[error("invalid radio config: {0}")]
    InvalidRadio(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model registry: {0}")]
    Registry(String),
}

/// Transmitter-receiver geometry of a single observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    /// Three-dimensional Tx-Rx separation, meters.
    pub d3d: f64,
    /// UAV flying height above ground, meters.
    pub h: f64,
}

impl LinkGeometry {
    pub fn new(d3d: f64, h: f64) -> Result<Self, ChannelError> {
        let geom = Self { d3d, h };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !self.d3d.is_finite() || !self.h.is_finite() {
            return Err(ChannelError::InvalidGeometry(format!(
                "non-finite geometry (d3d = {}, h = {})",
                self.d3d, self.h
            )));
        }
        if self.h < 0.0 {
            return Err(ChannelError::InvalidGeometry(format!(
                "negative flying height {}",
                self.h
            )));
        }
        if self.d3d < defaults::REFERENCE_DISTANCE_M {
            return Err(ChannelError::BelowReferenceDistance(self.d3d));
        }
        Ok(())
    }
}

/// A log-distance air-ground model, `PL(d0) + 10 gamma log10(d3d) - eta h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub name: String,
    /// Mean path loss at the 1 m reference distance, dB.
    #[serde(rename = "pl_intercept_db")]
    pub pl_intercept: f64,
    /// Path-loss exponent.
    pub gamma: f64,
    /// Altitude impact factor, dB per meter of flying height.
    #[serde(rename = "eta_db_per_m")]
    pub eta: f64,
    /// Shadow-fading standard deviation, dB.
    #[serde(rename = "sigma_sf_db")]
    pub sigma_sf: f64,
}

impl PathLossModel {
    pub fn new(
        name: impl Into<String>,
        pl_intercept: f64,
        gamma: f64,
        eta: f64,
        sigma_sf: f64,
    ) -> Result<Self, ChannelError> {
        let model = Self {
            name: name.into(),
            pl_intercept,
            gamma,
            eta,
            sigma_sf,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let fail = |reason: &str| ChannelError::InvalidModel {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(fail("gamma must be finite and positive"));
        }
        if !(self.sigma_sf.is_finite() && self.sigma_sf >= 0.0) {
            return Err(fail("sigma_sf must be finite and non-negative"));
        }
        if !self.eta.is_finite() {
            return Err(fail("eta must be finite"));
        }
        if !self.pl_intercept.is_finite() {
            return Err(fail("pl_intercept must be finite"));
        }
        Ok(())
    }

    pub fn mean_path_loss(&self, geom: LinkGeometry) -> Result<f64, ChannelError> {
        mean_path_loss(self, geom)
    }
}

/// RSSI and SNR shifts observed under conditions different from the ones the
/// model was fitted in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionInputs {
    pub delta_rssi: f64,
    pub snr: f64,
    pub delta_snr: f64,
}

/// Link budget terms and receiver decoding thresholds.
///
/// Missing keys in a JSON config fall back to [`RadioConfig::default`]; unknown
/// keys are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    #[serde(rename = "p_tx_dbm")]
    pub p_tx: f64,
    #[serde(rename = "g_tx_dbi")]
    pub g_tx: f64,
    #[serde(rename = "g_rx_dbi")]
    pub g_rx: f64,
    #[serde(rename = "chi_db")]
    pub chi: f64,
    #[serde(rename = "sensitivity_dbm")]
    pub sensitivity: f64,
    #[serde(rename = "snr_floor_db")]
    pub snr_floor: f64,
    #[serde(rename = "noise_floor_dbm")]
    pub noise_floor: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            p_tx: defaults::TX_POWER_DBM,
            g_tx: defaults::TX_GAIN_DBI,
            g_rx: defaults::RX_GAIN_DBI,
            chi: defaults::PLF_DB,
            sensitivity: defaults::SENSITIVITY_DBM,
            snr_floor: defaults::SNR_FLOOR_DB,
            noise_floor: defaults::NOISE_FLOOR_DBM,
        }
    }
}

/// What the receiver reports for one packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reception {
    pub rssi_dbm: f64,
    pub snr_db: f64,
    pub delivered: bool,
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let all = [
            self.p_tx,
            self.g_tx,
            self.g_rx,
            self.chi,
            self.sensitivity,
            self.snr_floor,
            self.noise_floor,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ChannelError::InvalidRadio("non-finite field".into()));
        }
        if !(-30.0..=36.0).contains(&self.p_tx) {
            return Err(ChannelError::InvalidRadio(format!(
                "transmit power {} dBm outside [-30, 36] dBm",
                self.p_tx
            )));
        }
        if self.chi > 0.0 {
            return Err(ChannelError::InvalidRadio(format!(
                "polarization loss factor {} dB must be <= 0",
                self.chi
            )));
        }
        if self.sensitivity >= 0.0 {
            return Err(ChannelError::InvalidRadio(format!(
                "sensitivity {} dBm must be negative",
                self.sensitivity
            )));
        }
        Ok(())
    }

    /// `P_Tx + G_Tx + G_Rx + chi`.
    pub fn budget_db(&self) -> f64 {
        self.p_tx + self.g_tx + self.g_rx + self.chi
    }

    /// Forward receiver model for a packet experiencing `pl_db` of path loss.
    ///
    /// The signal power is `S = budget - pl` and the SNR is `S - noise_floor`.
    /// The reported RSSI is the total in-band power `S + 10 log10(1 + 1/SNR)`,
    /// so feeding `(rssi, snr)` back through the experimental path loss
    /// recovers `pl_db` up to rounding.
    pub fn receive(&self, pl_db: f64) -> Reception {
        let signal = self.budget_db() - pl_db;
        let snr_db = signal - self.noise_floor;
        let rssi_dbm = signal + noise_term_db(snr_db);
        Reception {
            rssi_dbm,
            snr_db,
            delivered: rssi_dbm >= self.sensitivity && snr_db >= self.snr_floor,
        }
    }

    /// Weakest signal power (noise excluded) that [`RadioConfig::receive`]
    /// still delivers.
    pub fn min_signal_dbm(&self) -> f64 {
        let snr_limited = self.noise_floor + self.snr_floor;
        let rssi_limited = if self.sensitivity > self.noise_floor {
            let excess = db_to_linear(self.sensitivity) - db_to_linear(self.noise_floor);
            linear_to_db(excess)
        } else {
            f64::NEG_INFINITY
        };
        snr_limited.max(rssi_limited)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// `10 log10(1 + 10^(-snr_db / 10))`, the noise contribution to a total-power
/// RSSI reading.
pub fn noise_term_db(snr_db: f64) -> f64 {
    10.0 * std::f64::consts::LOG10_E * db_to_linear(-snr_db).ln_1p()
}

/// Mean path loss of `model` at `geom`, dB.
pub fn mean_path_loss(model: &PathLossModel, geom: LinkGeometry) -> Result<f64, ChannelError> {
    geom.validate()?;
    Ok(model.pl_intercept + 10.0 * model.gamma * geom.d3d.log10() - model.eta * geom.h)
}

/// Mean path loss plus the supplied small-scale term plus one shadow-fading
/// draw.
///
/// Evaluation order is `(mean + small_scale) + sigma_sf * z` with `z` a single
/// standard-normal draw from `rng`, so a fixed generator state gives the same
/// bits on every IEEE-754 platform.
pub fn instantaneous_path_loss<R: Rng + ?Sized>(
    model: &PathLossModel,
    geom: LinkGeometry,
    small_scale: f64,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    let mean = mean_path_loss(model, geom)?;
    let z: f64 = rng.sample(StandardNormal);
    Ok((mean + small_scale) + model.sigma_sf * z)
}

/// Corrective factor `-dRSSI + 10 log10(1 + 10^(-(SNR + dSNR)/10))`.
///
/// The expression is evaluated as written. With both deltas at zero it equals
/// the baseline SNR term rather than zero; it only vanishes in the high-SNR
/// limit.
pub fn corrective_factor(c: CorrectionInputs) -> f64 {
    -c.delta_rssi + noise_term_db(c.snr + c.delta_snr)
}

pub fn corrected_mean_path_loss(
    model: &PathLossModel,
    geom: LinkGeometry,
    c: CorrectionInputs,
) -> Result<f64, ChannelError> {
    Ok(mean_path_loss(model, geom)? + corrective_factor(c))
}

/// The bundled registry file shipped with the crate.
pub const BUILTIN_REGISTRY_JSON: &str = include_str!("../models.json");

/// The five bundled models: the Mediterranean-forest fit and four urban
/// air-ground benchmarks.
pub fn builtin_models() -> Vec<PathLossModel> {
    parse_registry(BUILTIN_REGISTRY_JSON).expect("bundled registry is valid")
}

pub fn parse_registry(json: &str) -> Result<Vec<PathLossModel>, ChannelError> {
    let models: Vec<PathLossModel> =
        serde_json::from_str(json).map_err(|e| ChannelError::Registry(e.to_string()))?;
    for m in &models {
        m.validate()?;
    }
    Ok(models)
}

/// Load the registry from `path`, or from the file named by the
/// `CANOPY_MODELS` environment variable, or fall back to the bundled one.
pub fn load_registry(path: Option<&Path>) -> Result<Vec<PathLossModel>, ChannelError> {
    let env_path = std::env::var_os(defaults::REGISTRY_ENV).map(std::path::PathBuf::from);
    match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| ChannelError::Registry(format!("{}: {e}", p.display())))?;
            parse_registry(&text)
        }
        None => Ok(builtin_models()),
    }
}

pub fn find_model<'a>(
    models: &'a [PathLossModel],
    name: &str,
) -> Result<&'a PathLossModel, ChannelError> {
    models
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| ChannelError::UnknownModel(name.to_string()))
}
