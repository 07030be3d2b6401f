use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::trace::message_rng;
use super::{synthesize_trace_with_workers, MissionSpec, SimError, SimTrace, SubSeeding};
use crate::channel::{LinkGeometry, PathLossModel, RadioConfig};
use crate::defaults::OUTAGE_MESSAGES;
use crate::fading::FadingFamily;

/// What "radio range" means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "definition", rename_all = "kebab-case")]
pub enum RangeDefinition {
    /// Mean path loss equal to `budget - sensitivity`, ignoring the SNR floor
    /// and the noise contribution to RSSI.
    LinkBudget,
    /// Mean path loss equal to the largest loss the receiver model still
    /// decodes, both thresholds included.
    MeanThreshold,
    /// Largest distance whose simulated delivery probability is at least `p`.
    Outage {
        p: f64,
        #[serde(default)]
        fading: Option<FadingFamily>,
        #[serde(default = "default_messages")]
        messages: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_messages() -> usize {
    OUTAGE_MESSAGES
}

fn closed_form(model: &PathLossModel, h: f64, pl_max: f64) -> Result<f64, SimError> {
    let exponent = (pl_max - model.pl_intercept + model.eta * h) / (10.0 * model.gamma);
    if !exponent.is_finite() || exponent < 0.0 {
        return Err(SimError::NoFiniteRange(format!(
            "allowable path loss {pl_max:.2} dB is below the model value at 1 m"
        )));
    }
    Ok(10f64.powf(exponent))
}

/// Radio range in `d3d` meters at flying height `h`.
pub fn radio_range(
    model: &PathLossModel,
    radio: &RadioConfig,
    h: f64,
    definition: &RangeDefinition,
) -> Result<f64, SimError> {
    model.validate()?;
    radio.validate()?;
    if !(h.is_finite() && h >= 0.0) {
        return Err(SimError::InvalidArgument(format!("flying height {h}")));
    }
    match definition {
        RangeDefinition::LinkBudget => closed_form(model, h, radio.budget_db() - radio.sensitivity),
        RangeDefinition::MeanThreshold => closed_form(model, h, radio.budget_db() - radio.min_signal_dbm()),
        RangeDefinition::Outage { p, fading, messages, seed } => {
            outage_range(model, radio, h, *p, fading.as_ref(), *messages, *seed)
        }
    }
}

fn outage_range(
    model: &PathLossModel,
    radio: &RadioConfig,
    h: f64,
    p: f64,
    fading: Option<&FadingFamily>,
    messages: usize,
    seed: u64,
) -> Result<f64, SimError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(SimError::InvalidArgument(format!("outage probability {p} outside (0, 1]")));
    }
    if messages == 0 {
        return Err(SimError::InvalidArgument("zero messages".into()));
    }
    if let Some(f) = fading {
        f.validate()?;
    }
    let median = fading.map(|f| f.median());
    // Common random numbers: the same fading draws at every trial distance.
    let offsets: Vec<f64> = (0..messages)
        .map(|k| {
            let mut rng = message_rng(seed, k);
            let z: f64 = rng.sample(StandardNormal);
            let ss = match (fading, median) {
                (Some(f), Some(m)) => -20.0 * (f.sample(&mut rng) / m).log10(),
                _ => 0.0,
            };
            ss + model.sigma_sf * z
        })
        .collect();
    let delivery = |d: f64| -> Result<f64, SimError> {
        let mean = model.mean_path_loss(LinkGeometry::new(d, h)?)?;
        let ok = offsets.iter().filter(|&&o| radio.receive(mean + o).delivered).count();
        Ok(ok as f64 / messages as f64)
    };
    let mut lo = 1.0;
    if delivery(lo)? < p {
        return Err(SimError::NoFiniteRange(format!("delivery probability below {p} already at 1 m")));
    }
    let mut hi = closed_form(model, h, radio.budget_db() - radio.min_signal_dbm()).unwrap_or(1.0).max(1.0) * 2.0;
    let mut expansions = 0;
    while delivery(hi)? >= p {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(SimError::NoFiniteRange(format!("delivery probability stays above {p}")));
        }
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if delivery(mid)? >= p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Per-height summary of a simulated mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightSummary {
    pub h_m: f64,
    pub radio_range_m: f64,
    pub messages: usize,
    pub delivered: usize,
    pub pdr: f64,
    /// PDR of the messages sent within `radio_range_m`; `None` if there were none.
    pub pdr_within_range: Option<f64>,
    /// Farthest `d3d` of a delivered message.
    pub max_delivered_d3d_m: Option<f64>,
}

/// Simulates `mission` and summarizes radio range and PDR per height.
#[allow(clippy::too_many_arguments)]
pub fn sweep_heights(
    mission: &MissionSpec,
    model: &PathLossModel,
    radio: &RadioConfig,
    fading: Option<&FadingFamily>,
    seed: u64,
    mode: SubSeeding,
    definition: &RangeDefinition,
    workers: usize,
) -> Result<Vec<HeightSummary>, SimError> {
    let trace = synthesize_trace_with_workers(mission, model, radio, fading, seed, mode, workers)?;
    summarize_heights(&trace, mission, model, radio, definition)
}

/// Per-height summary of a trace synthesized from `mission`.
pub fn summarize_heights(
    trace: &SimTrace,
    mission: &MissionSpec,
    model: &PathLossModel,
    radio: &RadioConfig,
    definition: &RangeDefinition,
) -> Result<Vec<HeightSummary>, SimError> {
    let n = mission.messages_per_height();
    if trace.records.len() != n * mission.heights_m.len() {
        return Err(SimError::InvalidArgument("trace does not match the mission".into()));
    }
    mission
        .heights_m
        .iter()
        .zip(trace.records.chunks(n))
        .map(|(&h, recs)| {
            let range = radio_range(model, radio, h, definition)?;
            let delivered = recs.iter().filter(|r| r.delivered).count();
            let within: Vec<_> = recs.iter().filter(|r| r.d3d_m <= range).collect();
            let pdr_within_range = (!within.is_empty())
                .then(|| within.iter().filter(|r| r.delivered).count() as f64 / within.len() as f64);
            let max_delivered_d3d_m = recs
                .iter()
                .filter(|r| r.delivered)
                .map(|r| r.d3d_m)
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
            Ok(HeightSummary {
                h_m: h,
                radio_range_m: range,
                messages: recs.len(),
                delivered,
                pdr: delivered as f64 / recs.len() as f64,
                pdr_within_range,
                max_delivered_d3d_m,
            })
        })
        .collect()
}
