use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{MissionSpec, SimError};
use crate::campaign::compose_d3d;
use crate::channel::{LinkGeometry, PathLossModel, RadioConfig};
use crate::fading::FadingFamily;

/// How per-height generator seeds derive from the master seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubSeeding {
    /// Independent streams per height index.
    #[default]
    PerHeight,
    /// Every height replays the same random draws.
    Shared,
}

/// One transmitted message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub timestamp_s: f64,
    pub d3d_m: f64,
    pub h_m: f64,
    pub pl_db: f64,
    pub rssi_dbm: f64,
    pub snr_db: f64,
    pub delivered: bool,
    /// Small-scale part of `pl_db`; positive values are fades.
    pub small_scale_db: f64,
    /// Envelope draw behind `small_scale_db`, if a fading family was given.
    pub envelope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub records: Vec<SimRecord>,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seed of height `index`.
pub fn height_seed(master: u64, index: usize, mode: SubSeeding) -> u64 {
    match mode {
        SubSeeding::PerHeight => splitmix64(master ^ splitmix64(index as u64)),
        SubSeeding::Shared => master,
    }
}

/// The random state of a message is a pure function of its height seed and
/// index within the height, so any partition of the work gives the same draws.
pub(crate) fn message_rng(height_seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(height_seed);
    rng.set_stream(k as u64);
    rng
}

struct Job {
    height_index: usize,
    h: f64,
    k: usize,
    timestamp_s: f64,
}

fn simulate_message(
    job: &Job,
    mission: &MissionSpec,
    model: &PathLossModel,
    radio: &RadioConfig,
    fading: Option<(&FadingFamily, f64)>,
    seed: u64,
    mode: SubSeeding,
) -> Result<SimRecord, SimError> {
    let t_leg = job.k as f64 / mission.msg_rate_hz;
    let d3d = compose_d3d(mission.d2d_at(t_leg), job.h, mission.h_rx());
    let geom = LinkGeometry::new(d3d, job.h)?;
    let mut rng = message_rng(height_seed(seed, job.height_index, mode), job.k);
    let z: f64 = rng.sample(StandardNormal);
    let (small_scale_db, envelope) = match fading {
        Some((fam, median)) => {
            let e = fam.sample(&mut rng);
            (-20.0 * (e / median).log10(), Some(e))
        }
        None => (0.0, None),
    };
    let pl_db = (model.mean_path_loss(geom)? + small_scale_db) + model.sigma_sf * z;
    let rx = radio.receive(pl_db);
    Ok(SimRecord {
        timestamp_s: job.timestamp_s,
        d3d_m: d3d,
        h_m: job.h,
        pl_db,
        rssi_dbm: rx.rssi_dbm,
        snr_db: rx.snr_db,
        delivered: rx.delivered,
        small_scale_db,
        envelope,
    })
}

/// Synthesizes one record per message of every height leg, in time order.
/// Legs follow each other on a continuous clock.
pub fn synthesize_trace(
    mission: &MissionSpec,
    model: &PathLossModel,
    radio: &RadioConfig,
    fading: Option<&FadingFamily>,
    seed: u64,
) -> Result<SimTrace, SimError> {
    synthesize_trace_with_workers(mission, model, radio, fading, seed, SubSeeding::default(), 1)
}

/// [`synthesize_trace`] split over `workers` threads; the output does not
/// depend on the worker count.
pub fn synthesize_trace_with_workers(
    mission: &MissionSpec,
    model: &PathLossModel,
    radio: &RadioConfig,
    fading: Option<&FadingFamily>,
    seed: u64,
    mode: SubSeeding,
    workers: usize,
) -> Result<SimTrace, SimError> {
    mission.validate()?;
    model.validate()?;
    radio.validate()?;
    if let Some(f) = fading {
        f.validate()?;
    }
    let fading = fading.map(|f| (f, f.median()));
    let n = mission.messages_per_height();
    let period = 1.0 / mission.msg_rate_hz;
    let jobs: Vec<Job> = mission
        .heights_m
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| {
            (0..n).map(move |k| Job {
                height_index: i,
                h,
                k,
                timestamp_s: (i * n + k) as f64 * period,
            })
        })
        .collect();
    let run = |chunk: &[Job]| -> Result<Vec<SimRecord>, SimError> {
        chunk
            .iter()
            .map(|j| simulate_message(j, mission, model, radio, fading, seed, mode))
            .collect()
    };
    let workers = workers.max(1).min(jobs.len().max(1));
    let records = if workers == 1 {
        run(&jobs)?
    } else {
        let chunk = jobs.len().div_ceil(workers);
        let parts: Vec<Result<Vec<SimRecord>, SimError>> = std::thread::scope(|s| {
            let handles: Vec<_> = jobs.chunks(chunk).map(|c| s.spawn(move || run(c))).collect();
            handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).collect()
        });
        let mut records = Vec::with_capacity(jobs.len());
        for p in parts {
            records.extend(p?);
        }
        records
    };
    Ok(SimTrace { records, seed })
}

/// Delivered fraction of all messages.
pub fn pdr(trace: &SimTrace) -> Result<f64, SimError> {
    if trace.records.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let ok = trace.records.iter().filter(|r| r.delivered).count();
    Ok(ok as f64 / trace.records.len() as f64)
}

/// Delivery statistics of the messages with `d_lo_m <= d3d < d_hi_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdrBin {
    pub d_lo_m: f64,
    pub d_hi_m: f64,
    pub sent: usize,
    pub delivered: usize,
    pub pdr: f64,
}

/// PDR over `d3d` bins of `bin_width_m`, ascending, non-empty bins only.
pub fn pdr_by_distance(trace: &SimTrace, bin_width_m: f64) -> Result<Vec<PdrBin>, SimError> {
    if trace.records.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    if !(bin_width_m.is_finite() && bin_width_m > 0.0) {
        return Err(SimError::InvalidArgument(format!("bin width {bin_width_m} must be positive")));
    }
    let mut bins: std::collections::BTreeMap<i64, (usize, usize)> = Default::default();
    for r in &trace.records {
        let e = bins.entry((r.d3d_m / bin_width_m).floor() as i64).or_default();
        e.0 += 1;
        e.1 += usize::from(r.delivered);
    }
    Ok(bins
        .into_iter()
        .map(|(b, (sent, delivered))| PdrBin {
            d_lo_m: b as f64 * bin_width_m,
            d_hi_m: (b + 1) as f64 * bin_width_m,
            sent,
            delivered,
            pdr: delivered as f64 / sent as f64,
        })
        .collect())
}

fn write_comments<W: Write>(out: &mut W, comments: &[String]) -> std::io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    Ok(())
}

/// Trace CSV, readable as a range-schema receiver log. `comments` become
/// leading `#` lines.
pub fn write_trace_csv<W: Write>(trace: &SimTrace, mut out: W, comments: &[String]) -> std::io::Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "timestamp_s,d3d_m,h_m,pl_db,rssi_dbm,snr_db,delivered")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.timestamp_s, r.d3d_m, r.h_m, r.pl_db, r.rssi_dbm, r.snr_db, r.delivered
        )?;
    }
    Ok(())
}

/// The raw small-scale draws of a trace. `envelope` is empty without fading.
pub fn write_small_scale_csv<W: Write>(trace: &SimTrace, mut out: W, comments: &[String]) -> std::io::Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "timestamp_s,d3d_m,h_m,small_scale_db,envelope")?;
    for r in &trace.records {
        let env = r.envelope.map(|e| e.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.timestamp_s, r.d3d_m, r.h_m, r.small_scale_db, env)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{experimental_pl, read_range_log};
    use crate::channel::builtin_models;
    use crate::sim::UavPosition;
    use proptest::prelude::*;

    fn this_work() -> PathLossModel {
        builtin_models().into_iter().next().unwrap()
    }

    fn walk() -> MissionSpec {
        MissionSpec {
            uav: UavPosition::default(),
            heights_m: vec![3.0, 10.0, 30.0],
            path: vec![[10.0, 0.0], [600.0, 0.0]],
            speed_mps: 1.0,
            msg_rate_hz: 0.25,
            duration_s: None,
            h_rx_m: None,
        }
    }

    /// Wearer standing still so that `d3d` is exactly `d3d` at height `h`.
    pub(crate) fn stationary(d3d: f64, h: f64, h_rx: f64, messages: usize) -> MissionSpec {
        let d2d = (d3d * d3d - (h - h_rx).powi(2)).sqrt();
        MissionSpec {
            uav: UavPosition::default(),
            heights_m: vec![h],
            path: vec![[d2d, 0.0]],
            speed_mps: 1.0,
            msg_rate_hz: 0.25,
            duration_s: Some((messages - 1) as f64 * 4.0),
            h_rx_m: Some(h_rx),
        }
    }

    #[test]
    fn deterministic_without_fading() {
        let m = PathLossModel { sigma_sf: 0.0, ..this_work() };
        let mission = stationary(100.0, 10.0, 10.0, 50);
        let t = synthesize_trace(&mission, &m, &RadioConfig::default(), None, 1).unwrap();
        assert_eq!(t.records.len(), 50);
        for r in &t.records {
            assert!((r.pl_db - 93.29).abs() < 0.01);
            assert_eq!(r.pl_db, t.records[0].pl_db);
            assert_eq!(r.rssi_dbm, t.records[0].rssi_dbm);
        }
    }

    #[test]
    fn same_seed_same_trace_any_worker_count() {
        let fading = FadingFamily::Nakagami { mu: 0.64, omega: 32.27 };
        let radio = RadioConfig::default();
        let a = synthesize_trace(&walk(), &this_work(), &radio, Some(&fading), 42).unwrap();
        for workers in [2, 3, 8] {
            let b = synthesize_trace_with_workers(&walk(), &this_work(), &radio, Some(&fading), 42, SubSeeding::PerHeight, workers)
                .unwrap();
            assert_eq!(a, b);
        }
        let c = synthesize_trace(&walk(), &this_work(), &radio, Some(&fading), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn energy_accounting_and_delivery_rule() {
        let fading = FadingFamily::Rician { k: 2.0, omega: 1.0 };
        let radio = RadioConfig::default();
        let t = synthesize_trace(&walk(), &this_work(), &radio, Some(&fading), 3).unwrap();
        for r in &t.records {
            let residual = r.rssi_dbm + r.pl_db - radio.budget_db() - crate::channel::noise_term_db(r.snr_db);
            assert!(residual.abs() < 1e-9);
            assert_eq!(r.delivered, r.rssi_dbm >= radio.sensitivity && r.snr_db >= radio.snr_floor);
        }
    }

    #[test]
    fn trace_csv_reads_back_as_range_log() {
        let radio = RadioConfig::default();
        let t = synthesize_trace(&walk(), &this_work(), &radio, None, 4).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf, &["seed = 4".into()]).unwrap();
        let recs = read_range_log(buf.as_slice()).unwrap();
        assert_eq!(recs.len(), t.records.len());
        for (rec, r) in recs.iter().zip(&t.records) {
            let pl = experimental_pl(rec, &radio).unwrap();
            assert!((pl - r.pl_db).abs() < 1e-9, "{pl} vs {}", r.pl_db);
        }
    }

    #[test]
    fn timestamps_continue_across_heights() {
        let t = synthesize_trace(&walk(), &this_work(), &RadioConfig::default(), None, 5).unwrap();
        assert!(t.records.windows(2).all(|w| w[1].timestamp_s - w[0].timestamp_s == 4.0));
        assert_eq!(t.records.len(), 3 * 148);
    }

    #[test]
    fn pdr_extremes() {
        let mut t = synthesize_trace(&walk(), &this_work(), &RadioConfig::default(), None, 6).unwrap();
        t.records.iter_mut().for_each(|r| r.delivered = true);
        assert_eq!(pdr(&t).unwrap(), 1.0);
        t.records.iter_mut().for_each(|r| r.delivered = false);
        assert_eq!(pdr(&t).unwrap(), 0.0);
        t.records.clear();
        assert_eq!(pdr(&t), Err(SimError::EmptyTrace));
        assert_eq!(pdr_by_distance(&t, 10.0), Err(SimError::EmptyTrace));
    }

    #[test]
    fn below_reference_distance_rejected() {
        let mission = MissionSpec { path: vec![[0.0, 0.0]], duration_s: Some(4.0), heights_m: vec![1.5], ..walk() };
        assert!(matches!(
            synthesize_trace(&mission, &this_work(), &RadioConfig::default(), None, 0),
            Err(SimError::Channel(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn pdr_in_unit_interval(seed in any::<u64>(), mu in 0.3f64..3.0) {
            let fading = FadingFamily::Nakagami { mu, omega: 1.0 };
            let t = synthesize_trace(&walk(), &this_work(), &RadioConfig::default(), Some(&fading), seed).unwrap();
            let p = pdr(&t).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            for b in pdr_by_distance(&t, 25.0).unwrap() {
                prop_assert!((0.0..=1.0).contains(&b.pdr));
                prop_assert!(b.delivered <= b.sent);
            }
        }
    }
}
