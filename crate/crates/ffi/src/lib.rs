//! C ABI over the `canopy` library.
//!
//! Every fallible function returns a [`CanopyStatus`] and writes its result
//! through an out-pointer, which is left untouched on failure. The message of
//! the last failure on the calling thread is available from
//! [`canopy_last_error`]. Handles are opaque; each `*_new`/`*_builtin`/`*_fit`
//! pairs with exactly one `*_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use canopy::antenna::{self, AntennaError, PolarizationVector};
use canopy::campaign::{self, PLSample, PipelineError};
use canopy::channel::{self, ChannelError};
use canopy::fading::{self, FadingError, FamilyKind};
use canopy::sim::{self, RangeDefinition, SimError};
use canopy::{CorrectionInputs, LinkGeometry};
use num_complex::Complex64;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanopyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownModel = 3,
    /// The data cannot identify the requested parameters.
    DegenerateFit = 4,
    /// Empty or constant samples.
    DegenerateStats = 5,
    NoFiniteRange = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Radio range definitions with a closed form.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanopyRange {
    /// Mean path loss at `budget - sensitivity`.
    LinkBudget = 0,
    /// Mean path loss at the receiver's decoding boundary.
    MeanThreshold = 1,
}

/// Fade-depth statistics in dB, positive values being fades.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanopyFadeDepth {
    pub level_50_db: f64,
    pub level_99_db: f64,
    pub fade_depth_db: f64,
    pub max_fade_db: f64,
    pub sample_count: usize,
    /// Whether enough samples back the 99% level.
    pub reliable: bool,
}

/// A log-distance path-loss model.
pub struct CanopyModel(channel::PathLossModel);

/// Link-budget terms and receiver thresholds.
pub struct CanopyRadio(channel::RadioConfig);

/// A fitted fading distribution.
pub struct CanopyFadingFit(fading::FadingFit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CanopyStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(CanopyStatus::NullPointer, format!("`{what}` is null"))
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Failure(CanopyStatus::InvalidArgument, msg.into())
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        let status = match e {
            ChannelError::UnknownModel(_) => CanopyStatus::UnknownModel,
            _ => CanopyStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<AntennaError> for Failure {
    fn from(e: AntennaError) -> Self {
        let status = match e {
            AntennaError::Empty => CanopyStatus::DegenerateStats,
            _ => CanopyStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let status = match e {
            PipelineError::Unidentifiable { .. } | PipelineError::TooFewSamples { .. } => {
                CanopyStatus::DegenerateFit
            }
            PipelineError::Empty => CanopyStatus::DegenerateStats,
            PipelineError::Channel(ChannelError::UnknownModel(_)) => CanopyStatus::UnknownModel,
            _ => CanopyStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<FadingError> for Failure {
    fn from(e: FadingError) -> Self {
        let status = match e {
            FadingError::Empty | FadingError::Degenerate | FadingError::NoFit(_) => CanopyStatus::DegenerateStats,
            FadingError::NonConvergence { .. } | FadingError::OutOfRange { .. } => CanopyStatus::DegenerateFit,
            _ => CanopyStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NoFiniteRange(_) => Failure(CanopyStatus::NoFiniteRange, e.to_string()),
            SimError::Channel(c) => c.into(),
            SimError::Fading(f) => f.into(),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    });
}

/// Runs `f`, translating failures and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CanopyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            CanopyStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            CanopyStatus::Internal
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::invalid(format!("`{what}` is not UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn canopy_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Number of models in the bundled registry.
#[no_mangle]
pub extern "C" fn canopy_builtin_model_count() -> usize {
    channel::builtin_models().len()
}

/// Looks up a bundled model by name, for example `"mediterranean-forest"`.
#[no_mangle]
pub unsafe extern "C" fn canopy_model_builtin(name: *const c_char, model: *mut *mut CanopyModel) -> CanopyStatus {
    guard(|| {
        let name = string(name, "name")?;
        let slot = out(model, "model")?;
        let m = channel::find_model(&channel::builtin_models(), name)?.clone();
        *slot = boxed(CanopyModel(m));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_model_new(
    pl_intercept_db: f64,
    gamma: f64,
    eta_db_per_m: f64,
    sigma_sf_db: f64,
    model: *mut *mut CanopyModel,
) -> CanopyStatus {
    guard(|| {
        let slot = out(model, "model")?;
        let m = channel::PathLossModel::new("custom", pl_intercept_db, gamma, eta_db_per_m, sigma_sf_db)?;
        *slot = boxed(CanopyModel(m));
        Ok(())
    })
}

/// Reads back the four model parameters; any out-pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn canopy_model_params(
    model: *const CanopyModel,
    pl_intercept_db: *mut f64,
    gamma: *mut f64,
    eta_db_per_m: *mut f64,
    sigma_sf_db: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let m = &get(model, "model")?.0;
        for (p, v) in [
            (pl_intercept_db, m.pl_intercept),
            (gamma, m.gamma),
            (eta_db_per_m, m.eta),
            (sigma_sf_db, m.sigma_sf),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_model_free(model: *mut CanopyModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mean path loss in dB at slant range `d3d_m` and flying height `h_m`.
#[no_mangle]
pub unsafe extern "C" fn canopy_mean_path_loss(
    model: *const CanopyModel,
    d3d_m: f64,
    h_m: f64,
    pl_db: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let m = &get(model, "model")?.0;
        let slot = out(pl_db, "pl_db")?;
        *slot = channel::mean_path_loss(m, LinkGeometry::new(d3d_m, h_m)?)?;
        Ok(())
    })
}

/// Path-loss correction for RSSI and SNR shifts, dB.
#[no_mangle]
pub extern "C" fn canopy_corrective_factor(delta_rssi_db: f64, snr_db: f64, delta_snr_db: f64) -> f64 {
    canopy::corrective_factor(CorrectionInputs {
        delta_rssi: delta_rssi_db,
        snr: snr_db,
        delta_snr: delta_snr_db,
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_radio_default(radio: *mut *mut CanopyRadio) -> CanopyStatus {
    guard(|| {
        *out(radio, "radio")? = boxed(CanopyRadio(channel::RadioConfig::default()));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_radio_new(
    p_tx_dbm: f64,
    g_tx_dbi: f64,
    g_rx_dbi: f64,
    chi_db: f64,
    sensitivity_dbm: f64,
    snr_floor_db: f64,
    noise_floor_dbm: f64,
    radio: *mut *mut CanopyRadio,
) -> CanopyStatus {
    guard(|| {
        let slot = out(radio, "radio")?;
        let r = channel::RadioConfig {
            p_tx: p_tx_dbm,
            g_tx: g_tx_dbi,
            g_rx: g_rx_dbi,
            chi: chi_db,
            sensitivity: sensitivity_dbm,
            snr_floor: snr_floor_db,
            noise_floor: noise_floor_dbm,
        };
        r.validate()?;
        *slot = boxed(CanopyRadio(r));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_radio_free(radio: *mut CanopyRadio) {
    if !radio.is_null() {
        drop(Box::from_raw(radio));
    }
}

/// Instantaneous path loss implied by a logged RSSI/SNR pair.
#[no_mangle]
pub unsafe extern "C" fn canopy_experimental_pl(
    radio: *const CanopyRadio,
    rssi_dbm: f64,
    snr_db: f64,
    pl_db: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let r = &get(radio, "radio")?.0;
        let slot = out(pl_db, "pl_db")?;
        let rec = campaign::RawLogRecord {
            timestamp_s: 0.0,
            position: campaign::Position::Range { d3d_m: 1.0 },
            h_m: 0.0,
            rssi_dbm,
            snr_db,
        };
        *slot = campaign::experimental_pl(&rec, r)?;
        Ok(())
    })
}

unsafe fn polarization(p: *const f64, what: &str) -> Result<PolarizationVector, Failure> {
    let v = slice(p, 6, what)?;
    Ok(PolarizationVector::new([
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
        Complex64::new(v[4], v[5]),
    ])?)
}

/// Polarization loss factor in [0, 1] between two complex unit vectors, each
/// given as six doubles `re_x, im_x, re_y, im_y, re_z, im_z`.
#[no_mangle]
pub unsafe extern "C" fn canopy_polarization_loss(tx: *const f64, rx: *const f64, plf: *mut f64) -> CanopyStatus {
    guard(|| {
        let (tx, rx) = (polarization(tx, "tx")?, polarization(rx, "rx")?);
        *out(plf, "plf")? = antenna::polarization_loss(&tx, &rx);
        Ok(())
    })
}

/// Largest sample guaranteed in at least a fraction `level` of `samples`.
#[no_mangle]
pub unsafe extern "C" fn canopy_ccdf_guaranteed_value(
    samples: *const f64,
    n: usize,
    level: f64,
    value: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let xs = slice(samples, n, "samples")?;
        *out(value, "value")? = antenna::ccdf_guaranteed_value(xs, level)?;
        Ok(())
    })
}

unsafe fn geometries(d3d_m: *const f64, h_m: *const f64, n: usize) -> Result<Vec<LinkGeometry>, Failure> {
    let (d, h) = (slice(d3d_m, n, "d3d_m")?, slice(h_m, n, "h_m")?);
    d.iter()
        .zip(h)
        .map(|(&d, &h)| LinkGeometry::new(d, h).map_err(Failure::from))
        .collect()
}

/// Moving-window split of `pl_db` into large- and small-scale parts, written
/// to the caller's arrays of length `n`.
#[no_mangle]
pub unsafe extern "C" fn canopy_separate_small_scale(
    d3d_m: *const f64,
    h_m: *const f64,
    pl_db: *const f64,
    n: usize,
    wavelength_m: f64,
    large_scale_db: *mut f64,
    small_scale_db: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let geoms = geometries(d3d_m, h_m, n)?;
        let pl = slice(pl_db, n, "pl_db")?;
        if n > 0 && (large_scale_db.is_null() || small_scale_db.is_null()) {
            return Err(Failure::null("output array"));
        }
        let input: Vec<(LinkGeometry, f64)> = geoms.into_iter().zip(pl.iter().copied()).collect();
        let split = campaign::separate_small_scale(&input, wavelength_m)?;
        let large = std::slice::from_raw_parts_mut(large_scale_db, n);
        let small = std::slice::from_raw_parts_mut(small_scale_db, n);
        for (i, s) in split.iter().enumerate() {
            large[i] = s.pl_large_scale;
            small[i] = s.small_scale;
        }
        Ok(())
    })
}

/// Least-squares fit of the log-distance model to `n` path-loss values taken
/// as large-scale.
#[no_mangle]
pub unsafe extern "C" fn canopy_fit_model(
    d3d_m: *const f64,
    h_m: *const f64,
    pl_db: *const f64,
    n: usize,
    model: *mut *mut CanopyModel,
) -> CanopyStatus {
    guard(|| {
        let slot = out(model, "model")?;
        let geoms = geometries(d3d_m, h_m, n)?;
        let pl = slice(pl_db, n, "pl_db")?;
        let samples: Vec<PLSample> =
            geoms.into_iter().zip(pl).map(|(g, &p)| PLSample::without_small_scale(g, p)).collect();
        let fit = campaign::fit_model(&samples, "fitted")?;
        *slot = boxed(CanopyModel(fit.model));
        Ok(())
    })
}

/// Radio range in `d3d` meters at flying height `h_m`.
#[no_mangle]
pub unsafe extern "C" fn canopy_radio_range(
    model: *const CanopyModel,
    radio: *const CanopyRadio,
    h_m: f64,
    definition: CanopyRange,
    range_m: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let (m, r) = (&get(model, "model")?.0, &get(radio, "radio")?.0);
        let slot = out(range_m, "range_m")?;
        let def = match definition {
            CanopyRange::LinkBudget => RangeDefinition::LinkBudget,
            CanopyRange::MeanThreshold => RangeDefinition::MeanThreshold,
        };
        *slot = sim::radio_range(m, r, h_m, &def)?;
        Ok(())
    })
}

/// Nearest-rank 50% and 99% levels of fade values in dB.
#[no_mangle]
pub unsafe extern "C" fn canopy_fade_depth(fades_db: *const f64, n: usize, report: *mut CanopyFadeDepth) -> CanopyStatus {
    guard(|| {
        let xs = slice(fades_db, n, "fades_db")?;
        let slot = out(report, "report")?;
        let r = fading::fade_depth(xs)?;
        *slot = CanopyFadeDepth {
            level_50_db: r.level_50_db,
            level_99_db: r.level_99_db,
            fade_depth_db: r.fade_depth_db,
            max_fade_db: r.max_fade_db,
            sample_count: r.sample_count,
            reliable: r.reliable,
        };
        Ok(())
    })
}

/// Maximum-likelihood fit of one family (`"rayleigh"`, `"nakagami"`,
/// `"weibull"`, `"rician"` or `"log-logistic"`) to linear envelope samples.
#[no_mangle]
pub unsafe extern "C" fn canopy_fading_fit(
    family: *const c_char,
    envelope: *const f64,
    n: usize,
    fit: *mut *mut CanopyFadingFit,
) -> CanopyStatus {
    guard(|| {
        let name = string(family, "family")?;
        let kind = FamilyKind::from_name(name).ok_or_else(|| Failure::invalid(format!("unknown family `{name}`")))?;
        let slot = out(fit, "fit")?;
        let xs = slice(envelope, n, "envelope")?;
        *slot = boxed(CanopyFadingFit(fading::fit_family(kind, xs)?));
        Ok(())
    })
}

/// Fits every family and keeps the highest log-likelihood.
#[no_mangle]
pub unsafe extern "C" fn canopy_fading_best_fit(
    envelope: *const f64,
    n: usize,
    fit: *mut *mut CanopyFadingFit,
) -> CanopyStatus {
    guard(|| {
        let slot = out(fit, "fit")?;
        let xs = slice(envelope, n, "envelope")?;
        *slot = boxed(CanopyFadingFit(fading::best_fit(xs)?.best));
        Ok(())
    })
}

/// Family name of a fit as a static NUL-terminated string; null for a null
/// handle.
#[no_mangle]
pub unsafe extern "C" fn canopy_fading_fit_family(fit: *const CanopyFadingFit) -> *const c_char {
    let Some(f) = fit.as_ref() else {
        return ptr::null();
    };
    match f.0.family.kind() {
        FamilyKind::Rayleigh => c"rayleigh".as_ptr(),
        FamilyKind::Nakagami => c"nakagami".as_ptr(),
        FamilyKind::Weibull => c"weibull".as_ptr(),
        FamilyKind::Rician => c"rician".as_ptr(),
        FamilyKind::LogLogistic => c"log-logistic".as_ptr(),
    }
}

/// Copies up to `capacity` parameters into `params` and reports the family's
/// parameter count in `count`. Order: rayleigh (sigma), nakagami (mu, omega),
/// weibull (shape, scale), rician (k, omega), log-logistic (scale, shape).
#[no_mangle]
pub unsafe extern "C" fn canopy_fading_fit_params(
    fit: *const CanopyFadingFit,
    params: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> CanopyStatus {
    guard(|| {
        let f = &get(fit, "fit")?.0;
        let values = f.family.params();
        if capacity > 0 && params.is_null() {
            return Err(Failure::null("params"));
        }
        for (i, v) in values.iter().take(capacity).enumerate() {
            *params.add(i) = *v;
        }
        if let Some(c) = count.as_mut() {
            *c = values.len();
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_fading_fit_log_likelihood(
    fit: *const CanopyFadingFit,
    log_likelihood: *mut f64,
) -> CanopyStatus {
    guard(|| {
        let f = &get(fit, "fit")?.0;
        *out(log_likelihood, "log_likelihood")? = f.log_likelihood;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn canopy_fading_fit_free(fit: *mut CanopyFadingFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}
