use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::family::FadingFamily;
use super::special::{digamma, trigamma};
use super::{FadingError, FamilyKind};
use crate::defaults::{FIT_MAX_ITER, FIT_REL_TOL};

/// Lowest Nakagami shape accepted from a fit.
const NAKAGAMI_MU_MIN: f64 = 0.1;
/// Nakagami shapes below this lie outside the classical `mu >= 1/2` range
/// and are reported with a warning.
const NAKAGAMI_MU_WARN: f64 = 0.5;
/// Grid resolution of the Rician profile search.
const RICIAN_GRID: usize = 64;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// A maximum-likelihood fit of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingFit {
    #[serde(flatten)]
    pub family: FadingFamily,
    pub log_likelihood: f64,
    #[serde(rename = "n")]
    pub sample_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedFamily {
    pub family: FamilyKind,
    pub reason: String,
}

/// Every successful fit plus the selected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestFit {
    pub best: FadingFit,
    pub fits: Vec<FadingFit>,
    pub excluded: Vec<ExcludedFamily>,
    /// Nakagami shape below one, i.e. fading more severe than Rayleigh.
    /// `None` when the Nakagami fit failed.
    pub worse_than_rayleigh: Option<bool>,
}

fn validate_samples(samples: &[f64]) -> Result<(), FadingError> {
    if samples.is_empty() {
        return Err(FadingError::Empty);
    }
    for (index, &value) in samples.iter().enumerate() {
        if value.is_nan() {
            return Err(FadingError::NaN { index });
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(FadingError::NonPositive { index, value });
        }
    }
    if samples.iter().all(|&v| v == samples[0]) {
        return Err(FadingError::Degenerate);
    }
    Ok(())
}

fn mean(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    v.sum::<f64>() / n as f64
}

/// Maximum-likelihood fit of `kind` to positive envelope samples.
pub fn fit_family(kind: FamilyKind, samples: &[f64]) -> Result<FadingFit, FadingError> {
    validate_samples(samples)?;
    let mut warnings = Vec::new();
    let family = match kind {
        FamilyKind::Rayleigh => fit_rayleigh(samples),
        FamilyKind::Nakagami => {
            let fam = fit_nakagami(samples)?;
            if let FadingFamily::Nakagami { mu, .. } = fam {
                if mu < NAKAGAMI_MU_WARN {
                    warnings.push(format!("nakagami shape {mu:.4} is below 0.5"));
                }
            }
            fam
        }
        FamilyKind::Weibull => fit_weibull(samples)?,
        FamilyKind::Rician => fit_rician(samples)?,
        FamilyKind::LogLogistic => fit_log_logistic(samples)?,
    };
    family.validate()?;
    let log_likelihood = family.log_likelihood(samples);
    if !log_likelihood.is_finite() {
        return Err(FadingError::OutOfRange {
            family: kind,
            reason: "non-finite log-likelihood".into(),
        });
    }
    Ok(FadingFit {
        family,
        log_likelihood,
        sample_count: samples.len(),
        warnings,
    })
}

fn fit_rayleigh(x: &[f64]) -> FadingFamily {
    let m2 = mean(x.iter().map(|v| v * v), x.len());
    FadingFamily::Rayleigh { sigma: (m2 / 2.0).sqrt() }
}

fn fit_nakagami(x: &[f64]) -> Result<FadingFamily, FadingError> {
    let n = x.len();
    let omega = mean(x.iter().map(|v| v * v), n);
    let mean_ln_x2 = mean(x.iter().map(|v| 2.0 * v.ln()), n);
    let s = omega.ln() - mean_ln_x2;
    if s <= 0.0 || !s.is_finite() {
        return Err(FadingError::Degenerate);
    }
    // Solves ln mu - digamma(mu) = s; the left side is convex and decreasing.
    let mut mu = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..FIT_MAX_ITER {
        let f = mu.ln() - digamma(mu) - s;
        let fp = 1.0 / mu - trigamma(mu);
        let mut next = mu - f / fp;
        if next <= 0.0 || !next.is_finite() {
            next = mu / 2.0;
        }
        let rel = ((next - mu) / mu).abs();
        mu = next;
        if rel < FIT_REL_TOL {
            if mu < NAKAGAMI_MU_MIN {
                return Err(FadingError::OutOfRange {
                    family: FamilyKind::Nakagami,
                    reason: format!("shape {mu:.4} below {NAKAGAMI_MU_MIN}"),
                });
            }
            return Ok(FadingFamily::Nakagami { mu, omega });
        }
    }
    Err(FadingError::NonConvergence {
        family: FamilyKind::Nakagami,
        last: FadingFamily::Nakagami { mu, omega },
    })
}

fn fit_weibull(x: &[f64]) -> Result<FadingFamily, FadingError> {
    let n = x.len();
    let ln_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let mean_ln = mean(ln_x.iter().copied(), n);
    let y: Vec<f64> = ln_x.iter().map(|v| v - mean_ln).collect();
    let sd = (y.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64).sqrt();
    if sd == 0.0 {
        return Err(FadingError::Degenerate);
    }
    let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Weighted sums with weights exp(k (y - y_max)).
    let sums = |k: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &v in &y {
            let w = (k * (v - y_max)).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        (s0, s1, s2)
    };
    let scale_for = |k: f64| {
        let (s0, _, _) = sums(k);
        (mean_ln + y_max + (s0 / n as f64).ln() / k).exp()
    };
    // Profile score 1/k - E_w[y], strictly decreasing in k.
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut k = PI / (sd * 6f64.sqrt());
    for _ in 0..FIT_MAX_ITER {
        let (s0, s1, s2) = sums(k);
        let m1 = s1 / s0;
        let f = 1.0 / k - m1;
        let fp = -1.0 / (k * k) - (s2 / s0 - m1 * m1);
        if f > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - f / fp;
        if !(next >= lo && next <= hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * k };
        }
        let rel = ((next - k) / k).abs();
        k = next;
        if rel < FIT_REL_TOL {
            return Ok(FadingFamily::Weibull { shape: k, scale: scale_for(k) });
        }
    }
    Err(FadingError::NonConvergence {
        family: FamilyKind::Weibull,
        last: FadingFamily::Weibull { shape: k, scale: scale_for(k) },
    })
}

/// Golden-section maximization of `f` on `[a, b]` down to width `tol`.
/// Returns the maximizer and whether the width target was reached.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, bool) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..FIT_MAX_ITER {
        if (b - a).abs() <= tol {
            return (0.5 * (a + b), true);
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    (0.5 * (a + b), false)
}

fn fit_rician(x: &[f64]) -> Result<FadingFamily, FadingError> {
    let n = x.len();
    let m2 = mean(x.iter().map(|v| v * v), n);
    let m4 = mean(x.iter().map(|v| v.powi(4)), n);
    // Moment seed from the mean and variance of the power.
    let g = (m4 - m2 * m2) / (m2 * m2);
    let k0 = if g < 1.0 && g > 0.0 {
        let r = (1.0 - g).sqrt();
        r / (1.0 - r)
    } else {
        0.0
    };
    // The likelihood is stationary along nu^2 + 2 sigma^2 = m2, so the search
    // runs over t = nu / sqrt(m2) in [0, 1), with K = t^2 / (1 - t^2).
    let t_max = 1.0 - 1e-12;
    let family_at = |t: f64| FadingFamily::Rician { k: t * t / (1.0 - t * t), omega: m2 };
    let ll = |t: f64| family_at(t).log_likelihood(x);
    let mut candidates: Vec<f64> = (0..RICIAN_GRID).map(|j| j as f64 / RICIAN_GRID as f64).collect();
    candidates.push((k0 / (k0 + 1.0)).sqrt().min(t_max));
    let mut best_t = 0.0;
    let mut best_ll = f64::NEG_INFINITY;
    for &t in &candidates {
        let v = ll(t);
        if v > best_ll {
            best_ll = v;
            best_t = t;
        }
    }
    let step = 1.0 / RICIAN_GRID as f64;
    let a = (best_t - step).max(0.0);
    let b = (best_t + step).min(t_max);
    let (t, converged) = golden_max(ll, a, b, 1e-10);
    let t = if ll(t) >= best_ll { t } else { best_t };
    if !converged {
        return Err(FadingError::NonConvergence {
            family: FamilyKind::Rician,
            last: family_at(t),
        });
    }
    Ok(family_at(t))
}

fn fit_log_logistic(x: &[f64]) -> Result<FadingFamily, FadingError> {
    let n = x.len();
    let y: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let y_mean = mean(y.iter().copied(), n);
    let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    if sd == 0.0 {
        return Err(FadingError::Degenerate);
    }
    let mut sorted = y.clone();
    sorted.sort_by(f64::total_cmp);
    let (y_lo, y_hi, y_med) = (sorted[0], sorted[n - 1], sorted[n / 2]);

    // Location of the logistic fit on ln x for a fixed scale s, warm-started
    // from the previous solve.
    let last = std::cell::Cell::new(y_med);
    let location = |s: f64| {
        let (mut lo, mut hi) = (y_lo, y_hi);
        let mut mu = last.get();
        for _ in 0..200 {
            let (mut g, mut gp) = (0.0, 0.0);
            for &v in &y {
                let t = ((v - mu) / (2.0 * s)).tanh();
                g += t;
                gp -= (1.0 - t * t) / (2.0 * s);
            }
            if g > 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            let mut next = mu - g / gp;
            if !(next >= lo && next <= hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let done = (next - mu).abs() <= 1e-13 * (1.0 + mu.abs()) || hi - lo <= 1e-13 * (1.0 + mu.abs());
            mu = next;
            if done {
                break;
            }
        }
        last.set(mu);
        mu
    };
    let profile = |u: f64| {
        let s = u.exp();
        let mu = location(s);
        let mut acc = 0.0;
        for &v in &y {
            let z = (v - mu) / s;
            let sp = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
            acc += -s.ln() - v + z - 2.0 * sp;
        }
        acc
    };
    let u0 = (sd * 3f64.sqrt() / PI).ln();
    let (mut a, mut b) = (u0 - 2.0, u0 + 2.0);
    // Widen until the maximum is interior.
    for _ in 0..30 {
        let (fa, fm, fb) = (profile(a), profile(0.5 * (a + b)), profile(b));
        if fa > fm {
            a -= 2.0;
        } else if fb > fm {
            b += 2.0;
        } else {
            break;
        }
    }
    let (u, converged) = golden_max(profile, a, b, FIT_REL_TOL * 0.1);
    let s = u.exp();
    let fam = FadingFamily::LogLogistic {
        scale: location(s).exp(),
        shape: 1.0 / s,
    };
    if !converged {
        return Err(FadingError::NonConvergence {
            family: FamilyKind::LogLogistic,
            last: fam,
        });
    }
    Ok(fam)
}

/// Fits every family and selects the largest log-likelihood. Near-ties
/// (relative gap below 1e-9) go to the earlier family in [`FamilyKind::ALL`],
/// which lists fewer parameters first.
pub fn best_fit(samples: &[f64]) -> Result<BestFit, FadingError> {
    validate_samples(samples)?;
    let mut fits = Vec::new();
    let mut excluded = Vec::new();
    for kind in FamilyKind::ALL {
        match fit_family(kind, samples) {
            Ok(fit) => fits.push(fit),
            Err(e) => excluded.push(ExcludedFamily {
                family: kind,
                reason: e.to_string(),
            }),
        }
    }
    let mut best: Option<&FadingFit> = None;
    for fit in &fits {
        best = match best {
            None => Some(fit),
            Some(b) => {
                let tol = 1e-9 * b.log_likelihood.abs().max(1.0);
                let better = fit.log_likelihood > b.log_likelihood + tol
                    || (fit.log_likelihood >= b.log_likelihood - tol
                        && fit.family.kind().n_params() < b.family.kind().n_params());
                Some(if better { fit } else { b })
            }
        };
    }
    let Some(best) = best.cloned() else {
        let reasons: Vec<String> = excluded.iter().map(|e| format!("{}: {}", e.family, e.reason)).collect();
        return Err(FadingError::NoFit(reasons.join("; ")));
    };
    let worse_than_rayleigh = fits.iter().find_map(is_worse_than_rayleigh);
    Ok(BestFit {
        best,
        fits,
        excluded,
        worse_than_rayleigh,
    })
}

/// For a Nakagami fit, whether its shape indicates fading more severe than
/// Rayleigh. `None` for other families.
pub fn is_worse_than_rayleigh(fit: &FadingFit) -> Option<bool> {
    match fit.family {
        FadingFamily::Nakagami { mu, .. } => Some(mu < 1.0),
        _ => None,
    }
}

/// `n` independent draws from `family`.
pub fn sample_family<R: Rng + ?Sized>(family: &FadingFamily, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| family.sample(rng)).collect()
}
