use std::f64::consts::LN_2;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal, Weibull};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use super::special::{ln_bessel_i0, ln_gamma};
use super::FadingError;

/// Envelope family identifiers, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Rayleigh,
    Nakagami,
    Weibull,
    Rician,
    LogLogistic,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Rayleigh,
        FamilyKind::Nakagami,
        FamilyKind::Weibull,
        FamilyKind::Rician,
        FamilyKind::LogLogistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Rayleigh => "rayleigh",
            FamilyKind::Nakagami => "nakagami",
            FamilyKind::Weibull => "weibull",
            FamilyKind::Rician => "rician",
            FamilyKind::LogLogistic => "log-logistic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    pub fn n_params(self) -> usize {
        match self {
            FamilyKind::Rayleigh => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized envelope distribution on `x > 0`.
///
/// Rician uses `k = nu^2 / (2 sigma^2)` and `omega = nu^2 + 2 sigma^2`.
/// Log-logistic uses scale `alpha` and shape `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum FadingFamily {
    Rayleigh { sigma: f64 },
    Nakagami { mu: f64, omega: f64 },
    Weibull { shape: f64, scale: f64 },
    Rician { k: f64, omega: f64 },
    LogLogistic { scale: f64, shape: f64 },
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

impl FadingFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FadingFamily::Rayleigh { .. } => FamilyKind::Rayleigh,
            FadingFamily::Nakagami { .. } => FamilyKind::Nakagami,
            FadingFamily::Weibull { .. } => FamilyKind::Weibull,
            FadingFamily::Rician { .. } => FamilyKind::Rician,
            FadingFamily::LogLogistic { .. } => FamilyKind::LogLogistic,
        }
    }

    /// Parameter values in declaration order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            FadingFamily::Rayleigh { sigma } => vec![sigma],
            FadingFamily::Nakagami { mu, omega } => vec![mu, omega],
            FadingFamily::Weibull { shape, scale } => vec![shape, scale],
            FadingFamily::Rician { k, omega } => vec![k, omega],
            FadingFamily::LogLogistic { scale, shape } => vec![scale, shape],
        }
    }

    /// Rebuilds a family from its parameter vector (declaration order).
    pub fn from_params(kind: FamilyKind, p: &[f64]) -> Result<Self, FadingError> {
        let bad = |reason: &str| FadingError::InvalidParameters { family: kind, reason: reason.into() };
        if p.len() != kind.n_params() {
            return Err(bad("wrong parameter count"));
        }
        let fam = match kind {
            FamilyKind::Rayleigh => FadingFamily::Rayleigh { sigma: p[0] },
            FamilyKind::Nakagami => FadingFamily::Nakagami { mu: p[0], omega: p[1] },
            FamilyKind::Weibull => FadingFamily::Weibull { shape: p[0], scale: p[1] },
            FamilyKind::Rician => FadingFamily::Rician { k: p[0], omega: p[1] },
            FamilyKind::LogLogistic => FadingFamily::LogLogistic { scale: p[0], shape: p[1] },
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<(), FadingError> {
        let ok = match *self {
            FadingFamily::Rician { k, omega } => k.is_finite() && k >= 0.0 && omega.is_finite() && omega > 0.0,
            _ => self.params().iter().all(|v| v.is_finite() && *v > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(FadingError::InvalidParameters {
                family: self.kind(),
                reason: format!("parameters {:?} out of domain", self.params()),
            })
        }
    }

    /// Log density; `-inf` for `x <= 0`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        let lx = x.ln();
        match *self {
            FadingFamily::Rayleigh { sigma } => {
                let s2 = sigma * sigma;
                lx - s2.ln() - x * x / (2.0 * s2)
            }
            FadingFamily::Nakagami { mu, omega } => {
                LN_2 - ln_gamma(mu) + mu * (mu / omega).ln() + (2.0 * mu - 1.0) * lx - mu * x * x / omega
            }
            FadingFamily::Weibull { shape, scale } => {
                let z = lx - scale.ln();
                shape.ln() - scale.ln() + (shape - 1.0) * z - (shape * z).exp()
            }
            FadingFamily::Rician { k, omega } => {
                let (nu, s2) = rician_nu_sigma2(k, omega);
                lx - s2.ln() - (x * x + nu * nu) / (2.0 * s2) + ln_bessel_i0(x * nu / s2)
            }
            FadingFamily::LogLogistic { scale, shape } => {
                let z = shape * (lx - scale.ln());
                shape.ln() - scale.ln() + (shape - 1.0) / shape * z - 2.0 * softplus(z)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn log_likelihood(&self, samples: &[f64]) -> f64 {
        samples.iter().map(|&x| self.ln_pdf(x)).sum()
    }

    /// Median envelope value.
    pub fn median(&self) -> f64 {
        match *self {
            FadingFamily::Rayleigh { sigma } => sigma * (2.0 * LN_2).sqrt(),
            FadingFamily::Nakagami { mu, omega } => {
                let g = statrs::distribution::Gamma::new(mu, mu / omega).expect("validated parameters");
                g.inverse_cdf(0.5).sqrt()
            }
            FadingFamily::Weibull { shape, scale } => scale * LN_2.powf(1.0 / shape),
            FadingFamily::Rician { .. } => self.numeric_median(),
            FadingFamily::LogLogistic { scale, .. } => scale,
        }
    }

    fn numeric_median(&self) -> f64 {
        // Upper integration bound well past the bulk of the distribution.
        let omega = match *self {
            FadingFamily::Rician { omega, .. } => omega,
            _ => unreachable!(),
        };
        let hi = 8.0 * omega.sqrt();
        let n = 20_000;
        let h = hi / n as f64;
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        // Cumulative Simpson on half steps.
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            acc += h / 6.0 * (self.pdf(a) + 4.0 * self.pdf(a + h / 2.0) + self.pdf(a + h));
            cdf.push(acc);
        }
        let total = acc;
        let target = 0.5 * total;
        let idx = cdf.partition_point(|&c| c < target).max(1);
        // Refine inside the bracketing step by bisection on a local Simpson integral.
        let (mut lo, mut up) = ((idx - 1) as f64 * h, idx as f64 * h);
        let base = cdf[idx - 1];
        let a0 = lo;
        for _ in 0..60 {
            let mid = 0.5 * (lo + up);
            let w = mid - a0;
            let part = w / 6.0 * (self.pdf(a0) + 4.0 * self.pdf(a0 + w / 2.0) + self.pdf(mid));
            if base + part < target {
                lo = mid;
            } else {
                up = mid;
            }
        }
        0.5 * (lo + up)
    }

    /// One envelope draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingFamily::Rayleigh { sigma } => {
                let u: f64 = rng.sample(Open01);
                sigma * (-2.0 * u.ln()).sqrt()
            }
            FadingFamily::Nakagami { mu, omega } => {
                let g = Gamma::new(mu, omega / mu).expect("validated parameters");
                g.sample(rng).sqrt()
            }
            FadingFamily::Weibull { shape, scale } => {
                Weibull::new(scale, shape).expect("validated parameters").sample(rng)
            }
            FadingFamily::Rician { k, omega } => {
                let (nu, s2) = rician_nu_sigma2(k, omega);
                let s = s2.sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (nu + s * re).hypot(s * im)
            }
            FadingFamily::LogLogistic { scale, shape } => {
                let u: f64 = rng.sample(Open01);
                scale * (u / (1.0 - u)).powf(1.0 / shape)
            }
        }
    }
}

/// Line-of-sight amplitude and per-component diffuse variance of a Rician law.
pub(crate) fn rician_nu_sigma2(k: f64, omega: f64) -> (f64, f64) {
    let nu2 = k * omega / (k + 1.0);
    let s2 = omega / (2.0 * (k + 1.0));
    (nu2.sqrt(), s2)
}
