use serde::{Deserialize, Serialize};

use super::FadingError;
use crate::defaults::FADE_DEPTH_MIN_SAMPLES;

/// Step-function empirical CDF over a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self, FadingError> {
        if values.is_empty() {
            return Err(FadingError::Empty);
        }
        if let Some(index) = values.iter().position(|v| v.is_nan()) {
            return Err(FadingError::NaN { index });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Nearest-rank quantile, `p` in `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        nearest_rank_quantile(&self.sorted, p)
    }

    /// Distinct jump points with the CDF value reached at each.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }

    /// Largest absolute CDF gap to another sample (two-sample KS statistic).
    pub fn ks_distance(&self, other: &EmpiricalCdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0usize, 0usize);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }
}

/// Nearest-rank quantile of an ascending slice: the value of rank
/// `ceil(p n)`, clamped to `[1, n]`.
pub fn nearest_rank_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let n = sorted.len();
    let rank = (p * n as f64 - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[rank - 1]
}

/// Fade statistics of small-scale fade magnitudes in dB (larger is deeper).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadeDepthReport {
    pub level_50_db: f64,
    pub level_99_db: f64,
    /// 99% level minus 50% level.
    pub fade_depth_db: f64,
    pub max_fade_db: f64,
    pub sample_count: usize,
    /// False below the minimum sample count for a meaningful 99% level.
    pub reliable: bool,
}

pub fn fade_depth(fades_db: &[f64]) -> Result<FadeDepthReport, FadingError> {
    let cdf = EmpiricalCdf::new(fades_db)?;
    let level_50_db = cdf.quantile(0.5);
    let level_99_db = cdf.quantile(0.99);
    Ok(FadeDepthReport {
        level_50_db,
        level_99_db,
        fade_depth_db: level_99_db - level_50_db,
        max_fade_db: *cdf.sorted().last().expect("non-empty"),
        sample_count: cdf.len(),
        reliable: cdf.len() >= FADE_DEPTH_MIN_SAMPLES,
    })
}
