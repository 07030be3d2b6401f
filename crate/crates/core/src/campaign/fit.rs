use serde::{Deserialize, Serialize};

use super::{PLSample, PipelineError};
use crate::channel::{mean_path_loss, LinkGeometry, PathLossModel};
use crate::defaults;

/// Least-squares fit of the log-distance model with its residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: PathLossModel,
    /// Geometry of each residual, in input order.
    pub geoms: Vec<LinkGeometry>,
    /// `pl_large_scale - fitted mean`, dB.
    pub residuals: Vec<f64>,
    pub sample_count: usize,
    pub rse_by_bin: RseReport,
}

/// Ordinary least squares of `pl_large_scale` on `[1, 10 log10(d3d), -h]`.
///
/// The shadow-fading spread is the sample standard deviation of the
/// residuals. Sums run over a canonical (height, distance, value) ordering,
/// so the result does not depend on the order of `samples`.
pub fn fit_model(samples: &[PLSample], name: &str) -> Result<FitResult, PipelineError> {
    const NEEDED: usize = 4;
    if samples.len() < NEEDED {
        return Err(PipelineError::TooFewSamples { needed: NEEDED, got: samples.len() });
    }
    for s in samples {
        s.geom.validate()?;
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&samples[a], &samples[b]);
        sa.geom
            .h
            .total_cmp(&sb.geom.h)
            .then(sa.geom.d3d.total_cmp(&sb.geom.d3d))
            .then(sa.pl_large_scale.total_cmp(&sb.pl_large_scale))
    });
    let x1 = |i: usize| 10.0 * samples[i].geom.d3d.log10();
    let x2 = |i: usize| -samples[i].geom.h;
    let y = |i: usize| samples[i].pl_large_scale;

    let first = &samples[order[0]].geom;
    if order.iter().all(|&i| samples[i].geom.h == first.h) {
        return Err(PipelineError::Unidentifiable {
            parameter: "eta",
            reason: format!("regressor -h is constant (every sample at h = {} m)", first.h),
        });
    }
    if order.iter().all(|&i| samples[i].geom.d3d == first.d3d) {
        return Err(PipelineError::Unidentifiable {
            parameter: "gamma",
            reason: format!("regressor 10 log10(d3d) is constant (d3d = {} m)", first.d3d),
        });
    }

    let n = samples.len() as f64;
    let (mut m1, mut m2, mut my) = (0.0, 0.0, 0.0);
    for &i in &order {
        m1 += x1(i);
        m2 += x2(i);
        my += y(i);
    }
    m1 /= n;
    m2 /= n;
    my /= n;
    let (mut s11, mut s12, mut s22, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &i in &order {
        let (a, b, c) = (x1(i) - m1, x2(i) - m2, y(i) - my);
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        s1y += a * c;
        s2y += b * c;
    }
    let det = s11 * s22 - s12 * s12;
    if det <= 1e-12 * s11 * s22 {
        return Err(PipelineError::Unidentifiable {
            parameter: "eta",
            reason: "regressors 10 log10(d3d) and -h are collinear".into(),
        });
    }
    let gamma = (s22 * s1y - s12 * s2y) / det;
    let eta = (s11 * s2y - s12 * s1y) / det;
    let intercept = my - gamma * m1 - eta * m2;

    let residuals: Vec<f64> = (0..samples.len())
        .map(|i| y(i) - (intercept + gamma * x1(i) + eta * x2(i)))
        .collect();
    let mean_r = order.iter().map(|&i| residuals[i]).sum::<f64>() / n;
    let var = order.iter().map(|&i| (residuals[i] - mean_r).powi(2)).sum::<f64>() / (n - 1.0);

    let model = PathLossModel::new(name, intercept, gamma, eta, var.sqrt())?;
    let geoms: Vec<LinkGeometry> = samples.iter().map(|s| s.geom).collect();
    let rse_by_bin = rse_report(&model, &geoms, &RseBinning::default());
    Ok(FitResult {
        model,
        geoms,
        residuals,
        sample_count: samples.len(),
        rse_by_bin,
    })
}

/// Distance bins of fixed width at exact flying heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RseBinning {
    pub bin_width_m: f64,
    pub heights_m: Vec<f64>,
}

impl Default for RseBinning {
    fn default() -> Self {
        Self {
            bin_width_m: defaults::RSE_BIN_WIDTH_M,
            heights_m: defaults::RSE_HEIGHTS_M.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RseRow {
    pub h_m: f64,
    pub d_lo_m: f64,
    pub d_hi_m: f64,
    pub count: usize,
    /// Mean path loss at the bin center.
    pub pl_m_db: f64,
    pub rse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RseReport {
    pub rows: Vec<RseRow>,
    pub average: f64,
    /// Grid bins between the nearest and farthest sample that hold no sample.
    pub empty_bins: usize,
    /// Samples whose height matches none of the binning heights.
    pub unbinned: usize,
}

/// `sigma_sf / (sqrt(M) * PL_m)`.
pub fn rse_value(sigma_sf: f64, count: usize, pl_m: f64) -> f64 {
    sigma_sf / ((count as f64).sqrt() * pl_m)
}

pub fn rse(fit: &FitResult, bins: &RseBinning) -> RseReport {
    rse_report(&fit.model, &fit.geoms, bins)
}

fn rse_report(model: &PathLossModel, geoms: &[LinkGeometry], bins: &RseBinning) -> RseReport {
    const HEIGHT_TOL: f64 = 1e-6;
    let width = bins.bin_width_m;
    let mut rows = Vec::new();
    let mut empty_bins = 0;
    let mut matched = 0;
    for &h in &bins.heights_m {
        let cells: Vec<i64> = geoms
            .iter()
            .filter(|g| (g.h - h).abs() <= HEIGHT_TOL)
            .map(|g| (g.d3d / width).floor() as i64)
            .collect();
        if cells.is_empty() {
            continue;
        }
        matched += cells.len();
        let lo = *cells.iter().min().unwrap();
        let hi = *cells.iter().max().unwrap();
        let mut counts = vec![0usize; (hi - lo + 1) as usize];
        for c in &cells {
            counts[(c - lo) as usize] += 1;
        }
        for (k, &count) in counts.iter().enumerate() {
            if count == 0 {
                empty_bins += 1;
                continue;
            }
            let d_lo = (lo + k as i64) as f64 * width;
            let center = (d_lo + width / 2.0).max(defaults::REFERENCE_DISTANCE_M);
            let pl_m = mean_path_loss(model, LinkGeometry { d3d: center, h })
                .expect("bin center clamped to the reference distance");
            rows.push(RseRow {
                h_m: h,
                d_lo_m: d_lo,
                d_hi_m: d_lo + width,
                count,
                pl_m_db: pl_m,
                rse: rse_value(model.sigma_sf, count, pl_m),
            });
        }
    }
    let average = if rows.is_empty() {
        f64::NAN
    } else {
        rows.iter().map(|r| r.rse).sum::<f64>() / rows.len() as f64
    };
    RseReport {
        rows,
        average,
        empty_bins,
        unbinned: geoms.len() - matched,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub mean_db: f64,
    pub std_db: f64,
    pub min_db: f64,
    pub max_db: f64,
}

/// JSON export of a fit: the model, residual statistics and the RSE table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitExport {
    pub model: PathLossModel,
    pub sample_count: usize,
    pub residuals: ResidualSummary,
    pub rse: RseReport,
}

impl FitResult {
    pub fn export(&self) -> FitExport {
        let n = self.residuals.len() as f64;
        let mean = self.residuals.iter().sum::<f64>() / n;
        FitExport {
            model: self.model.clone(),
            sample_count: self.sample_count,
            residuals: ResidualSummary {
                mean_db: mean,
                std_db: self.model.sigma_sf,
                min_db: self.residuals.iter().copied().fold(f64::INFINITY, f64::min),
                max_db: self.residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            },
            rse: self.rse_by_bin.clone(),
        }
    }

    /// Re-bins the RSE table in place.
    pub fn rebin(&mut self, bins: &RseBinning) {
        self.rse_by_bin = rse(self, bins);
    }
}
