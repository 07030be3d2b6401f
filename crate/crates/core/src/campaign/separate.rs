use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::channel::LinkGeometry;

/// One path-loss observation split into its large- and small-scale parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PLSample {
    pub geom: LinkGeometry,
    pub pl_instantaneous: f64,
    pub pl_large_scale: f64,
    pub small_scale: f64,
}

impl PLSample {
    /// A sample whose whole path loss is treated as large-scale.
    pub fn without_small_scale(geom: LinkGeometry, pl: f64) -> Self {
        Self {
            geom,
            pl_instantaneous: pl,
            pl_large_scale: pl,
            small_scale: 0.0,
        }
    }
}

/// Moving-window separation of small-scale fading.
///
/// Each sample's large-scale value is the arithmetic mean (in dB) of every
/// sample at the same flying height whose `d3d` lies within
/// `wavelength / 2` of its own; passes over the same distance are merged.
/// Output order follows the input.
pub fn separate_small_scale(
    samples: &[(LinkGeometry, f64)],
    wavelength: f64,
) -> Result<Vec<PLSample>, PipelineError> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(PipelineError::InvalidWavelength(wavelength));
    }
    if samples.is_empty() {
        return Err(PipelineError::Empty);
    }
    let half = wavelength / 2.0;

    // Group by exact height, then by distance inside each group.
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        let (ga, gb) = (samples[a].0, samples[b].0);
        ga.h.total_cmp(&gb.h).then(ga.d3d.total_cmp(&gb.d3d)).then(a.cmp(&b))
    });

    let mut large = vec![0.0; samples.len()];
    let mut start = 0;
    while start < order.len() {
        let h = samples[order[start]].0.h;
        let mut end = start;
        while end < order.len() && samples[order[end]].0.h == h {
            end += 1;
        }
        window_means(&order[start..end], samples, half, &mut large);
        start = end;
    }

    Ok(samples
        .iter()
        .zip(large)
        .map(|(&(geom, pl), pl_large_scale)| PLSample {
            geom,
            pl_instantaneous: pl,
            pl_large_scale,
            small_scale: pl - pl_large_scale,
        })
        .collect())
}

/// Two-pointer sweep over one height group sorted by distance. Sums are taken
/// relative to the group's first value to keep prefix sums small.
fn window_means(group: &[usize], samples: &[(LinkGeometry, f64)], half: f64, out: &mut [f64]) {
    let reference = samples[group[0]].1;
    let mut prefix = Vec::with_capacity(group.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &i in group {
        acc += samples[i].1 - reference;
        prefix.push(acc);
    }
    let d = |k: usize| samples[group[k]].0.d3d;
    let (mut lo, mut hi) = (0usize, 0usize);
    for k in 0..group.len() {
        while (d(k) - d(lo)).abs() > half {
            lo += 1;
        }
        if hi < k {
            hi = k;
        }
        while hi + 1 < group.len() && (d(hi + 1) - d(k)).abs() <= half {
            hi += 1;
        }
        let count = (hi - lo + 1) as f64;
        out[group[k]] = reference + (prefix[hi + 1] - prefix[lo]) / count;
    }
}
