use serde::{Deserialize, Serialize};

use super::{PLSample, PipelineError};
use crate::channel::PathLossModel;
use crate::fading::{nearest_rank_quantile, EmpiricalCdf};

/// How well one model's mean path loss predicts a set of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub model: String,
    /// `mean_path_loss - pl_instantaneous` per sample, in input order.
    pub differences_db: Vec<f64>,
    /// Nearest-rank median of `|differences_db|`.
    pub median_abs_diff_db: f64,
    pub mean_diff_db: f64,
}

impl ModelComparison {
    /// Empirical CDF of the signed differences.
    pub fn cdf(&self) -> EmpiricalCdf {
        EmpiricalCdf::new(&self.differences_db).expect("non-empty, finite differences")
    }
}

/// Mean-path-loss prediction error of every model over the samples, with no
/// shadowing term. Output order follows `models`.
pub fn compare_models(
    samples: &[PLSample],
    models: &[PathLossModel],
) -> Result<Vec<ModelComparison>, PipelineError> {
    if samples.is_empty() {
        return Err(PipelineError::Empty);
    }
    models
        .iter()
        .map(|model| {
            model.validate()?;
            let differences_db = samples
                .iter()
                .map(|s| Ok(model.mean_path_loss(s.geom)? - s.pl_instantaneous))
                .collect::<Result<Vec<f64>, PipelineError>>()?;
            let mut abs: Vec<f64> = differences_db.iter().map(|d| d.abs()).collect();
            abs.sort_by(f64::total_cmp);
            let mean_diff_db = differences_db.iter().sum::<f64>() / differences_db.len() as f64;
            Ok(ModelComparison {
                model: model.name.clone(),
                median_abs_diff_db: nearest_rank_quantile(&abs, 0.5),
                mean_diff_db,
                differences_db,
            })
        })
        .collect()
}
