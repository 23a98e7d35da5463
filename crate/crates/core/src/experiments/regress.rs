//! Linear models of red's final skew on initial predictors.

use serde::Serialize;

use super::stats::{ols_fit, RegressionResult};
use super::sweep::ElectionRecord;
use crate::error::{invalid, Result};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegressionModel {
    Majority,
    InfluenceGap,
    /// Majority and influence gap together.
    Joint,
}

impl RegressionModel {
    pub const ALL: [RegressionModel; 3] =
        [RegressionModel::Joint, RegressionModel::Majority, RegressionModel::InfluenceGap];

    pub fn as_str(self) -> &'static str {
        match self {
            RegressionModel::Majority => "majority",
            RegressionModel::InfluenceGap => "influence-gap",
            RegressionModel::Joint => "joint",
        }
    }

    pub fn features(self) -> &'static [&'static str] {
        match self {
            RegressionModel::Majority => &["majority"],
            RegressionModel::InfluenceGap => &["influence_gap"],
            RegressionModel::Joint => &["majority", "influence_gap"],
        }
    }

    fn row(self, r: &ElectionRecord) -> Result<Vec<f64>> {
        let m = r.majority.ok_or_else(|| invalid("regression needs two-party records"))?;
        let g = r.ig[0];
        Ok(match self {
            RegressionModel::Majority => vec![m],
            RegressionModel::InfluenceGap => vec![g],
            RegressionModel::Joint => vec![m, g],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: RegressionModel,
    pub features: Vec<String>,
    #[serde(flatten)]
    pub result: RegressionResult,
}

/// Fit every model on the same seeded split of pooled two-party records,
/// with red's final skew as the target.
pub fn regress_records(
    records: &[ElectionRecord],
    models: &[RegressionModel],
    train_fraction: f64,
    seed: Seed,
) -> Result<Vec<ModelFit>> {
    if records.iter().any(|r| r.party_count() != 2) {
        return Err(invalid("regression needs two-party records"));
    }
    let target: Vec<f64> = records.iter().map(|r| r.final_skew[0]).collect();
    models
        .iter()
        .map(|&model| {
            let rows = records.iter().map(|r| model.row(r)).collect::<Result<Vec<_>>>()?;
            Ok(ModelFit {
                model,
                features: model.features().iter().map(|s| s.to_string()).collect(),
                result: ols_fit(&rows, &target, train_fraction, seed)?,
            })
        })
        .collect()
}
