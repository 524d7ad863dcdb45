use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::{fit_learner, FittedModel, Learner, LearnerParams};
use crate::scalar::Real;

use super::stage_seed;

/// One model per target, each seeing only the inputs.
#[derive(Debug, Clone)]
pub struct IndependentModel<T> {
    pub n_features: usize,
    pub models: Vec<FittedModel<T>>,
}

pub fn fit_independent<T: Real>(
    train: &Dataset<T>,
    learner: Learner,
    params: &LearnerParams<T>,
    seed: u64,
) -> Result<IndependentModel<T>> {
    let x = train.x();
    let models = (0..train.n_targets())
        .map(|t| {
            let yt: Vec<T> = train.y().column(t).to_vec();
            fit_learner(learner, x.view(), &yt, params, stage_seed(seed, t, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndependentModel {
        n_features: train.n_features(),
        models,
    })
}

pub fn predict_independent<T: Real>(model: &IndependentModel<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != model.n_features {
        return Err(Error::ShapeMismatch(format!(
            "model expects {} inputs, got {}",
            model.n_features,
            x.len()
        )));
    }
    model
        .models
        .iter()
        .enumerate()
        .map(|(t, m)| {
            let v = m.predict(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinitePrediction {
                    stage: t,
                    target: t,
                })
            }
        })
        .collect()
}
