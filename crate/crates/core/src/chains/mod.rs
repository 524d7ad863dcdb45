//! Regressor chains and their inference regimes.
//!
//! A chain orders the targets and fits one model per stage; stage `j` sees the
//! inputs plus the true values of the targets earlier in the order. Inference is
//! either greedy (point predictions plugged forward), Monte Carlo (ancestral
//! sampling scored by the same density), or a particle filter that proposes with
//! a sampler `f_j` fitted on the earlier targets only and reweights with an
//! evaluator `ℓ_j` fitted with the inputs.

mod cloud;
mod greedy;
mod independent;
mod mc;
mod method;
mod pf;

use ndarray::{concatenate, Axis};

pub use cloud::{
    estimate_map, estimate_mmse, CloudWarning, Estimator, ParticleCloud, Prediction, ResampleEvent,
};
pub use greedy::predict_greedy;
pub use independent::{fit_independent, predict_independent, IndependentModel};
pub use mc::{mc_cloud, predict_mc};
pub use method::{fit_method, FittedMethod, Method, MethodConfig};
pub use pf::{pf_cloud, predict_pf, PfConfig};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::{fit_learner, ConditionalDensity, FittedModel, Learner, LearnerParams};
use crate::rng::derive_seed;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Point,
    Density,
    ParticleFilter,
}

/// What a chain is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub mode: ChainMode,
    /// Point model, density, or (particle filter) evaluator.
    pub learner: Learner,
    /// Particle-filter proposal learner.
    pub sampler: Option<Learner>,
    /// Target order; identity when `None`.
    pub order: Option<Vec<usize>>,
    /// Fit the particle-filter sampler with the inputs as well. When the sampler and
    /// evaluator learners coincide this makes them the same fitted model.
    pub sampler_uses_inputs: bool,
}

impl ChainSpec {
    pub fn point(learner: Learner) -> Self {
        Self {
            mode: ChainMode::Point,
            learner,
            sampler: None,
            order: None,
            sampler_uses_inputs: false,
        }
    }

    pub fn density(learner: Learner) -> Self {
        Self {
            mode: ChainMode::Density,
            ..Self::point(learner)
        }
    }

    pub fn particle_filter(sampler: Learner, evaluator: Learner) -> Self {
        Self {
            mode: ChainMode::ParticleFilter,
            learner: evaluator,
            sampler: Some(sampler),
            order: None,
            sampler_uses_inputs: false,
        }
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerInputs {
    /// Earlier targets only.
    TargetsOnly,
    /// Inputs followed by earlier targets.
    Full,
}

#[derive(Debug, Clone)]
pub struct Stage<T> {
    /// Dataset column this stage predicts.
    pub target: usize,
    pub model: FittedModel<T>,
    /// Separate proposal model; `None` means the stage model proposes.
    pub sampler: Option<FittedModel<T>>,
    pub sampler_inputs: SamplerInputs,
}

#[derive(Debug, Clone)]
pub struct ChainModel<T> {
    pub order: Vec<usize>,
    pub n_features: usize,
    pub mode: ChainMode,
    pub stages: Vec<Stage<T>>,
}

pub fn validate_order(order: &[usize], n_targets: usize) -> Result<()> {
    let mut seen = vec![false; n_targets];
    if order.len() != n_targets {
        return Err(Error::InvalidArgument(format!(
            "order has {} entries for {n_targets} targets",
            order.len()
        )));
    }
    for &j in order {
        if j >= n_targets || seen[j] {
            return Err(Error::InvalidArgument(format!(
                "{order:?} is not a permutation"
            )));
        }
        seen[j] = true;
    }
    Ok(())
}

/// Stage seed shared with independent models so that a one-stage chain and an
/// independent model fitted with the same seed coincide.
pub(crate) fn stage_seed(seed: u64, target: usize, role: u64) -> u64 {
    derive_seed(seed, &[target as u64, role])
}

pub fn fit_chain<T: Real>(
    train: &Dataset<T>,
    spec: &ChainSpec,
    params: &LearnerParams<T>,
    seed: u64,
) -> Result<ChainModel<T>> {
    let l = train.n_targets();
    let order = match &spec.order {
        Some(o) => {
            validate_order(o, l)?;
            o.clone()
        }
        None => (0..l).collect(),
    };
    match spec.mode {
        ChainMode::Point => {}
        ChainMode::Density => {
            if !spec.learner.is_density() {
                return Err(Error::Config(format!(
                    "learner {} has no density and cannot be used for Monte Carlo chains",
                    spec.learner
                )));
            }
        }
        ChainMode::ParticleFilter => {
            let sampler = spec.sampler.ok_or_else(|| {
                Error::Config("particle filter chain needs a sampler learner".into())
            })?;
            if !sampler.is_density() {
                return Err(Error::Config(format!(
                    "sampler {sampler} cannot be sampled from"
                )));
            }
            if !spec.learner.is_density() {
                return Err(Error::Config(format!(
                    "evaluator {} has no density to evaluate",
                    spec.learner
                )));
            }
        }
    }

    let x = train.x();
    let y = train.y();
    let mut stages = Vec::with_capacity(l);
    for (j, &target) in order.iter().enumerate() {
        let prev = y.select(Axis(1), &order[..j]);
        let z = concatenate(Axis(1), &[x.view(), prev.view()])
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        let yj: Vec<T> = y.column(target).to_vec();
        let model = fit_learner(
            spec.learner,
            z.view(),
            &yj,
            params,
            stage_seed(seed, target, 0),
        )?;
        let (sampler, sampler_inputs) = match (spec.mode, spec.sampler) {
            (ChainMode::ParticleFilter, Some(s)) if spec.sampler_uses_inputs => {
                if s == spec.learner {
                    (None, SamplerInputs::Full)
                } else {
                    let m = fit_learner(s, z.view(), &yj, params, stage_seed(seed, target, 1))?;
                    (Some(m), SamplerInputs::Full)
                }
            }
            (ChainMode::ParticleFilter, Some(s)) => {
                let m = fit_learner(s, prev.view(), &yj, params, stage_seed(seed, target, 1))?;
                (Some(m), SamplerInputs::TargetsOnly)
            }
            _ => (None, SamplerInputs::Full),
        };
        stages.push(Stage {
            target,
            model,
            sampler,
            sampler_inputs,
        });
    }
    Ok(ChainModel {
        order,
        n_features: train.n_features(),
        mode: spec.mode,
        stages,
    })
}

impl<T: Real> ChainModel<T> {
    pub fn n_targets(&self) -> usize {
        self.order.len()
    }

    /// `(x, path[order[0]], …, path[order[j-1]])`, with `path` in target order.
    pub fn stage_input(&self, x: &[T], path: &[T], j: usize) -> Vec<T> {
        let mut z = Vec::with_capacity(x.len() + j);
        z.extend_from_slice(x);
        z.extend(self.order[..j].iter().map(|&t| path[t]));
        z
    }

    pub fn sampler_input(&self, x: &[T], path: &[T], j: usize) -> Vec<T> {
        match self.stages[j].sampler_inputs {
            SamplerInputs::Full => self.stage_input(x, path, j),
            SamplerInputs::TargetsOnly => self.order[..j].iter().map(|&t| path[t]).collect(),
        }
    }

    pub fn evaluator(&self, j: usize) -> Result<&dyn ConditionalDensity<T>> {
        self.stages[j]
            .model
            .as_density()
            .ok_or_else(|| Error::Config(format!("stage {j} model has no density")))
    }

    pub fn sampler(&self, j: usize) -> Result<&dyn ConditionalDensity<T>> {
        match &self.stages[j].sampler {
            Some(s) => s
                .as_density()
                .ok_or_else(|| Error::Config(format!("stage {j} sampler has no density"))),
            None => self.evaluator(j),
        }
    }

    pub(crate) fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::ShapeMismatch(format!(
                "chain expects {} inputs, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synth;

    #[test]
    fn stage_two_sees_one_extra_column() {
        let d = generate_synth::<f64>(60, 0.03, 1).unwrap();
        let c = fit_chain(
            &d,
            &ChainSpec::point(Learner::BayesianLinear),
            &LearnerParams::default(),
            0,
        )
        .unwrap();
        match &c.stages[1].model {
            FittedModel::Blr(m) => assert_eq!(m.weight_mean.len(), 1 + d.n_features() + 1),
            _ => unreachable!(),
        }
        assert_eq!(c.stage_input(&[0.5], &[1.0, 2.0], 1), vec![0.5, 1.0]);
    }

    #[test]
    fn kernel_ridge_density_is_a_config_error() {
        let d = generate_synth::<f64>(20, 0.03, 1).unwrap();
        let r = fit_chain(
            &d,
            &ChainSpec::density(Learner::KernelRidge),
            &LearnerParams::default(),
            0,
        );
        assert!(matches!(r, Err(Error::Config(_))));
        let r = fit_chain(
            &d,
            &ChainSpec::particle_filter(Learner::DiscretizedForest, Learner::KernelRidge),
            &LearnerParams::default(),
            0,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn particle_filter_sampler_ignores_inputs() {
        let d = generate_synth::<f64>(80, 0.03, 2).unwrap();
        let c = fit_chain(
            &d,
            &ChainSpec::particle_filter(Learner::DiscretizedForest, Learner::BayesianLinear),
            &LearnerParams::default(),
            3,
        )
        .unwrap();
        assert_eq!(c.stages[0].sampler_inputs, SamplerInputs::TargetsOnly);
        assert!(c.sampler_input(&[0.3], &[0.9, 0.0], 0).is_empty());
        assert_eq!(c.sampler_input(&[0.3], &[0.9, 0.0], 1), vec![0.9]);
    }

    #[test]
    fn order_validation() {
        assert!(validate_order(&[1, 0, 2], 3).is_ok());
        assert!(validate_order(&[1, 1, 2], 3).is_err());
        assert!(validate_order(&[0, 1], 3).is_err());
    }
}
