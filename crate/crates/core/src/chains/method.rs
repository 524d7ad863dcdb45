use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerParams};
use crate::scalar::Real;

use super::{
    fit_chain, fit_independent, predict_greedy, predict_independent, predict_mc, predict_pf,
    ChainModel, ChainSpec, Estimator, IndependentModel, PfConfig, Prediction,
};

/// A method key such as `IR.B`, `RC.K`, `MC.D` or `PF.R/B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Independent(Learner),
    Greedy(Learner),
    MonteCarlo(Learner),
    ParticleFilter {
        sampler: Learner,
        evaluator: Learner,
    },
}

impl Method {
    pub fn is_sampling(self) -> bool {
        matches!(self, Self::MonteCarlo(_) | Self::ParticleFilter { .. })
    }

    pub fn check(self) -> Result<()> {
        match self {
            Self::Independent(_) | Self::Greedy(_) => Ok(()),
            Self::MonteCarlo(l) if !l.is_density() => Err(Error::Config(format!(
                "{self}: learner {l} has no density to sample"
            ))),
            Self::ParticleFilter { sampler, evaluator } => {
                for l in [sampler, evaluator] {
                    if !l.is_density() {
                        return Err(Error::Config(format!("{self}: learner {l} has no density")));
                    }
                }
                Ok(())
            }
            Self::MonteCarlo(_) => Ok(()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Independent(l) => write!(f, "IR.{l}"),
            Self::Greedy(l) => write!(f, "RC.{l}"),
            Self::MonteCarlo(l) => write!(f, "MC.{l}"),
            Self::ParticleFilter { sampler, evaluator } => write!(f, "PF.{sampler}/{evaluator}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownMethod(s.to_string());
        let (family, rest) = s.trim().split_once('.').ok_or_else(unknown)?;
        let learner = |k: &str| k.parse::<Learner>().map_err(|_| unknown());
        let method = match family {
            "IR" => Self::Independent(learner(rest)?),
            "RC" => Self::Greedy(learner(rest)?),
            "MC" => Self::MonteCarlo(learner(rest)?),
            "PF" => {
                let (a, b) = rest.split_once('/').ok_or_else(unknown)?;
                Self::ParticleFilter {
                    sampler: learner(a)?,
                    evaluator: learner(b)?,
                }
            }
            _ => return Err(unknown()),
        };
        method.check()?;
        Ok(method)
    }
}

/// Everything needed to fit and run a method besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig<T> {
    pub learner: LearnerParams<T>,
    /// Particle-filter settings; `particles` is also the Monte Carlo sample size.
    pub pf: PfConfig<T>,
    pub estimator: Estimator,
    pub order: Option<Vec<usize>>,
    pub sampler_uses_inputs: bool,
}

impl<T: Real> Default for MethodConfig<T> {
    fn default() -> Self {
        Self {
            learner: LearnerParams::default(),
            pf: PfConfig::default(),
            estimator: Estimator::Map,
            order: None,
            sampler_uses_inputs: false,
        }
    }
}

#[derive(Debug, Clone)]
enum Fitted<T> {
    Independent(IndependentModel<T>),
    Chain(ChainModel<T>),
}

/// A fitted method ready to predict.
#[derive(Debug, Clone)]
pub struct FittedMethod<T> {
    pub method: Method,
    pub config: MethodConfig<T>,
    fitted: Fitted<T>,
}

pub fn fit_method<T: Real>(
    method: Method,
    train: &Dataset<T>,
    config: &MethodConfig<T>,
    seed: u64,
) -> Result<FittedMethod<T>> {
    method.check()?;
    if method.is_sampling() {
        config.pf.validate()?;
    }
    let with_order = |spec: ChainSpec| ChainSpec {
        order: config.order.clone(),
        sampler_uses_inputs: config.sampler_uses_inputs,
        ..spec
    };
    let fitted = match method {
        Method::Independent(l) => {
            Fitted::Independent(fit_independent(train, l, &config.learner, seed)?)
        }
        Method::Greedy(l) => Fitted::Chain(fit_chain(
            train,
            &with_order(ChainSpec::point(l)),
            &config.learner,
            seed,
        )?),
        Method::MonteCarlo(l) => Fitted::Chain(fit_chain(
            train,
            &with_order(ChainSpec::density(l)),
            &config.learner,
            seed,
        )?),
        Method::ParticleFilter { sampler, evaluator } => Fitted::Chain(fit_chain(
            train,
            &with_order(ChainSpec::particle_filter(sampler, evaluator)),
            &config.learner,
            seed,
        )?),
    };
    Ok(FittedMethod {
        method,
        config: config.clone(),
        fitted,
    })
}

impl<T: Real> FittedMethod<T> {
    pub fn chain(&self) -> Option<&ChainModel<T>> {
        match &self.fitted {
            Fitted::Chain(c) => Some(c),
            Fitted::Independent(_) => None,
        }
    }

    pub fn predict(&self, x: &[T], rng: &mut dyn RngCore) -> Result<Prediction<T>> {
        match (&self.fitted, self.method) {
            (Fitted::Independent(m), _) => Ok(Prediction::point(predict_independent(m, x)?)),
            (Fitted::Chain(c), Method::Greedy(_)) => Ok(Prediction::point(predict_greedy(c, x)?)),
            (Fitted::Chain(c), Method::MonteCarlo(_)) => {
                predict_mc(c, x, self.config.pf.particles, self.config.estimator, rng)
            }
            (Fitted::Chain(c), _) => predict_pf(c, x, &self.config.pf, self.config.estimator, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for k in ["IR.B", "RC.K", "MC.D", "MC.R", "PF.R/B", "PF.N/D", "RC.O"] {
            assert_eq!(k.parse::<Method>().unwrap().to_string(), k);
        }
        assert_eq!(
            "MC.KDE".parse::<Method>().unwrap(),
            Method::MonteCarlo(Learner::KernelDensity)
        );
    }

    #[test]
    fn bad_keys() {
        assert!(matches!(
            "XX.B".parse::<Method>(),
            Err(Error::UnknownMethod(_))
        ));
        assert!(matches!(
            "PF.R".parse::<Method>(),
            Err(Error::UnknownMethod(_))
        ));
        assert!(matches!(
            "IR.Z".parse::<Method>(),
            Err(Error::UnknownMethod(_))
        ));
        assert!(matches!("MC.K".parse::<Method>(), Err(Error::Config(_))));
        assert!(matches!("PF.R/K".parse::<Method>(), Err(Error::Config(_))));
    }
}
