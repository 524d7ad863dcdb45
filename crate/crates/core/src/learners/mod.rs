//! Single-target base models over an augmented input `z = (x, y_1, …, y_{j-1})`.
//!
//! Density models (`B`, `D`, `R`, `N`) can be evaluated and sampled; `K` and the
//! intercept-free least-squares model `O` only give point predictions.

pub mod blr;
pub mod disc;
pub mod forest;
pub mod kde;
pub mod krr;
pub mod ols;
pub mod softmax;

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use rand::RngCore;

pub use blr::{blr_fit, BlrModel};
pub use disc::{
    classifier_fit, disc_fit, discretize_fit, BinSampling, Binner, ClassifierKind, ClassifierModel,
    ClassifierParams, DiscModel,
};
pub use forest::{ForestParams, MaxFeatures, RandomForest};
pub use kde::{kde_fit, Bandwidth, KdeModel, KernelWeights};
pub use krr::{krr_fit, krr_grid_search, KrrGrid, KrrModel};
pub use ols::{ols_fit, LeastSquaresModel};
pub use softmax::{SoftmaxClassifier, SoftmaxParams};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Point prediction for one target.
pub trait Regressor<T: Real> {
    fn predict(&self, z: &[T]) -> T;
}

/// A fitted conditional density `p(y | z)` that can be evaluated and sampled.
pub trait ConditionalDensity<T: Real>: Regressor<T> + Send + Sync {
    fn ln_pdf(&self, z: &[T], y: T) -> T;

    fn sample(&self, z: &[T], rng: &mut dyn RngCore) -> T;

    /// Draw a value and return it with its log-density. Must agree bit-for-bit
    /// with `sample` followed by `ln_pdf` on the same stream.
    fn sample_scored(&self, z: &[T], rng: &mut dyn RngCore) -> (T, T) {
        let y = self.sample(z, rng);
        (y, self.ln_pdf(z, y))
    }

    fn pdf(&self, z: &[T], y: T) -> T {
        self.ln_pdf(z, y).exp()
    }

    /// Natural random-walk step size for this density, if it has one.
    fn proposal_scale(&self) -> Option<T> {
        None
    }
}

/// Index drawn with probability proportional to `weights`.
pub(crate) fn sample_categorical<T: Real>(weights: &[T], rng: &mut dyn RngCore) -> usize {
    let total: T = weights.iter().copied().sum();
    let u = T::unit_uniform(rng) * total;
    let mut acc = T::zero();
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > T::zero() {
            acc += w;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Base-learner keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Learner {
    /// `B`
    BayesianLinear,
    /// `K`
    KernelRidge,
    /// `R`: discretised targets with a random forest.
    DiscretizedForest,
    /// `N`: discretised targets with softmax regression.
    DiscretizedSoftmax,
    /// `D` or `KDE`
    KernelDensity,
    /// `O`: intercept-free least squares.
    LeastSquares,
}

impl Learner {
    pub fn key(self) -> &'static str {
        match self {
            Self::BayesianLinear => "B",
            Self::KernelRidge => "K",
            Self::DiscretizedForest => "R",
            Self::DiscretizedSoftmax => "N",
            Self::KernelDensity => "D",
            Self::LeastSquares => "O",
        }
    }

    pub fn is_density(self) -> bool {
        !matches!(self, Self::KernelRidge | Self::LeastSquares)
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Learner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "B" => Self::BayesianLinear,
            "K" => Self::KernelRidge,
            "R" => Self::DiscretizedForest,
            "N" => Self::DiscretizedSoftmax,
            "D" | "KDE" => Self::KernelDensity,
            "O" => Self::LeastSquares,
            other => return Err(Error::UnknownLearner(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KrrSelection<T> {
    Grid(KrrGrid<T>),
    Fixed { ridge: T, width: T },
}

/// Hyperparameters for every learner; each learner reads only its own fields.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerParams<T> {
    pub prior_precision: T,
    pub n_bins: usize,
    pub bin_sampling: BinSampling,
    pub classifier: ClassifierParams,
    pub bandwidth: Bandwidth<T>,
    pub krr: KrrSelection<T>,
}

impl<T: Real> Default for LearnerParams<T> {
    fn default() -> Self {
        Self {
            prior_precision: T::one(),
            n_bins: 30,
            bin_sampling: BinSampling::Jitter,
            classifier: ClassifierParams::default(),
            bandwidth: Bandwidth::Silverman,
            krr: KrrSelection::Grid(KrrGrid::default()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum FittedModel<T> {
    Blr(BlrModel<T>),
    Krr(KrrModel<T>),
    Disc(DiscModel<T>),
    Kde(KdeModel<T>),
    LeastSquares(LeastSquaresModel<T>),
}

pub fn fit_learner<T: Real>(
    learner: Learner,
    z: ArrayView2<'_, T>,
    y: &[T],
    params: &LearnerParams<T>,
    seed: u64,
) -> Result<FittedModel<T>> {
    Ok(match learner {
        Learner::BayesianLinear => FittedModel::Blr(blr_fit(z, y, params.prior_precision)?),
        Learner::KernelRidge => {
            let (ridge, width) = match &params.krr {
                KrrSelection::Fixed { ridge, width } => (*ridge, *width),
                KrrSelection::Grid(grid) => krr_grid_search(z, y, grid, seed)?,
            };
            FittedModel::Krr(krr_fit(z, y, ridge, width)?)
        }
        Learner::DiscretizedForest | Learner::DiscretizedSoftmax => {
            let kind = if learner == Learner::DiscretizedForest {
                ClassifierKind::RandomForest
            } else {
                ClassifierKind::Softmax
            };
            FittedModel::Disc(disc_fit(
                z,
                y,
                params.n_bins,
                kind,
                &params.classifier,
                params.bin_sampling,
                seed,
            )?)
        }
        Learner::KernelDensity => FittedModel::Kde(kde_fit(z, y, params.bandwidth)?),
        Learner::LeastSquares => FittedModel::LeastSquares(ols_fit(z, y)?),
    })
}

impl<T: Real> FittedModel<T> {
    pub fn as_density(&self) -> Option<&dyn ConditionalDensity<T>> {
        match self {
            Self::Blr(m) => Some(m),
            Self::Disc(m) => Some(m),
            Self::Kde(m) => Some(m),
            Self::Krr(_) | Self::LeastSquares(_) => None,
        }
    }

    pub fn predict(&self, z: &[T]) -> T {
        match self {
            Self::Blr(m) => m.predict(z),
            Self::Krr(m) => m.predict(z),
            Self::Disc(m) => m.predict(z),
            Self::Kde(m) => m.predict(z),
            Self::LeastSquares(m) => m.predict(z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn keys_round_trip() {
        for l in [
            Learner::BayesianLinear,
            Learner::KernelRidge,
            Learner::DiscretizedForest,
            Learner::DiscretizedSoftmax,
            Learner::KernelDensity,
            Learner::LeastSquares,
        ] {
            assert_eq!(l.key().parse::<Learner>().unwrap(), l);
        }
        assert_eq!("KDE".parse::<Learner>().unwrap(), Learner::KernelDensity);
        assert!(matches!(
            "Z".parse::<Learner>(),
            Err(Error::UnknownLearner(_))
        ));
    }

    #[test]
    fn categorical_respects_zero_weights() {
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let i = sample_categorical(&[0.0_f64, 0.3, 0.0, 0.7], &mut rng);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn point_only_learners_have_no_density() {
        let z = ndarray::Array2::from_shape_vec((3, 1), vec![0.0_f64, 1.0, 2.0]).unwrap();
        let p = LearnerParams {
            krr: KrrSelection::Fixed {
                ridge: 1.0,
                width: 1.0,
            },
            ..LearnerParams::default()
        };
        let k = fit_learner(Learner::KernelRidge, z.view(), &[0.0, 1.0, 2.0], &p, 0).unwrap();
        assert!(k.as_density().is_none());
        let b = fit_learner(Learner::BayesianLinear, z.view(), &[0.0, 1.0, 2.0], &p, 0).unwrap();
        assert!(b.as_density().is_some());
    }
}
