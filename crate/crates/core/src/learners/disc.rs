//! Label-space discretisation: a binner plus a pmf classifier over the bins.
//!
//! The conditional density is piecewise constant, `pmf(z)[k] / width_k` inside
//! the binned range and zero outside it.

use ndarray::ArrayView2;
use rand::RngCore;

use super::forest::{ForestParams, RandomForest};
use super::softmax::{SoftmaxClassifier, SoftmaxParams};
use super::{sample_categorical, ConditionalDensity, Regressor};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Equal-width bins. Bin `k` is `[edges[k], edges[k+1])`, the last bin is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Binner<T> {
    edges: Vec<T>,
    representatives: Vec<T>,
}

/// How a bin index is turned back into a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinSampling {
    Center,
    /// Uniform draw within the bin.
    #[default]
    Jitter,
}

pub fn discretize_fit<T: Real>(y: &[T], n_bins: usize) -> Result<Binner<T>> {
    if n_bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 bins, got {n_bins}"
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("cannot bin an empty column".into()));
    }
    let mut lo = y.iter().copied().fold(T::infinity(), T::min);
    let mut hi = y.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi > lo) {
        // Constant column: unit-width range centred on the value.
        lo -= T::lit(0.5);
        hi += T::lit(0.5);
    }
    Binner::equal_width(lo, hi, n_bins)
}

impl<T: Real> Binner<T> {
    pub fn equal_width(lo: T, hi: T, n_bins: usize) -> Result<Self> {
        if !(hi > lo) || n_bins < 1 {
            return Err(Error::InvalidArgument(
                "binner needs lo < hi and at least one bin".into(),
            ));
        }
        let nb = T::from_count(n_bins);
        let edges: Vec<T> = (0..=n_bins)
            .map(|k| {
                if k == n_bins {
                    hi
                } else {
                    lo + (hi - lo) * T::from_count(k) / nb
                }
            })
            .collect();
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "bin edges collapse at this precision".into(),
            ));
        }
        let representatives = edges
            .windows(2)
            .map(|w| (w[0] + w[1]) / T::lit(2.0))
            .collect();
        Ok(Self {
            edges,
            representatives,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.representatives.len()
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn representatives(&self) -> &[T] {
        &self.representatives
    }

    pub fn width(&self, k: usize) -> T {
        self.edges[k + 1] - self.edges[k]
    }

    pub fn contains(&self, y: T) -> bool {
        y >= self.edges[0] && y <= self.edges[self.n_bins()]
    }

    /// Bin of `y`; values outside the range clamp to the end bins.
    pub fn bin_index(&self, y: T) -> usize {
        let last = self.n_bins() - 1;
        if y.is_nan() || y < self.edges[0] {
            return 0;
        }
        self.edges
            .partition_point(|&e| e <= y)
            .saturating_sub(1)
            .min(last)
    }

    pub fn bin_value(&self, k: usize, rng: &mut dyn RngCore, mode: BinSampling) -> T {
        match mode {
            BinSampling::Center => self.representatives[k],
            BinSampling::Jitter => {
                let v = self.edges[k] + self.width(k) * T::unit_uniform(rng);
                if self.bin_index(v) == k {
                    v
                } else {
                    self.representatives[k]
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    RandomForest,
    Softmax,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel<T> {
    /// Training labels were all the same class.
    Constant {
        class: usize,
        n_classes: usize,
    },
    Forest(RandomForest<T>),
    Softmax(SoftmaxClassifier<T>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassifierParams {
    pub forest: ForestParams,
    pub softmax: SoftmaxParams,
}

pub fn classifier_fit<T: Real>(
    z: ArrayView2<'_, T>,
    labels: &[usize],
    n_classes: usize,
    kind: ClassifierKind,
    params: &ClassifierParams,
    seed: u64,
) -> Result<ClassifierModel<T>> {
    if labels.is_empty() || labels.len() != z.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} labels",
            z.nrows(),
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|&&c| c >= n_classes) {
        return Err(Error::InvalidArgument(format!(
            "label {bad} outside 0..{n_classes}"
        )));
    }
    if labels.iter().all(|&c| c == labels[0]) {
        return Ok(ClassifierModel::Constant {
            class: labels[0],
            n_classes,
        });
    }
    Ok(match kind {
        ClassifierKind::RandomForest => ClassifierModel::Forest(RandomForest::fit(
            z,
            labels,
            n_classes,
            &params.forest,
            seed,
        )),
        ClassifierKind::Softmax => ClassifierModel::Softmax(SoftmaxClassifier::fit(
            z,
            labels,
            n_classes,
            &params.softmax,
        )),
    })
}

impl<T: Real> ClassifierModel<T> {
    pub fn pmf(&self, z: &[T]) -> Vec<T> {
        match self {
            Self::Constant { class, n_classes } => {
                let mut p = vec![T::zero(); *n_classes];
                p[*class] = T::one();
                p
            }
            Self::Forest(f) => f.pmf(z),
            Self::Softmax(s) => s.pmf(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscModel<T> {
    pub binner: Binner<T>,
    pub classifier: ClassifierModel<T>,
    pub sampling: BinSampling,
}

#[allow(clippy::too_many_arguments)]
pub fn disc_fit<T: Real>(
    z: ArrayView2<'_, T>,
    y: &[T],
    n_bins: usize,
    kind: ClassifierKind,
    params: &ClassifierParams,
    sampling: BinSampling,
    seed: u64,
) -> Result<DiscModel<T>> {
    let binner = discretize_fit(y, n_bins)?;
    let labels: Vec<usize> = y.iter().map(|&v| binner.bin_index(v)).collect();
    let classifier = classifier_fit(z, &labels, binner.n_bins(), kind, params, seed)?;
    Ok(DiscModel {
        binner,
        classifier,
        sampling,
    })
}

impl<T: Real> DiscModel<T> {
    fn ln_pdf_with(&self, pmf: &[T], y: T) -> T {
        if !self.binner.contains(y) {
            return T::neg_infinity();
        }
        let k = self.binner.bin_index(y);
        pmf[k].ln() - self.binner.width(k).ln()
    }

    pub fn pmf(&self, z: &[T]) -> Vec<T> {
        self.classifier.pmf(z)
    }
}

impl<T: Real> Regressor<T> for DiscModel<T> {
    /// Expected bin centre under the pmf.
    fn predict(&self, z: &[T]) -> T {
        self.pmf(z)
            .iter()
            .zip(self.binner.representatives())
            .map(|(&p, &c)| p * c)
            .sum()
    }
}

impl<T: Real> ConditionalDensity<T> for DiscModel<T> {
    fn ln_pdf(&self, z: &[T], y: T) -> T {
        self.ln_pdf_with(&self.pmf(z), y)
    }

    fn sample(&self, z: &[T], rng: &mut dyn RngCore) -> T {
        let k = sample_categorical(&self.pmf(z), rng);
        self.binner.bin_value(k, rng, self.sampling)
    }

    fn sample_scored(&self, z: &[T], rng: &mut dyn RngCore) -> (T, T) {
        let pmf = self.pmf(z);
        let k = sample_categorical(&pmf, rng);
        let y = self.binner.bin_value(k, rng, self.sampling);
        (y, self.ln_pdf_with(&pmf, y))
    }
}
