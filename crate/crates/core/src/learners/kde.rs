//! Conditional Parzen-window density with Gaussian kernels.
//!
//! `p(y | z) = Σᵢ K_h(z, zᵢ) K_h(y, yᵢ) / Σᵢ K_h(z, zᵢ)`: a mixture of `N(yᵢ, h²)`
//! components weighted by input-space kernel similarity.

use ndarray::{Array2, ArrayView2};
use rand::RngCore;

use super::{sample_categorical, ConditionalDensity, Regressor};
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, normal_ln_pdf, Real};

pub const BANDWIDTH_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth<T> {
    /// `1.06 · std(y) · n^(-1/5)`, floored.
    Silverman,
    Fixed(T),
}

#[derive(Debug, Clone)]
pub struct KdeModel<T> {
    pub stored_inputs: Array2<T>,
    pub stored_targets: Vec<T>,
    pub bandwidth: T,
}

/// Normalised input-kernel weights for one query.
#[derive(Debug, Clone)]
pub struct KernelWeights<T> {
    pub weights: Vec<T>,
    /// Set when every kernel underflowed and uniform weights were substituted.
    pub fallback: bool,
}

pub fn silverman_bandwidth<T: Real>(y: &[T]) -> T {
    let n = T::from_count(y.len().max(1));
    let mean = y.iter().copied().sum::<T>() / n;
    let var = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (T::lit(1.06) * var.sqrt() * n.powf(T::lit(-0.2))).max(T::lit(BANDWIDTH_FLOOR))
}

pub fn kde_fit<T: Real>(
    z: ArrayView2<'_, T>,
    y: &[T],
    bandwidth: Bandwidth<T>,
) -> Result<KdeModel<T>> {
    if z.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "KDE needs at least one instance".into(),
        ));
    }
    if z.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} targets",
            z.nrows(),
            y.len()
        )));
    }
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(y),
        Bandwidth::Fixed(h) if h > T::zero() => h,
        Bandwidth::Fixed(_) => {
            return Err(Error::InvalidArgument("bandwidth must be positive".into()))
        }
    };
    Ok(KdeModel {
        stored_inputs: z.to_owned(),
        stored_targets: y.to_vec(),
        bandwidth: h,
    })
}

impl<T: Real> KdeModel<T> {
    pub fn input_weights(&self, z: &[T]) -> KernelWeights<T> {
        let n = self.stored_targets.len();
        let scale = T::lit(-0.5) / (self.bandwidth * self.bandwidth);
        let mut weights: Vec<T> = self
            .stored_inputs
            .rows()
            .into_iter()
            .map(|row| {
                let d2: T = row.iter().zip(z).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (scale * d2).exp()
            })
            .collect();
        let total: T = weights.iter().copied().sum();
        if total > T::zero() && total.is_finite() {
            weights.iter_mut().for_each(|w| *w /= total);
            KernelWeights {
                weights,
                fallback: false,
            }
        } else {
            let u = T::one() / T::from_count(n);
            KernelWeights {
                weights: vec![u; n],
                fallback: true,
            }
        }
    }

    fn ln_pdf_with(&self, w: &KernelWeights<T>, y: T) -> T {
        let var = self.bandwidth * self.bandwidth;
        let terms: Vec<T> = w
            .weights
            .iter()
            .zip(&self.stored_targets)
            .filter(|(&wi, _)| wi > T::zero())
            .map(|(&wi, &yi)| wi.ln() + normal_ln_pdf(y, yi, var))
            .collect();
        log_sum_exp(&terms)
    }

    fn sample_with(&self, w: &KernelWeights<T>, rng: &mut dyn RngCore) -> T {
        let i = sample_categorical(&w.weights, rng);
        self.stored_targets[i] + self.bandwidth * T::standard_normal(rng)
    }

    pub fn pdf(&self, z: &[T], y: T) -> T {
        self.ln_pdf(z, y).exp()
    }

    pub fn mean(&self, z: &[T]) -> T {
        self.input_weights(z)
            .weights
            .iter()
            .zip(&self.stored_targets)
            .map(|(&w, &y)| w * y)
            .sum()
    }
}

impl<T: Real> Regressor<T> for KdeModel<T> {
    fn predict(&self, z: &[T]) -> T {
        self.mean(z)
    }
}

impl<T: Real> ConditionalDensity<T> for KdeModel<T> {
    fn ln_pdf(&self, z: &[T], y: T) -> T {
        self.ln_pdf_with(&self.input_weights(z), y)
    }

    fn sample(&self, z: &[T], rng: &mut dyn RngCore) -> T {
        self.sample_with(&self.input_weights(z), rng)
    }

    fn sample_scored(&self, z: &[T], rng: &mut dyn RngCore) -> (T, T) {
        let w = self.input_weights(z);
        let y = self.sample_with(&w, rng);
        (y, self.ln_pdf_with(&w, y))
    }

    fn proposal_scale(&self) -> Option<T> {
        Some(self.bandwidth)
    }
}
