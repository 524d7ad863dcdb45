//! Conjugate Bayesian linear regression with an intercept.
//!
//! Weights carry a Gaussian prior `N(0, σ²/λ · I)` relative to the noise variance
//! `σ²`, so the posterior mean is the ridge solution `(ΦᵀΦ + λI)⁻¹Φᵀy` and the
//! posterior covariance is `σ² (ΦᵀΦ + λI)⁻¹`. `σ²` is the mean squared residual of
//! the posterior mean, floored.

use ndarray::{Array1, Array2, ArrayView2};
use rand::RngCore;

use super::{ConditionalDensity, Regressor};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::{normal_ln_pdf, Real};

pub const NOISE_VARIANCE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BlrModel<T> {
    /// Posterior mean; entry 0 is the intercept.
    pub weight_mean: Array1<T>,
    pub weight_covariance: Array2<T>,
    pub noise_variance: T,
    pub prior_precision: T,
}

fn design_row<T: Real>(z: &[T]) -> impl Iterator<Item = T> + '_ {
    std::iter::once(T::one()).chain(z.iter().copied())
}

pub fn blr_fit<T: Real>(z: ArrayView2<'_, T>, y: &[T], prior_precision: T) -> Result<BlrModel<T>> {
    let (n, d) = z.dim();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "BLR needs at least one instance".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{n} rows but {} targets",
            y.len()
        )));
    }
    if !(prior_precision > T::zero()) {
        return Err(Error::InvalidArgument(
            "prior precision must be positive".into(),
        ));
    }
    let p = d + 1;
    let mut a = vec![T::zero(); p * p];
    let mut b = vec![T::zero(); p];
    let mut phi = vec![T::zero(); p];
    for (i, row) in z.rows().into_iter().enumerate() {
        phi[0] = T::one();
        for k in 0..d {
            phi[k + 1] = row[k];
        }
        for r in 0..p {
            b[r] += phi[r] * y[i];
            for c in 0..=r {
                a[r * p + c] += phi[r] * phi[c];
            }
        }
    }
    for r in 0..p {
        a[r * p + r] += prior_precision;
        for c in 0..r {
            a[c * p + r] = a[r * p + c];
        }
    }
    let chol = Cholesky::factor(&a, p)?;
    let mean = chol.solve(&b);
    let mut rss = T::zero();
    for (i, row) in z.rows().into_iter().enumerate() {
        let pred: T = mean[0] + (0..d).map(|k| mean[k + 1] * row[k]).sum::<T>();
        rss += (y[i] - pred) * (y[i] - pred);
    }
    let noise_variance = (rss / T::from_count(n)).max(T::lit(NOISE_VARIANCE_FLOOR));
    let weight_covariance = chol.inverse().mapv(|v| v * noise_variance);
    Ok(BlrModel {
        weight_mean: Array1::from(mean),
        weight_covariance,
        noise_variance,
        prior_precision,
    })
}

impl<T: Real> BlrModel<T> {
    pub fn mean(&self, z: &[T]) -> T {
        design_row(z)
            .zip(self.weight_mean.iter())
            .map(|(a, &w)| a * w)
            .sum()
    }

    /// Predictive variance `σ² + φᵀΣφ`.
    pub fn variance(&self, z: &[T]) -> T {
        let phi: Vec<T> = design_row(z).collect();
        let mut q = T::zero();
        for (r, &pr) in phi.iter().enumerate() {
            for (c, &pc) in phi.iter().enumerate() {
                q += pr * self.weight_covariance[[r, c]] * pc;
            }
        }
        self.noise_variance + q.max(T::zero())
    }

    pub fn pdf(&self, z: &[T], y: T) -> T {
        self.ln_pdf(z, y).exp()
    }
}

impl<T: Real> Regressor<T> for BlrModel<T> {
    fn predict(&self, z: &[T]) -> T {
        self.mean(z)
    }
}

impl<T: Real> ConditionalDensity<T> for BlrModel<T> {
    fn ln_pdf(&self, z: &[T], y: T) -> T {
        normal_ln_pdf(y, self.mean(z), self.variance(z))
    }

    fn sample(&self, z: &[T], rng: &mut dyn RngCore) -> T {
        self.mean(z) + self.variance(z).sqrt() * T::standard_normal(rng)
    }

    fn sample_scored(&self, z: &[T], rng: &mut dyn RngCore) -> (T, T) {
        let (m, v) = (self.mean(z), self.variance(z));
        let y = m + v.sqrt() * T::standard_normal(rng);
        (y, normal_ln_pdf(y, m, v))
    }
}
