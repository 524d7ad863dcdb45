//! The floating-point abstraction every numeric routine in the crate is written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Real scalar usable by the learners, the samplers and the metrics.
///
/// Implemented for `f32` and `f64`. Random draws go through the trait so that
/// generic code never needs a `StandardNormal: Distribution<T>` bound.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + LinalgScalar
    + ScalarOperand
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw uniformly from `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Convert an `f64` literal. Never fails for the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Convert a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($($t:ty)*) => ($(
        impl Real for $t {
            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample::<$t, _>(StandardNormal)
            }

            #[inline]
            fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }
        }
    )*)
}

impl_real!(f32 f64);

/// `ln(sqrt(2π))`.
pub(crate) fn ln_sqrt_2pi<T: Real>() -> T {
    T::lit(0.918_938_533_204_672_7)
}

/// Log-density of `N(mean, var)` at `y`.
pub fn normal_ln_pdf<T: Real>(y: T, mean: T, var: T) -> T {
    let d = y - mean;
    -ln_sqrt_2pi::<T>() - T::lit(0.5) * var.ln() - d * d / (T::lit(2.0) * var)
}

/// Numerically stable `ln Σ exp(v)`. Returns `-inf` for an empty or all `-inf` slice.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let s: T = values.iter().map(|&v| (v - max).exp()).sum();
    max + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let v = [0.1_f64, -0.3, 1.7];
        let direct: f64 = v.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&v) - direct).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_handles_large_magnitudes() {
        let v = [-1000.0_f64, -1000.0];
        assert!((log_sum_exp(&v) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn normal_ln_pdf_peak() {
        let v = 0.7_f64;
        let expected = -(2.0 * std::f64::consts::PI * v).sqrt().ln();
        assert!((normal_ln_pdf(1.0, 1.0, v) - expected).abs() < 1e-14);
    }
}
