use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Real;

/// Bimodal two-target data with one uninformative input.
///
/// `x ~ N(0, 1)`, a mode `s` is drawn from {-1, +1} with equal probability and
/// `y1 = s + e1`, `y2 = s + e2` with `e ~ N(0, noise_std²)`.
pub fn generate_synth<T: Real>(n: usize, noise_std: T, seed: u64) -> Result<Dataset<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "synth needs n >= 2, got {n}"
        )));
    }
    if !(noise_std > T::zero()) || !noise_std.is_finite() {
        return Err(Error::InvalidArgument("noise_std must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut x = Array2::zeros((n, 1));
    let mut y = Array2::zeros((n, 2));
    for i in 0..n {
        x[[i, 0]] = T::standard_normal(&mut rng);
        let s = if T::unit_uniform(&mut rng) < T::lit(0.5) {
            -T::one()
        } else {
            T::one()
        };
        y[[i, 0]] = s + noise_std * T::standard_normal(&mut rng);
        y[[i, 1]] = s + noise_std * T::standard_normal(&mut rng);
    }
    Dataset::from_arrays(x, y)
}
