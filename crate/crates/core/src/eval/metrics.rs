use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_shapes<T>(y: &ArrayView2<'_, T>, y_hat: &ArrayView2<'_, T>) -> Result<()> {
    if y.dim() != y_hat.dim() {
        return Err(Error::ShapeMismatch(format!(
            "targets {:?} vs predictions {:?}",
            y.dim(),
            y_hat.dim()
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("no predictions to score".into()));
    }
    Ok(())
}

/// Mean squared error averaged over instances and labels.
pub fn mse<T: Real>(y: ArrayView2<'_, T>, y_hat: ArrayView2<'_, T>) -> Result<T> {
    check_shapes(&y, &y_hat)?;
    let total: T = y
        .iter()
        .zip(y_hat.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    Ok(total / T::from_count(y.len()))
}

/// Mean absolute error averaged over instances and labels.
pub fn mae<T: Real>(y: ArrayView2<'_, T>, y_hat: ArrayView2<'_, T>) -> Result<T> {
    check_shapes(&y, &y_hat)?;
    let total: T = y
        .iter()
        .zip(y_hat.iter())
        .map(|(&a, &b)| (a - b).abs())
        .sum();
    Ok(total / T::from_count(y.len()))
}

/// Fraction of instances whose prediction is not within Euclidean distance `c`.
pub fn zero_one_approx<T: Real>(y: ArrayView2<'_, T>, y_hat: ArrayView2<'_, T>, c: T) -> Result<T> {
    check_shapes(&y, &y_hat)?;
    if !(c > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "threshold c = {c} must be positive"
        )));
    }
    let misses = y
        .rows()
        .into_iter()
        .zip(y_hat.rows())
        .filter(|(a, b)| {
            let d2: T = a
                .iter()
                .zip(b.iter())
                .map(|(&u, &v)| (u - v) * (u - v))
                .sum();
            !(d2.sqrt() < c)
        })
        .count();
    Ok(T::from_count(misses) / T::from_count(y.nrows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    #[test]
    fn exact_predictions_score_zero() {
        let y = array![[1.0, 2.0], [3.0, -4.0]];
        assert_eq!(mse(y.view(), y.view()).unwrap(), 0.0);
        assert_eq!(mae(y.view(), y.view()).unwrap(), 0.0);
        assert_eq!(zero_one_approx(y.view(), y.view(), 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn per_label_averaging() {
        let y = array![[0.0, 0.0]];
        let p = array![[1.0, -1.0]];
        assert_eq!(mse(y.view(), p.view()).unwrap(), 1.0);
        assert_eq!(mae(y.view(), p.view()).unwrap(), 1.0);
    }

    #[test]
    fn boundary_distance_counts_as_a_miss() {
        let y = array![[0.0, 0.0]];
        let p = array![[0.6, 0.8]];
        assert_eq!(zero_one_approx(y.view(), p.view(), 1.0).unwrap(), 1.0);
        assert_eq!(
            zero_one_approx(y.view(), p.view(), 1.0 + 1e-12).unwrap(),
            0.0
        );
        assert!(zero_one_approx(y.view(), p.view(), 0.0).is_err());
    }

    #[test]
    fn shape_mismatch() {
        let y = Array2::<f64>::zeros((2, 2));
        let p = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            mse(y.view(), p.view()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn doubling_scales_metrics() {
        let y = array![[0.3, -1.2], [2.0, 0.1]];
        let p = array![[0.1, -0.2], [1.0, 0.6]];
        let (y2, p2) = (&y * 2.0, &p * 2.0);
        let m1: f64 = mse(y.view(), p.view()).unwrap();
        let m2 = mse(y2.view(), p2.view()).unwrap();
        assert!((m2 - 4.0 * m1).abs() < 1e-12);
        let a1: f64 = mae(y.view(), p.view()).unwrap();
        let a2 = mae(y2.view(), p2.view()).unwrap();
        assert!((a2 - 2.0 * a1).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn zero_one_is_monotone_in_c(
            vals in proptest::collection::vec(-3.0f64..3.0, 24),
            c1 in 0.01f64..2.0,
            dc in 0.0f64..2.0,
        ) {
            let y = Array2::from_shape_vec((6, 2), vals[..12].to_vec()).unwrap();
            let p = Array2::from_shape_vec((6, 2), vals[12..].to_vec()).unwrap();
            let a = zero_one_approx(y.view(), p.view(), c1).unwrap();
            let b = zero_one_approx(y.view(), p.view(), c1 + dc).unwrap();
            prop_assert!(a >= b);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
