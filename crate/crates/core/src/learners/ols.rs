//! Intercept-free ordinary least squares, `ŷ = wᵀz`.

use ndarray::ArrayView2;

use super::Regressor;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresModel<T> {
    pub weights: Vec<T>,
}

pub fn ols_fit<T: Real>(z: ArrayView2<'_, T>, y: &[T]) -> Result<LeastSquaresModel<T>> {
    let (n, d) = z.dim();
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "least squares needs at least one row and one column".into(),
        ));
    }
    let mut gram = vec![T::zero(); d * d];
    let mut rhs = vec![T::zero(); d];
    for (row, &yi) in z.rows().into_iter().zip(y) {
        for r in 0..d {
            rhs[r] += row[r] * yi;
            for c in 0..d {
                gram[r * d + c] += row[r] * row[c];
            }
        }
    }
    let weights = Cholesky::factor(&gram, d)?.solve(&rhs);
    Ok(LeastSquaresModel { weights })
}

impl<T: Real> Regressor<T> for LeastSquaresModel<T> {
    fn predict(&self, z: &[T]) -> T {
        self.weights.iter().zip(z).map(|(&w, &v)| w * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn recovers_exact_weights() {
        let z = Array2::from_shape_vec((3, 2), vec![1.0_f64, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let y = [2.0, -1.0, 1.0];
        let m = ols_fit(z.view(), &y).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-12);
        assert!((m.weights[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_fail() {
        let z = Array2::from_shape_vec((2, 2), vec![1.0_f64, 1.0, 2.0, 2.0]).unwrap();
        assert!(ols_fit(z.view(), &[1.0, 2.0]).is_err());
    }
}
