//! Kernel ridge regression with the Gaussian kernel `exp(-γ‖z - z'‖²)`.

use ndarray::{Array2, ArrayView2};

use super::Regressor;
use crate::data::kfold;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Real;

const MAX_RIDGE_RETRIES: usize = 3;

#[derive(Debug, Clone)]
pub struct KrrModel<T> {
    pub dual_coefficients: Vec<T>,
    pub stored_inputs: Array2<T>,
    /// Ridge actually used; larger than requested if factorisation needed retries.
    pub ridge: T,
    pub kernel_width: T,
}

/// Hyperparameter grid searched by inner cross-validation on MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct KrrGrid<T> {
    pub ridges: Vec<T>,
    pub widths: Vec<T>,
    pub inner_folds: usize,
}

impl<T: Real> Default for KrrGrid<T> {
    fn default() -> Self {
        Self {
            ridges: [1.0, 0.1, 0.01, 0.001].iter().map(|&v| T::lit(v)).collect(),
            widths: [0.01, 0.1, 1.0, 10.0, 100.0]
                .iter()
                .map(|&v| T::lit(v))
                .collect(),
            inner_folds: 3,
        }
    }
}

fn squared_distances<T: Real>(a: ArrayView2<'_, T>, b: ArrayView2<'_, T>) -> Vec<T> {
    let mut out = Vec::with_capacity(a.nrows() * b.nrows());
    for ra in a.rows() {
        for rb in b.rows() {
            out.push(
                ra.iter()
                    .zip(rb.iter())
                    .map(|(&u, &v)| (u - v) * (u - v))
                    .sum(),
            );
        }
    }
    out
}

/// Solve `(K + αI)c = y` for `K` given as squared distances, retrying with larger ridge.
fn gram<T: Real>(d2: &[T], width: T) -> Vec<T> {
    d2.iter().map(|&d| (-width * d).exp()).collect()
}

/// Solve `(K + ridge·I) c = y`, raising the ridge tenfold (up to three times) if
/// the system is not numerically positive definite.
fn solve_dual<T: Real>(gram: &[T], n: usize, y: &[T], ridge: T) -> Result<(Vec<T>, T)> {
    let mut alpha = ridge;
    let mut k = gram.to_vec();
    for attempt in 0..=MAX_RIDGE_RETRIES {
        for i in 0..n {
            k[i * n + i] = gram[i * n + i] + alpha;
        }
        match Cholesky::factor(&k, n) {
            Ok(chol) => return Ok((chol.solve(y), alpha)),
            Err(Error::NotPositiveDefinite) if attempt < MAX_RIDGE_RETRIES => {
                alpha *= T::lit(10.0);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotPositiveDefinite)
}

pub fn krr_fit<T: Real>(
    z: ArrayView2<'_, T>,
    y: &[T],
    ridge: T,
    kernel_width: T,
) -> Result<KrrModel<T>> {
    let n = z.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "KRR needs at least one instance".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{n} rows but {} targets",
            y.len()
        )));
    }
    if !(ridge > T::zero()) || !(kernel_width > T::zero()) {
        return Err(Error::InvalidArgument(
            "ridge and kernel width must be positive".into(),
        ));
    }
    let d2 = squared_distances(z, z);
    let (c, alpha) = solve_dual(&gram(&d2, kernel_width), n, y, ridge)?;
    Ok(KrrModel {
        dual_coefficients: c,
        stored_inputs: z.to_owned(),
        ridge: alpha,
        kernel_width,
    })
}

/// Pick `(ridge, width)` minimising inner k-fold MSE. Ties keep the first grid entry.
pub fn krr_grid_search<T: Real>(
    z: ArrayView2<'_, T>,
    y: &[T],
    grid: &KrrGrid<T>,
    seed: u64,
) -> Result<(T, T)> {
    let n = z.nrows();
    if grid.ridges.is_empty() || grid.widths.is_empty() {
        return Err(Error::Config("empty kernel ridge grid".into()));
    }
    let first = (grid.ridges[0], grid.widths[0]);
    let k = grid.inner_folds.min(n / 2);
    if k < 2 {
        return Ok(first);
    }
    let plan = kfold(n, k, seed)?;
    let d2 = squared_distances(z, z);
    let mut sse = vec![T::zero(); grid.ridges.len() * grid.widths.len()];
    for f in 0..k {
        let train = plan.train_indices(f);
        let test = plan.test_indices(f);
        let nt = train.len();
        let mut d2_train = Vec::with_capacity(nt * nt);
        for &i in &train {
            for &j in &train {
                d2_train.push(d2[i * n + j]);
            }
        }
        let y_train: Vec<T> = train.iter().map(|&i| y[i]).collect();
        for (gi, &width) in grid.widths.iter().enumerate() {
            let k_cross: Vec<T> = test
                .iter()
                .flat_map(|&t| train.iter().map(move |&i| (t, i)))
                .map(|(t, i)| (-width * d2[t * n + i]).exp())
                .collect();
            let k_train = gram(&d2_train, width);
            for (ai, &ridge) in grid.ridges.iter().enumerate() {
                let (c, _) = solve_dual(&k_train, nt, &y_train, ridge)?;
                let mut err = T::zero();
                for (r, &t) in test.iter().enumerate() {
                    let pred: T = k_cross[r * nt..(r + 1) * nt]
                        .iter()
                        .zip(&c)
                        .map(|(&kv, &cv)| kv * cv)
                        .sum();
                    err += (pred - y[t]) * (pred - y[t]);
                }
                sse[ai * grid.widths.len() + gi] += err;
            }
        }
    }
    let mut best = 0;
    for (i, &v) in sse.iter().enumerate() {
        if v < sse[best] {
            best = i;
        }
    }
    let nw = grid.widths.len();
    Ok((grid.ridges[best / nw], grid.widths[best % nw]))
}

impl<T: Real> KrrModel<T> {
    pub fn predict_one(&self, z: &[T]) -> T {
        self.stored_inputs
            .rows()
            .into_iter()
            .zip(&self.dual_coefficients)
            .map(|(row, &c)| {
                let d2: T = row.iter().zip(z).map(|(&a, &b)| (a - b) * (a - b)).sum();
                c * (-self.kernel_width * d2).exp()
            })
            .sum()
    }

    /// `‖(K + αI)c − y‖`.
    pub fn dual_residual(&self, y: &[T]) -> T {
        let n = self.dual_coefficients.len();
        let mut total = T::zero();
        for i in 0..n {
            let zi: Vec<T> = self.stored_inputs.row(i).to_vec();
            let r = self.predict_one(&zi) + self.ridge * self.dual_coefficients[i] - y[i];
            total += r * r;
        }
        total.sqrt()
    }
}

impl<T: Real> Regressor<T> for KrrModel<T> {
    fn predict(&self, z: &[T]) -> T {
        self.predict_one(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_data(n: usize) -> (Array2<f64>, Vec<f64>) {
        let zs: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 / (n - 1) as f64).collect();
        let ys = zs.iter().map(|z| (3.0 * z).sin()).collect();
        (Array2::from_shape_vec((n, 1), zs).unwrap(), ys)
    }

    #[test]
    fn tiny_ridge_interpolates() {
        let (z, y) = grid_data(20);
        let m = krr_fit(z.view(), &y, 1e-8, 1.0).unwrap();
        for i in 0..20 {
            assert!((m.predict_one(&[z[[i, 0]]]) - y[i]).abs() < 1e-3);
        }
    }

    #[test]
    fn huge_ridge_shrinks_to_zero() {
        let (z, y) = grid_data(20);
        let m = krr_fit(z.view(), &y, 1e8, 1.0).unwrap();
        for i in 0..20 {
            assert!(m.predict_one(&[z[[i, 0]]]).abs() < 1e-6);
        }
    }

    #[test]
    fn shrinkage_is_monotone_in_ridge() {
        let (z, y) = grid_data(30);
        let norms: Vec<f64> = [0.01, 1.0, 100.0]
            .iter()
            .map(|&a| {
                let m = krr_fit(z.view(), &y, a, 1.0).unwrap();
                (0..30)
                    .map(|i| m.predict_one(&[z[[i, 0]]]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
    }

    #[test]
    fn dual_residual_is_small() {
        let (z, y) = grid_data(50);
        let m = krr_fit(z.view(), &y, 0.01, 10.0).unwrap();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(m.dual_residual(&y) <= 1e-6 * ynorm);
    }

    #[test]
    fn grid_search_fits_sine() {
        // Training on 200 points; held-out check on a shifted grid.
        let (z, y) = grid_data(200);
        let grid = KrrGrid::default();
        let (a, g) = krr_grid_search(z.view(), &y, &grid, 1).unwrap();
        let m = krr_fit(z.view(), &y, a, g).unwrap();
        let test: Vec<f64> = (0..97).map(|i| 0.01 + 2.98 * i as f64 / 96.0).collect();
        let mse = test
            .iter()
            .map(|&t| (m.predict_one(&[t]) - (3.0 * t).sin()).powi(2))
            .sum::<f64>()
            / test.len() as f64;
        assert!(
            mse.sqrt() < 0.1,
            "rmse {} with ridge {a} width {g}",
            mse.sqrt()
        );
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let (z, y) = grid_data(5);
        assert!(krr_fit(z.view(), &y, 0.0, 1.0).is_err());
        assert!(krr_fit(z.view(), &y, 1.0, -1.0).is_err());
    }
}
