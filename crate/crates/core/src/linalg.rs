//! Dense symmetric positive-definite solves.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower-triangular Cholesky factor stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    lower: Vec<T>,
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    // Four accumulators let the compiler vectorise the reduction.
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

const B: usize = 4;

/// `Σ_{k<j0} L[i0+p][k] · L[j0+q][k]` for a full 4×4 tile.
#[inline]
fn tile<T: Real>(lower: &[T], n: usize, i0: usize, j0: usize) -> [[T; B]; B] {
    let ri: [&[T]; B] = std::array::from_fn(|p| &lower[(i0 + p) * n..(i0 + p) * n + j0]);
    let rj: [&[T]; B] = std::array::from_fn(|q| &lower[(j0 + q) * n..(j0 + q) * n + j0]);
    let mut acc = [[T::zero(); B]; B];
    for k in 0..j0 {
        let a = [ri[0][k], ri[1][k], ri[2][k], ri[3][k]];
        let b = [rj[0][k], rj[1][k], rj[2][k], rj[3][k]];
        for p in 0..B {
            for q in 0..B {
                acc[p][q] += a[p] * b[q];
            }
        }
    }
    acc
}

impl<T: Real> Cholesky<T> {
    /// Factor a symmetric matrix given row-major. Only the lower triangle is read.
    pub fn factor(a: &[T], n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                a.len()
            )));
        }
        let mut lower = vec![T::zero(); n * n];
        // Rows are processed in blocks of `B`. For each block of rows and each
        // earlier block of columns, the bulk of the dot products runs through a
        // B×B register tile; the short triangular remainder is finished per entry.
        let mut i0 = 0;
        while i0 < n {
            let bi = B.min(n - i0);
            let mut j0 = 0;
            while j0 <= i0 {
                let bj = B.min(n - j0);
                let partial = if bi == B && bj == B {
                    tile(&lower, n, i0, j0)
                } else {
                    let mut t = [[T::zero(); B]; B];
                    for (p, row) in t.iter_mut().enumerate().take(bi) {
                        for (q, v) in row.iter_mut().enumerate().take(bj) {
                            let (ri, rj) = ((i0 + p) * n, (j0 + q) * n);
                            *v = dot(&lower[ri..ri + j0], &lower[rj..rj + j0]);
                        }
                    }
                    t
                };
                for q in 0..bj {
                    let j = j0 + q;
                    for p in 0..bi {
                        let i = i0 + p;
                        if j > i {
                            continue;
                        }
                        let mut v = a[i * n + j] - partial[p][q];
                        for k in j0..j {
                            v -= lower[i * n + k] * lower[j * n + k];
                        }
                        if i == j {
                            if !(v > T::zero()) || !v.is_finite() {
                                return Err(Error::NotPositiveDefinite);
                            }
                            lower[i * n + i] = v.sqrt();
                        } else {
                            lower[i * n + j] = v / lower[j * n + j];
                        }
                    }
                }
                j0 += B;
            }
            i0 += B;
        }
        Ok(Self { n, lower })
    }

    pub fn from_array(a: &Array2<T>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::ShapeMismatch(format!(
                "{r}x{c} matrix is not square"
            )));
        }
        let data: Vec<T> = a.iter().copied().collect();
        Self::factor(&data, r)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `L y = b` in place.
    pub fn forward(&self, b: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let s = dot(row, &b[..i]);
            b[i] = (b[i] - s) / self.lower[i * n + i];
        }
    }

    /// Solve `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [T]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    /// `A⁻¹` as a dense row-major matrix.
    pub fn inverse(&self) -> Array2<T> {
        let n = self.n;
        let mut inv = Array2::zeros((n, n));
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[[i, j]] = col[i];
            }
        }
        inv
    }

    /// `ln det A`.
    pub fn ln_det(&self) -> T {
        let n = self.n;
        (0..n)
            .map(|i| self.lower[i * n + i].ln())
            .fold(T::zero(), |a, b| a + b)
            * T::lit(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Vec<f64> {
        // B Bᵀ + n I with a fixed B.
        let b: Vec<f64> = (0..n * n)
            .map(|k| ((k * 7 + 3) % 11) as f64 / 11.0 - 0.5)
            .collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += b[i * n + k] * b[j * n + k];
                }
                a[i * n + j] = s + if i == j { n as f64 } else { 0.0 };
            }
        }
        a
    }

    #[test]
    fn solve_recovers_rhs() {
        let n = 9;
        let a = spd(n);
        let chol = Cholesky::factor(&a, n).unwrap();
        let x_true: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let b: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x_true[j]).sum())
            .collect();
        let x = chol.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let n = 5;
        let a = spd(n);
        let inv = Cholesky::factor(&a, n).unwrap().inverse();
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| a[i * n + k] * inv[[k, j]]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = [1.0_f64, 2.0, 2.0, 1.0];
        assert!(matches!(
            Cholesky::factor(&a, 2),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn ln_det_of_diagonal() {
        let a = [2.0_f64, 0.0, 0.0, 8.0];
        let c = Cholesky::factor(&a, 2).unwrap();
        assert!((c.ln_det() - 16f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn factor_reproduces_matrix_for_every_block_remainder() {
        for n in 1..=14 {
            let a = spd(n);
            let c = Cholesky::factor(&a, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n)
                        .map(|k| c.lower[i * n + k] * c.lower[j * n + k])
                        .sum();
                    assert!((s - a[i * n + j]).abs() < 1e-10, "n={n} ({i},{j})");
                }
                assert!(c.lower[i * n + i + 1..(i + 1) * n]
                    .iter()
                    .all(|&v| v == 0.0));
            }
        }
    }
}
