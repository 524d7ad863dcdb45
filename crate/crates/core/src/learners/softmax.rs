//! Multinomial logistic regression trained by full-batch gradient descent.

use ndarray::{Array2, ArrayView2};

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxParams {
    pub iterations: usize,
    pub learning_rate: f64,
    /// L2 penalty on the non-intercept weights.
    pub l2: f64,
}

impl Default for SoftmaxParams {
    fn default() -> Self {
        Self {
            iterations: 300,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxClassifier<T> {
    /// `(d + 1) × K`; row 0 holds the intercepts.
    weights: Array2<T>,
}

fn softmax_in_place<T: Real>(logits: &mut [T]) {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let mut total = T::zero();
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    logits.iter_mut().for_each(|v| *v /= total);
}

impl<T: Real> SoftmaxClassifier<T> {
    pub fn fit(
        x: ArrayView2<'_, T>,
        labels: &[usize],
        n_classes: usize,
        params: &SoftmaxParams,
    ) -> Self {
        let (n, d) = x.dim();
        let p = d + 1;
        let mut w = Array2::<T>::zeros((p, n_classes));
        let lr = T::lit(params.learning_rate);
        let l2 = T::lit(params.l2);
        let inv_n = T::one() / T::from_count(n.max(1));
        let mut probs = vec![T::zero(); n_classes];
        for _ in 0..params.iterations {
            let mut grad = Array2::<T>::zeros((p, n_classes));
            for (i, row) in x.rows().into_iter().enumerate() {
                for (k, pk) in probs.iter_mut().enumerate() {
                    *pk = w[[0, k]] + (0..d).map(|j| row[j] * w[[j + 1, k]]).sum::<T>();
                }
                softmax_in_place(&mut probs);
                probs[labels[i]] -= T::one();
                for k in 0..n_classes {
                    let r = probs[k] * inv_n;
                    grad[[0, k]] += r;
                    for j in 0..d {
                        grad[[j + 1, k]] += r * row[j];
                    }
                }
            }
            for j in 1..p {
                for k in 0..n_classes {
                    grad[[j, k]] += l2 * w[[j, k]];
                }
            }
            w.zip_mut_with(&grad, |a, &g| *a -= lr * g);
        }
        Self { weights: w }
    }

    pub fn pmf(&self, z: &[T]) -> Vec<T> {
        let (p, k) = self.weights.dim();
        let mut logits: Vec<T> = (0..k)
            .map(|c| {
                self.weights[[0, c]] + (1..p).map(|j| z[j - 1] * self.weights[[j, c]]).sum::<T>()
            })
            .collect();
        softmax_in_place(&mut logits);
        logits
    }
}
