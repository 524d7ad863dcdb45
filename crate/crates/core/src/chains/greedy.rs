use crate::error::{Error, Result};
use crate::scalar::Real;

use super::ChainModel;

/// Plug each stage's point prediction into the next stage.
///
/// Particle-filter chains use their evaluators.
pub fn predict_greedy<T: Real>(chain: &ChainModel<T>, x: &[T]) -> Result<Vec<T>> {
    chain.check_input(x)?;
    let mut path = vec![T::zero(); chain.n_targets()];
    for (j, stage) in chain.stages.iter().enumerate() {
        let z = chain.stage_input(x, &path, j);
        let v = stage.model.predict(&z);
        if !v.is_finite() {
            return Err(Error::NonFinitePrediction {
                stage: j,
                target: stage.target,
            });
        }
        path[stage.target] = v;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{fit_chain, ChainSpec};
    use crate::data::Dataset;
    use crate::learners::{Learner, LearnerParams};
    use ndarray::Array2;

    /// Without intercepts every stage is linear, so the chain is a linear map of x.
    #[test]
    fn linear_chain_is_linear_in_the_inputs() {
        let n = 50;
        let x = Array2::from_shape_fn((n, 2), |(i, k)| ((i * 7 + k * 13) % 11) as f64 - 5.0);
        let y = Array2::from_shape_fn((n, 2), |(i, t)| {
            let noise = ((i * 31 + t * 17) % 19) as f64 / 19.0 - 0.5;
            (t as f64 + 1.0) * x[[i, 0]] - x[[i, 1]] + noise
        });
        let d = Dataset::from_arrays(x, y).unwrap();
        let c = fit_chain(
            &d,
            &ChainSpec::point(Learner::LeastSquares),
            &LearnerParams::default(),
            0,
        )
        .unwrap();
        let a = predict_greedy(&c, &[0.7, -1.1]).unwrap();
        let b = predict_greedy(&c, &[2.0, 0.3]).unwrap();
        let ab = predict_greedy(&c, &[0.7 * 3.0 + 2.0, -1.1 * 3.0 + 0.3]).unwrap();
        for t in 0..2 {
            assert!((ab[t] - (3.0 * a[t] + b[t])).abs() < 1e-9);
        }
        assert_eq!(predict_greedy(&c, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn custom_order_writes_targets_in_column_order() {
        let n = 30;
        let x = Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
        let y = Array2::from_shape_fn((n, 2), |(i, t)| {
            let wobble = (i % 3) as f64;
            if t == 0 {
                5.0 * i as f64 - wobble
            } else {
                i as f64 + wobble
            }
        });
        let d = Dataset::from_arrays(x, y).unwrap();
        let c = fit_chain(
            &d,
            &ChainSpec::point(Learner::LeastSquares).with_order(vec![1, 0]),
            &LearnerParams::default(),
            0,
        )
        .unwrap();
        let p = predict_greedy(&c, &[2.0]).unwrap();
        let first = c.stages[0].model.predict(&[2.0]);
        assert_eq!(p[1], first);
        assert_eq!(p[0], c.stages[1].model.predict(&[2.0, first]));
        assert!((p[1] - 2.0).abs() < 0.2 && (p[0] - 10.0).abs() < 0.5);
    }
}
