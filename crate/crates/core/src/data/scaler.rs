use ndarray::{Array2, ArrayView2};

use super::Dataset;
use crate::scalar::Real;

/// Smallest standard deviation a column may be divided by.
pub const STD_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Features,
    Targets,
}

/// Per-column standardisation `(v - mean) / std` with population std.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
    pub role: ColumnRole,
}

impl<T: Real> Scaler<T> {
    pub fn fit(m: ArrayView2<'_, T>, role: ColumnRole) -> Self {
        let n = T::from_count(m.nrows().max(1));
        let floor = T::lit(STD_FLOOR);
        let mut means = Vec::with_capacity(m.ncols());
        let mut stds = Vec::with_capacity(m.ncols());
        for col in m.columns() {
            let mean = col.iter().copied().sum::<T>() / n;
            let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
            means.push(mean);
            stds.push(var.sqrt().max(floor));
        }
        Self { means, stds, role }
    }

    pub fn apply(&self, m: ArrayView2<'_, T>) -> Array2<T> {
        let mut out = m.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|v| (v - self.means[j]) / self.stds[j]);
        }
        out
    }

    pub fn invert(&self, m: ArrayView2<'_, T>) -> Array2<T> {
        let mut out = m.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|v| v * self.stds[j] + self.means[j]);
        }
        out
    }
}

/// Feature and target scalers fitted on the same data.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetScaler<T> {
    pub features: Scaler<T>,
    pub targets: Scaler<T>,
}

impl<T: Real> DatasetScaler<T> {
    pub fn transform(&self, data: &Dataset<T>) -> Dataset<T> {
        data.with_arrays(
            self.features.apply(data.x().view()),
            self.targets.apply(data.y().view()),
        )
    }
}

pub fn fit_scaler<T: Real>(data: &Dataset<T>) -> DatasetScaler<T> {
    DatasetScaler {
        features: Scaler::fit(data.x().view(), ColumnRole::Features),
        targets: Scaler::fit(data.y().view(), ColumnRole::Targets),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synth;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn two_point_column() {
        let s = Scaler::fit(array![[1.0_f64], [3.0]].view(), ColumnRole::Features);
        assert_eq!(s.means, vec![2.0]);
        assert_eq!(s.stds, vec![1.0]);
        assert_eq!(s.apply(array![[1.0], [3.0]].view()), array![[-1.0], [1.0]]);
    }

    #[test]
    fn constant_column_uses_floor() {
        let s = Scaler::fit(array![[5.0_f64], [5.0]].view(), ColumnRole::Targets);
        assert_eq!(s.stds, vec![STD_FLOOR]);
        assert_eq!(s.apply(array![[5.0], [5.0]].view()), array![[0.0], [0.0]]);
    }

    #[test]
    fn synth_targets_standardised_on_fitting_data() {
        let d = generate_synth::<f64>(500, 0.03, 2).unwrap();
        let t = fit_scaler(&d).transform(&d);
        for col in t.y().columns() {
            let n = col.len() as f64;
            let m = col.sum() / n;
            let v = col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
            assert!(m.abs() < 1e-9);
            assert!((v.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn apply_then_invert_is_identity(v in proptest::collection::vec(-1e3f64..1e3, 15)) {
            let m = Array2::from_shape_vec((5, 3), v).unwrap();
            let s = Scaler::fit(m.view(), ColumnRole::Features);
            let back = s.invert(s.apply(m.view()).view());
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
