//! Datasets: ingestion, synthetic generation, standardisation and fold splitting.

mod arff;
mod csv;
mod folds;
mod scaler;
mod synth;

use ndarray::{Array2, ArrayView1, Axis};

pub use arff::{parse_arff, ArffData};
pub use csv::parse_csv;
pub use folds::{kfold, FoldPlan};
pub use scaler::{fit_scaler, ColumnRole, DatasetScaler, Scaler, STD_FLOOR};
pub use synth::generate_synth;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `N` instances with `D` real inputs and `L` real targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Array2<T>,
    y: Array2<T>,
    feature_names: Vec<String>,
    target_names: Vec<String>,
}

impl<T: Real> Dataset<T> {
    pub fn new(
        x: Array2<T>,
        y: Array2<T>,
        feature_names: Vec<String>,
        target_names: Vec<String>,
    ) -> Result<Self> {
        let (n, d) = x.dim();
        let (ny, l) = y.dim();
        if n != ny {
            return Err(Error::ShapeMismatch(format!(
                "{n} input rows but {ny} target rows"
            )));
        }
        if n == 0 {
            return Err(Error::EmptyDataset { dropped: 0 });
        }
        if d == 0 {
            return Err(Error::NoFeatures);
        }
        if l == 0 {
            return Err(Error::InvalidArgument(
                "dataset needs at least one target".into(),
            ));
        }
        if feature_names.len() != d || target_names.len() != l {
            return Err(Error::ShapeMismatch(format!(
                "{} feature names for {d} columns, {} target names for {l} columns",
                feature_names.len(),
                target_names.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "dataset contains non-finite values".into(),
            ));
        }
        Ok(Self {
            x,
            y,
            feature_names,
            target_names,
        })
    }

    /// Build with generated names `x1..xD`, `y1..yL`.
    pub fn from_arrays(x: Array2<T>, y: Array2<T>) -> Result<Self> {
        let fnames = (1..=x.ncols()).map(|i| format!("x{i}")).collect();
        let tnames = (1..=y.ncols()).map(|i| format!("y{i}")).collect();
        Self::new(x, y, fnames, tnames)
    }

    pub fn n_instances(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_targets(&self) -> usize {
        self.y.ncols()
    }

    pub fn x(&self) -> &Array2<T> {
        &self.x
    }

    pub fn y(&self) -> &Array2<T> {
        &self.y
    }

    pub fn x_row(&self, i: usize) -> ArrayView1<'_, T> {
        self.x.row(i)
    }

    pub fn y_row(&self, i: usize) -> ArrayView1<'_, T> {
        self.y.row(i)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_names(&self) -> &[String] {
        &self.target_names
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            x: self.x.select(Axis(0), indices),
            y: self.y.select(Axis(0), indices),
            feature_names: self.feature_names.clone(),
            target_names: self.target_names.clone(),
        }
    }

    /// Same inputs with the target columns permuted: new column `j` is old column `perm[j]`.
    pub fn permute_targets(&self, perm: &[usize]) -> Result<Self> {
        crate::chains::validate_order(perm, self.n_targets())?;
        Ok(Self {
            x: self.x.clone(),
            y: self.y.select(Axis(1), perm),
            feature_names: self.feature_names.clone(),
            target_names: perm.iter().map(|&j| self.target_names[j].clone()).collect(),
        })
    }

    /// Replace the numeric content, keeping names. Used after scaling.
    pub(crate) fn with_arrays(&self, x: Array2<T>, y: Array2<T>) -> Self {
        Self {
            x,
            y,
            feature_names: self.feature_names.clone(),
            target_names: self.target_names.clone(),
        }
    }

    /// Header plus one line per instance, features first then targets.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self
            .feature_names
            .iter()
            .chain(&self.target_names)
            .map(String::as_str)
            .collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for i in 0..self.n_instances() {
            let cells: Vec<String> = self
                .x
                .row(i)
                .iter()
                .chain(self.y.row(i).iter())
                .map(|v| v.to_string())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
