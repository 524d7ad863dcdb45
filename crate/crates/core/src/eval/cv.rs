use ndarray::Array2;
use rayon::prelude::*;

use crate::chains::{fit_method, Method, MethodConfig, ParticleCloud};
use crate::data::{fit_scaler, kfold, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived_rng};
use crate::scalar::Real;

use super::metrics::{mae, mse, zero_one_approx};

const FIT_TAG: u64 = 0;
const PREDICT_TAG: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldMetrics<T> {
    pub mse: T,
    pub mae: T,
    pub zero_one: T,
}

/// Fold means of the three losses, plus the per-fold values.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport<T> {
    pub mse: T,
    pub mae: T,
    pub zero_one: T,
    pub c: T,
    pub per_fold: Vec<FoldMetrics<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig<T> {
    pub method: MethodConfig<T>,
    pub c: T,
    /// Keep the particle cloud of every test instance (sampling methods only).
    pub keep_clouds: bool,
}

impl<T: Real> Default for CvConfig<T> {
    fn default() -> Self {
        Self {
            method: MethodConfig::default(),
            c: T::lit(0.1),
            keep_clouds: false,
        }
    }
}

/// A test instance's cloud, on the standardised scale of its fold.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceCloud<T> {
    /// Row index in the full dataset.
    pub instance: usize,
    pub fold: usize,
    pub cloud: ParticleCloud<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome<T> {
    pub report: MetricReport<T>,
    pub clouds: Vec<InstanceCloud<T>>,
}

pub fn cross_validate<T: Real>(
    data: &Dataset<T>,
    method: Method,
    k: usize,
    seed: u64,
    config: &CvConfig<T>,
) -> Result<CvOutcome<T>> {
    let plan = kfold(data.n_instances(), k, seed)?;
    cross_validate_with_plan(data, method, &plan, seed, config)
}

pub fn cross_validate_with_plan<T: Real>(
    data: &Dataset<T>,
    method: Method,
    plan: &FoldPlan,
    seed: u64,
    config: &CvConfig<T>,
) -> Result<CvOutcome<T>> {
    if plan.n_instances() != data.n_instances() {
        return Err(Error::ShapeMismatch(format!(
            "fold plan covers {} instances, dataset has {}",
            plan.n_instances(),
            data.n_instances()
        )));
    }
    if !(config.c > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "threshold c = {} must be positive",
            config.c
        )));
    }
    method.check()?;
    let folds = (0..plan.k)
        .into_par_iter()
        .map(|f| run_fold(data, method, plan, f, seed, config))
        .collect::<Result<Vec<_>>>()?;

    let mut per_fold = Vec::with_capacity(folds.len());
    let mut clouds = Vec::new();
    for (m, c) in folds {
        per_fold.push(m);
        clouds.extend(c);
    }
    let n = T::from_count(per_fold.len());
    let mean = |g: fn(&FoldMetrics<T>) -> T| per_fold.iter().map(g).sum::<T>() / n;
    let report = MetricReport {
        mse: mean(|m| m.mse),
        mae: mean(|m| m.mae),
        zero_one: mean(|m| m.zero_one),
        c: config.c,
        per_fold: per_fold.clone(),
    };
    Ok(CvOutcome { report, clouds })
}

fn run_fold<T: Real>(
    data: &Dataset<T>,
    method: Method,
    plan: &FoldPlan,
    fold: usize,
    seed: u64,
    config: &CvConfig<T>,
) -> Result<(FoldMetrics<T>, Vec<InstanceCloud<T>>)> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    if train_idx.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fold {fold} leaves {} training instances",
            train_idx.len()
        )));
    }
    if test_idx.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "fold {fold} has no test instances"
        )));
    }
    let train = data.select(&train_idx);
    let scaler = fit_scaler(&train);
    let train = scaler.transform(&train);
    let test = scaler.transform(&data.select(&test_idx));

    let model = fit_method(
        method,
        &train,
        &config.method,
        derive_seed(seed, &[fold as u64, FIT_TAG]),
    )?;
    let mut y_hat = Array2::zeros((test.n_instances(), test.n_targets()));
    let mut clouds = Vec::new();
    for (row, &instance) in test_idx.iter().enumerate() {
        let mut rng = derived_rng(seed, &[fold as u64, instance as u64, PREDICT_TAG]);
        let x = test.x_row(row).to_vec();
        let p = model.predict(&x, &mut rng)?;
        for (t, v) in p.y_hat.iter().enumerate() {
            y_hat[[row, t]] = *v;
        }
        if config.keep_clouds {
            if let Some(cloud) = p.cloud {
                clouds.push(InstanceCloud {
                    instance,
                    fold,
                    cloud,
                });
            }
        }
    }
    let y = test.y().view();
    let metrics = FoldMetrics {
        mse: mse(y, y_hat.view())?,
        mae: mae(y, y_hat.view())?,
        zero_one: zero_one_approx(y, y_hat.view(), config.c)?,
    };
    Ok((metrics, clouds))
}
