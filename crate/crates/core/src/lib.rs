//! Probabilistic regressor chains for multi-output regression.
//!
//! A regressor chain predicts targets one after another, each stage conditioning on
//! the inputs and the earlier targets. Beyond greedy plug-in inference this crate
//! explores the joint distribution of the targets by Monte Carlo sampling and by a
//! particle filter that proposes with a cheap sampler and reweights with a richer
//! evaluator, then reads off a point estimate (the most probable path, or the
//! weighted mean).
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the `*F64` aliases
//! cover the common case.
//!
//! ```
//! use regchain::{cross_validate, generate_synth, CvConfig, Method};
//!
//! let data = generate_synth::<f64>(200, 0.03, 1).unwrap();
//! let method: Method = "IR.B".parse().unwrap();
//! let out = cross_validate(&data, method, 5, 7, &CvConfig::default()).unwrap();
//! assert!(out.report.mse > 0.5);
//! ```

// NaN-rejecting guards are written as negated comparisons on purpose, and the
// numeric kernels index several arrays with one loop counter.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chains;
pub mod data;
pub mod error;
pub mod eval;
pub mod learners;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod smc;

pub use chains::{
    estimate_map, estimate_mmse, fit_chain, fit_independent, fit_method, mc_cloud, pf_cloud,
    predict_greedy, predict_independent, predict_mc, predict_pf, validate_order, ChainMode,
    ChainModel, ChainSpec, Estimator, FittedMethod, IndependentModel, Method, MethodConfig,
    ParticleCloud, PfConfig, Prediction,
};
pub use data::{generate_synth, kfold, parse_arff, parse_csv, Dataset, FoldPlan};
pub use error::{Error, Result};
pub use eval::{
    avg_rank, avg_rank_partial, cross_validate, cross_validate_with_plan, mae, mse,
    zero_one_approx, CvConfig, CvOutcome, MetricReport,
};
pub use learners::{ConditionalDensity, Learner, LearnerParams, Regressor};
pub use rng::{derive_seed, derived_rng, rng_from_seed, ChainRng};
pub use scalar::Real;
pub use smc::EssKind;

pub type DatasetF64 = Dataset<f64>;
pub type DatasetF32 = Dataset<f32>;
pub type ChainModelF64 = ChainModel<f64>;
pub type ParticleCloudF64 = ParticleCloud<f64>;
pub type PredictionF64 = Prediction<f64>;
pub type MetricReportF64 = MetricReport<f64>;
pub type MethodConfigF64 = MethodConfig<f64>;
pub type PfConfigF64 = PfConfig<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
