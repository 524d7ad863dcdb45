//! Losses, cross-validation and average ranks.

mod cv;
mod metrics;
mod rank;

pub use cv::{
    cross_validate, cross_validate_with_plan, CvConfig, CvOutcome, FoldMetrics, InstanceCloud,
    MetricReport,
};
pub use metrics::{mae, mse, zero_one_approx};
pub use rank::{avg_rank, avg_rank_partial, rank_row};
