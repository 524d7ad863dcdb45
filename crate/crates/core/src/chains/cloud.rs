use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::smc::normalize;

/// A resampling step taken after stage `stage` (0-based, in chain order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleEvent<T> {
    pub stage: usize,
    pub log_z: T,
    pub ess: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CloudWarning {
    /// Every particle had zero evaluator density at this stage; the stage
    /// increment was dropped so the weights stayed uniform across it.
    DegenerateStage { stage: usize },
}

impl fmt::Display for CloudWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DegenerateStage { stage } => {
                write!(f, "all particles had zero density at stage {stage}")
            }
        }
    }
}

/// Weighted particle paths for one test instance.
///
/// Two quantities are tracked per particle. The importance log-weight is what the
/// filter uses for ESS, resampling and the MMSE estimate; under plain Monte Carlo
/// it is uniform. The path log-density is `Σ_j ln ℓ_j` of the stages along the
/// path and is what the MAP estimate maximises.
///
/// Per-stage arrays are indexed `[particle][stage]` in chain order and travel with
/// a particle's lineage when it is resampled, so for every particle
/// `log_weight = initial + Σ_j (stage_log_weight + resample_correction)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud<T> {
    pub order: Vec<usize>,
    /// `[particle][target]`, targets in dataset column order.
    pub paths: Vec<Vec<T>>,
    pub log_weights: Vec<T>,
    pub initial_log_weight: T,
    pub stage_log_weights: Vec<Vec<T>>,
    pub resample_corrections: Vec<Vec<T>>,
    pub stage_log_densities: Vec<Vec<T>>,
    pub path_log_densities: Vec<T>,
    /// ESS after each stage's reweighting and before any resampling.
    pub ess_trace: Vec<T>,
    pub resample_events: Vec<ResampleEvent<T>>,
    /// `(stage, accepted, proposed)` for each rejuvenation pass.
    pub mh_moves: Vec<(usize, usize, usize)>,
    pub warnings: Vec<CloudWarning>,
    /// `ln Σ_m w_m` at the end.
    pub log_z: T,
}

impl<T: Real> ParticleCloud<T> {
    pub(crate) fn new(order: &[usize], m: usize) -> Self {
        let l = order.len();
        let initial = -T::from_count(m).ln();
        Self {
            order: order.to_vec(),
            paths: vec![vec![T::zero(); l]; m],
            log_weights: vec![initial; m],
            initial_log_weight: initial,
            stage_log_weights: vec![vec![T::zero(); l]; m],
            resample_corrections: vec![vec![T::zero(); l]; m],
            stage_log_densities: vec![vec![T::zero(); l]; m],
            path_log_densities: vec![T::zero(); m],
            ess_trace: Vec::with_capacity(l),
            resample_events: Vec::new(),
            mh_moves: Vec::new(),
            warnings: Vec::new(),
            log_z: T::zero(),
        }
    }

    pub fn n_particles(&self) -> usize {
        self.paths.len()
    }

    pub fn n_targets(&self) -> usize {
        self.order.len()
    }

    pub fn resampled_after(&self, stage: usize) -> bool {
        self.resample_events.iter().any(|e| e.stage == stage)
    }

    /// The log-weight rebuilt from the per-stage bookkeeping.
    pub fn reconstructed_log_weight(&self, m: usize) -> T {
        let mut w = self.initial_log_weight;
        for j in 0..self.n_targets() {
            w += self.stage_log_weights[m][j] + self.resample_corrections[m][j];
        }
        w
    }

    pub(crate) fn ensure_finite_paths(&self) -> Result<()> {
        if self
            .path_log_densities
            .iter()
            .all(|&d| d == T::neg_infinity())
        {
            return Err(Error::DegenerateCloud(
                "every particle path has zero density".into(),
            ));
        }
        Ok(())
    }
}

/// Path with the highest path log-density; ties go to the lowest index.
pub fn estimate_map<T: Real>(cloud: &ParticleCloud<T>) -> Vec<T> {
    let mut best = 0;
    for (m, &d) in cloud.path_log_densities.iter().enumerate() {
        if d > cloud.path_log_densities[best] {
            best = m;
        }
    }
    cloud.paths[best].clone()
}

/// Importance-weighted mean of the paths, self-normalised.
pub fn estimate_mmse<T: Real>(cloud: &ParticleCloud<T>) -> Vec<T> {
    let m = cloud.n_particles();
    let weights = match normalize(&cloud.log_weights) {
        Ok(n) => n.weights,
        Err(_) => vec![T::one() / T::from_count(m); m],
    };
    let mut out = vec![T::zero(); cloud.n_targets()];
    for (path, &w) in cloud.paths.iter().zip(&weights) {
        for (o, &v) in out.iter_mut().zip(path) {
            *o += w * v;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    #[default]
    Map,
    Mmse,
}

impl Estimator {
    pub fn apply<T: Real>(self, cloud: &ParticleCloud<T>) -> Vec<T> {
        match self {
            Self::Map => estimate_map(cloud),
            Self::Mmse => estimate_mmse(cloud),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Map => "map",
            Self::Mmse => "mmse",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "map" => Ok(Self::Map),
            "mmse" | "mean" => Ok(Self::Mmse),
            other => Err(Error::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

/// A point prediction, with the cloud it came from for sampling methods.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub y_hat: Vec<T>,
    pub estimator: Option<Estimator>,
    pub cloud: Option<ParticleCloud<T>>,
}

impl<T: Real> Prediction<T> {
    pub fn point(y_hat: Vec<T>) -> Self {
        Self {
            y_hat,
            estimator: None,
            cloud: None,
        }
    }

    pub fn from_cloud(cloud: ParticleCloud<T>, estimator: Estimator) -> Self {
        Self {
            y_hat: estimator.apply(&cloud),
            estimator: Some(estimator),
            cloud: Some(cloud),
        }
    }

    /// Any other estimator `g(cloud)`.
    pub fn with_estimator<F>(cloud: ParticleCloud<T>, g: F) -> Self
    where
        F: FnOnce(&ParticleCloud<T>) -> Vec<T>,
    {
        Self {
            y_hat: g(&cloud),
            estimator: None,
            cloud: Some(cloud),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(paths: Vec<Vec<f64>>, dens: Vec<f64>, lw: Vec<f64>) -> ParticleCloud<f64> {
        let mut c = ParticleCloud::new(&[0, 1], paths.len());
        c.paths = paths;
        c.path_log_densities = dens;
        c.log_weights = lw;
        c
    }

    #[test]
    fn map_prefers_highest_density_then_lowest_index() {
        let c = cloud(
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]],
            vec![-1.0, -0.5, -0.5],
            vec![0.0; 3],
        );
        assert_eq!(estimate_map(&c), vec![2.0, 2.0]);
    }

    #[test]
    fn map_ignores_importance_weights() {
        let c = cloud(
            vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![-3.0, -1.0],
            vec![0.0, f64::NEG_INFINITY],
        );
        assert_eq!(estimate_map(&c), vec![2.0, 2.0]);
    }

    #[test]
    fn mmse_is_self_normalised() {
        let c = cloud(
            vec![vec![0.0, 4.0], vec![2.0, 0.0]],
            vec![0.0; 2],
            vec![3.0_f64.ln() + 7.0, 7.0],
        );
        let y = estimate_mmse(&c);
        assert!((y[0] - 0.5).abs() < 1e-12);
        assert!((y[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_parsing() {
        assert_eq!("MAP".parse::<Estimator>().unwrap(), Estimator::Map);
        assert_eq!("mmse".parse::<Estimator>().unwrap(), Estimator::Mmse);
        assert!("median".parse::<Estimator>().is_err());
    }
}
