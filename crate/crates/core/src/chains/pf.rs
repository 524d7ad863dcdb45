use rand::RngCore;

use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Real};
use crate::smc::{ess, mh_rejuvenate, normalize, resample_multinomial, EssKind, MhConfig};

use super::{ChainModel, CloudWarning, Estimator, ParticleCloud, Prediction, ResampleEvent};

const DEFAULT_MH_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfConfig<T> {
    pub particles: usize,
    /// Resample when `ESS ≤ eta · M`. Zero never resamples, one always does.
    pub eta: T,
    pub ess: EssKind,
    /// Random-walk MH steps per particle after each resampling.
    pub mh_steps: usize,
    /// MH step size; defaults to the sampler's own scale, else 0.1.
    pub mh_sigma: Option<T>,
}

impl<T: Real> Default for PfConfig<T> {
    fn default() -> Self {
        Self {
            particles: 100,
            eta: T::lit(0.1),
            ess: EssKind::InverseSum,
            mh_steps: 0,
            mh_sigma: None,
        }
    }
}

impl<T: Real> PfConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(Error::InvalidArgument("particle filter needs M ≥ 2".into()));
        }
        if !(self.eta >= T::zero() && self.eta <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "eta {} outside [0, 1]",
                self.eta
            )));
        }
        if let Some(s) = self.mh_sigma {
            if !(s > T::zero() && s.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "MH step size {s} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Sequential importance resampling through the chain.
///
/// Stage `j` draws each particle's value from the sampler `f_j`, which sees only
/// the particle's earlier targets, and multiplies its weight by
/// `ℓ_j(y | x, prefix) / f_j(y | prefix)`. When the ESS drops to `eta · M` the
/// cloud is resampled multinomially and all weights reset to `Ẑ / M`.
pub fn pf_cloud<T: Real>(
    chain: &ChainModel<T>,
    x: &[T],
    cfg: &PfConfig<T>,
    rng: &mut dyn RngCore,
) -> Result<ParticleCloud<T>> {
    chain.check_input(x)?;
    cfg.validate()?;
    let m = cfg.particles;
    let threshold = cfg.eta * T::from_count(m);
    let mut cloud = ParticleCloud::new(&chain.order, m);

    for j in 0..chain.n_targets() {
        let sampler = chain.sampler(j)?;
        let evaluator = chain.evaluator(j)?;
        let target = chain.order[j];
        for p in 0..m {
            let zf = chain.sampler_input(x, &cloud.paths[p], j);
            let (v, ln_f) = sampler.sample_scored(&zf, rng);
            let zl = chain.stage_input(x, &cloud.paths[p], j);
            let ln_l = evaluator.ln_pdf(&zl, v);
            let inc = if ln_l == T::neg_infinity() {
                T::neg_infinity()
            } else if ln_f.is_finite() {
                ln_l - ln_f
            } else {
                ln_l
            };
            cloud.paths[p][target] = v;
            cloud.stage_log_weights[p][j] = inc;
            cloud.stage_log_densities[p][j] = ln_l;
            cloud.path_log_densities[p] += ln_l;
            cloud.log_weights[p] += inc;
        }

        if cloud.log_weights.iter().all(|&w| w == T::neg_infinity()) {
            for p in 0..m {
                cloud.stage_log_weights[p][j] = T::zero();
                cloud.log_weights[p] = cloud.reconstructed_log_weight(p);
            }
            cloud
                .warnings
                .push(CloudWarning::DegenerateStage { stage: j });
        }

        let w = normalize(&cloud.log_weights)?;
        let e = ess(cfg.ess, &w.weights);
        cloud.ess_trace.push(e);
        if e <= threshold {
            let r = resample_multinomial(&w.weights, w.log_z, m, rng);
            let old_weights = r.gather(&cloud.log_weights);
            cloud.paths = r.gather(&cloud.paths);
            cloud.stage_log_weights = r.gather(&cloud.stage_log_weights);
            cloud.resample_corrections = r.gather(&cloud.resample_corrections);
            cloud.stage_log_densities = r.gather(&cloud.stage_log_densities);
            cloud.path_log_densities = r.gather(&cloud.path_log_densities);
            for p in 0..m {
                cloud.resample_corrections[p][j] += r.log_weights[p] - old_weights[p];
            }
            cloud.log_weights = r.log_weights;
            cloud.resample_events.push(ResampleEvent {
                stage: j,
                log_z: w.log_z,
                ess: e,
            });

            if cfg.mh_steps > 0 {
                let step = cfg
                    .mh_sigma
                    .or_else(|| sampler.proposal_scale())
                    .unwrap_or(T::lit(DEFAULT_MH_STEP));
                let mh = MhConfig {
                    steps: cfg.mh_steps,
                    proposal_std: step,
                };
                let values: Vec<T> = cloud.paths.iter().map(|path| path[target]).collect();
                let inputs: Vec<Vec<T>> = cloud
                    .paths
                    .iter()
                    .map(|path| chain.stage_input(x, path, j))
                    .collect();
                let out = mh_rejuvenate(&values, |p, v| evaluator.ln_pdf(&inputs[p], v), &mh, rng);
                for p in 0..m {
                    let v = out.values[p];
                    cloud.paths[p][target] = v;
                    let ln_l = evaluator.ln_pdf(&inputs[p], v);
                    cloud.stage_log_densities[p][j] = ln_l;
                    cloud.path_log_densities[p] =
                        cloud.stage_log_densities[p][..=j].iter().copied().sum();
                }
                cloud.mh_moves.push((j, out.accepted, out.proposed));
            }
        }
    }
    cloud.log_z = log_sum_exp(&cloud.log_weights);
    cloud.ensure_finite_paths()?;
    Ok(cloud)
}

pub fn predict_pf<T: Real>(
    chain: &ChainModel<T>,
    x: &[T],
    cfg: &PfConfig<T>,
    estimator: Estimator,
    rng: &mut dyn RngCore,
) -> Result<Prediction<T>> {
    Ok(Prediction::from_cloud(
        pf_cloud(chain, x, cfg, rng)?,
        estimator,
    ))
}
