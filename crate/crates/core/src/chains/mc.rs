use rand::RngCore;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::smc::{ess, normalize, EssKind};

use super::{ChainModel, Estimator, ParticleCloud, Prediction};

/// Ancestral sampling through the chain: each of `m` paths draws stage `j` from
/// the stage density given the inputs and its own earlier draws.
///
/// Stages run outer and particles inner. Importance weights stay uniform.
pub fn mc_cloud<T: Real>(
    chain: &ChainModel<T>,
    x: &[T],
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<ParticleCloud<T>> {
    chain.check_input(x)?;
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut cloud = ParticleCloud::new(&chain.order, m);
    for j in 0..chain.n_targets() {
        let density = chain.evaluator(j)?;
        let target = chain.order[j];
        for p in 0..m {
            let z = chain.stage_input(x, &cloud.paths[p], j);
            let (v, lp) = density.sample_scored(&z, rng);
            cloud.paths[p][target] = v;
            cloud.stage_log_densities[p][j] = lp;
            cloud.path_log_densities[p] += lp;
        }
        let w = normalize(&cloud.log_weights)?;
        cloud.ess_trace.push(ess(EssKind::InverseSum, &w.weights));
    }
    cloud.ensure_finite_paths()?;
    cloud.log_z = T::zero();
    Ok(cloud)
}

pub fn predict_mc<T: Real>(
    chain: &ChainModel<T>,
    x: &[T],
    m: usize,
    estimator: Estimator,
    rng: &mut dyn RngCore,
) -> Result<Prediction<T>> {
    Ok(Prediction::from_cloud(
        mc_cloud(chain, x, m, rng)?,
        estimator,
    ))
}
