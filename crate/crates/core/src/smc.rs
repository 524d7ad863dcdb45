//! Sequential Monte Carlo primitives: log-weight normalisation, effective sample
//! size, multinomial resampling with weight reset, and random-walk
//! Metropolis–Hastings rejuvenation.

use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Real};

/// Weights normalised to sum to one, together with `ln Ẑ = ln Σ w`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights<T> {
    pub weights: Vec<T>,
    pub log_z: T,
}

pub fn normalize<T: Real>(log_weights: &[T]) -> Result<NormalizedWeights<T>> {
    let log_z = log_sum_exp(log_weights);
    if !log_z.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let weights = log_weights.iter().map(|&lw| (lw - log_z).exp()).collect();
    Ok(NormalizedWeights { weights, log_z })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EssKind {
    /// `1 / Σ w̄²`
    #[default]
    InverseSum,
    /// `1 / max w̄`
    InverseMax,
}

impl FromStr for EssKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::InverseSum),
            "max" => Ok(Self::InverseMax),
            other => Err(Error::Config(format!("unknown ESS estimator `{other}`"))),
        }
    }
}

fn clamp_ess<T: Real>(v: T, m: usize) -> T {
    v.max(T::one()).min(T::from_count(m))
}

/// Weights divided by their maximum, so uniform and one-hot clouds give exact
/// integer ESS values.
fn relative<T: Real>(normalized: &[T]) -> Option<Vec<T>> {
    let top = normalized.iter().copied().fold(T::zero(), T::max);
    (top > T::zero()).then(|| normalized.iter().map(|&w| w / top).collect())
}

/// `1 / Σ w̄²`, evaluated as `(Σ v)² / Σ v²` with `v = w̄ / max w̄`.
pub fn ess_inverse_sum<T: Real>(normalized: &[T]) -> T {
    let Some(v) = relative(normalized) else {
        return T::one();
    };
    let s: T = v.iter().copied().sum();
    let s2: T = v.iter().map(|&w| w * w).sum();
    clamp_ess(s * s / s2, normalized.len())
}

/// `1 / max w̄`, evaluated as `Σ v` with `v = w̄ / max w̄`.
pub fn ess_inverse_max<T: Real>(normalized: &[T]) -> T {
    let Some(v) = relative(normalized) else {
        return T::one();
    };
    clamp_ess(v.iter().copied().sum(), normalized.len())
}

pub fn ess<T: Real>(kind: EssKind, normalized: &[T]) -> T {
    match kind {
        EssKind::InverseSum => ess_inverse_sum(normalized),
        EssKind::InverseMax => ess_inverse_max(normalized),
    }
}

/// Offspring of one resampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled<T> {
    /// `ancestors[m]` is the index of the particle copied into slot `m`.
    pub ancestors: Vec<usize>,
    /// Every entry is `ln Ẑ − ln M`.
    pub log_weights: Vec<T>,
}

impl<T> Resampled<T> {
    pub fn gather<P: Clone>(&self, items: &[P]) -> Vec<P> {
        self.ancestors.iter().map(|&a| items[a].clone()).collect()
    }
}

/// Draw `m` ancestors with replacement with probabilities `normalized`, then reset
/// all weights to `Ẑ / M`.
pub fn resample_multinomial<T: Real, R: Rng + ?Sized>(
    normalized: &[T],
    log_z: T,
    m: usize,
    rng: &mut R,
) -> Resampled<T> {
    let mut cdf = Vec::with_capacity(normalized.len());
    let mut acc = T::zero();
    for &w in normalized {
        acc += w;
        cdf.push(acc);
    }
    let last_positive = normalized.iter().rposition(|&w| w > T::zero()).unwrap_or(0);
    let ancestors = (0..m)
        .map(|_| {
            let u = T::unit_uniform(rng) * acc;
            cdf.partition_point(|&c| c <= u).min(last_positive)
        })
        .collect();
    let reset = log_z - T::from_count(m).ln();
    Resampled {
        ancestors,
        log_weights: vec![reset; m],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhConfig<T> {
    pub steps: usize,
    pub proposal_std: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhOutcome<T> {
    pub values: Vec<T>,
    pub accepted: usize,
    pub proposed: usize,
}

impl<T: Real> MhOutcome<T> {
    pub fn acceptance_rate(&self) -> T {
        if self.proposed == 0 {
            T::zero()
        } else {
            T::from_count(self.accepted) / T::from_count(self.proposed)
        }
    }
}

/// Log acceptance probability `min(0, ln π(z) + ln q(y|z) − ln π(y) − ln q(z|y))`.
pub fn mh_log_acceptance<T: Real>(
    ln_target_current: T,
    ln_target_proposed: T,
    ln_q_forward: T,
    ln_q_backward: T,
) -> T {
    if ln_target_proposed == T::neg_infinity() {
        return T::neg_infinity();
    }
    if ln_target_current == T::neg_infinity() {
        return T::zero();
    }
    let r = ln_target_proposed + ln_q_backward - ln_target_current - ln_q_forward;
    if r.is_nan() {
        T::neg_infinity()
    } else {
        r.min(T::zero())
    }
}

/// Run `cfg.steps` independent Gaussian random-walk MH steps per particle.
///
/// `target(m, v)` is the log target density of particle `m` at `v`. The proposal
/// is symmetric, so its density terms cancel in the acceptance ratio.
pub fn mh_rejuvenate<T, F, R>(
    values: &[T],
    target: F,
    cfg: &MhConfig<T>,
    rng: &mut R,
) -> MhOutcome<T>
where
    T: Real,
    F: Fn(usize, T) -> T,
    R: Rng + ?Sized,
{
    let mut out = values.to_vec();
    let mut accepted = 0;
    for (m, v) in out.iter_mut().enumerate() {
        let mut current_lp = target(m, *v);
        for _ in 0..cfg.steps {
            let proposal = *v + cfg.proposal_std * T::standard_normal(rng);
            let proposal_lp = target(m, proposal);
            let log_alpha = mh_log_acceptance(current_lp, proposal_lp, T::zero(), T::zero());
            let u = T::unit_uniform(rng);
            if u.ln() < log_alpha {
                *v = proposal;
                current_lp = proposal_lp;
                accepted += 1;
            }
        }
    }
    MhOutcome {
        values: out,
        accepted,
        proposed: cfg.steps * values.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::scalar::normal_ln_pdf;
    use proptest::prelude::*;

    #[test]
    fn normalize_basic_cases() {
        let n = normalize(&[0.0_f64, 0.0]).unwrap();
        assert_eq!(n.weights, vec![0.5, 0.5]);
        assert!((n.log_z - 2f64.ln()).abs() < 1e-15);

        let n = normalize(&[0.0_f64, f64::NEG_INFINITY]).unwrap();
        assert_eq!(n.weights, vec![1.0, 0.0]);

        let n = normalize(&[-1000.0_f64, -1000.0, -1001.0]).unwrap();
        assert!(n.weights.iter().all(|w| w.is_finite()));
        assert!((n.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_all_neg_inf_is_degenerate() {
        assert!(matches!(
            normalize(&[f64::NEG_INFINITY; 3]),
            Err(Error::DegenerateWeights)
        ));
    }

    #[test]
    fn ess_reference_values() {
        let u = [0.25_f64; 4];
        assert_eq!(ess_inverse_sum(&u), 4.0);
        assert_eq!(ess_inverse_max(&u), 4.0);
        let one_hot = [0.0_f64, 1.0, 0.0];
        assert_eq!(ess_inverse_sum(&one_hot), 1.0);
        assert_eq!(ess_inverse_max(&one_hot), 1.0);
        let half = [0.5_f64, 0.5, 0.0, 0.0];
        assert_eq!(ess_inverse_sum(&half), 2.0);
        assert_eq!(ess_inverse_max(&half), 2.0);
    }

    #[test]
    fn one_hot_resampling_copies_survivor() {
        let mut rng = rng_from_seed(1);
        let r = resample_multinomial(&[0.0_f64, 0.0, 1.0, 0.0], 0.3, 4, &mut rng);
        assert_eq!(r.ancestors, vec![2; 4]);
        assert!(r
            .log_weights
            .iter()
            .all(|&l| (l - (0.3 - 4f64.ln())).abs() < 1e-15));
    }

    #[test]
    fn uniform_offspring_counts_concentrate() {
        let m = 100_000;
        let w = vec![1.0 / 8.0; 8];
        let mut rng = rng_from_seed(2);
        let r = resample_multinomial(&w, 0.0_f64, m, &mut rng);
        let mut counts = [0usize; 8];
        r.ancestors.iter().for_each(|&a| counts[a] += 1);
        let p = 1.0 / 8.0;
        let sd = (m as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - m as f64 * p).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn post_resample_ess_is_m_and_mass_is_conserved() {
        let lw = [-0.3_f64, -2.0, 0.7, -5.0, 0.1];
        let n = normalize(&lw).unwrap();
        let r = resample_multinomial(&n.weights, n.log_z, lw.len(), &mut rng_from_seed(3));
        let after = normalize(&r.log_weights).unwrap();
        assert_eq!(ess_inverse_sum(&after.weights), 5.0);
        assert_eq!(ess_inverse_max(&after.weights), 5.0);
        let before: f64 = lw.iter().map(|v| v.exp()).sum();
        let total: f64 = r.log_weights.iter().map(|v| v.exp()).sum();
        assert!(((before - total) / before).abs() < 1e-10);
    }

    #[test]
    fn zero_steps_is_identity() {
        let v = vec![0.1_f64, -3.0, 2.0];
        let cfg = MhConfig {
            steps: 0,
            proposal_std: 1.0,
        };
        let out = mh_rejuvenate(&v, |_, x| -x * x, &cfg, &mut rng_from_seed(0));
        assert_eq!(out.values, v);
    }

    #[test]
    fn symmetric_proposal_ratio_reduces_to_target_ratio() {
        let sigma = 0.7_f64;
        let (y, z) = (0.2, 1.1);
        let lq_fwd = normal_ln_pdf(z, y, sigma * sigma);
        let lq_bwd = normal_ln_pdf(y, z, sigma * sigma);
        let (lp_y, lp_z) = (-0.5 * y * y, -0.5 * z * z);
        let full = mh_log_acceptance(lp_y, lp_z, lq_fwd, lq_bwd);
        let reduced = mh_log_acceptance(lp_y, lp_z, 0.0, 0.0);
        assert!((full - reduced).abs() < 1e-15);
        assert!((reduced - (lp_z - lp_y).min(0.0)).abs() < 1e-15);
    }

    #[test]
    fn impossible_proposals_are_rejected() {
        assert_eq!(
            mh_log_acceptance(0.0_f64, f64::NEG_INFINITY, 0.0, 0.0),
            f64::NEG_INFINITY
        );
        let cfg = MhConfig {
            steps: 50,
            proposal_std: 1.0,
        };
        let out = mh_rejuvenate(
            &[0.5_f64],
            |_, x| {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            },
            &cfg,
            &mut rng_from_seed(5),
        );
        assert!((0.0..=1.0).contains(&out.values[0]));
    }

    #[test]
    fn tiny_proposals_always_move_a_little() {
        let cfg = MhConfig {
            steps: 100,
            proposal_std: 1e-6,
        };
        let start = vec![0.3_f64; 50];
        let out = mh_rejuvenate(&start, |_, x| -0.5 * x * x, &cfg, &mut rng_from_seed(6));
        assert!(out.acceptance_rate() > 0.99);
        let mean_move = out
            .values
            .iter()
            .zip(&start)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 50.0;
        assert!(mean_move < 1e-4);
    }

    proptest! {
        #[test]
        fn ess_bounded_and_permutation_invariant(raw in proptest::collection::vec(0.0f64..1.0, 1..50), rot in 0usize..50) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-9);
            let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let m = w.len() as f64;
            let mut shifted = w.clone();
            shifted.rotate_left(rot % w.len());
            shifted.reverse();
            for kind in [EssKind::InverseSum, EssKind::InverseMax] {
                let e = ess(kind, &w);
                prop_assert!((1.0..=m).contains(&e));
                prop_assert!((e - ess(kind, &shifted)).abs() < 1e-9 * m);
            }
        }
    }
}
