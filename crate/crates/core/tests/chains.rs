//! Behavioural checks of the chain regimes on the bimodal synthetic data.

use regchain::{
    cross_validate, estimate_map, fit_chain, fit_independent, generate_synth, mc_cloud,
    predict_independent, rng_from_seed, ChainSpec, CvConfig, Estimator, Learner, LearnerParams,
    Method, Prediction,
};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn independent_blr_predicts_the_bimodal_mean() {
    let data = generate_synth::<f64>(1000, 0.03, 3).unwrap();
    let model =
        fit_independent(&data, Learner::BayesianLinear, &LearnerParams::default(), 0).unwrap();
    for x in [-2.0, -0.5, 0.0, 0.7, 2.0] {
        let y = predict_independent(&model, &[x]).unwrap();
        assert!(y[0].abs() < 0.15, "x={x} gave {}", y[0]);
    }
}

#[test]
fn independent_predictions_follow_target_permutation() {
    let data = generate_synth::<f64>(200, 0.1, 4).unwrap();
    let swapped = data.permute_targets(&[1, 0]).unwrap();
    let params = LearnerParams::default();
    let a = fit_independent(&data, Learner::BayesianLinear, &params, 0).unwrap();
    let b = fit_independent(&swapped, Learner::BayesianLinear, &params, 0).unwrap();
    for x in [-1.0, 0.3, 1.5] {
        let pa = predict_independent(&a, &[x]).unwrap();
        let pb = predict_independent(&b, &[x]).unwrap();
        assert_eq!(pa[0], pb[1]);
        assert_eq!(pa[1], pb[0]);
    }
}

#[test]
fn single_sample_monte_carlo_returns_the_ancestral_draw() {
    let data = generate_synth::<f64>(200, 0.1, 5).unwrap();
    let spec = ChainSpec::density(Learner::KernelDensity);
    let chain = fit_chain(&data, &spec, &LearnerParams::default(), 1).unwrap();
    let cloud = mc_cloud(&chain, &[0.2], 1, &mut rng_from_seed(9)).unwrap();
    let draw = cloud.paths[0].clone();
    let pred = Prediction::from_cloud(cloud.clone(), Estimator::Map);
    assert_eq!(pred.y_hat, draw);
    assert_eq!(Estimator::Mmse.apply(&cloud), draw);
}

#[test]
fn map_density_grows_with_the_sample_count() {
    let data = generate_synth::<f64>(300, 0.1, 6).unwrap();
    let spec = ChainSpec::density(Learner::KernelDensity);
    let chain = fit_chain(&data, &spec, &LearnerParams::default(), 1).unwrap();
    let best = |m: usize, rep: u64| {
        let cloud = mc_cloud(&chain, &[0.0], m, &mut rng_from_seed(1000 * m as u64 + rep)).unwrap();
        let map = estimate_map(&cloud);
        let i = cloud.paths.iter().position(|p| *p == map).unwrap();
        cloud.path_log_densities[i]
    };
    let small = median((0..50).map(|r| best(10, r)).collect());
    let large = median((0..50).map(|r| best(1000, r)).collect());
    assert!(
        small <= large,
        "median at M=10 {small} above M=1000 {large}"
    );
}

#[test]
fn kde_mmse_averages_the_two_modes() {
    let data = generate_synth::<f64>(5000, 0.03, 8).unwrap();
    let spec = ChainSpec::density(Learner::KernelDensity);
    let chain = fit_chain(&data, &spec, &LearnerParams::default(), 2).unwrap();
    for (k, x) in [-1.0, 0.0, 1.0].into_iter().enumerate() {
        let cloud = mc_cloud(&chain, &[x], 1000, &mut rng_from_seed(k as u64)).unwrap();
        let y = Estimator::Mmse.apply(&cloud);
        assert!(y[0].abs() < 0.1, "x={x} gave {}", y[0]);
    }
}

#[test]
fn greedy_chain_cannot_commit_to_a_mode() {
    let data = generate_synth::<f64>(300, 0.03, 10).unwrap();
    let method: Method = "RC.B".parse().unwrap();
    let out = cross_validate(&data, method, 10, 0, &CvConfig::default()).unwrap();
    assert!(out.report.zero_one >= 0.9, "0/1 = {}", out.report.zero_one);
}
