use sampboost::bench::{
    best_stump_error, gen_interval_task, learning_curve, Algorithm, CurveOptions, TaskKind, TaskSpec,
};
use sampboost::boost::{sampled_boost, BoostConfig, Ensemble};
use sampboost::verify::margin_audit;
use sampboost::weak::{PlantedLearner, StumpLearner};

#[test]
fn boosting_drives_interval_training_error_to_zero() {
    let task = gen_interval_task(&TaskSpec::new(TaskKind::Interval, 200, 3)).unwrap();
    let learner = StumpLearner::new(0.125, 1).unwrap();
    let errors: Vec<f64> = [1, 10, 100]
        .iter()
        .map(|&k| {
            let cfg = BoostConfig::new(0.125, 0.1, 3).with_overrides(Some(k), None);
            sampled_boost(&task.train, &learner, &cfg).unwrap().0.training_error(&task.train)
        })
        .collect();
    assert!(errors[0] > 0.2, "{errors:?}");
    assert_eq!(errors[2], 0.0, "{errors:?}");
}

#[test]
fn boosting_beats_the_best_stump_at_n_1000() {
    let opts = CurveOptions::new(TaskKind::Interval, 17);
    let curve = learning_curve(&opts, &[Algorithm::SampledBoost, Algorithm::BestStump], &[1000], 1).unwrap();
    let boosted = curve.points[0].test_error.unwrap();
    let stump = curve.points[1].test_error.unwrap();
    assert!(boosted <= stump, "{boosted} vs {stump}");
    let task = gen_interval_task(&TaskSpec::new(TaskKind::Interval, 1000, 17)).unwrap();
    assert!((best_stump_error(&task.train).unwrap() - 0.25).abs() < 0.05);
}

#[test]
fn approximation_failures_stay_within_budget() {
    let task = gen_interval_task(&TaskSpec::new(TaskKind::Interval, 50, 8)).unwrap();
    let learner = PlantedLearner::new(task.target.clone(), 0.25, 2).unwrap();
    let cfg = BoostConfig { k_cap: None, ..BoostConfig::new(0.25, 0.1, 8) };
    let n_seeds = 40;
    let report = margin_audit(&task.train, &learner, &cfg, n_seeds).unwrap();
    let slack = 3.0 * (0.1f64 / n_seeds as f64).sqrt();
    assert!(report.fraction_over_budget <= 0.05 + slack, "{}", report.fraction_over_budget);
    assert!(report.fraction_margin_met >= 0.9 - slack);
    assert!(report.identities_pass);
}
