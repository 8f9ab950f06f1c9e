use besov_ipm::besov::ipm_dual;
use besov_ipm::estimator::{minimum_ipm_estimate, rate_experiment, ModelFamily, PreparedFamily};
use besov_ipm::measures::{quadrature_measure, sample_iid, ParametricCurve};

fn grid(step: f64, half_width: i64) -> ModelFamily<f64> {
    let offsets: Vec<f64> = (-half_width..=half_width).map(|k| k as f64 * step).collect();
    ModelFamily::radius_grid(&offsets, 512, 0.5).unwrap()
}

#[test]
fn noiseless_members_are_recovered_exactly() {
    let family = grid(0.01, 5);
    let prepared = PreparedFamily::new(&family, 6).unwrap();
    for i in [0, 3, 5, 10] {
        let fit = prepared.estimate(family.measure(i)).unwrap();
        assert_eq!(fit.chosen, i);
        assert!(fit.ipm < 1e-10);
        assert_eq!(fit.params, *family.candidate(i));
    }
}

#[test]
fn chosen_score_never_exceeds_the_truth_score() {
    let family = grid(0.01, 5);
    let truth = ParametricCurve::circle_radius(0.02).unwrap();
    for seed in 0..5 {
        let sample = sample_iid(&truth, 300, seed).unwrap();
        let fit = minimum_ipm_estimate(&sample, &family, 6).unwrap();
        assert!(fit.scores.iter().all(|&s| fit.ipm <= s));
        assert!(fit.ipm <= fit.scores[7]);
    }
}

#[test]
fn large_samples_reach_the_grid_floor() {
    let family = grid(0.01, 5);
    let truth = ParametricCurve::circle_radius(0.02).unwrap();
    let prepared = PreparedFamily::new(&family, 6).unwrap();
    let truth_field = prepared.analyze(&quadrature_measure(&truth, 512).unwrap()).unwrap();
    let fit = prepared.estimate(&sample_iid(&truth, 20_000, 3).unwrap()).unwrap();
    assert_eq!(fit.chosen, 7);
    assert!(ipm_dual(prepared.field(fit.chosen), &truth_field, 1.0).unwrap() < 1e-10);
}

#[test]
fn mean_error_decays_with_sample_size() {
    let family = grid(5e-4, 10);
    let truth = ParametricCurve::circle_radius(0.002).unwrap();
    let result = rate_experiment(&truth, &family, &[100, 400, 1600], 10, 0, 1.0, 6).unwrap();
    assert_eq!(result.records.len(), 30);
    let means: Vec<f64> = result.rows.iter().map(|r| r.mean_error).collect();
    let inversions = means.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(inversions <= 1, "{means:?}");
    assert!(means[0] > 0.0);
    let again = rate_experiment(&truth, &family, &[100, 400, 1600], 10, 0, 1.0, 6).unwrap();
    assert_eq!(result, again);
}
