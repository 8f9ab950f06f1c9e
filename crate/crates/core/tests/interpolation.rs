use besov_ipm::interpolation::{
    check_classical, fit_by_pair, fit_exponent, run_family, ClassicalFamily, DensityFamily, ExperimentSpec,
    FamilyKind,
};
use besov_ipm::Error;

fn perturbed(beta: f64, pairs: Vec<(f64, f64)>) -> ExperimentSpec<f64> {
    ExperimentSpec::new(FamilyKind::PerturbedCircle { beta }, vec![4.0, 8.0, 16.0, 32.0], pairs, 10, 512)
}

#[test]
fn perturbed_family_first_order_distance_halves() {
    let mut spec = perturbed(0.0, vec![(1.0, 2.0)]);
    spec.log_weight = 0.0;
    let rows = run_family(&spec).unwrap();
    for w in rows.windows(2) {
        let ratio = w[0].d_gamma / w[1].d_gamma;
        assert!((ratio - 2.0).abs() < 0.4, "n={} ratio {ratio}", w[0].index);
    }
}

#[test]
fn rows_are_ordered_and_rougher_distance_dominates() {
    let rows = run_family(&perturbed(1.0, vec![(1.0, 2.0), (0.5, 1.0)])).unwrap();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!(r.d_gamma >= r.d_eta, "{r:?}");
    }
    let fits = fit_by_pair(&rows).unwrap();
    assert_eq!(fits.len(), 2);
    assert!(fits.iter().all(|f| f.rows.windows(2).all(|w| w[0].index < w[1].index)));
}

#[test]
fn radius_family_approaches_linear_at_eta_one() {
    let eps = vec![0.0125f64, 0.025, 0.05, 0.1, 0.2];
    let spec = ExperimentSpec::new(FamilyKind::CircleRadius, eps, vec![(0.5, 1.0)], 10, 4096);
    let rows = run_family(&spec).unwrap();
    let local: Vec<f64> = rows.windows(2).map(|w| (w[1].d_eta / w[0].d_eta).log2()).collect();
    assert!(local.windows(2).all(|w| w[0] > w[1]), "{local:?}");
    assert!((local[0] - 1.0).abs() < 0.1, "{local:?}");
    assert!(local.iter().all(|&e| e > 0.6 && e < 1.05), "{local:?}");
}

#[test]
fn oscillating_densities_follow_the_classical_exponent() {
    let family = DensityFamily::<f64>::new(ClassicalFamily::Oscillation, vec![4.0, 8.0, 16.0]);
    let report = check_classical(&family, 1.0, 1.0, 2.0, 10).unwrap();
    assert!((report.predicted - 2.0 / 3.0).abs() < 1e-12);
    assert!((report.fit.slope - report.predicted).abs() < 0.1, "{}", report.fit.slope);
}

#[test]
fn translated_bumps_are_not_an_extremal_family() {
    // a translate by s moves every coefficient by O(s), so both sides scale like s
    let family = DensityFamily::<f64>::new(ClassicalFamily::Translate, vec![0.05, 0.1, 0.2]);
    let report = check_classical(&family, 1.0, 1.0, 2.0, 10).unwrap();
    assert!((report.fit.slope - 1.0).abs() < 0.1, "{}", report.fit.slope);
    assert!(report.fit.slope > report.predicted);
}

#[test]
fn single_index_family_is_degenerate() {
    let family = DensityFamily::<f64>::new(ClassicalFamily::Oscillation, vec![4.0]);
    assert!(matches!(check_classical(&family, 1.0, 1.0, 2.0, 8), Err(Error::DegenerateData(_))));
    let rows = run_family(&perturbed(0.0, vec![(1.0, 2.0)])).unwrap();
    assert!(matches!(fit_exponent(&rows[..1]), Err(Error::DegenerateData(_))));
}
