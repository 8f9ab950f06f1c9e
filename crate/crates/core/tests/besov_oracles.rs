use besov_ipm::besov::{analyze_measure, besov_norm, gamma_op, ipm_dual, ipm_log_weighted, BesovParams, CoefficientField};
use besov_ipm::measures::{DiscreteMeasure, MeasureKind};
use besov_ipm::wavelets::{active_indices, eval_tensor, AxisBox, TensorIndex, WaveletFamily};

fn dirac(x: f64, y: f64) -> DiscreteMeasure<f64> {
    DiscreteMeasure::new(2, vec![x, y], vec![1.0], MeasureKind::Quadrature).unwrap()
}

/// Coefficients by scanning every index whose support meets the atoms' box.
fn brute_force(m: &DiscreteMeasure<f64>, family: &WaveletFamily<f64>, max_level: u32) -> CoefficientField<f64> {
    let bounds = m.bounding_box().unwrap();
    let mut entries = Vec::new();
    for j in 0..=max_level {
        for idx in active_indices(family, j, &bounds) {
            let v: f64 = m.atoms().map(|(x, w)| w * eval_tensor(family, &idx, x)).sum();
            if v.abs() >= 1e-15 {
                entries.push((idx, v));
            }
        }
    }
    CoefficientField::from_entries(2, max_level, entries).unwrap()
}

#[test]
fn analysis_matches_brute_force() {
    let family = WaveletFamily::build(4, 12).unwrap();
    let m = DiscreteMeasure::new(2, vec![0.13, -0.4, 0.52, 0.77, -0.31, 0.05], vec![0.2, 0.5, 0.3], MeasureKind::Quadrature)
        .unwrap();
    let fast = analyze_measure(&m, &family, 5).unwrap();
    let slow = brute_force(&m, &family, 5);
    let diff = fast.difference(&slow).unwrap();
    let worst = diff.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
    assert_eq!(fast.len(), slow.len());
}

#[test]
fn dirac_pair_at_gamma_one_carries_a_log_factor() {
    let family = WaveletFamily::build(4, 12).unwrap();
    let origin = analyze_measure(&dirac(0.0, 0.0), &family, 8).unwrap();
    let dist = |eps: f64| {
        let shifted = brute_force(&dirac(eps, 0.0), &family, 8);
        ipm_dual(&origin, &shifted, 1.0).unwrap()
    };
    // every level below 2^j ε ≈ 1 contributes about ε, so d ≈ ε log₂(1/ε)
    let ratio = dist(2f64.powi(-6)) / dist(2f64.powi(-7));
    let expected = 2.0 * 6.0 / 7.0;
    assert!((ratio - expected).abs() < 0.1 * expected, "{ratio}");
}

#[test]
fn ipm_dual_of_single_entries() {
    let idx = TensorIndex::new(3, 2, &[1, -2]).unwrap();
    let a = CoefficientField::from_entries(2, 4, [(idx, 0.5)]).unwrap();
    let b = CoefficientField::zero(2, 4).unwrap();
    let d = ipm_dual(&a, &b, 1.5).unwrap();
    let expected = 0.5 * 2f64.powf(-3.0 * (1.5 + 1.0));
    assert!((d - expected).abs() < 1e-15);
    let logged = ipm_log_weighted(&a, &b, 1.5, 2.0, 4).unwrap();
    assert!((logged - expected / 16.0).abs() < 1e-15);
    assert_eq!(ipm_log_weighted(&a, &b, 1.5, 2.0, 2).unwrap(), 0.0);
    assert!(ipm_log_weighted(&a, &b, 1.5, 2.0, 5).is_err());
}

#[test]
fn scaling_block_is_unweighted() {
    let idx = TensorIndex::new(0, 4, &[0, 0]).unwrap();
    let f = CoefficientField::from_entries(2, 3, [(idx, -0.25)]).unwrap();
    for s in [-2.0, 0.0, 3.0] {
        assert_eq!(besov_norm(&f, &BesovParams::l1(s, 1.0)), 0.25);
    }
}

#[test]
fn gamma_shift_moves_smoothness() {
    let idx = TensorIndex::new(4, 1, &[2, 2]).unwrap();
    let f = CoefficientField::from_entries(2, 6, [(idx, 1.0f64)]).unwrap();
    let shifted = gamma_op(&f, 0.75f64, 0.0);
    let a = besov_norm(&shifted, &BesovParams::l1(-1.0, 0.0));
    let b = besov_norm(&f, &BesovParams::l1(-0.25, 0.0));
    assert!((a - b).abs() < 1e-14 * b);
    let sup = besov_norm(&f, &BesovParams::sup(0.5));
    assert!((sup - 2f64.powf(4.0 * 1.5)).abs() < 1e-9);
}

#[test]
fn region_query_includes_scaling_block_at_level_zero() {
    let family = WaveletFamily::build(2, 10).unwrap();
    let b = AxisBox::new(vec![0.1, 0.1], vec![0.2, 0.2]).unwrap();
    let at0 = active_indices(&family, 0, &b);
    assert!(at0.iter().any(|i| i.is_scaling()));
    assert!(active_indices(&family, 1, &b).iter().all(|i| !i.is_scaling()));
}
