use std::collections::BTreeMap;

use besov_ipm::besov::{analyze_measure, gamma_op, ipm_dual, potential_pairing, CoefficientField};
use besov_ipm::estimator::argmin_index;
use besov_ipm::interpolation::{check_coeff_interpolation, fit_exponent, predicted_delta, surrogate_distance, FamilyRow};
use besov_ipm::measures::{circular_w1, DiscreteMeasure, MeasureKind};
use besov_ipm::wavelets::{eval_tensor, TensorIndex, WaveletFamily};
use proptest::prelude::*;

const MAX_LEVEL: u32 = 5;

fn raw_entries() -> impl Strategy<Value = Vec<(u32, u32, i32, i32, f64)>> {
    prop::collection::vec((0..=MAX_LEVEL, 1u32..=4, -3i32..=3, -3i32..=3, -1.0f64..1.0), 1..30)
}

fn field_from(raw: &[(u32, u32, i32, i32, f64)], scale: impl Fn(u32) -> f64) -> CoefficientField<f64> {
    let mut map = BTreeMap::new();
    for &(j, l, w0, w1, v) in raw {
        let l = if j == 0 { l } else { 1 + (l - 1) % 3 };
        map.insert(TensorIndex::new(j, l, &[w0, w1]).unwrap(), v * scale(j));
    }
    CoefficientField::from_entries(2, MAX_LEVEL, map).unwrap()
}

fn fields() -> impl Strategy<Value = CoefficientField<f64>> {
    raw_entries().prop_map(|raw| field_from(&raw, |_| 1.0))
}

fn planar_measure(max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0), 1..max_atoms).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.2).sum();
        let coords = atoms.iter().flat_map(|a| [a.0, a.1]).collect();
        let weights = atoms.iter().map(|a| a.2 / total).collect();
        DiscreteMeasure::new(2, coords, weights, MeasureKind::Empirical).unwrap()
    })
}

fn circle_measure(max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure<f64>> {
    prop::collection::vec((0.0f64..1.0, 0.1f64..1.0), 1..max_atoms).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let coords = atoms
            .iter()
            .flat_map(|a| {
                let t = std::f64::consts::TAU * a.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let weights = atoms.iter().map(|a| a.1 / total).collect();
        DiscreteMeasure::new(2, coords, weights, MeasureKind::Empirical).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ipm_dual_is_a_pseudometric(a in fields(), b in fields(), c in fields(), gamma in 0.1f64..3.0) {
        let ab = ipm_dual(&a, &b, gamma).unwrap();
        let ba = ipm_dual(&b, &a, gamma).unwrap();
        let ac = ipm_dual(&a, &c, gamma).unwrap();
        let cb = ipm_dual(&c, &b, gamma).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ipm_dual(&a, &a, gamma).unwrap(), 0.0);
        prop_assert!((ab - ba).abs() <= 1e-14 * ab.max(1.0));
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn surrogates_decrease_in_smoothness(a in fields(), b in fields(), g1 in 0.1f64..3.0, dg in 0.0f64..2.0) {
        let g2 = g1 + dg;
        prop_assert!(ipm_dual(&a, &b, g2).unwrap() <= ipm_dual(&a, &b, g1).unwrap() + 1e-14);
        prop_assert!(
            surrogate_distance(&a, &b, g2, 1.01).unwrap() <= surrogate_distance(&a, &b, g1, 1.01).unwrap() + 1e-14
        );
    }

    #[test]
    fn gamma_composition_is_exact(f in fields(), a in -2.0f64..2.0, b in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let twice = gamma_op(&gamma_op(&f, a, c1), b, c2);
        let once = gamma_op(&f, a + b, c1 + c2);
        let x: Vec<_> = twice.iter().collect();
        let y: Vec<_> = once.iter().collect();
        prop_assert_eq!(x, y);
        let back = gamma_op(&gamma_op(&f, a, c1), -a, -c1);
        prop_assert_eq!(back.iter().collect::<Vec<_>>(), f.iter().collect::<Vec<_>>());
    }

    #[test]
    fn argmin_ignores_positive_rescaling(scores in prop::collection::vec(0.0f64..10.0, 1..40), k in 1e-3f64..1e3) {
        let scaled: Vec<f64> = scores.iter().map(|s| s * k).collect();
        prop_assert_eq!(argmin_index(&scores), argmin_index(&scaled));
    }

    #[test]
    fn exponent_fit_ignores_distance_scaling(
        pts in prop::collection::vec((1e-4f64..1.0, 1e-4f64..1.0), 3..8),
        ka in 1e-3f64..1e3,
        kb in 1e-3f64..1e3,
    ) {
        let rows: Vec<FamilyRow<f64>> = pts
            .iter()
            .enumerate()
            .map(|(i, &(dg, de))| FamilyRow { index: i as f64, gamma: 1.0, eta: 2.0, d_gamma: dg, d_eta: de })
            .collect();
        let scaled: Vec<FamilyRow<f64>> =
            rows.iter().map(|r| FamilyRow { d_gamma: r.d_gamma * ka, d_eta: r.d_eta * kb, ..*r }).collect();
        match (fit_exponent(&rows), fit_exponent(&scaled)) {
            (Ok(f), Ok(g)) => {
                prop_assert!((f.slope - g.slope).abs() < 1e-8 * f.slope.abs().max(1.0));
                prop_assert!((f.r_squared - g.r_squared).abs() < 1e-8);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "fits disagree on degeneracy"),
        }
    }

    #[test]
    fn predicted_delta_is_continuous(beta in 0.0f64..3.0, gamma in 0.05f64..4.0, deta in 0.0f64..3.0) {
        let eta = gamma + deta;
        let h = 1e-7;
        let here = predicted_delta(beta, gamma, eta).unwrap();
        let there = predicted_delta(beta, gamma + h, eta + h).unwrap();
        prop_assert!((here - there).abs() < 1e-4);
        prop_assert!(here > 0.0 && here <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coefficient_interpolation_holds_on_admissible_fields(
        raw in raw_entries(),
        beta in 0.0f64..2.0,
        gamma in 0.1f64..2.0,
        dalpha in 0.1f64..2.0,
    ) {
        let field = field_from(&raw, |j| {
            let jf = j as f64;
            2f64.powf(-jf * (beta + 1.0)) * (1.0 + jf).powi(-2)
        });
        let r = check_coeff_interpolation(&field, beta, gamma, gamma + dalpha).unwrap();
        prop_assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs);
    }

    #[test]
    fn single_entry_ratio_identity(j in 1u32..=MAX_LEVEL, v in 1e-3f64..10.0, beta in 0.0f64..2.0, gamma in 0.1f64..2.0, dalpha in 0.1f64..2.0) {
        let alpha = gamma + dalpha;
        let idx = TensorIndex::new(j, 2, &[1, -1]).unwrap();
        let field = CoefficientField::from_entries(2, MAX_LEVEL, [(idx, v)]).unwrap();
        let r = check_coeff_interpolation(&field, beta, gamma, alpha).unwrap();
        let expected = (1.0 + j as f64).powf(2.0 * (alpha - gamma) / (beta + alpha));
        prop_assert!((r.rhs / r.lhs - expected).abs() < 1e-9 * expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn circular_w1_is_a_metric(a in circle_measure(12), b in circle_measure(12), c in circle_measure(12)) {
        let ab = circular_w1(&a, &b).unwrap();
        let ba = circular_w1(&b, &a).unwrap();
        let ac = circular_w1(&a, &c).unwrap();
        let cb = circular_w1(&c, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() < 1e-10);
        prop_assert!(ab <= ac + cb + 1e-10);
        prop_assert!(circular_w1(&a, &a).unwrap() < 1e-10);
        prop_assert!(ab <= std::f64::consts::PI + 1e-10);
    }

    #[test]
    fn wavelet_potentials_are_bounded_by_the_dual_norm(
        m1 in planar_measure(6),
        m2 in planar_measure(6),
        raw in prop::collection::vec((0u32..=3, 1u32..=4, -4i32..=3, -4i32..=3, -1.0f64..1.0), 1..12),
        gamma in 0.25f64..2.0,
    ) {
        let family = WaveletFamily::build(3, 10).unwrap();
        let mut coeffs = BTreeMap::new();
        for &(j, l, w0, w1, v) in &raw {
            let l = if j == 0 { l } else { 1 + (l - 1) % 3 };
            let bound = if j == 0 && l == 4 { 1.0 } else { 2f64.powf(-(j as f64) * (gamma + 1.0)) };
            coeffs.insert(TensorIndex::new(j, l, &[w0, w1]).unwrap(), v * bound);
        }
        let h = |x: &[f64]| coeffs.iter().map(|(idx, c)| c * eval_tensor(&family, idx, x)).sum::<f64>();
        let pairing = potential_pairing(&m1, &m2, h);
        let fa = analyze_measure(&m1, &family, 3).unwrap();
        let fb = analyze_measure(&m2, &family, 3).unwrap();
        let dual = ipm_dual(&fa, &fb, gamma).unwrap();
        prop_assert!(pairing.abs() <= dual + 1e-10, "{pairing} > {dual}");
    }
}
