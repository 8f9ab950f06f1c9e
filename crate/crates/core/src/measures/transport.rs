//! Radial projection onto the unit sphere and elementary distances between
//! discrete measures and point clouds.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measures::measure::DiscreteMeasure;
use crate::scalar::Real;
use crate::sum::{stable_sum, CompensatedSum};

const ORIGIN_TOLERANCE: f64 = 1e-12;
const MASS_TOLERANCE: f64 = 1e-8;

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc.hypot(v))
}

fn check_off_origin<T: Real>(m: &DiscreteMeasure<T>) -> Result<()> {
    let tol = T::lit(ORIGIN_TOLERANCE);
    match m.atoms().position(|(x, _)| norm(x) <= tol) {
        Some(index) => Err(Error::SingularProjection { index }),
        None => Ok(()),
    }
}

/// Pushforward under `x ↦ x/‖x‖`. Weights and kind are unchanged.
pub fn project_to_circle<T: Real>(m: &DiscreteMeasure<T>) -> Result<DiscreteMeasure<T>> {
    check_off_origin(m)?;
    m.map_atoms(|x| {
        let r = norm(x);
        Ok(x.iter().map(|&v| v / r).collect())
    })
}

/// `Σ w_i ‖x_i - x_i/‖x_i‖‖`: the transport cost of moving every atom
/// radially onto the unit sphere.
pub fn displacement_cost<T: Real>(m: &DiscreteMeasure<T>) -> Result<T> {
    check_off_origin(m)?;
    Ok(stable_sum(m.atoms().map(|(x, w)| w * (norm(x) - T::one()).abs())))
}

/// Angle of a planar point as a fraction of a full turn, in `[0, 1)`.
fn turn_fraction<T: Real>(x: &[T]) -> T {
    let a = x[1].atan2(x[0]) / T::TAU();
    let a = if a < T::zero() { a + T::one() } else { a };
    if a >= T::one() {
        T::zero()
    } else {
        a
    }
}

/// Exact `W_1` between two measures on the unit circle with the geodesic
/// ground metric. Atoms off the circle are identified with their angle.
///
/// Uses `W_1 = 2π min_c ∫_0^1 |F(θ) - G(θ) - c| dθ`, minimized at a weighted
/// median of the CDF difference.
pub fn circular_w1<T: Real>(a: &DiscreteMeasure<T>, b: &DiscreteMeasure<T>) -> Result<T> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(invalid("circular W1 needs planar measures"));
    }
    let (ma, mb) = (a.total_mass(), b.total_mass());
    if (ma - mb).abs() > T::lit(MASS_TOLERANCE) {
        return Err(Error::MassMismatch {
            left: ma.as_f64(),
            right: mb.as_f64(),
        });
    }
    let mut events: Vec<(T, T)> = a
        .atoms()
        .map(|(x, w)| (turn_fraction(x), w))
        .chain(b.atoms().map(|(x, w)| (turn_fraction(x), -w)))
        .collect();
    if events.is_empty() {
        return Ok(T::zero());
    }
    events.sort_by(|x, y| x.0.total_order(&y.0));
    // piecewise-constant CDF difference: (value, interval length)
    let mut pieces = Vec::with_capacity(events.len() + 1);
    pieces.push((T::zero(), events[0].0));
    let mut cdf = CompensatedSum::new();
    for (k, &(angle, w)) in events.iter().enumerate() {
        cdf.add(w);
        let next = events.get(k + 1).map_or(T::one(), |e| e.0);
        pieces.push((cdf.value(), next - angle));
    }
    let mut by_value = pieces.clone();
    by_value.sort_by(|x, y| x.0.total_order(&y.0));
    let half = T::lit(0.5) * stable_sum(by_value.iter().map(|p| p.1));
    let mut acc = T::zero();
    let mut median = by_value[0].0;
    for &(v, len) in &by_value {
        acc += len;
        if acc >= half {
            median = v;
            break;
        }
    }
    Ok(T::TAU() * stable_sum(pieces.iter().map(|&(v, len)| len * (v - median).abs())))
}

fn directed_hausdorff<T: Real, P: AsRef<[T]> + Sync>(from: &[P], to: &[P]) -> T {
    from.par_iter()
        .map(|x| {
            let x = x.as_ref();
            to.iter()
                .map(|y| {
                    x.iter()
                        .zip(y.as_ref())
                        .fold(T::zero(), |acc, (&u, &v)| acc + (u - v) * (u - v))
                })
                .fold(T::infinity(), T::min)
        })
        .reduce(T::zero, T::max)
        .sqrt()
}

/// Symmetric Hausdorff distance between two point clouds, by exhaustive
/// search.
pub fn hausdorff_distance<T: Real, P: AsRef<[T]> + Sync>(a: &[P], b: &[P]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("Hausdorff distance needs nonempty point sets"));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::measure::MeasureKind;

    fn dirac(x: f64, y: f64) -> DiscreteMeasure<f64> {
        DiscreteMeasure::new(2, vec![x, y], vec![1.0], MeasureKind::Empirical).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_circle(&dirac(1.1, 0.0)).unwrap().atom(0), &[1.0, 0.0]);
        assert_eq!(project_to_circle(&dirac(0.0, -2.0)).unwrap().atom(0), &[0.0, -1.0]);
        assert!(matches!(
            project_to_circle(&dirac(0.0, 0.0)),
            Err(Error::SingularProjection { index: 0 })
        ));
    }

    #[test]
    fn displacement_examples() {
        assert!((displacement_cost(&dirac(1.25, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(displacement_cost(&dirac(0.0, 1.0)).unwrap(), 0.0);
        assert!(displacement_cost(&dirac(0.0, 0.0)).is_err());
    }

    #[test]
    fn circular_w1_quarter_turn() {
        let d = circular_w1(&dirac(1.0, 0.0), &dirac(0.0, 1.0)).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        // the short way round across the branch cut
        let d = circular_w1(&dirac(1.0, -0.01), &dirac(1.0, 0.01)).unwrap();
        assert!((d - 2.0 * 0.01f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn circular_w1_mass_mismatch() {
        let half = DiscreteMeasure::new(2, vec![1.0, 0.0], vec![0.5], MeasureKind::Empirical).unwrap();
        assert!(matches!(circular_w1(&half, &dirac(1.0, 0.0)), Err(Error::MassMismatch { .. })));
    }

    #[test]
    fn hausdorff_examples() {
        let a = [[1.0, 0.0]];
        let b = [[1.05, 0.0]];
        assert!((hausdorff_distance::<f64, _>(&a, &b).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(hausdorff_distance::<f64, _>(&a, &a).unwrap(), 0.0);
        let empty: [[f64; 2]; 0] = [];
        assert!(hausdorff_distance::<f64, _>(&a, &empty).is_err());
    }
}
