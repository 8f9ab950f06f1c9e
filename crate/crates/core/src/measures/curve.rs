//! Closed curves in `R^2`: the unit circle perturbed radially at frequency
//! `n`, and circles of radius `1+ε`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::measure::{DiscreteMeasure, MeasureKind};
use crate::scalar::Real;
use crate::sum::{stable_sum, CompensatedSum};

/// Nodes of the arc-length table used for inverse-CDF sampling.
pub const ARC_TABLE_NODES: usize = 1 << 14;

/// Minimum quadrature nodes per oscillation period.
pub const NODES_PER_PERIOD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `g_n(t) = (1 + (2πn)^{-(β+1)} sin(2πnt)) · g*(t)`
    PerturbedCircle,
    /// `g(t) = (1+ε) · g*(t)`
    CircleRadius,
}

/// A `[0,1)`-periodic radial curve `t ↦ r(t)·(cos 2πt, sin 2πt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricCurve<T> {
    kind: CurveKind,
    beta: T,
    n: u32,
    eps: T,
}

impl<T: Real> ParametricCurve<T> {
    /// Validates the parameters relevant to `kind`; the others are ignored.
    pub fn new(kind: CurveKind, beta: T, n: u32, eps: T) -> Result<Self> {
        match kind {
            CurveKind::PerturbedCircle => {
                if n == 0 {
                    return Err(invalid("perturbed circle needs frequency n >= 1"));
                }
                if !(beta >= T::zero() && beta.is_finite()) {
                    return Err(invalid(format!("smoothness beta must be >= 0 (got {beta})")));
                }
                Ok(Self { kind, beta, n, eps: T::zero() })
            }
            CurveKind::CircleRadius => {
                if !(eps > -T::one() && eps.is_finite()) {
                    return Err(invalid(format!("radius offset eps must exceed -1 (got {eps})")));
                }
                Ok(Self { kind, beta: T::zero(), n: 1, eps })
            }
        }
    }

    pub fn perturbed_circle(beta: T, n: u32) -> Result<Self> {
        Self::new(CurveKind::PerturbedCircle, beta, n, T::zero())
    }

    pub fn circle_radius(eps: T) -> Result<Self> {
        Self::new(CurveKind::CircleRadius, T::zero(), 1, eps)
    }

    pub fn unit_circle() -> Self {
        Self::circle_radius(T::zero()).expect("eps = 0 is valid")
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Oscillation frequency used by the node-count rule (1 for circles).
    pub fn frequency(&self) -> u32 {
        match self.kind {
            CurveKind::PerturbedCircle => self.n,
            CurveKind::CircleRadius => 1,
        }
    }

    /// Perturbation amplitude `(2πn)^{-(β+1)}`.
    pub fn amplitude(&self) -> T {
        match self.kind {
            CurveKind::PerturbedCircle => {
                let freq = T::TAU() * T::lit(self.n as f64);
                freq.powf(-(self.beta + T::one()))
            }
            CurveKind::CircleRadius => T::zero(),
        }
    }

    /// `(r(t), r'(t))`.
    pub fn radius(&self, t: T) -> (T, T) {
        match self.kind {
            CurveKind::PerturbedCircle => {
                let freq = T::TAU() * T::lit(self.n as f64);
                let a = self.amplitude();
                let phase = freq * t;
                (T::one() + a * phase.sin(), a * freq * phase.cos())
            }
            CurveKind::CircleRadius => (T::one() + self.eps, T::zero()),
        }
    }

    pub fn point(&self, t: T) -> [T; 2] {
        let (r, _) = self.radius(t);
        let angle = T::TAU() * t;
        [r * angle.cos(), r * angle.sin()]
    }

    pub fn derivative(&self, t: T) -> [T; 2] {
        let (r, dr) = self.radius(t);
        let angle = T::TAU() * t;
        let (s, c) = angle.sin_cos();
        [dr * c - r * T::TAU() * s, dr * s + r * T::TAU() * c]
    }

    /// `‖g'(t)‖`.
    pub fn speed(&self, t: T) -> T {
        let (r, dr) = self.radius(t);
        (dr * dr + (T::TAU() * r).powi(2)).sqrt()
    }

    /// Smallest admissible quadrature node count.
    pub fn min_nodes(&self) -> usize {
        NODES_PER_PERIOD * self.frequency() as usize
    }
}

/// Uniform (arc-length) probability measure on the curve, by the periodic
/// trapezoid rule on `m` equispaced parameters.
pub fn quadrature_measure<T: Real>(curve: &ParametricCurve<T>, m: usize) -> Result<DiscreteMeasure<T>> {
    if m < curve.min_nodes() {
        return Err(Error::Resolution(format!(
            "{m} nodes cannot resolve frequency {} (need at least {})",
            curve.frequency(),
            curve.min_nodes()
        )));
    }
    let step = T::one() / T::from_usize_lossy(m);
    let mut coords = Vec::with_capacity(2 * m);
    let mut speeds = Vec::with_capacity(m);
    for i in 0..m {
        let t = T::from_usize_lossy(i) * step;
        coords.extend(curve.point(t));
        speeds.push(curve.speed(t));
    }
    let total = stable_sum(speeds.iter().copied());
    let weights = speeds.into_iter().map(|s| s / total).collect();
    DiscreteMeasure::new(2, coords, weights, MeasureKind::Quadrature)
}

/// Cumulative normalized arc length on `ARC_TABLE_NODES` equal parameter
/// steps; entry `k` is the length fraction of `[0, k/K]`.
fn arc_length_table<T: Real>(curve: &ParametricCurve<T>) -> Vec<T> {
    let k_nodes = ARC_TABLE_NODES;
    let step = T::one() / T::from_usize_lossy(k_nodes);
    let half = T::lit(0.5);
    let mut cumulative = Vec::with_capacity(k_nodes + 1);
    let mut acc = CompensatedSum::new();
    cumulative.push(T::zero());
    let mut prev = curve.speed(T::zero());
    for k in 1..=k_nodes {
        let s = curve.speed(T::from_usize_lossy(k) * step);
        acc.add((prev + s) * half * step);
        cumulative.push(acc.value());
        prev = s;
    }
    let total = cumulative[k_nodes];
    cumulative.iter_mut().for_each(|c| *c = *c / total);
    cumulative
}

/// `n_samples` i.i.d. draws from the arc-length-uniform law on the curve.
///
/// Deterministic in `seed`.
pub fn sample_iid<T: Real>(
    curve: &ParametricCurve<T>,
    n_samples: usize,
    seed: u64,
) -> Result<DiscreteMeasure<T>> {
    if n_samples == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let table = arc_length_table(curve);
    let inv_nodes = T::one() / T::from_usize_lossy(ARC_TABLE_NODES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * n_samples);
    for _ in 0..n_samples {
        let u = T::lit(rng.random::<f64>());
        // first k with table[k+1] > u
        let k = table.partition_point(|&c| c <= u).clamp(1, ARC_TABLE_NODES) - 1;
        let (lo, hi) = (table[k], table[k + 1]);
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { T::zero() };
        let t = (T::from_usize_lossy(k) + frac) * inv_nodes;
        coords.extend(curve.point(t));
    }
    DiscreteMeasure::uniform(2, coords, MeasureKind::Empirical)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbed_circle_values() {
        let c = ParametricCurve::<f64>::perturbed_circle(0.0, 20).unwrap();
        assert_eq!(c.point(0.0), [1.0, 0.0]);
        let t = 1.0 / 80.0;
        let (r, _) = c.radius(t);
        let expected = 1.0 + 1.0 / (std::f64::consts::TAU * 20.0);
        assert!((r - expected).abs() < 1e-15);
        let p = c.point(t);
        assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - expected).abs() < 1e-14);
    }

    #[test]
    fn circle_radius_values() {
        let c = ParametricCurve::<f64>::circle_radius(0.1).unwrap();
        assert_eq!(c.point(0.0), [1.1, 0.0]);
    }

    #[test]
    fn rejects_inconsistent_parameters() {
        assert!(ParametricCurve::<f64>::perturbed_circle(0.0, 0).is_err());
        assert!(ParametricCurve::<f64>::perturbed_circle(-1.0, 3).is_err());
        assert!(ParametricCurve::<f64>::circle_radius(-1.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = ParametricCurve::<f64>::perturbed_circle(0.5, 7).unwrap();
        let h = 1e-6;
        for &t in &[0.0, 0.13, 0.5, 0.871] {
            let d = c.derivative(t);
            let (p1, p0) = (c.point(t + h), c.point(t - h));
            for k in 0..2 {
                let fd = (p1[k] - p0[k]) / (2.0 * h);
                assert!((d[k] - fd).abs() < 1e-5, "t={t} axis {k}: {} vs {fd}", d[k]);
            }
            assert!((c.speed(t) - d[0].hypot(d[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_circle_quadrature_is_uniform() {
        let m = quadrature_measure(&ParametricCurve::<f64>::unit_circle(), 64).unwrap();
        assert!(m.weights().iter().all(|&w| (w - 1.0 / 64.0).abs() < 1e-15));
        assert!(m.is_probability(1e-12));
    }

    #[test]
    fn node_rule() {
        let c = ParametricCurve::<f64>::perturbed_circle(0.0, 8).unwrap();
        assert!(matches!(quadrature_measure(&c, 63), Err(Error::Resolution(_))));
        assert!(quadrature_measure(&c, 64).is_ok());
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = ParametricCurve::<f64>::unit_circle();
        let a = sample_iid(&c, 10, 7).unwrap();
        let b = sample_iid(&c, 10, 7).unwrap();
        assert_eq!(a.coords(), b.coords());
        assert!(sample_iid(&c, 0, 7).is_err());
    }

    #[test]
    fn unit_circle_samples_have_unit_norm() {
        let c = ParametricCurve::<f64>::unit_circle();
        let m = sample_iid(&c, 10_000, 1).unwrap();
        let mean = m.atoms().map(|(x, _)| x[0].hypot(x[1])).sum::<f64>() / 10_000.0;
        assert!((mean - 1.0).abs() < 0.01);
    }
}
