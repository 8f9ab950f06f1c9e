//! Scaling experiments for the interpolation inequality
//! `d_γ ≲ d_η^δ` between Besov IPM surrogates.
//!
//! A family run builds one measure pair per index, analyzes both sides to
//! level `J`, and records the surrogate distance at every smoothness pair.
//! [`fit_exponent`] then regresses `log d_γ` on `log d_η`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov::{analyze_measure, besov_norm, ipm_dual, ipm_log_weighted, BesovParams, CoefficientField};
use crate::error::{invalid, Error, Result};
use crate::measures::{project_to_circle, quadrature_measure, DiscreteMeasure, MeasureKind, ParametricCurve};
use crate::scalar::Real;
use crate::wavelets::{default_order, WaveletFamily};

/// Default `c` of the `(1+j)^{-c}` level weight used for smoothness `≥ 1`.
pub const DEFAULT_LOG_WEIGHT: f64 = 1.01;

/// Default cascade depth of the wavelet tables used by experiments.
pub const DEFAULT_CASCADE_DEPTH: u32 = 12;

/// The interpolation exponent `δ(β, γ, η)`.
pub fn predicted_delta<T: Real>(beta: T, gamma: T, eta: T) -> Result<T> {
    if !(beta >= T::zero()) {
        return Err(invalid(format!("beta must be >= 0 (got {beta})")));
    }
    if !(gamma > T::zero()) {
        return Err(invalid(format!("gamma must be > 0 (got {gamma})")));
    }
    if !(gamma <= eta) {
        return Err(invalid(format!("need gamma <= eta (got {gamma} > {eta})")));
    }
    let one = T::one();
    Ok(if gamma >= one {
        (beta + gamma) / (beta + eta)
    } else if eta >= one {
        (beta * gamma + gamma) / (beta + eta)
    } else {
        gamma / eta
    })
}

/// Surrogate distance at smoothness `s`: the plain dual norm below one,
/// and from one upward the dual norm with levels weighted by `(1+j)^{-c}`
/// (`c = 0` selects the plain norm everywhere).
///
/// The weights `2^{-js}(1+j)^{-c·[s≥1]}` decrease in `s` for every level,
/// so distances are monotone in the smoothness.
pub fn surrogate_distance<T: Real>(a: &CoefficientField<T>, b: &CoefficientField<T>, s: T, log_weight: T) -> Result<T> {
    if s >= T::one() && log_weight > T::zero() {
        ipm_log_weighted(a, b, s, log_weight, a.max_level())
    } else {
        ipm_dual(a, b, s)
    }
}

/// Measure-pair families indexed by a single parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FamilyKind<T> {
    /// Index `n`: the perturbed circle against its radial projection.
    PerturbedCircle { beta: T },
    /// Index `ε`: the unit circle against the circle of radius `1+ε`.
    CircleRadius,
}

/// A family run: indices, smoothness pairs and resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec<T> {
    pub family: FamilyKind<T>,
    pub indices: Vec<T>,
    pub pairs: Vec<(T, T)>,
    pub max_level: u32,
    pub nodes: usize,
    /// Daubechies order; `None` picks `⌈η_max⌉ + 3`.
    pub order: Option<usize>,
    pub cascade_depth: u32,
    pub log_weight: T,
}

impl<T: Real> ExperimentSpec<T> {
    pub fn new(family: FamilyKind<T>, indices: Vec<T>, pairs: Vec<(T, T)>, max_level: u32, nodes: usize) -> Self {
        Self {
            family,
            indices,
            pairs,
            max_level,
            nodes,
            order: None,
            cascade_depth: DEFAULT_CASCADE_DEPTH,
            log_weight: T::lit(DEFAULT_LOG_WEIGHT),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_indices(&self.indices)?;
        validate_pairs(&self.pairs)?;
        match self.family {
            FamilyKind::PerturbedCircle { beta } => {
                if !(beta >= T::zero()) {
                    return Err(invalid(format!("beta must be >= 0 (got {beta})")));
                }
                for &n in &self.indices {
                    if !(n >= T::one() && n.fract() == T::zero() && n <= T::lit(u32::MAX as f64)) {
                        return Err(invalid(format!("perturbed-circle index {n} is not a positive integer")));
                    }
                }
            }
            FamilyKind::CircleRadius => {
                if !(self.indices[0] > -T::one()) {
                    return Err(invalid("radius offsets must exceed -1"));
                }
            }
        }
        if self.nodes == 0 {
            return Err(invalid("node count must be positive"));
        }
        if !(self.log_weight >= T::zero()) {
            return Err(invalid(format!("log weight must be >= 0 (got {})", self.log_weight)));
        }
        Ok(())
    }

    /// The wavelet order actually used.
    pub fn resolved_order(&self) -> usize {
        self.order.unwrap_or_else(|| {
            let eta_max = self.pairs.iter().map(|p| p.1.as_f64()).fold(0.0, f64::max);
            default_order(eta_max)
        })
    }
}

fn validate_indices<T: Real>(indices: &[T]) -> Result<()> {
    if indices.len() < 3 {
        return Err(invalid(format!("need at least 3 indices (got {})", indices.len())));
    }
    if indices.iter().any(|v| !v.is_finite()) || indices.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("indices must be finite and strictly increasing"));
    }
    Ok(())
}

fn validate_pairs<T: Real>(pairs: &[(T, T)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(invalid("need at least one smoothness pair"));
    }
    for &(g, e) in pairs {
        if !(g > T::zero() && g <= e && e.is_finite()) {
            return Err(invalid(format!("smoothness pair ({g}, {e}) must satisfy 0 < gamma <= eta")));
        }
    }
    Ok(())
}

/// Distances of one index at one smoothness pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow<T> {
    pub index: T,
    pub gamma: T,
    pub eta: T,
    pub d_gamma: T,
    pub d_eta: T,
}

/// Least-squares fit of `log d_γ = slope · log d_η + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub rows: Vec<FamilyRow<T>>,
}

fn family_pair<T: Real>(
    family: FamilyKind<T>,
    index: T,
    nodes: usize,
) -> Result<(DiscreteMeasure<T>, DiscreteMeasure<T>)> {
    match family {
        FamilyKind::PerturbedCircle { beta } => {
            let n = index.to_u32().ok_or_else(|| invalid(format!("bad frequency {index}")))?;
            let mu = quadrature_measure(&ParametricCurve::perturbed_circle(beta, n)?, nodes)?;
            let pushed = project_to_circle(&mu)?;
            Ok((mu, pushed))
        }
        FamilyKind::CircleRadius => {
            let unit = quadrature_measure(&ParametricCurve::unit_circle(), nodes)?;
            let other = quadrature_measure(&ParametricCurve::circle_radius(index)?, nodes)?;
            Ok((unit, other))
        }
    }
}

fn rows_for<T: Real>(
    index: T,
    fa: &CoefficientField<T>,
    fb: &CoefficientField<T>,
    pairs: &[(T, T)],
    log_weight: T,
) -> Result<Vec<FamilyRow<T>>> {
    pairs
        .iter()
        .map(|&(gamma, eta)| {
            Ok(FamilyRow {
                index,
                gamma,
                eta,
                d_gamma: surrogate_distance(fa, fb, gamma, log_weight)?,
                d_eta: surrogate_distance(fa, fb, eta, log_weight)?,
            })
        })
        .collect()
}

/// Runs a family; rows come out ordered by index, then by pair.
pub fn run_family<T: Real>(spec: &ExperimentSpec<T>) -> Result<Vec<FamilyRow<T>>> {
    spec.validate()?;
    let family = WaveletFamily::build(spec.resolved_order(), spec.cascade_depth)?;
    let per_index: Vec<Result<Vec<FamilyRow<T>>>> = spec
        .indices
        .par_iter()
        .map(|&index| {
            let (a, b) = family_pair(spec.family, index, spec.nodes)?;
            let fa = analyze_measure(&a, &family, spec.max_level)?;
            let fb = analyze_measure(&b, &family, spec.max_level)?;
            rows_for(index, &fa, &fb, &spec.pairs, spec.log_weight)
        })
        .collect();
    let mut rows = Vec::with_capacity(spec.indices.len() * spec.pairs.len());
    for r in per_index {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Ordinary least squares of `log d_γ` against `log d_η`.
pub fn fit_exponent<T: Real>(rows: &[FamilyRow<T>]) -> Result<ExponentFit<T>> {
    if rows.len() < 2 {
        return Err(Error::DegenerateData(format!("need at least 2 rows to fit (got {})", rows.len())));
    }
    if let Some(r) = rows.iter().find(|r| !(r.d_gamma > T::zero() && r.d_eta > T::zero())) {
        return Err(Error::DegenerateData(format!(
            "non-positive distance at index {} (d_gamma={}, d_eta={})",
            r.index, r.d_gamma, r.d_eta
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.d_eta.as_f64().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.d_gamma.as_f64().ln()).collect();
    let (slope, intercept, r2) = least_squares(&xs, &ys)?;
    Ok(ExponentFit {
        slope: T::lit(slope),
        intercept: T::lit(intercept),
        r_squared: T::lit(r2),
        rows: rows.to_vec(),
    })
}

/// Fits each smoothness pair separately, in first-appearance order.
pub fn fit_by_pair<T: Real>(rows: &[FamilyRow<T>]) -> Result<Vec<ExponentFit<T>>> {
    let mut pairs: Vec<(T, T)> = Vec::new();
    for r in rows {
        if !pairs.contains(&(r.gamma, r.eta)) {
            pairs.push((r.gamma, r.eta));
        }
    }
    pairs
        .into_iter()
        .map(|p| {
            let sub: Vec<FamilyRow<T>> = rows.iter().filter(|r| (r.gamma, r.eta) == p).copied().collect();
            fit_exponent(&sub)
        })
        .collect()
}

/// `(slope, intercept, r²)` of `y ≈ slope·x + intercept`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateData("regressor has zero spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Both sides of `‖g‖_{B^{-γ}_{1,1}} ≤ ‖g‖_{B^{β,2}_{1,1}}^θ ‖g‖_{B^{-α}_{1,1}}^{1-θ}`
/// with `θ = (α-γ)/(β+α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn check_coeff_interpolation<T: Real>(
    field: &CoefficientField<T>,
    beta: T,
    gamma: T,
    alpha: T,
) -> Result<InterpolationReport<T>> {
    if !(beta >= T::zero()) {
        return Err(invalid(format!("beta must be >= 0 (got {beta})")));
    }
    if !(gamma > T::zero() && gamma < alpha && alpha.is_finite()) {
        return Err(invalid(format!("need 0 < gamma < alpha (got {gamma}, {alpha})")));
    }
    let theta = (alpha - gamma) / (beta + alpha);
    let lhs = besov_norm(field, &BesovParams::l1(-gamma, T::zero()));
    let smooth = besov_norm(field, &BesovParams::l1(beta, T::lit(2.0)));
    let rough = besov_norm(field, &BesovParams::l1(-alpha, T::zero()));
    let rhs = smooth.powf(theta) * rough.powf(T::one() - theta);
    let slack = T::lit(1e-12) * rhs + T::min_positive_value();
    Ok(InterpolationReport { lhs, rhs, holds: lhs <= rhs + slack })
}

/// Pairs of smooth densities on the line, indexed by one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalFamily {
    /// Index `s`: the bump against its translate by `s`.
    Translate,
    /// Index `n`: the bump `f` against `f·(1 + n^{-β} sin 2πnx)`.
    Oscillation,
}

/// A full-dimension density-pair family on `R¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFamily<T> {
    pub kind: ClassicalFamily,
    pub indices: Vec<T>,
    /// Grid spacing is `2^{-grid_log2}`.
    pub grid_log2: u32,
    pub order: Option<usize>,
    pub log_weight: T,
}

impl<T: Real> DensityFamily<T> {
    pub fn new(kind: ClassicalFamily, indices: Vec<T>) -> Self {
        Self {
            kind,
            indices,
            grid_log2: 14,
            order: None,
            log_weight: T::lit(DEFAULT_LOG_WEIGHT),
        }
    }
}

/// Rows and fit of a full-dimension family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport<T> {
    pub predicted: T,
    pub fit: ExponentFit<T>,
}

/// `exp(-1/(1-x²))` on `(-1, 1)`, unnormalized.
fn bump<T: Real>(x: T) -> T {
    let r = T::one() - x * x;
    if r <= T::zero() {
        T::zero()
    } else {
        (-T::one() / r).exp()
    }
}

/// Midpoint-rule measure of `density` on `[-2, 2]`, renormalized.
fn gridded_measure<T: Real, F: Fn(T) -> T>(density: F, grid_log2: u32) -> Result<DiscreteMeasure<T>> {
    let h = T::lit((-(grid_log2 as f64)).exp2());
    let count = 4usize << grid_log2;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for k in 0..count {
        let x = T::lit(-2.0) + (T::from_usize_lossy(k) + T::lit(0.5)) * h;
        let f = density(x);
        if f < T::zero() {
            return Err(invalid(format!("density is negative at {x}")));
        }
        if f > T::zero() {
            coords.push(x);
            weights.push(f);
        }
    }
    let total = crate::sum::stable_sum(weights.iter().copied());
    if !(total > T::zero()) {
        return Err(Error::DegenerateData("density integrates to zero".into()));
    }
    for w in &mut weights {
        *w /= total;
    }
    DiscreteMeasure::new(1, coords, weights, MeasureKind::Quadrature)
}

fn density_pair<T: Real>(
    kind: ClassicalFamily,
    index: T,
    beta: T,
    grid_log2: u32,
) -> Result<(DiscreteMeasure<T>, DiscreteMeasure<T>)> {
    let base = gridded_measure(bump, grid_log2)?;
    let other = match kind {
        ClassicalFamily::Translate => {
            if !(index.abs() <= T::one()) {
                return Err(invalid(format!("translation {index} leaves the grid")));
            }
            gridded_measure(|x| bump(x - index), grid_log2)?
        }
        ClassicalFamily::Oscillation => {
            if !(index >= T::one()) {
                return Err(invalid(format!("oscillation frequency {index} must be >= 1")));
            }
            let amp = index.powf(-beta);
            gridded_measure(|x| bump(x) * (T::one() + amp * (T::TAU() * index * x).sin()), grid_log2)?
        }
    };
    Ok((base, other))
}

/// Full-dimension check of `d_γ ≈ d_α^{(β+γ)/(β+α)}` on a density family.
pub fn check_classical<T: Real>(
    family: &DensityFamily<T>,
    beta: T,
    gamma: T,
    alpha: T,
    max_level: u32,
) -> Result<ClassicalReport<T>> {
    let predicted = predicted_delta(beta, gamma, alpha)?;
    if family.indices.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 indices to fit (got {})",
            family.indices.len()
        )));
    }
    let order = family.order.unwrap_or_else(|| default_order(alpha.as_f64()));
    let wavelets = WaveletFamily::build(order, DEFAULT_CASCADE_DEPTH)?;
    let rows: Vec<Result<FamilyRow<T>>> = family
        .indices
        .par_iter()
        .map(|&index| {
            let (a, b) = density_pair(family.kind, index, beta, family.grid_log2)?;
            let fa = analyze_measure(&a, &wavelets, max_level)?;
            let fb = analyze_measure(&b, &wavelets, max_level)?;
            let mut r = rows_for(index, &fa, &fb, &[(gamma, alpha)], family.log_weight)?;
            Ok(r.remove(0))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ClassicalReport { predicted, fit: fit_exponent(&rows)? })
}
