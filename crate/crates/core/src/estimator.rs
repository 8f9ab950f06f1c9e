//! Minimum-IPM estimation over a finite grid of candidate curves, and a
//! Monte-Carlo convergence experiment.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::besov::{analyze_measure, ipm_dual, CoefficientField};
use crate::error::{invalid, Result};
use crate::interpolation::DEFAULT_CASCADE_DEPTH;
use crate::measures::{quadrature_measure, sample_iid, DiscreteMeasure, ParametricCurve};
use crate::scalar::Real;
use crate::wavelets::{default_order, WaveletFamily};

/// Default loss smoothness `d/2` for curves.
pub const DEFAULT_GAMMA_LOSS: f64 = 0.5;

/// A finite grid of candidate curves, each with its quadrature measure.
#[derive(Debug, Clone)]
pub struct ModelFamily<T> {
    candidates: Vec<ParametricCurve<T>>,
    measures: Vec<DiscreteMeasure<T>>,
    nodes: usize,
    gamma_loss: T,
    order: usize,
}

impl<T: Real> ModelFamily<T> {
    pub fn new(candidates: Vec<ParametricCurve<T>>, nodes: usize, gamma_loss: T) -> Result<Self> {
        if candidates.is_empty() {
            return Err(invalid("model family is empty"));
        }
        if !(gamma_loss > T::zero() && gamma_loss.is_finite()) {
            return Err(invalid(format!("loss smoothness must be > 0 (got {gamma_loss})")));
        }
        let measures = candidates
            .iter()
            .map(|c| quadrature_measure(c, nodes))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            candidates,
            measures,
            nodes,
            gamma_loss,
            order: default_order(gamma_loss.as_f64().max(1.0)),
        })
    }

    /// Circles of radius `1+ε` for each `ε` in `offsets`.
    pub fn radius_grid(offsets: &[T], nodes: usize, gamma_loss: T) -> Result<Self> {
        let curves = offsets
            .iter()
            .map(|&e| ParametricCurve::circle_radius(e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(curves, nodes, gamma_loss)
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidate(&self, i: usize) -> &ParametricCurve<T> {
        &self.candidates[i]
    }

    pub fn measure(&self, i: usize) -> &DiscreteMeasure<T> {
        &self.measures[i]
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn gamma_loss(&self) -> T {
        self.gamma_loss
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// A family whose candidates have been analyzed to a fixed level.
#[derive(Debug, Clone)]
pub struct PreparedFamily<'a, T> {
    family: &'a ModelFamily<T>,
    wavelets: WaveletFamily<T>,
    fields: Vec<CoefficientField<T>>,
    max_level: u32,
}

impl<'a, T: Real> PreparedFamily<'a, T> {
    pub fn new(family: &'a ModelFamily<T>, max_level: u32) -> Result<Self> {
        let wavelets = WaveletFamily::build(family.order, DEFAULT_CASCADE_DEPTH)?;
        let fields = family
            .measures
            .par_iter()
            .map(|m| analyze_measure(m, &wavelets, max_level))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { family, wavelets, fields, max_level })
    }

    pub fn field(&self, i: usize) -> &CoefficientField<T> {
        &self.fields[i]
    }

    pub fn analyze(&self, measure: &DiscreteMeasure<T>) -> Result<CoefficientField<T>> {
        analyze_measure(measure, &self.wavelets, self.max_level)
    }

    /// Scores every candidate against `sample` and returns the argmin.
    pub fn estimate(&self, sample: &DiscreteMeasure<T>) -> Result<EstimatorResult<T>> {
        let target = self.analyze(sample)?;
        self.estimate_field(&target)
    }

    pub fn estimate_field(&self, target: &CoefficientField<T>) -> Result<EstimatorResult<T>> {
        let gamma = self.family.gamma_loss;
        let scores = self
            .fields
            .iter()
            .map(|f| ipm_dual(f, target, gamma))
            .collect::<Result<Vec<_>>>()?;
        let chosen = argmin_index(&scores).ok_or_else(|| invalid("no finite candidate score"))?;
        Ok(EstimatorResult {
            chosen,
            params: self.family.candidates[chosen],
            ipm: scores[chosen],
            scores,
        })
    }
}

/// Outcome of one minimum-IPM fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorResult<T> {
    pub chosen: usize,
    pub params: ParametricCurve<T>,
    pub ipm: T,
    pub scores: Vec<T>,
}

/// Position of the smallest finite score; the first one on ties.
pub fn argmin_index<T: Real>(scores: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if !s.is_finite() {
            continue;
        }
        match best {
            Some(b) if scores[b] <= s => {}
            _ => best = Some(i),
        }
    }
    best
}

/// `argmin_{μ ∈ F} ‖μ - sample‖_{B^{-γ_loss}_{1,1}}` at level `max_level`.
pub fn minimum_ipm_estimate<T: Real>(
    sample: &DiscreteMeasure<T>,
    family: &ModelFamily<T>,
    max_level: u32,
) -> Result<EstimatorResult<T>> {
    if sample.is_empty() {
        return Err(invalid("sample is empty"));
    }
    PreparedFamily::new(family, max_level)?.estimate(sample)
}

/// One Monte-Carlo replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRecord<T> {
    pub n: usize,
    pub rep: usize,
    pub chosen_index: usize,
    pub ipm_loss: T,
    pub ipm_eval: T,
}

/// Mean and sample standard deviation of the evaluation error at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow<T> {
    pub n: usize,
    pub mean_error: T,
    pub sd: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult<T> {
    pub records: Vec<RateRecord<T>>,
    pub rows: Vec<RateRow<T>>,
}

/// Sampling seed of replicate `rep` at size `n`, independent of scheduling.
pub fn replicate_seed(seed: u64, n: usize, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) ^ rep as u64);
    rng.next_u64()
}

/// Draws `reps` samples of each size from `truth`, fits each, and measures
/// `‖chosen - truth‖_{B^{-γ_eval}_{1,1}}` on quadrature measures.
pub fn rate_experiment<T: Real>(
    truth: &ParametricCurve<T>,
    family: &ModelFamily<T>,
    n_list: &[usize],
    reps: usize,
    seed: u64,
    gamma_eval: T,
    max_level: u32,
) -> Result<RateResult<T>> {
    if n_list.is_empty() {
        return Err(invalid("sample-size list is empty"));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("sample sizes must be positive and strictly increasing"));
    }
    if reps < 3 {
        return Err(invalid(format!("need at least 3 replicates (got {reps})")));
    }
    if !(gamma_eval > T::zero()) {
        return Err(invalid(format!("evaluation smoothness must be > 0 (got {gamma_eval})")));
    }
    let prepared = PreparedFamily::new(family, max_level)?;
    let truth_field = prepared.analyze(&quadrature_measure(truth, family.nodes)?)?;
    let eval = family
        .measures
        .par_iter()
        .enumerate()
        .map(|(i, _)| ipm_dual(prepared.field(i), &truth_field, gamma_eval))
        .collect::<Result<Vec<T>>>()?;
    let jobs: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..reps).map(move |r| (n, r))).collect();
    let records = jobs
        .par_iter()
        .map(|&(n, rep)| {
            let sample = sample_iid(truth, n, replicate_seed(seed, n, rep))?;
            let fit = prepared.estimate(&sample)?;
            Ok(RateRecord {
                n,
                rep,
                chosen_index: fit.chosen,
                ipm_loss: fit.ipm,
                ipm_eval: eval[fit.chosen],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = records
        .chunks(reps)
        .map(|chunk| {
            let k = T::from_usize_lossy(chunk.len());
            let mean = chunk.iter().fold(T::zero(), |a, r| a + r.ipm_eval) / k;
            let var = chunk.iter().fold(T::zero(), |a, r| a + (r.ipm_eval - mean).powi(2)) / (k - T::one());
            RateRow { n: chunk[0].n, mean_error: mean, sd: var.sqrt() }
        })
        .collect();
    Ok(RateResult { records, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ModelFamily<f64> {
        let offsets: Vec<f64> = (-4..=4).map(|k| 0.05 * k as f64).collect();
        ModelFamily::radius_grid(&offsets, 256, 0.5).unwrap()
    }

    #[test]
    fn argmin_prefers_first_on_ties() {
        assert_eq!(argmin_index(&[3.0, 1.0, 1.0, 2.0]), Some(1));
        assert_eq!(argmin_index(&[f64::NAN, 2.0]), Some(1));
        assert_eq!(argmin_index::<f64>(&[]), None);
    }

    #[test]
    fn empty_family_is_rejected() {
        assert!(ModelFamily::<f64>::new(vec![], 64, 0.5).is_err());
    }

    #[test]
    fn singleton_family() {
        let fam = ModelFamily::radius_grid(&[0.1], 128, 0.5).unwrap();
        let sample = sample_iid(&ParametricCurve::unit_circle(), 50, 1).unwrap();
        let r = minimum_ipm_estimate(&sample, &fam, 4).unwrap();
        assert_eq!(r.chosen, 0);
        assert_eq!(r.scores.len(), 1);
    }

    #[test]
    fn noiseless_member_is_recovered() {
        let fam = grid();
        let sample = fam.measure(6).clone();
        let r = minimum_ipm_estimate(&sample, &fam, 6).unwrap();
        assert_eq!(r.chosen, 6);
        assert!(r.ipm.abs() < 1e-10);
    }

    #[test]
    fn replicate_seeds_differ() {
        assert_ne!(replicate_seed(7, 100, 0), replicate_seed(7, 100, 1));
        assert_ne!(replicate_seed(7, 100, 0), replicate_seed(7, 400, 0));
        assert_eq!(replicate_seed(7, 100, 3), replicate_seed(7, 100, 3));
    }

    #[test]
    fn rate_experiment_rejects_bad_inputs() {
        let fam = grid();
        let truth = ParametricCurve::circle_radius(0.05).unwrap();
        assert!(rate_experiment(&truth, &fam, &[], 3, 0, 1.0, 4).is_err());
        assert!(rate_experiment(&truth, &fam, &[10, 20], 2, 0, 1.0, 4).is_err());
        assert!(rate_experiment(&truth, &fam, &[20, 10], 3, 0, 1.0, 4).is_err());
    }
}
