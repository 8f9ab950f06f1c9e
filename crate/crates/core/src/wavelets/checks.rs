//! Numerical checks of the wavelet family invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;
use crate::wavelets::family::{Generator, WaveletFamily};
use crate::wavelets::index::{eval_factor, TensorIndex};

/// `|Σ h_k - √2|` and the worst violation of `Σ_k h_k h_{k+2m} = δ_m`.
pub fn filter_residuals<T: Real>(family: &WaveletFamily<T>) -> (f64, f64) {
    let h: Vec<f64> = family.low_pass().iter().map(|x| x.as_f64()).collect();
    let sum_err = (h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs();
    let mut ortho_err = 0.0f64;
    for m in 0..h.len() / 2 {
        let dot: f64 = (0..h.len().saturating_sub(2 * m))
            .map(|k| h[k] * h[k + 2 * m])
            .sum();
        let target = if m == 0 { 1.0 } else { 0.0 };
        ortho_err = ortho_err.max((dot - target).abs());
    }
    (sum_err, ortho_err)
}

/// Largest `|Σ_w φ(x - w) - 1|` over `points`.
pub fn partition_of_unity_error<T: Real>(family: &WaveletFamily<T>, points: &[T]) -> f64 {
    let len = family.support_len() as i64;
    points
        .iter()
        .map(|&x| {
            let top = x.floor().to_i64().unwrap_or(0);
            let total: f64 = (top - len + 1..=top)
                .map(|w| {
                    family
                        .eval(Generator::Scaling, x - T::lit(w as f64))
                        .as_f64()
                })
                .sum();
            (total - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest residual of `φ(x) = √2 Σ h_k φ(2x - k)` over the table grid.
pub fn two_scale_residual<T: Real>(family: &WaveletFamily<T>) -> f64 {
    let table: Vec<f64> = family.scaling_table().iter().map(|x| x.as_f64()).collect();
    let h: Vec<f64> = family.low_pass().iter().map(|x| x.as_f64()).collect();
    let per_unit = family.samples_per_unit() as isize;
    let last = table.len() as isize - 1;
    let lookup = |i: isize| {
        if i >= 0 && i < last {
            table[i as usize]
        } else if family.order() > 1 && i == last {
            table[i as usize]
        } else {
            0.0
        }
    };
    (0..last)
        .map(|i| {
            let rhs: f64 = h
                .iter()
                .enumerate()
                .map(|(k, &hk)| hk * lookup(2 * i - k as isize * per_unit))
                .sum::<f64>()
                * std::f64::consts::SQRT_2;
            (rhs - table[i as usize]).abs()
        })
        .fold(0.0, f64::max)
}

/// One-dimensional `∫ f_a f_b` for two dilated/translated generators,
/// by the midpoint rule on a grid finer than both tables.
fn inner_1d<T: Real>(
    family: &WaveletFamily<T>,
    a: (Generator, u32, i32),
    b: (Generator, u32, i32),
) -> f64 {
    let len = family.support_len() as f64;
    let span = |(_, j, w): (Generator, u32, i32)| {
        let s = 0.5f64.powi(j as i32);
        (w as f64 * s, (w as f64 + len) * s)
    };
    let (a_lo, a_hi) = span(a);
    let (b_lo, b_hi) = span(b);
    let lo = a_lo.max(b_lo);
    let hi = a_hi.min(b_hi);
    if lo >= hi {
        return 0.0;
    }
    let finest = a.1.max(b.1) + family.cascade_depth() + 1;
    let step = 0.5f64.powi(finest as i32);
    let cells = ((hi - lo) / step).round() as usize;
    (0..cells)
        .map(|c| {
            let x = T::lit(lo + (c as f64 + 0.5) * step);
            (eval_factor(family, a.0, a.1, a.2, x) * eval_factor(family, b.0, b.1, b.2, x))
                .as_f64()
        })
        .sum::<f64>()
        * step
}

/// `⟨ψ_a, ψ_b⟩` as a product of one-dimensional integrals.
pub fn tensor_inner<T: Real>(family: &WaveletFamily<T>, a: &TensorIndex, b: &TensorIndex) -> f64 {
    (0..a.dim())
        .map(|axis| {
            inner_1d(
                family,
                (a.generator(axis), a.j, a.w()[axis]),
                (b.generator(axis), b.j, b.w()[axis]),
            )
        })
        .product()
}

/// Draws `count` index pairs with levels `≤ max_level` in dimension `p`,
/// about half of them identical and the rest with overlapping supports.
pub fn random_index_pairs<R: Rng>(
    rng: &mut R,
    count: usize,
    p: usize,
    max_level: u32,
    support_len: usize,
) -> Vec<(TensorIndex, TensorIndex)> {
    let draw = |rng: &mut R, j: u32, near: Option<&TensorIndex>| {
        let top = 1u32 << p;
        let l = if j == 0 {
            rng.random_range(1..=top)
        } else {
            rng.random_range(1..top)
        };
        let w: Vec<i32> = (0..p)
            .map(|axis| match near {
                Some(other) => {
                    // translate `other`'s support start to level j, then jitter
                    let start = other.w()[axis] as f64 * 2f64.powi(j as i32 - other.j as i32);
                    start.floor() as i32 + rng.random_range(-(support_len as i32)..=1)
                }
                None => rng.random_range(-3..=3),
            })
            .collect();
        TensorIndex::new(j, l, &w).expect("valid random index")
    };
    (0..count)
        .map(|k| {
            let j = rng.random_range(0..=max_level);
            let a = draw(rng, j, None);
            if k % 2 == 0 {
                (a, a)
            } else {
                let j2 = rng.random_range(0..=max_level);
                let b = draw(rng, j2, Some(&a));
                (a, b)
            }
        })
        .collect()
}

/// [`gram_error`] over `count` pairs drawn with a ChaCha8 stream seeded by `seed`.
pub fn seeded_gram_error<T: Real>(family: &WaveletFamily<T>, count: usize, p: usize, max_level: u32, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_index_pairs(&mut rng, count, p, max_level, family.support_len());
    gram_error(family, &pairs)
}

/// Largest deviation of the Gram matrix entries from the Kronecker delta.
pub fn gram_error<T: Real>(family: &WaveletFamily<T>, pairs: &[(TensorIndex, TensorIndex)]) -> f64 {
    pairs
        .iter()
        .map(|(a, b)| {
            let target = if a == b { 1.0 } else { 0.0 };
            (tensor_inner(family, a, b) - target).abs()
        })
        .fold(0.0, f64::max)
}
