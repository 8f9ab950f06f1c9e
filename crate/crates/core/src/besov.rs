//! Wavelet coefficient fields of measures, Besov norms, the `Γ^{γ,c}`
//! level reweighting, and the dual-norm IPM surrogate `‖μ-ν‖_{B^{-γ}_{1,1}}`.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::DiscreteMeasure;
use crate::scalar::Real;
use crate::sum::{stable_sum, CompensatedSum};
use crate::wavelets::{for_each_basis_at, AxisBox, TensorIndex, WaveletFamily, MAX_DIM};

/// Entries with smaller magnitude are dropped from analyzed fields.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Sparse wavelet coefficients `α(j,l,w)` up to level `max_level`.
///
/// Entries are kept sorted by `(j, l, w)` and never stored as zero. The
/// field also carries a pending level reweighting `2^{jγ}(1+j)^c` so that
/// repeated [`gamma_op`] applications compose exactly.
#[derive(Debug, Clone)]
pub struct CoefficientField<T> {
    dim: usize,
    max_level: u32,
    entries: Vec<(TensorIndex, T)>,
    bounding_box: Option<AxisBox<T>>,
    shift_gamma: T,
    shift_log: T,
}

impl<T: Real> CoefficientField<T> {
    /// Builds a field from arbitrary entries; zeros are dropped.
    pub fn from_entries<I>(dim: usize, max_level: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorIndex, T)>,
    {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        let mut entries: Vec<(TensorIndex, T)> =
            entries.into_iter().filter(|(_, v)| *v != T::zero()).collect();
        for (idx, _) in &entries {
            if idx.dim() != dim {
                return Err(invalid(format!("{idx:?} does not live in dimension {dim}")));
            }
            if idx.j > max_level {
                return Err(invalid(format!("{idx:?} exceeds max level {max_level}")));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(invalid(format!("duplicate coefficient {:?}", w[0].0)));
        }
        Ok(Self {
            dim,
            max_level,
            entries,
            bounding_box: None,
            shift_gamma: T::zero(),
            shift_log: T::zero(),
        })
    }

    pub fn zero(dim: usize, max_level: u32) -> Result<Self> {
        Self::from_entries(dim, max_level, std::iter::empty())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Bounding box of the analyzed object, when known.
    pub fn bounding_box(&self) -> Option<&AxisBox<T>> {
        self.bounding_box.as_ref()
    }

    #[inline]
    fn level_factor(&self, j: u32) -> T {
        if self.shift_gamma == T::zero() && self.shift_log == T::zero() {
            return T::one();
        }
        let jf = T::lit(j as f64);
        (jf * self.shift_gamma).exp2() * (T::one() + jf).powf(self.shift_log)
    }

    /// Coefficients in `(j, l, w)` order.
    pub fn iter(&self) -> impl Iterator<Item = (TensorIndex, T)> + '_ {
        let mut cached: Option<(u32, T)> = None;
        self.entries.iter().map(move |&(idx, v)| {
            let factor = match cached {
                Some((j, f)) if j == idx.j => f,
                _ => {
                    let f = self.level_factor(idx.j);
                    cached = Some((idx.j, f));
                    f
                }
            };
            (idx, v * factor)
        })
    }

    pub fn get(&self, index: &TensorIndex) -> T {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(index))
            .map_or(T::zero(), |i| self.entries[i].1 * self.level_factor(index.j))
    }

    /// Materializes any pending reweighting into the stored values.
    fn resolved(&self) -> Vec<(TensorIndex, T)> {
        self.iter().collect()
    }

    /// `a - b` on the union of stored indices.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (a, b) = (self.resolved(), other.resolved());
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        let (mut i, mut k) = (0, 0);
        while i < a.len() || k < b.len() {
            let take_a = k >= b.len() || (i < a.len() && a[i].0 <= b[k].0);
            let take_b = i >= a.len() || (k < b.len() && b[k].0 <= a[i].0);
            match (take_a, take_b) {
                (true, true) => {
                    out.push((a[i].0, a[i].1 - b[k].1));
                    i += 1;
                    k += 1;
                }
                (true, false) => {
                    out.push(a[i]);
                    i += 1;
                }
                _ => {
                    out.push((b[k].0, -b[k].1));
                    k += 1;
                }
            }
        }
        let mut field = Self::from_entries(self.dim, self.max_level, out)?;
        field.bounding_box = union_box(self.bounding_box.as_ref(), other.bounding_box.as_ref());
        Ok(field)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Incompatible(format!(
                "dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        if self.max_level != other.max_level {
            return Err(Error::Incompatible(format!(
                "max levels {} and {}",
                self.max_level, other.max_level
            )));
        }
        Ok(())
    }

    /// Writes `j,l,w1,...,wp,value` rows sorted by `(j, l, w)`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = vec!["j".to_string(), "l".to_string()];
        header.extend((1..=self.dim).map(|i| format!("w{i}")));
        header.push("value".into());
        writeln!(out, "{}", header.join(","))?;
        for (idx, v) in self.iter() {
            write!(out, "{},{},", idx.j, idx.l)?;
            for w in idx.w() {
                write!(out, "{w},")?;
            }
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    /// Parses the format produced by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: BufRead>(input: R, max_level: u32) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coefficient csv".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 4 || cols[0] != "j" || cols[1] != "l" || cols[cols.len() - 1] != "value" {
            return Err(Error::Parse(format!("unexpected coefficient header '{header}'")));
        }
        let dim = cols.len() - 3;
        let mut entries = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("row {}: malformed '{line}'", row + 2));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != dim + 3 {
                return Err(bad());
            }
            let j: u32 = fields[0].parse().map_err(|_| bad())?;
            let l: u32 = fields[1].parse().map_err(|_| bad())?;
            let w: Vec<i32> = fields[2..2 + dim]
                .iter()
                .map(|f| f.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            let v: T = fields[dim + 2].parse().map_err(|_| bad())?;
            entries.push((TensorIndex::new(j, l, &w)?, v));
        }
        Self::from_entries(dim, max_level, entries)
    }
}

fn union_box<T: Real>(a: Option<&AxisBox<T>>, b: Option<&AxisBox<T>>) -> Option<AxisBox<T>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(AxisBox {
            lo: a.lo.iter().zip(&b.lo).map(|(x, y)| x.min(*y)).collect(),
            hi: a.hi.iter().zip(&b.hi).map(|(x, y)| x.max(*y)).collect(),
        }),
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    }
}

/// Coefficients `α(j,l,w) = Σ_i w_i ψ_{jlw}(x_i)` for every level `0..=J`.
///
/// Levels are analyzed in parallel; within a level atoms are accumulated
/// in ascending order with compensated sums, so the result does not depend
/// on the number of worker threads.
pub fn analyze_measure<T: Real>(
    measure: &DiscreteMeasure<T>,
    family: &WaveletFamily<T>,
    max_level: u32,
) -> Result<CoefficientField<T>> {
    if measure.is_empty() {
        return Err(invalid("cannot analyze an empty measure"));
    }
    if measure.dim() > MAX_DIM {
        return Err(invalid(format!("dimension {} exceeds {MAX_DIM}", measure.dim())));
    }
    let threshold = T::lit(PRUNE_THRESHOLD);
    let levels: Vec<Vec<(TensorIndex, T)>> = (0..=max_level)
        .into_par_iter()
        .map(|j| {
            let mut acc: FxHashMap<TensorIndex, CompensatedSum<T>> = FxHashMap::default();
            for (x, weight) in measure.atoms() {
                if weight == T::zero() {
                    continue;
                }
                for_each_basis_at(family, j, x, |idx, value| {
                    acc.entry(idx).or_default().add(weight * value);
                });
            }
            let mut level: Vec<(TensorIndex, T)> = acc
                .into_iter()
                .map(|(idx, s)| (idx, s.value()))
                .filter(|(_, v)| v.abs() >= threshold)
                .collect();
            level.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            level
        })
        .collect();
    let mut field = CoefficientField::from_entries(measure.dim(), max_level, levels.into_iter().flatten())?;
    field.bounding_box = measure.bounding_box();
    Ok(field)
}

/// `⟨Γ^{γ,c} f, ψ_{jlw}⟩ = 2^{jγ}(1+j)^c ⟨f, ψ_{jlw}⟩`.
pub fn gamma_op<T: Real>(field: &CoefficientField<T>, gamma: T, c: T) -> CoefficientField<T> {
    let mut out = field.clone();
    out.shift_gamma = field.shift_gamma + gamma;
    out.shift_log = field.shift_log + c;
    out
}

/// A summability exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Exponent<T> {
    fn reciprocal(&self) -> T {
        match *self {
            Exponent::Finite(q) => T::one() / q,
            Exponent::Infinite => T::zero(),
        }
    }
}

/// Parameters `(s, b, q1, q2)` of `B^{s,b}_{q1,q2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams<T> {
    pub s: T,
    pub b: T,
    pub q1: Exponent<T>,
    pub q2: Exponent<T>,
}

impl<T: Real> BesovParams<T> {
    pub fn new(s: T, b: T, q1: Exponent<T>, q2: Exponent<T>) -> Result<Self> {
        for q in [q1, q2] {
            if let Exponent::Finite(q) = q {
                if !(q >= T::one()) {
                    return Err(invalid(format!("summability exponent {q} must be >= 1")));
                }
            }
        }
        if !(b >= T::zero()) {
            return Err(invalid(format!("log exponent b={b} must be >= 0")));
        }
        Ok(Self { s, b, q1, q2 })
    }

    /// `B^{s,b}_{1,1}`.
    pub fn l1(s: T, b: T) -> Self {
        Self {
            s,
            b,
            q1: Exponent::Finite(T::one()),
            q2: Exponent::Finite(T::one()),
        }
    }

    /// `B^{s}_{∞,∞}`.
    pub fn sup(s: T) -> Self {
        Self {
            s,
            b: T::zero(),
            q1: Exponent::Infinite,
            q2: Exponent::Infinite,
        }
    }
}

/// `ℓ^q` norm of the values, summed in iteration order.
fn lq_norm<T: Real, I: Iterator<Item = T>>(values: I, q: Exponent<T>) -> T {
    match q {
        Exponent::Infinite => values.map(|v| v.abs()).fold(T::zero(), T::max),
        Exponent::Finite(q) if q == T::one() => stable_sum(values.map(|v| v.abs())),
        Exponent::Finite(q) => stable_sum(values.map(|v| v.abs().powf(q))).powf(T::one() / q),
    }
}

/// Contiguous runs of `(j, l)` blocks in a sorted entry list.
fn blocks<T: Copy>(entries: &[(TensorIndex, T)]) -> impl Iterator<Item = &[(TensorIndex, T)]> {
    entries.chunk_by(|a, b| a.0.j == b.0.j && a.0.l == b.0.l)
}

/// Truncated Besov norm: the scaling block `ℓ^{q1}` norm combined with
/// `Σ_j 2^{j q2 (s + p/2 - p/q1)} (1+j)^{b q2} Σ_l (Σ_w |α|^{q1})^{q2/q1}`,
/// all to the power `1/q2`; infinite exponents become suprema.
pub fn besov_norm<T: Real>(field: &CoefficientField<T>, params: &BesovParams<T>) -> T {
    let entries = field.resolved();
    let p = T::from_usize_lossy(field.dim());
    let exponent = params.s + p * T::lit(0.5) - p * params.q1.reciprocal();
    let mut block_norms = Vec::new();
    for block in blocks(&entries) {
        let head = block[0].0;
        let inner = lq_norm(block.iter().map(|e| e.1), params.q1);
        if head.is_scaling() {
            block_norms.push(inner);
        } else {
            let jf = T::lit(head.j as f64);
            let weight = (jf * exponent).exp2() * (T::one() + jf).powf(params.b);
            block_norms.push(weight * inner);
        }
    }
    lq_norm(block_norms.into_iter(), params.q2)
}

/// `Σ_{j ≤ j_cut} 2^{-j(γ+p/2)} (1+j)^{-c} Σ_{l,w} |α|` with the scaling
/// block weighted by one.
fn weighted_l1<T: Real>(diff: &CoefficientField<T>, gamma: T, c: T, j_cut: u32) -> T {
    let p = T::from_usize_lossy(diff.dim());
    let exponent = -(gamma + p * T::lit(0.5));
    let entries = diff.resolved();
    stable_sum(
        blocks(&entries)
            .take_while(|b| b[0].0.j <= j_cut)
            .map(|block| {
                let head = block[0].0;
                let inner = stable_sum(block.iter().map(|e| e.1.abs()));
                if head.is_scaling() {
                    inner
                } else {
                    let jf = T::lit(head.j as f64);
                    (jf * exponent).exp2() * (T::one() + jf).powf(-c) * inner
                }
            }),
    )
}

/// `‖a - b‖_{B^{-γ}_{1,1}}`, the dual-norm surrogate of the `γ`-Hölder IPM.
pub fn ipm_dual<T: Real>(a: &CoefficientField<T>, b: &CoefficientField<T>, gamma: T) -> Result<T> {
    let diff = a.difference(b)?;
    Ok(weighted_l1(&diff, gamma, T::zero(), diff.max_level))
}

/// [`ipm_dual`] restricted to levels `≤ j_cut`, with level `j` further
/// weighted by `(1+j)^{-c}`.
pub fn ipm_log_weighted<T: Real>(
    a: &CoefficientField<T>,
    b: &CoefficientField<T>,
    gamma: T,
    c: T,
    j_cut: u32,
) -> Result<T> {
    a.check_compatible(b)?;
    if j_cut > a.max_level {
        return Err(Error::Incompatible(format!(
            "cut level {j_cut} exceeds max level {}",
            a.max_level
        )));
    }
    let diff = a.difference(b)?;
    Ok(weighted_l1(&diff, gamma, c, j_cut))
}

/// `∫ h dμ₁ - ∫ h dμ₂` for a single candidate potential `h`.
pub fn potential_pairing<T: Real, F: Fn(&[T]) -> T>(
    m1: &DiscreteMeasure<T>,
    m2: &DiscreteMeasure<T>,
    h: F,
) -> T {
    let mut acc = CompensatedSum::new();
    for (x, w) in m1.atoms() {
        acc.add(w * h(x));
    }
    for (x, w) in m2.atoms() {
        acc.add(-(w * h(x)));
    }
    acc.value()
}
