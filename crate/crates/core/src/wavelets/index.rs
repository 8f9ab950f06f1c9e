//! Tensor-product wavelet indices `(j, l, w)` and their evaluation on `R^p`.

use std::fmt;

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::wavelets::family::{Generator, WaveletFamily};

/// Largest ambient dimension supported.
pub const MAX_DIM: usize = 3;

/// Address of one tensor basis function `ψ_{jlw}`.
///
/// The base-2 digits of `l` select the generator per axis (digit 0 is the
/// scaling function, digit 1 the wavelet); `l = 2^p` is the pure-scaling
/// block, which only exists at level 0.
///
/// Ordering is lexicographic in `(j, l, w)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorIndex {
    pub j: u32,
    pub l: u32,
    w: [i32; MAX_DIM],
    dim: u8,
}

impl TensorIndex {
    pub fn new(j: u32, l: u32, w: &[i32]) -> Result<Self> {
        let p = w.len();
        if p == 0 || p > MAX_DIM {
            return Err(invalid(format!("dimension {p} outside 1..={MAX_DIM}")));
        }
        let scaling_block = 1u32 << p;
        if l == 0 || l > scaling_block {
            return Err(invalid(format!("type l={l} outside 1..={scaling_block}")));
        }
        if j >= 1 && l == scaling_block {
            return Err(invalid(format!(
                "pure-scaling type l={scaling_block} only exists at level 0"
            )));
        }
        Ok(Self::from_parts(j, l, w))
    }

    #[inline]
    pub(crate) fn from_parts(j: u32, l: u32, w: &[i32]) -> Self {
        let mut buf = [0; MAX_DIM];
        buf[..w.len()].copy_from_slice(w);
        Self {
            j,
            l,
            w: buf,
            dim: w.len() as u8,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn w(&self) -> &[i32] {
        &self.w[..self.dim()]
    }

    /// True for the level-0 pure-scaling block `l = 2^p`.
    pub fn is_scaling(&self) -> bool {
        self.l == 1 << self.dim
    }

    /// Generator used along `axis`.
    #[inline]
    pub fn generator(&self, axis: usize) -> Generator {
        if (self.l >> axis) & 1 == 1 {
            Generator::Wavelet
        } else {
            Generator::Scaling
        }
    }

    /// Closed support box `[w·2^-j, (w+2N-1)·2^-j]` per axis.
    pub fn support_box<T: Real>(&self, family: &WaveletFamily<T>) -> AxisBox<T> {
        let scale = T::lit(0.5).powi(self.j as i32);
        let len = T::from_usize_lossy(family.support_len());
        let (lo, hi) = self
            .w()
            .iter()
            .map(|&w| {
                let w = T::lit(w as f64);
                (w * scale, (w + len) * scale)
            })
            .unzip();
        AxisBox { lo, hi }
    }
}

impl fmt::Debug for TensorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ψ(j={}, l={}, w={:?})", self.j, self.l, self.w())
    }
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> AxisBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("box bounds must have equal, nonzero length"));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| !(a <= b))
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&a, &b))| v >= a && v <= b)
    }
}

/// `2^{j/2}` times the generator evaluated at `2^j x - w`.
#[inline]
pub(crate) fn eval_factor<T: Real>(
    family: &WaveletFamily<T>,
    generator: Generator,
    j: u32,
    w: i32,
    x: T,
) -> T {
    let dilation = T::lit((1u64 << j) as f64);
    let arg = dilation * x - T::lit(w as f64);
    family.eval(generator, arg) * dilation.sqrt()
}

/// Evaluates `ψ_{jlw}(x) = 2^{jp/2} Π ψ_{l_i}(2^j x_i - w_i)`.
///
/// Zero outside the support box.
pub fn eval_tensor<T: Real>(family: &WaveletFamily<T>, index: &TensorIndex, x: &[T]) -> T {
    debug_assert_eq!(x.len(), index.dim());
    let mut value = T::one();
    for (axis, (&w, &xi)) in index.w().iter().zip(x).enumerate() {
        value *= eval_factor(family, index.generator(axis), index.j, w, xi);
        if value == T::zero() {
            break;
        }
    }
    value
}

/// Type values `l` present at level `j` in dimension `p`.
pub fn types_at_level(j: u32, p: usize) -> std::ops::RangeInclusive<u32> {
    let top = 1u32 << p;
    if j == 0 {
        1..=top
    } else {
        1..=top - 1
    }
}

/// Translations along one axis whose support meets `[lo, hi]`.
///
/// A box with positive width must overlap the open support; a degenerate
/// axis `lo == hi` must lie in the half-open support `[a, b)`.
fn axis_translations<T: Real>(j: u32, support_len: usize, lo: T, hi: T) -> (i64, i64) {
    let dilation = T::lit((1u64 << j) as f64);
    let len = support_len as i64;
    let a = (lo * dilation).as_f64();
    let b = (hi * dilation).as_f64();
    if lo == hi {
        let first = a.floor() as i64 - len + 1;
        (first, a.floor() as i64)
    } else {
        ((a.floor() as i64) - len + 1, (b.ceil() as i64) - 1)
    }
}

/// Indices at level `j` whose support box intersects `bounds`, sorted by
/// `(l, w)`. Includes the scaling block when `j = 0`.
pub fn active_indices<T: Real>(
    family: &WaveletFamily<T>,
    j: u32,
    bounds: &AxisBox<T>,
) -> Vec<TensorIndex> {
    let p = bounds.dim();
    if bounds.is_empty() || p > MAX_DIM {
        return Vec::new();
    }
    let ranges: Vec<(i64, i64)> = bounds
        .lo
        .iter()
        .zip(&bounds.hi)
        .map(|(&lo, &hi)| axis_translations(j, family.support_len(), lo, hi))
        .collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut w = [0i32; MAX_DIM];
    for l in types_at_level(j, p) {
        for (slot, &(a, _)) in w.iter_mut().zip(&ranges) {
            *slot = a as i32;
        }
        loop {
            out.push(TensorIndex::from_parts(j, l, &w[..p]));
            let mut advanced = false;
            for axis in (0..p).rev() {
                if (w[axis] as i64) < ranges[axis].1 {
                    w[axis] += 1;
                    advanced = true;
                    break;
                }
                w[axis] = ranges[axis].0 as i32;
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

/// Calls `visit(index, value)` for every basis function at level `j` that
/// can be nonzero at `x`, in `(l, w)` order.
///
/// This is the per-atom kernel behind measure analysis: it touches
/// `(2N-1)^p` translations per type instead of scanning a box.
pub fn for_each_basis_at<T: Real, F: FnMut(TensorIndex, T)>(
    family: &WaveletFamily<T>,
    j: u32,
    x: &[T],
    mut visit: F,
) {
    let p = x.len();
    let len = family.support_len();
    let dilation = T::lit((1u64 << j) as f64);
    // per axis: first translation, then (scaling, wavelet) factor values
    let mut first = [0i32; MAX_DIM];
    let mut factors = [[(T::zero(), T::zero()); 32]; MAX_DIM];
    debug_assert!(len <= 32);
    for axis in 0..p {
        let u = x[axis] * dilation;
        let top = u.floor().to_i64().unwrap_or(0);
        let start = top - len as i64 + 1;
        first[axis] = start as i32;
        for k in 0..len {
            let w = (start + k as i64) as i32;
            factors[axis][k] = (
                eval_factor(family, Generator::Scaling, j, w, x[axis]),
                eval_factor(family, Generator::Wavelet, j, w, x[axis]),
            );
        }
    }
    let mut offs = [0usize; MAX_DIM];
    let mut w = [0i32; MAX_DIM];
    for l in types_at_level(j, p) {
        offs[..p].iter_mut().for_each(|o| *o = 0);
        'outer: loop {
            let mut value = T::one();
            for axis in 0..p {
                let (s, d) = factors[axis][offs[axis]];
                value *= if (l >> axis) & 1 == 1 { d } else { s };
                w[axis] = first[axis] + offs[axis] as i32;
            }
            if value != T::zero() {
                visit(TensorIndex::from_parts(j, l, &w[..p]), value);
            }
            let mut axis = p;
            while axis > 0 {
                axis -= 1;
                offs[axis] += 1;
                if offs[axis] < len {
                    continue 'outer;
                }
                offs[axis] = 0;
            }
            break;
        }
    }
}
