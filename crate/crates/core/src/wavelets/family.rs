//! Tabulated Daubechies scaling and wavelet functions.

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::wavelets::filter::{daubechies_low_pass, quadrature_mirror};

/// Largest Daubechies order supported.
pub const MAX_ORDER: usize = 16;

/// Which one-dimensional generator a tensor factor uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Scaling,
    Wavelet,
}

/// Daubechies-N scaling function `φ` and wavelet `ψ`, tabulated on the
/// dyadic grid of spacing `2^-D` over their common support `[0, 2N-1]`.
///
/// Immutable after construction; evaluation is pure.
#[derive(Debug, Clone)]
pub struct WaveletFamily<T> {
    order: usize,
    cascade_depth: u32,
    low_pass: Vec<T>,
    high_pass: Vec<T>,
    scaling_table: Vec<T>,
    wavelet_table: Vec<T>,
}

impl<T: Real> WaveletFamily<T> {
    /// Synthesizes the filter and runs dyadic cascade refinement to depth `D`.
    pub fn build(order: usize, cascade_depth: u32) -> Result<Self> {
        if order == 0 {
            return Err(invalid("wavelet order must be at least 1"));
        }
        if order > MAX_ORDER {
            return Err(invalid(format!(
                "wavelet order {order} exceeds the supported maximum of {MAX_ORDER}"
            )));
        }
        if cascade_depth < 4 {
            return Err(invalid(format!(
                "cascade depth must be at least 4 (got {cascade_depth})"
            )));
        }
        if cascade_depth > 24 {
            return Err(invalid(format!(
                "cascade depth {cascade_depth} exceeds the supported maximum of 24"
            )));
        }
        let h = daubechies_low_pass(order)?;
        let g = quadrature_mirror(&h);
        let (phi, psi) = if order == 1 {
            haar_tables(cascade_depth)
        } else {
            cascade_tables(&h, &g, cascade_depth)
        };
        let cast = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        Ok(Self {
            order,
            cascade_depth,
            low_pass: cast(&h),
            high_pass: cast(&g),
            scaling_table: cast(&phi),
            wavelet_table: cast(&psi),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cascade_depth(&self) -> u32 {
        self.cascade_depth
    }

    pub fn low_pass(&self) -> &[T] {
        &self.low_pass
    }

    pub fn high_pass(&self) -> &[T] {
        &self.high_pass
    }

    pub fn scaling_table(&self) -> &[T] {
        &self.scaling_table
    }

    pub fn wavelet_table(&self) -> &[T] {
        &self.wavelet_table
    }

    /// Length `2N-1` of the support `[0, 2N-1]` shared by `φ` and `ψ`.
    pub fn support_len(&self) -> usize {
        2 * self.order - 1
    }

    /// Number of table samples per unit length.
    pub fn samples_per_unit(&self) -> usize {
        1usize << self.cascade_depth
    }

    fn table(&self, generator: Generator) -> &[T] {
        match generator {
            Generator::Scaling => &self.scaling_table,
            Generator::Wavelet => &self.wavelet_table,
        }
    }

    /// Evaluates `φ` or `ψ` at `x`, zero outside `[0, 2N-1)`.
    ///
    /// Haar is evaluated as an exact step function; higher orders are
    /// linearly interpolated between grid samples.
    #[inline]
    pub fn eval(&self, generator: Generator, x: T) -> T {
        let support = T::from_usize_lossy(self.support_len());
        if !(x >= T::zero() && x < support) {
            return T::zero();
        }
        let table = self.table(generator);
        let pos = x * T::from_usize_lossy(self.samples_per_unit());
        let cell = pos.floor();
        let i = cell.to_usize().unwrap_or(0).min(table.len() - 1);
        if self.order == 1 || i + 1 >= table.len() {
            return table[i];
        }
        let frac = pos - cell;
        table[i] + (table[i + 1] - table[i]) * frac
    }
}

/// Exact Haar tables: `φ = 1_[0,1)`, `ψ = 1_[0,1/2) - 1_[1/2,1)`.
fn haar_tables(depth: u32) -> (Vec<f64>, Vec<f64>) {
    let per_unit = 1usize << depth;
    let mut phi = vec![1.0; per_unit + 1];
    phi[per_unit] = 0.0;
    let mut psi: Vec<f64> = (0..=per_unit)
        .map(|i| if i < per_unit / 2 { 1.0 } else { -1.0 })
        .collect();
    psi[per_unit] = 0.0;
    (phi, psi)
}

/// Values of `φ` at integers: the eigenvector of `M_{ik} = √2 h_{2i-k}` for
/// eigenvalue 1, normalized to unit sum.
fn integer_values(h: &[f64]) -> Vec<f64> {
    let len = h.len() - 1;
    let interior = len - 1;
    let sqrt2 = std::f64::consts::SQRT_2;
    let coef = |i: usize, k: usize| -> f64 {
        let idx = 2 * i as isize - k as isize;
        if idx >= 0 && (idx as usize) < h.len() {
            sqrt2 * h[idx as usize]
        } else {
            0.0
        }
    };
    // Rows: (M - I) v = 0 on interior integers, last row replaced by Σ v = 1.
    let mut a = vec![vec![0.0; interior + 1]; interior];
    for r in 0..interior {
        for c in 0..interior {
            a[r][c] = coef(r + 1, c + 1) - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..interior {
        a[interior - 1][c] = 1.0;
    }
    a[interior - 1][interior] = 1.0;
    let sol = solve_augmented(a);
    let mut values = vec![0.0; len + 1];
    values[1..len].copy_from_slice(&sol);
    values
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..=n {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][n] - tail) / a[row][row];
    }
    x
}

/// Dyadic cascade: refine `φ` from integers down to spacing `2^-depth`
/// through `φ(x) = √2 Σ h_k φ(2x - k)`, then form `ψ(x) = √2 Σ g_k φ(2x - k)`.
fn cascade_tables(h: &[f64], g: &[f64], depth: u32) -> (Vec<f64>, Vec<f64>) {
    let len = h.len() - 1;
    let per_unit = 1usize << depth;
    let size = len * per_unit + 1;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut phi = vec![0.0; size];
    for (k, v) in integer_values(h).into_iter().enumerate() {
        phi[k * per_unit] = v;
    }
    let lookup = |table: &[f64], idx: isize| -> f64 {
        if idx >= 0 && (idx as usize) < table.len() {
            table[idx as usize]
        } else {
            0.0
        }
    };
    for level in 1..=depth {
        let step = per_unit >> level;
        let mut i = step;
        while i < size {
            let value: f64 = h
                .iter()
                .enumerate()
                .map(|(k, &hk)| hk * lookup(&phi, 2 * i as isize - (k * per_unit) as isize))
                .sum();
            phi[i] = sqrt2 * value;
            i += 2 * step;
        }
    }
    let psi: Vec<f64> = (0..size)
        .map(|i| {
            let value: f64 = g
                .iter()
                .enumerate()
                .map(|(k, &gk)| gk * lookup(&phi, 2 * i as isize - (k * per_unit) as isize))
                .sum();
            sqrt2 * value
        })
        .collect();
    (phi, psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(WaveletFamily::<f64>::build(0, 8).is_err());
        assert!(WaveletFamily::<f64>::build(2, 0).is_err());
        assert!(WaveletFamily::<f64>::build(2, 3).is_err());
    }

    #[test]
    fn haar_evaluation_is_exact() {
        let fam = WaveletFamily::<f64>::build(1, 8).unwrap();
        assert_eq!(fam.eval(Generator::Scaling, 0.0), 1.0);
        assert_eq!(fam.eval(Generator::Scaling, 0.999), 1.0);
        assert_eq!(fam.eval(Generator::Scaling, 1.0), 0.0);
        assert_eq!(fam.eval(Generator::Wavelet, 0.25), 1.0);
        assert_eq!(fam.eval(Generator::Wavelet, 0.4999), 1.0);
        assert_eq!(fam.eval(Generator::Wavelet, 0.5), -1.0);
        assert_eq!(fam.eval(Generator::Wavelet, -0.1), 0.0);
    }

    #[test]
    fn db2_integer_values() {
        // φ(1) = (1+√3)/2, φ(2) = (1-√3)/2
        let fam = WaveletFamily::<f64>::build(2, 6).unwrap();
        let s3 = 3f64.sqrt();
        assert!((fam.eval(Generator::Scaling, 1.0) - (1.0 + s3) / 2.0).abs() < 1e-13);
        assert!((fam.eval(Generator::Scaling, 2.0) - (1.0 - s3) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn f32_family_builds() {
        let fam = WaveletFamily::<f32>::build(3, 8).unwrap();
        let s: f32 = fam.low_pass().iter().sum();
        assert!((s - std::f32::consts::SQRT_2).abs() < 1e-6);
    }
}
