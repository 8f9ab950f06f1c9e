//! Daubechies low-pass filter synthesis by spectral factorization.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Coefficients of the half-band polynomial `P(y) = Σ_{k<N} C(N-1+k, k) y^k`.
fn halfband_poly(order: usize) -> Vec<f64> {
    let n = order - 1;
    (0..order)
        .map(|k| binomial(n + k, k))
        .collect::<Vec<_>>()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_poly_derivative(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

/// All complex roots of a real polynomial given in ascending powers.
///
/// Durand–Kerner iteration followed by Newton polishing on the original
/// polynomial.
pub(crate) fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let denom = roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &zk)| acc * (zi - zk));
            let step = eval_poly(&monic, zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let d = eval_poly_derivative(&monic, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval_poly(&monic, *r) / d;
            *r -= step;
            if step.norm() < 1e-17 * r.norm().max(1.0) {
                break;
            }
        }
    }
    roots
}

/// Multiplies two complex polynomials (ascending powers).
fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (k, &y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

/// Extremal-phase Daubechies low-pass filter with `order` vanishing moments.
///
/// Returns `2·order` coefficients summing to `√2`, ordered so that the energy
/// is front-loaded (`db2 = [0.4830, 0.8365, 0.2241, -0.1294]`).
pub fn daubechies_low_pass(order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(invalid("wavelet order must be at least 1"));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut poly = vec![one];
    for _ in 0..order {
        poly = poly_mul(&poly, &[one, one]);
    }
    for y in poly_roots(&halfband_poly(order)) {
        // z + 1/z = 2 - 4y; keep the root inside the unit disk.
        let b = Complex64::new(2.0, 0.0) - y * 4.0;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) / 2.0;
        let z2 = (b - disc) / 2.0;
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        poly = poly_mul(&poly, &[-z, one]);
    }
    let mut h: Vec<f64> = poly.iter().map(|c| c.re).collect();
    h.reverse();
    let total: f64 = h.iter().sum();
    let scale = std::f64::consts::SQRT_2 / total;
    h.iter_mut().for_each(|c| *c *= scale);
    Ok(h)
}

/// Quadrature-mirror high-pass filter `g_k = (-1)^k h_{L-k}`.
pub fn quadrature_mirror(low_pass: &[f64]) -> Vec<f64> {
    let last = low_pass.len() - 1;
    (0..low_pass.len())
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * low_pass[last - k]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_filter() {
        let h = daubechies_low_pass(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(h.len(), 2);
        assert!((h[0] - r).abs() < 1e-15 && (h[1] - r).abs() < 1e-15);
    }

    #[test]
    fn db2_matches_closed_form() {
        // (1±√3)/(4√2), (3±√3)/(4√2)
        let s3 = 3f64.sqrt();
        let d = 4.0 * std::f64::consts::SQRT_2;
        let expected = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
        let h = daubechies_low_pass(2).unwrap();
        for (a, b) in h.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_order_rejected() {
        assert!(daubechies_low_pass(0).is_err());
    }

    #[test]
    fn roots_of_quadratic() {
        // (z-1)(z-2) = z^2 - 3z + 2
        let mut r = poly_roots(&[2.0, -3.0, 1.0]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0].re - 1.0).abs() < 1e-13 && (r[1].re - 2.0).abs() < 1e-13);
    }
}
