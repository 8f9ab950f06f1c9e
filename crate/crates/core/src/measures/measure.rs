//! Weighted atoms in `R^p`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::sum::stable_sum;
use crate::wavelets::AxisBox;

/// How a measure was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Quadrature,
    Empirical,
}

/// A finite measure `Σ w_i δ_{x_i}` on `R^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
    kind: MeasureKind,
}

impl<T: Real> DiscreteMeasure<T> {
    /// Builds a measure from row-major atom coordinates.
    pub fn new(dim: usize, coords: Vec<T>, weights: Vec<T>, kind: MeasureKind) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("measure dimension must be positive"));
        }
        if coords.len() != dim * weights.len() {
            return Err(invalid(format!(
                "{} coordinates do not describe {} atoms in dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(invalid(format!("weight {i} is negative or not finite")));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("atom coordinates must be finite"));
        }
        Ok(Self {
            dim,
            coords,
            weights,
            kind,
        })
    }

    /// Equal-weight probability measure on the given atoms.
    pub fn uniform(dim: usize, coords: Vec<T>, kind: MeasureKind) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 || coords.is_empty() {
            return Err(invalid("uniform measure needs at least one atom"));
        }
        let n = coords.len() / dim;
        let w = T::one() / T::from_usize_lossy(n);
        Self::new(dim, coords, vec![w; n], kind)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn atom(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// `(point, weight)` pairs in storage order.
    pub fn atoms(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> T {
        stable_sum(self.weights.iter().copied())
    }

    /// Nonnegative weights summing to one within `tol`.
    pub fn is_probability(&self, tol: T) -> bool {
        (self.total_mass() - T::one()).abs() <= tol
    }

    /// Smallest axis-aligned box containing every atom, `None` when empty.
    pub fn bounding_box(&self) -> Option<AxisBox<T>> {
        if self.is_empty() {
            return None;
        }
        let mut lo = self.atom(0).to_vec();
        let mut hi = lo.clone();
        for (x, _) in self.atoms() {
            for axis in 0..self.dim {
                lo[axis] = lo[axis].min(x[axis]);
                hi[axis] = hi[axis].max(x[axis]);
            }
        }
        Some(AxisBox { lo, hi })
    }

    /// Same weights, atoms mapped through `f`.
    pub fn map_atoms<F: FnMut(&[T]) -> Result<Vec<T>>>(&self, mut f: F) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for (x, _) in self.atoms() {
            let y = f(x)?;
            if y.len() != self.dim {
                return Err(invalid("atom map changed the dimension"));
            }
            coords.extend(y);
        }
        Self::new(self.dim, coords, self.weights.clone(), self.kind)
    }

    /// Writes `x1,...,xp,weight` rows, floats in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim)
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("weight".to_string()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (x, w) in self.atoms() {
            for v in x {
                write!(out, "{v},")?;
            }
            writeln!(out, "{w}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    /// Parses the format produced by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: BufRead>(input: R, kind: MeasureKind) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty measure csv".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        let dim = cols.len().saturating_sub(1);
        let expected: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        if dim == 0 || cols[dim] != "weight" || cols[..dim] != expected[..] {
            return Err(Error::Parse(format!("unexpected measure header '{header}'")));
        }
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "row {}: expected {} fields, found {}",
                    row + 2,
                    dim + 1,
                    fields.len()
                )));
            }
            for (k, f) in fields.iter().enumerate() {
                let v: T = f
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad number '{f}'", row + 2)))?;
                if k < dim {
                    coords.push(v);
                } else {
                    weights.push(v);
                }
            }
        }
        Self::new(dim, coords, weights, kind)
    }
}
