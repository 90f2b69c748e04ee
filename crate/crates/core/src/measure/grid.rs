use super::{cell_cap, MeasureError};
use crate::rational::{one, zero, Rational};
use num_traits::{One, Signed, Zero};

/// A finite product of rational partitions of `[0,1]`, one per coordinate.
///
/// Coordinates are kept in ascending order, so two grids over the same
/// coordinates with the same breakpoints are structurally equal. Cells are
/// enumerated row-major: the last coordinate varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductGrid {
    coords: Vec<u32>,
    breaks: Vec<Vec<Rational>>,
}

impl ProductGrid {
    /// The grid with no coordinates and a single cell of measure 1.
    pub fn trivial() -> Self {
        ProductGrid {
            coords: Vec::new(),
            breaks: Vec::new(),
        }
    }

    pub fn new(coords: Vec<u32>, breaks: Vec<Vec<Rational>>) -> Result<Self, MeasureError> {
        if coords.len() != breaks.len() {
            return Err(MeasureError::InvalidGrid(format!(
                "{} coordinates but {} breakpoint lists",
                coords.len(),
                breaks.len()
            )));
        }
        let mut pairs: Vec<(u32, Vec<Rational>)> = coords.into_iter().zip(breaks).collect();
        pairs.sort_by_key(|(c, _)| *c);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(MeasureError::InvalidGrid(format!(
                    "coordinate {} listed twice",
                    w[0].0
                )));
            }
        }
        for (c, b) in &pairs {
            if *c == 0 {
                return Err(MeasureError::InvalidGrid(
                    "coordinate indices start at 1".into(),
                ));
            }
            validate_breaks(*c, b)?;
        }
        let grid = ProductGrid {
            coords: pairs.iter().map(|(c, _)| *c).collect(),
            breaks: pairs.into_iter().map(|(_, b)| b).collect(),
        };
        grid.check_cap()?;
        Ok(grid)
    }

    /// A grid on one coordinate.
    pub fn single(coord: u32, breaks: Vec<Rational>) -> Result<Self, MeasureError> {
        Self::new(vec![coord], vec![breaks])
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn breaks(&self) -> &[Vec<Rational>] {
        &self.breaks
    }

    pub fn breaks_of(&self, coord: u32) -> Option<&[Rational]> {
        self.coords
            .iter()
            .position(|&c| c == coord)
            .map(|i| self.breaks[i].as_slice())
    }

    /// Number of intervals along each coordinate.
    pub fn shape(&self) -> Vec<usize> {
        self.breaks.iter().map(|b| b.len() - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    fn check_cap(&self) -> Result<(), MeasureError> {
        let cap = cell_cap();
        let mut cells: usize = 1;
        for n in self.shape() {
            cells = cells.saturating_mul(n);
        }
        if cells > cap {
            return Err(MeasureError::SizeLimit { cells, cap });
        }
        Ok(())
    }

    /// Interval lengths along axis `axis`.
    pub fn lengths(&self, axis: usize) -> Vec<Rational> {
        self.breaks[axis].windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Lebesgue measure of every cell, row-major.
    pub fn cell_measures(&self) -> Vec<Rational> {
        let mut out = vec![one()];
        for axis in 0..self.coords.len() {
            let lens = self.lengths(axis);
            let mut next = Vec::with_capacity(out.len() * lens.len());
            for m in &out {
                for l in &lens {
                    next.push(m * l);
                }
            }
            out = next;
        }
        out
    }

    /// Common refinement: union of coordinates, merged breakpoints.
    pub fn union(&self, other: &ProductGrid) -> Result<ProductGrid, MeasureError> {
        if self == other {
            return Ok(self.clone());
        }
        let mut coords: Vec<u32> = self.coords.iter().chain(&other.coords).copied().collect();
        coords.sort_unstable();
        coords.dedup();
        let mut cells: usize = 1;
        let mut breaks = Vec::with_capacity(coords.len());
        for &c in &coords {
            let merged = match (self.breaks_of(c), other.breaks_of(c)) {
                (Some(a), Some(b)) => merge_sorted(a, b),
                (Some(a), None) | (None, Some(a)) => a.to_vec(),
                (None, None) => unreachable!(),
            };
            cells = cells.saturating_mul(merged.len() - 1);
            breaks.push(merged);
        }
        let cap = cell_cap();
        if cells > cap {
            return Err(MeasureError::SizeLimit { cells, cap });
        }
        Ok(ProductGrid { coords, breaks })
    }

    /// True when every cell of `finer` lies inside one cell of `self`.
    pub fn is_refined_by(&self, finer: &ProductGrid) -> bool {
        self.coords.iter().zip(&self.breaks).all(|(&c, b)| match finer.breaks_of(c) {
            Some(fb) => b.iter().all(|x| fb.binary_search(x).is_ok()),
            None => false,
        })
    }

    /// For each cell of `finer` (row-major), the index of the cell of `self`
    /// containing it. Requires `self.is_refined_by(finer)`.
    pub(crate) fn source_indices(&self, finer: &ProductGrid) -> Vec<usize> {
        let shape = self.shape();
        let mut strides = vec![1usize; shape.len()];
        for i in (0..shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let mut out = vec![0usize];
        for (fc, fb) in finer.coords.iter().zip(&finer.breaks) {
            let contrib: Vec<usize> = match self.coords.iter().position(|c| c == fc) {
                Some(axis) => {
                    let sb = &self.breaks[axis];
                    let mut j = 0usize;
                    fb.windows(2)
                        .map(|w| {
                            while sb[j + 1] <= w[0] {
                                j += 1;
                            }
                            j * strides[axis]
                        })
                        .collect()
                }
                None => vec![0; fb.len() - 1],
            };
            let mut next = Vec::with_capacity(out.len() * contrib.len());
            for s in &out {
                for c in &contrib {
                    next.push(s + c);
                }
            }
            out = next;
        }
        out
    }
}

fn validate_breaks(coord: u32, b: &[Rational]) -> Result<(), MeasureError> {
    let bad = |msg: &str| Err(MeasureError::InvalidGrid(format!("coordinate {coord}: {msg}")));
    if b.len() < 2 {
        return bad("needs at least the breakpoints 0 and 1");
    }
    if !b[0].is_zero() || !b[b.len() - 1].is_one() {
        return bad("breakpoints must start at 0 and end at 1");
    }
    if b.windows(2).any(|w| w[0] >= w[1]) {
        return bad("breakpoints must be strictly increasing");
    }
    debug_assert!(!b.iter().any(|x| x.is_negative()));
    Ok(())
}

fn merge_sorted(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(y)) => {
                j += 1;
                y
            }
            (Some(x), None) => {
                i += 1;
                x
            }
            (None, Some(y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next.clone());
    }
    out
}

/// Breakpoints `0 = c_0 < c_1 < ... < c_k = 1` from positive interval lengths
/// that sum to one.
pub fn breaks_from_lengths(lengths: &[Rational]) -> Result<Vec<Rational>, MeasureError> {
    let mut acc = zero();
    let mut out = vec![acc.clone()];
    for l in lengths {
        if !l.is_positive() {
            return Err(MeasureError::InvalidGrid("interval lengths must be positive".into()));
        }
        acc += l;
        out.push(acc.clone());
    }
    if !acc.is_one() {
        return Err(MeasureError::InvalidGrid(format!("interval lengths sum to {acc}, not 1")));
    }
    Ok(out)
}
