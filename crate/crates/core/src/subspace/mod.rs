//! Finite-dimensional subspaces of `L₁` spanned by step functions.
//!
//! A [`Subspace`] stores its basis on one shared grid. Cells on which every
//! basis function takes the same value vector are merged into a single
//! weighted class, so norms and linear programs scale with the number of
//! distinct value patterns rather than the raw cell count.

mod equivalence;
mod functional;
mod net;
pub mod text;

pub use equivalence::{norm_equivalence, NormEquivalence};
pub use functional::{functional_norm, FunctionalNorm};
pub use net::{build_net, radial_steps, SphereNet, DEFAULT_LATTICE_CAP};

use crate::lp::LpError;
use crate::measure::{MeasureError, ProductGrid, StepFunction};
use crate::rational::{q, zero, Rational};
use num_traits::{Signed, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubspaceError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis of {dim} functions has rank {rank}")]
    RankDeficient { rank: usize, dim: usize },
    #[error("empty basis")]
    Empty,
    #[error("net mesh must be positive")]
    InvalidMesh,
    #[error("net lattice would have {points} candidate points, above the cap of {cap}")]
    NetTooLarge { points: u128, cap: usize },
    #[error("function is not in the span of the basis")]
    NotInSpace,
}

#[derive(Debug, Clone)]
pub struct Subspace {
    grid: ProductGrid,
    basis: Vec<StepFunction>,
    /// Distinct basis value vectors (one entry per basis function).
    patterns: Vec<Vec<Rational>>,
    /// Total measure of the cells carrying each pattern.
    masses: Vec<Rational>,
}

impl Subspace {
    /// Span of `basis`, which must be linearly independent.
    pub fn new(basis: Vec<StepFunction>) -> Result<Self, SubspaceError> {
        if basis.is_empty() {
            return Err(SubspaceError::Empty);
        }
        let basis = StepFunction::refine_all(&basis)?;
        let grid = basis[0].grid().clone();
        let rank = rank(basis.iter().map(|b| b.values().to_vec()).collect());
        if rank < basis.len() {
            return Err(SubspaceError::RankDeficient {
                rank,
                dim: basis.len(),
            });
        }
        let mut classes: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for (c, m) in grid.cell_measures().into_iter().enumerate() {
            let pattern: Vec<Rational> = basis.iter().map(|b| b.values()[c].clone()).collect();
            *classes.entry(pattern).or_insert_with(zero) += m;
        }
        let (patterns, masses) = classes.into_iter().unzip();
        Ok(Subspace {
            grid,
            basis,
            patterns,
            masses,
        })
    }

    /// Span of this basis followed by `more`; the old basis stays a prefix.
    pub fn extend(&self, more: &[StepFunction]) -> Result<Self, SubspaceError> {
        let mut basis = self.basis.clone();
        basis.extend_from_slice(more);
        Self::new(basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[StepFunction] {
        &self.basis
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    /// Distinct value patterns with their masses.
    pub fn classes(&self) -> impl Iterator<Item = (&[Rational], &Rational)> {
        self.patterns.iter().map(|p| p.as_slice()).zip(&self.masses)
    }

    pub fn class_count(&self) -> usize {
        self.patterns.len()
    }

    fn check_dim(&self, a: &[Rational]) -> Result<(), SubspaceError> {
        if a.len() != self.dim() {
            return Err(SubspaceError::DimensionMismatch {
                expected: self.dim(),
                got: a.len(),
            });
        }
        Ok(())
    }

    /// `‖Σ aᵢ bᵢ‖₁`, accumulated class by class without building the function.
    pub fn coeff_norm(&self, a: &[Rational]) -> Result<Rational, SubspaceError> {
        self.check_dim(a)?;
        Ok(self.coeff_norm_unchecked(a))
    }

    pub(crate) fn coeff_norm_unchecked(&self, a: &[Rational]) -> Rational {
        self.patterns
            .iter()
            .zip(&self.masses)
            .map(|(p, m)| {
                let v: Rational = p.iter().zip(a).map(|(x, y)| x * y).sum();
                m * v.abs()
            })
            .sum()
    }

    /// `Σ aᵢ bᵢ` as a step function on the space's grid.
    pub fn combine(&self, a: &[Rational]) -> Result<StepFunction, SubspaceError> {
        self.check_dim(a)?;
        Ok(StepFunction::lin_comb(a, &self.basis)?)
    }

    /// `∫ bᵢ·w dμ` for every basis function.
    pub fn pairings(&self, weight: &StepFunction) -> Result<Vec<Rational>, SubspaceError> {
        self.basis
            .iter()
            .map(|b| b.pairing(weight).map_err(SubspaceError::from))
            .collect()
    }

    /// Coordinates of `f` in the basis, if `f` lies in the span.
    pub fn coefficients_of(&self, f: &StepFunction) -> Result<Vec<Rational>, SubspaceError> {
        let grid = self.grid.union(f.grid())?;
        let f = f.refine_to(&grid)?;
        let cols: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| b.refine_to(&grid).map(|b| b.values().to_vec()))
            .collect::<Result<_, _>>()?;
        solve_in_span(&cols, f.values()).ok_or(SubspaceError::NotInSpace)
    }

    /// A coefficient vector of exact unit norm, from uniformly drawn
    /// rationals with denominator `den`, normalised.
    pub fn sample_unit<R: Rng>(&self, rng: &mut R, den: i64) -> Vec<Rational> {
        loop {
            let a: Vec<Rational> = (0..self.dim()).map(|_| q(rng.gen_range(-den..=den), den)).collect();
            let n = self.coeff_norm_unchecked(&a);
            if !n.is_zero() {
                return a.into_iter().map(|x| x / &n).collect();
            }
        }
    }
}

/// Rank of the row set, by exact Gaussian elimination.
pub(crate) fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot).skip(c) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Solves `Σ aᵢ colᵢ = target` exactly; `None` when inconsistent.
fn solve_in_span(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let d = cols.len();
    // augmented rows: one per cell, [col_0(c) .. col_{d-1}(c) | target(c)]
    let mut m: Vec<Vec<Rational>> = (0..target.len())
        .map(|c| {
            let mut row: Vec<Rational> = cols.iter().map(|col| col[c].clone()).collect();
            row.push(target[c].clone());
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(d);
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &lead;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut a = vec![zero(); d];
    for (i, &c) in pivots.iter().enumerate() {
        a[c] = m[i][d].clone();
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, one};

    pub(crate) fn half_spike() -> StepFunction {
        StepFunction::interval(1, zero(), q(1, 2), int(2)).unwrap()
    }

    #[test]
    fn coeff_norm_examples() {
        let line = Subspace::new(vec![StepFunction::one()]).unwrap();
        assert_eq!(line.coeff_norm(&[one()]).unwrap(), one());
        let s = Subspace::new(vec![StepFunction::one(), half_spike()]).unwrap();
        assert_eq!(s.coeff_norm(&[one(), -one()]).unwrap(), one());
        assert_eq!(s.coeff_norm(&[zero(), zero()]).unwrap(), zero());
        assert!(s.coeff_norm(&[one()]).is_err());
    }

    #[test]
    fn rejects_dependent_basis() {
        let f = half_spike();
        let err = Subspace::new(vec![f.clone(), f.scale(&int(3))]).unwrap_err();
        assert_eq!(err, SubspaceError::RankDeficient { rank: 1, dim: 2 });
    }

    #[test]
    fn coefficients_round_trip() {
        let s = Subspace::new(vec![StepFunction::one(), half_spike()]).unwrap();
        let f = s.combine(&[q(1, 3), q(-2, 5)]).unwrap();
        assert_eq!(s.coefficients_of(&f).unwrap(), vec![q(1, 3), q(-2, 5)]);
        let outside = StepFunction::interval(2, zero(), q(1, 2), one()).unwrap();
        assert_eq!(s.coefficients_of(&outside), Err(SubspaceError::NotInSpace));
    }

    #[test]
    fn extend_keeps_prefix() {
        let s = Subspace::new(vec![StepFunction::one()]).unwrap();
        let t = s.extend(&[half_spike()]).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.basis()[0], StepFunction::one());
        assert_eq!(t.class_count(), 2);
    }
}
