//! Exact calculus of step functions on finite products of `[0,1]`.
//!
//! A [`StepFunction`] depends on finitely many coordinates of the infinite
//! product `[0,1]^N` with product Lebesgue measure and is constant on the
//! cells of a [`ProductGrid`]. Everything here is exact: norms, the Ky Fan
//! metric of convergence in measure, level profiles and worst-set integrals
//! are computed as [`Rational`](crate::rational::Rational)s.

mod grid;
mod kyfan;
mod step;
pub mod text;
mod uniform;

pub use grid::{breaks_from_lengths, ProductGrid};
pub use kyfan::{best_constant, ky_fan, ky_fan_to_zero, tail_measure, BestConstant, LevelProfile};
pub use step::StepFunction;
pub use uniform::{
    check_orthogonality, delta_is_valid, ui_delta, worst_set_integral, OrthogonalityCheck,
};

use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

pub const DEFAULT_CELL_CAP: usize = 1 << 24;

static CELL_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_CELL_CAP);

/// Largest number of cells any grid may have. Operations that would build a
/// bigger grid fail with [`MeasureError::SizeLimit`].
pub fn cell_cap() -> usize {
    CELL_CAP.load(Ordering::Relaxed)
}

pub fn set_cell_cap(cap: usize) {
    CELL_CAP.store(cap.max(1), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("grid would have {cells} cells, above the cap of {cap}")]
    SizeLimit { cells: usize, cap: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{values} values for a grid of {cells} cells")]
    ShapeMismatch { values: usize, cells: usize },
    #[error("length mismatch: {0} coefficients for {1} functions")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("budget {0} outside [0,1]")]
    BudgetOutOfRange(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
