use super::{MeasureError, ProductGrid};
use crate::rational::{one, zero, Rational};
use num_traits::{Signed, Zero};
use std::fmt;

/// A function on `[0,1]^N` constant on the cells of a product grid.
///
/// Equality is equality of functions: two step functions on different grids
/// are equal when they agree cell-wise on the common refinement.
#[derive(Clone)]
pub struct StepFunction {
    grid: ProductGrid,
    values: Vec<Rational>,
}

impl StepFunction {
    pub fn new(grid: ProductGrid, values: Vec<Rational>) -> Result<Self, MeasureError> {
        let cells = grid.cell_count();
        if values.len() != cells {
            return Err(MeasureError::ShapeMismatch {
                values: values.len(),
                cells,
            });
        }
        Ok(StepFunction { grid, values })
    }

    pub fn constant(c: Rational) -> Self {
        StepFunction {
            grid: ProductGrid::trivial(),
            values: vec![c],
        }
    }

    /// The constant function `1`.
    pub fn one() -> Self {
        Self::constant(one())
    }

    pub fn zero() -> Self {
        Self::constant(zero())
    }

    /// A function of a single coordinate with the given breakpoints and one
    /// value per interval.
    pub fn on_coordinate(
        coord: u32,
        breaks: Vec<Rational>,
        values: Vec<Rational>,
    ) -> Result<Self, MeasureError> {
        Self::new(ProductGrid::single(coord, breaks)?, values)
    }

    /// `value` on `[a, b)` of coordinate `coord`, zero elsewhere.
    pub fn interval(coord: u32, a: Rational, b: Rational, value: Rational) -> Result<Self, MeasureError> {
        if a >= b || a.is_negative() || b > one() {
            return Err(MeasureError::InvalidGrid(format!("bad interval [{a}, {b})")));
        }
        let mut breaks = vec![zero()];
        let mut values = Vec::new();
        if !a.is_zero() {
            breaks.push(a.clone());
            values.push(zero());
        }
        values.push(value);
        if b < one() {
            breaks.push(b);
            values.push(zero());
        }
        breaks.push(one());
        Self::on_coordinate(coord, breaks, values)
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_parts(self) -> (ProductGrid, Vec<Rational>) {
        (self.grid, self.values)
    }

    /// The same function on a finer grid.
    pub fn refine_to(&self, finer: &ProductGrid) -> Result<StepFunction, MeasureError> {
        if &self.grid == finer {
            return Ok(self.clone());
        }
        if !self.grid.is_refined_by(finer) {
            return Err(MeasureError::InvalidGrid(
                "target grid does not refine the source grid".into(),
            ));
        }
        let values = self
            .grid
            .source_indices(finer)
            .into_iter()
            .map(|i| self.values[i].clone())
            .collect();
        Ok(StepFunction {
            grid: finer.clone(),
            values,
        })
    }

    /// Both functions on their common refinement.
    pub fn refine(f: &StepFunction, g: &StepFunction) -> Result<(StepFunction, StepFunction), MeasureError> {
        let grid = f.grid.union(&g.grid)?;
        Ok((f.refine_to(&grid)?, g.refine_to(&grid)?))
    }

    /// All functions on one common grid.
    pub fn refine_all(fs: &[StepFunction]) -> Result<Vec<StepFunction>, MeasureError> {
        let mut grid = ProductGrid::trivial();
        for f in fs {
            grid = grid.union(&f.grid)?;
        }
        fs.iter().map(|f| f.refine_to(&grid)).collect()
    }

    /// `Σ coeffs[i]·fs[i]`, exact and cell-wise.
    pub fn lin_comb(coeffs: &[Rational], fs: &[StepFunction]) -> Result<StepFunction, MeasureError> {
        if coeffs.len() != fs.len() {
            return Err(MeasureError::LengthMismatch(coeffs.len(), fs.len()));
        }
        if fs.is_empty() {
            return Err(MeasureError::Empty);
        }
        let mut grid = ProductGrid::trivial();
        for f in fs {
            grid = grid.union(&f.grid)?;
        }
        let mut values = vec![zero(); grid.cell_count()];
        for (c, f) in coeffs.iter().zip(fs) {
            if c.is_zero() {
                continue;
            }
            if f.grid == grid {
                for (acc, v) in values.iter_mut().zip(&f.values) {
                    *acc += c * v;
                }
            } else {
                for (acc, i) in values.iter_mut().zip(f.grid.source_indices(&grid)) {
                    *acc += c * &f.values[i];
                }
            }
        }
        Ok(StepFunction { grid, values })
    }

    fn zip_with(
        &self,
        other: &StepFunction,
        op: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<StepFunction, MeasureError> {
        let (a, b) = Self::refine(self, other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| op(x, y)).collect();
        Ok(StepFunction {
            grid: a.grid,
            values,
        })
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction, MeasureError> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction, MeasureError> {
        self.zip_with(other, |x, y| x - y)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction, MeasureError> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn map(&self, op: impl Fn(&Rational) -> Rational) -> StepFunction {
        StepFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(op).collect(),
        }
    }

    pub fn abs(&self) -> StepFunction {
        self.map(|v| v.abs())
    }

    pub fn neg(&self) -> StepFunction {
        self.map(|v| -v)
    }

    pub fn scale(&self, c: &Rational) -> StepFunction {
        self.map(|v| v * c)
    }

    /// `f - c` for a constant `c`.
    pub fn shift(&self, c: &Rational) -> StepFunction {
        self.map(|v| v - c)
    }

    /// Cell measure and value for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (Rational, &Rational)> + '_ {
        self.grid.cell_measures().into_iter().zip(&self.values)
    }

    pub fn integral(&self) -> Rational {
        self.cells().map(|(m, v)| m * v).sum()
    }

    /// `∫|f| dμ`.
    pub fn norm_l1(&self) -> Rational {
        self.cells().map(|(m, v)| m * v.abs()).sum()
    }

    /// `∫ f·w dμ`.
    pub fn pairing(&self, weight: &StepFunction) -> Result<Rational, MeasureError> {
        Ok(self.mul(weight)?.integral())
    }

    pub fn sup_abs(&self) -> Rational {
        self.values.iter().map(|v| v.abs()).max().unwrap_or_else(zero)
    }

    /// Distinct values with their total mass, ascending by value. Zero-mass
    /// entries never occur.
    pub fn distribution(&self) -> Vec<(Rational, Rational)> {
        let mut pairs: Vec<(Rational, Rational)> =
            self.cells().map(|(m, v)| (v.clone(), m)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pairs.len());
        for (v, m) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => out.push((v, m)),
            }
        }
        out
    }

    /// `μ{t : pred(f(t))}`.
    pub fn measure_where(&self, pred: impl Fn(&Rational) -> bool) -> Rational {
        self.cells().filter(|(_, v)| pred(v)).map(|(m, _)| m).sum()
    }

    /// Function equality through the common refinement.
    pub fn same_function(&self, other: &StepFunction) -> Result<bool, MeasureError> {
        let (a, b) = Self::refine(self, other)?;
        Ok(a.values == b.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        self.same_function(other).unwrap_or(false)
    }
}

impl Eq for StepFunction {}

impl fmt::Debug for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction(coords={:?}, shape={:?})", self.grid.coords(), self.grid.shape())
    }
}
