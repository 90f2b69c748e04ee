//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's pivoting rule, which cannot cycle.
//! Every optimum is returned together with a dual vector, and both are
//! re-checked against the untouched standard-form data before the solution
//! is handed out: primal feasibility, dual feasibility (`Aᵀy ≤ c`) and equal
//! objective values (`bᵀy = cᵀx`). A solution that fails the check is an
//! error, never a silent result.

use crate::rational::{zero, Rational};
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Free,
    NonNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    bounds: Vec<Bound>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// Simplex pivots over both phases.
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("optimality certificate rejected: {0}")]
    Certificate(String),
    #[error("variable index {0} out of range")]
    BadIndex(usize),
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>, bounds: Vec<Bound>) -> Self {
        assert_eq!(objective.len(), bounds.len(), "one bound per variable");
        LinearProgram {
            sense,
            objective,
            bounds,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    /// Value of the objective at `x`, exactly.
    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Exact feasibility of `x` in the original formulation.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self
            .bounds
            .iter()
            .zip(x)
            .all(|(b, v)| *b == Bound::Free || !v.is_negative());
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.terms.iter().map(|(j, a)| a * &x[*j]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        for c in &self.constraints {
            if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= self.num_vars()) {
                return Err(LpError::BadIndex(*j));
            }
        }
        let std = StandardForm::from_program(self);
        let (xs, pivots) = std.solve()?;
        let x: Vec<Rational> = self
            .bounds
            .iter()
            .enumerate()
            .map(|(j, b)| match b {
                Bound::NonNegative => xs[std.pos_col[j]].clone(),
                Bound::Free => &xs[std.pos_col[j]] - &xs[std.neg_col[j].expect("free split")],
            })
            .collect();
        if !self.is_feasible(&x) {
            return Err(LpError::Certificate("primal point infeasible".into()));
        }
        let objective = self.evaluate(&x);
        Ok(LpSolution {
            x,
            objective,
            pivots,
        })
    }
}

/// `min cᵀx, Ax = b, x ≥ 0, b ≥ 0`, with one artificial column per row.
struct StandardForm {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    c: Vec<Rational>,
    pos_col: Vec<usize>,
    neg_col: Vec<Option<usize>>,
}

impl StandardForm {
    fn from_program(lp: &LinearProgram) -> Self {
        let mut pos_col = Vec::with_capacity(lp.num_vars());
        let mut neg_col = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        for b in &lp.bounds {
            pos_col.push(ncols);
            ncols += 1;
            if *b == Bound::Free {
                neg_col.push(Some(ncols));
                ncols += 1;
            } else {
                neg_col.push(None);
            }
        }
        let slack_start = ncols;
        let nslack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        ncols += nslack;
        let sign = if lp.sense == Sense::Maximize { -1 } else { 1 };
        let mut c = vec![zero(); ncols];
        for (j, cj) in lp.objective.iter().enumerate() {
            let cj = cj * Rational::from_integer(sign.into());
            if let Some(n) = neg_col[j] {
                c[n] = -cj.clone();
            }
            c[pos_col[j]] = cj;
        }
        let mut a = Vec::with_capacity(lp.constraints.len());
        let mut b = Vec::with_capacity(lp.constraints.len());
        let mut slack = slack_start;
        for con in &lp.constraints {
            let mut row = vec![zero(); ncols];
            for (j, v) in &con.terms {
                row[pos_col[*j]] += v;
                if let Some(n) = neg_col[*j] {
                    row[n] -= v;
                }
            }
            match con.relation {
                Relation::Le => {
                    row[slack] = Rational::from_integer(1.into());
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Rational::from_integer((-1).into());
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut rhs = con.rhs.clone();
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            a.push(row);
            b.push(rhs);
        }
        StandardForm {
            a,
            b,
            c,
            pos_col,
            neg_col,
        }
    }

    fn solve(&self) -> Result<(Vec<Rational>, usize), LpError> {
        let m = self.a.len();
        let n = self.c.len();
        let width = n + m;
        // tableau rows: [A | I | b]
        let mut t: Vec<Vec<Rational>> = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (row, bi))| {
                let mut r = row.clone();
                r.extend((0..m).map(|k| Rational::from_integer(((k == i) as i64).into())));
                r.push(bi.clone());
                r
            })
            .collect();
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut pivots = 0;

        // phase 1: minimise the sum of artificials
        let mut obj = vec![zero(); width + 1];
        for row in &t {
            for (j, v) in row.iter().enumerate() {
                if j < n || j == width {
                    obj[j] -= v;
                }
            }
        }
        pivots += run_simplex(&mut t, &mut obj, &mut basis, n)?;
        if !obj[width].is_zero() {
            return Err(LpError::Infeasible);
        }
        for i in 0..m {
            if basis[i] >= n {
                if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                    pivot(&mut t, &mut obj, i, j);
                    basis[i] = j;
                    pivots += 1;
                }
            }
        }

        // phase 2
        let mut obj = vec![zero(); width + 1];
        obj[..n].clone_from_slice(&self.c);
        for i in 0..m {
            let cb = if basis[i] < n { self.c[basis[i]].clone() } else { zero() };
            if !cb.is_zero() {
                for (o, v) in obj.iter_mut().zip(&t[i]) {
                    *o -= &cb * v;
                }
            }
        }
        pivots += run_simplex(&mut t, &mut obj, &mut basis, n)?;

        let mut x = vec![zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i][width].clone();
            }
        }
        // reduced cost of artificial i is -y_i
        let y: Vec<Rational> = (0..m).map(|i| -obj[n + i].clone()).collect();
        self.certify(&x, &y)?;
        Ok((x, pivots))
    }

    fn certify(&self, x: &[Rational], y: &[Rational]) -> Result<(), LpError> {
        for (row, bi) in self.a.iter().zip(&self.b) {
            let lhs: Rational = row.iter().zip(x).map(|(a, v)| a * v).sum();
            if lhs != *bi {
                return Err(LpError::Certificate("Ax ≠ b".into()));
            }
        }
        if x.iter().any(|v| v.is_negative()) {
            return Err(LpError::Certificate("x has a negative entry".into()));
        }
        for j in 0..self.c.len() {
            let aty: Rational = self.a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
            if aty > self.c[j] {
                return Err(LpError::Certificate(format!("dual infeasible in column {j}")));
            }
        }
        let primal: Rational = self.c.iter().zip(x).map(|(c, v)| c * v).sum();
        let dual: Rational = self.b.iter().zip(y).map(|(b, v)| b * v).sum();
        if primal != dual {
            return Err(LpError::Certificate(format!("duality gap {}", primal - dual)));
        }
        Ok(())
    }
}

/// Bland's rule: lowest-index improving column, then the lowest-index basic
/// variable among tied ratios. Columns at index `>= enter_limit` never enter.
fn run_simplex(
    t: &mut [Vec<Rational>],
    obj: &mut [Rational],
    basis: &mut [usize],
    enter_limit: usize,
) -> Result<usize, LpError> {
    let rhs = obj.len() - 1;
    let mut count = 0;
    loop {
        let Some(col) = (0..enter_limit).find(|&j| obj[j].is_negative()) else {
            return Ok(count);
        };
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = best else {
            return Err(LpError::Unbounded);
        };
        pivot(t, obj, row, col);
        basis[row] = col;
        count += 1;
    }
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    let prow = t[row].clone();
    let nz: Vec<usize> = prow
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, _)| j)
        .collect();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for &j in &nz {
            r[j] -= &f * &prow[j];
        }
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for &j in &nz {
            obj[j] -= &f * &prow[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn small_maximisation() {
        // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let mut lp = LinearProgram::new(
            Sense::Maximize,
            vec![int(3), int(2)],
            vec![Bound::NonNegative; 2],
        );
        lp.constrain(vec![(0, int(1)), (1, int(1))], Relation::Le, int(4));
        lp.constrain(vec![(0, int(1)), (1, int(3))], Relation::Le, int(6));
        lp.constrain(vec![(0, int(1))], Relation::Le, int(3));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, int(11));
        assert_eq!(s.x, vec![int(3), int(1)]);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |x - 1/3| via t ≥ ±(x - 1/3), with x = 1/3 - s, s free
        let mut lp = LinearProgram::new(
            Sense::Minimize,
            vec![zero(), int(1)],
            vec![Bound::Free, Bound::NonNegative],
        );
        lp.constrain(vec![(1, int(1)), (0, int(-1))], Relation::Ge, q(-1, 3));
        lp.constrain(vec![(1, int(1)), (0, int(1))], Relation::Ge, q(1, 3));
        lp.constrain(vec![(0, int(2))], Relation::Eq, q(-1, 2));
        let s = lp.solve().unwrap();
        assert_eq!(s.x[0], q(-1, 4));
        assert_eq!(s.objective, q(7, 12));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1)], vec![Bound::NonNegative]);
        lp.constrain(vec![(0, int(1))], Relation::Le, int(-1));
        assert_eq!(lp.solve(), Err(LpError::Infeasible));

        let lp = LinearProgram::new(Sense::Maximize, vec![int(1)], vec![Bound::Free]);
        assert_eq!(lp.solve(), Err(LpError::Unbounded));
    }

    #[test]
    fn degenerate_redundant_rows() {
        // x + y = 1 twice, and a degenerate vertex at the origin of z
        let mut lp = LinearProgram::new(
            Sense::Minimize,
            vec![int(1), int(2), int(0)],
            vec![Bound::NonNegative; 3],
        );
        lp.constrain(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        lp.constrain(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(2));
        lp.constrain(vec![(2, int(1)), (0, int(1))], Relation::Le, int(1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, int(1));
    }
}
