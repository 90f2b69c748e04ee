use super::ConstructionError;
use crate::measure::{breaks_from_lengths, cell_cap, MeasureError, StepFunction};
use crate::rational::{one, zero, Rational};

/// `n` jointly independent spikes of mass `delta`, all on one coordinate.
///
/// The coordinate is cut into `2ⁿ` intervals indexed by bit vectors `b`
/// (member 0 is the most significant bit), interval `b` having length
/// `δ^{|b|}(1−δ)^{n−|b|}`. Member `j` is `1/δ` where `b_j = 1`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentFamily {
    pub coordinate: u32,
    pub n: usize,
    pub delta: Rational,
    pub members: Vec<StepFunction>,
}

impl IndependentFamily {
    pub fn new(coordinate: u32, n: usize, delta: Rational) -> Result<Self, ConstructionError> {
        if n == 0 {
            return Err(ConstructionError::InvalidParams("family needs n ≥ 1".into()));
        }
        if delta <= zero() || delta >= one() {
            return Err(ConstructionError::InvalidParams(format!("delta must lie in (0, 1), got {delta}")));
        }
        let cap = cell_cap();
        if n >= usize::BITS as usize - 1 || (1usize << n) > cap {
            let cells = if n < usize::BITS as usize - 1 { 1usize << n } else { usize::MAX };
            return Err(MeasureError::SizeLimit { cells, cap }.into());
        }
        let cells = 1usize << n;
        let rest = one() - &delta;
        let mut fire_pow = vec![one()];
        let mut rest_pow = vec![one()];
        for _ in 0..n {
            fire_pow.push(fire_pow.last().unwrap() * &delta);
            rest_pow.push(rest_pow.last().unwrap() * &rest);
        }
        let lengths: Vec<Rational> = (0..cells)
            .map(|b| {
                let k = b.count_ones() as usize;
                &fire_pow[k] * &rest_pow[n - k]
            })
            .collect();
        let breaks = breaks_from_lengths(&lengths)?;
        let height = one() / &delta;
        let members = (0..n)
            .map(|j| {
                let bit = n - 1 - j;
                let values = (0..cells)
                    .map(|b| if (b >> bit) & 1 == 1 { height.clone() } else { zero() })
                    .collect();
                StepFunction::on_coordinate(coordinate, breaks.clone(), values)
            })
            .collect::<Result<_, _>>()?;
        Ok(IndependentFamily {
            coordinate,
            n,
            delta,
            members,
        })
    }

    /// Checks `μ(⋂_{j∈S} {f_j = 1/δ}) = δ^{|S|}` for every index set `S`,
    /// reading the events off the member values.
    pub fn is_jointly_independent(&self) -> bool {
        let height = one() / &self.delta;
        let grid = self.members[0].grid();
        if self.members.iter().any(|m| m.grid() != grid) {
            return false;
        }
        let masses = grid.cell_measures();
        let fired: Vec<u64> = (0..masses.len())
            .map(|c| {
                self.members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.values()[c] == height)
                    .fold(0u64, |acc, (j, _)| acc | (1 << j))
            })
            .collect();
        (0u64..(1 << self.n)).all(|s| {
            let mass: Rational = fired
                .iter()
                .zip(&masses)
                .filter(|(f, _)| *f & s == s)
                .map(|(_, m)| m.clone())
                .sum();
            mass == num_traits::pow(self.delta.clone(), s.count_ones() as usize)
        })
    }
}
