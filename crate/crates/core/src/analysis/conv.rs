use super::AnalysisError;
use crate::lp::{Bound, LinearProgram, Relation, Sense};
use crate::measure::StepFunction;
use crate::rational::{int, one, zero, Rational};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Subset enumeration limit for `conv_n` distances.
pub const SUBSET_CAP: usize = 10_000;

/// Which convex combinations are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvOrder {
    /// The full convex hull.
    All,
    /// Combinations of at most this many points.
    AtMost(usize),
}

/// `dist(conv_n(Z), y)`: exact when `lower == upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvDistance {
    pub lower: Rational,
    pub upper: Rational,
    /// Convex weights over `Z` attaining `upper`.
    pub weights: Vec<Rational>,
    /// Linear programs solved.
    pub programs: usize,
}

impl ConvDistance {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// The cells of the common refinement of `y` and `zs`, with equal value
/// patterns merged: `(y value, z values, mass)`.
fn merged_classes(
    y: &StepFunction,
    zs: &[&StepFunction],
) -> Result<(Vec<(Rational, Vec<Rational>)>, Vec<Rational>), AnalysisError> {
    let mut all = vec![y.clone()];
    all.extend(zs.iter().map(|z| (*z).clone()));
    let all = StepFunction::refine_all(&all)?;
    let masses = all[0].grid().cell_measures();
    let mut classes: BTreeMap<(Rational, Vec<Rational>), Rational> = BTreeMap::new();
    for (c, m) in masses.into_iter().enumerate() {
        let key = (
            all[0].values()[c].clone(),
            all[1..].iter().map(|f| f.values()[c].clone()).collect(),
        );
        *classes.entry(key).or_insert_with(zero) += m;
    }
    Ok(classes.into_iter().unzip())
}

/// `min{‖y − Σ λᵢ zᵢ‖ : λ in the simplex}`, exactly, with its weights.
pub fn hull_distance(y: &StepFunction, zs: &[&StepFunction]) -> Result<(Rational, Vec<Rational>), AnalysisError> {
    if zs.is_empty() {
        return Err(AnalysisError::EmptyPool);
    }
    let k = zs.len();
    let (patterns, masses) = merged_classes(y, zs)?;
    let mut objective = vec![zero(); k];
    objective.extend(masses.iter().cloned());
    let mut lp = LinearProgram::new(Sense::Minimize, objective, vec![Bound::NonNegative; k + masses.len()]);
    for (c, (yc, zc)) in patterns.iter().enumerate() {
        let t = k + c;
        // t ≥ |y − Σ λ z| on the class
        let mut up = vec![(t, one())];
        let mut down = vec![(t, one())];
        for (i, v) in zc.iter().enumerate() {
            if !v.is_zero() {
                up.push((i, v.clone()));
                down.push((i, -v.clone()));
            }
        }
        lp.constrain(up, Relation::Ge, yc.clone());
        lp.constrain(down, Relation::Ge, -yc.clone());
    }
    lp.constrain((0..k).map(|i| (i, one())).collect(), Relation::Eq, one());
    let sol = lp.solve()?;
    let weights = sol.x[..k].to_vec();
    let owned: Vec<StepFunction> = zs.iter().map(|z| (*z).clone()).collect();
    let direct = y.sub(&StepFunction::lin_comb(&weights, &owned)?)?.norm_l1();
    if direct != sol.objective {
        return Err(AnalysisError::Lp(crate::lp::LpError::Certificate(
            "hull distance does not re-evaluate".into(),
        )));
    }
    Ok((direct, weights))
}

/// A weak-duality witness for `dist(conv(Z), y) ≥ value`: a weight `w` with
/// `|w| ≤ 1` and a level `s ≥ ∫ z·w` for every `z ∈ Z`, so that
/// `‖y − z‖ ≥ ∫ (y − z)·w ≥ ∫ y·w − s = value` on the whole hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullWitness {
    pub weight: StepFunction,
    pub level: Rational,
    pub value: Rational,
}

impl HullWitness {
    /// Checks the witness against `y` and `zs` from scratch.
    pub fn certifies(&self, y: &StepFunction, zs: &[&StepFunction]) -> Result<bool, AnalysisError> {
        if self.weight.sup_abs() > one() {
            return Ok(false);
        }
        for z in zs {
            if z.pairing(&self.weight)? > self.level {
                return Ok(false);
            }
        }
        Ok(y.pairing(&self.weight)? - &self.level == self.value)
    }
}

/// Solves the dual of [`hull_distance`]: maximise `∫ y·w − s` over
/// `|w| ≤ 1` and `s ≥ ∫ zᵢ·w`. Its optimum equals the hull distance.
pub fn hull_witness(y: &StepFunction, zs: &[&StepFunction]) -> Result<HullWitness, AnalysisError> {
    if zs.is_empty() {
        return Err(AnalysisError::EmptyPool);
    }
    let mut all = vec![y.clone()];
    all.extend(zs.iter().map(|z| (*z).clone()));
    let all = StepFunction::refine_all(&all)?;
    let grid = all[0].grid().clone();
    let masses = grid.cell_measures();
    // one weight value per distinct pattern keeps the LP small
    let mut index: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    let mut class_of = Vec::with_capacity(masses.len());
    let mut class_mass: Vec<Rational> = Vec::new();
    let mut class_pattern: Vec<Vec<Rational>> = Vec::new();
    for (c, m) in masses.iter().enumerate() {
        let key: Vec<Rational> = all.iter().map(|f| f.values()[c].clone()).collect();
        let next = index.len();
        let id = *index.entry(key.clone()).or_insert(next);
        if id == class_mass.len() {
            class_mass.push(zero());
            class_pattern.push(key);
        }
        class_mass[id] += m;
        class_of.push(id);
    }
    let k = class_mass.len();
    let s = k;
    let mut objective: Vec<Rational> = (0..k).map(|c| &class_mass[c] * &class_pattern[c][0]).collect();
    objective.push(int(-1));
    let mut bounds = vec![Bound::Free; k];
    bounds.push(Bound::Free);
    let mut lp = LinearProgram::new(Sense::Maximize, objective, bounds);
    for c in 0..k {
        lp.constrain(vec![(c, one())], Relation::Le, one());
        lp.constrain(vec![(c, one())], Relation::Ge, int(-1));
    }
    for i in 0..zs.len() {
        let mut terms: Vec<(usize, Rational)> = (0..k)
            .filter(|&c| !class_pattern[c][i + 1].is_zero())
            .map(|c| (c, &class_mass[c] * &class_pattern[c][i + 1]))
            .collect();
        terms.push((s, int(-1)));
        lp.constrain(terms, Relation::Le, zero());
    }
    let sol = lp.solve()?;
    let values = class_of.iter().map(|&c| sol.x[c].clone()).collect();
    let witness = HullWitness {
        weight: StepFunction::new(grid, values)?,
        level: sol.x[s].clone(),
        value: sol.objective,
    };
    if !witness.certifies(y, zs)? {
        return Err(AnalysisError::Lp(crate::lp::LpError::Certificate(
            "hull witness does not re-verify".into(),
        )));
    }
    Ok(witness)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `dist(conv_n(Z), y)`.
///
/// The full hull is one linear program. For `n < |Z|` the exact value is the
/// minimum over all `n`-subsets while there are at most [`SUBSET_CAP`] of
/// them; beyond that the full-hull value is a lower bound and the best
/// `n`-sparse rounding of its weights an upper bound.
pub fn conv_distance(y: &StepFunction, zs: &[StepFunction], order: ConvOrder) -> Result<ConvDistance, AnalysisError> {
    if zs.is_empty() {
        return Err(AnalysisError::EmptyPool);
    }
    let refs: Vec<&StepFunction> = zs.iter().collect();
    let n = match order {
        ConvOrder::All => zs.len(),
        ConvOrder::AtMost(n) if n == 0 => return Err(AnalysisError::Precondition("conv_0 is empty".into())),
        ConvOrder::AtMost(n) => n.min(zs.len()),
    };
    if n == zs.len() {
        let (d, w) = hull_distance(y, &refs)?;
        return Ok(ConvDistance {
            lower: d.clone(),
            upper: d,
            weights: w,
            programs: 1,
        });
    }
    if binomial(zs.len(), n) <= SUBSET_CAP as u128 {
        let sets = subsets(zs.len(), n);
        let results: Vec<(Rational, Vec<Rational>)> = sets
            .par_iter()
            .map(|s| {
                let sub: Vec<&StepFunction> = s.iter().map(|&i| &zs[i]).collect();
                let (d, w) = hull_distance(y, &sub)?;
                let mut full = vec![zero(); zs.len()];
                for (&i, wi) in s.iter().zip(w) {
                    full[i] = wi;
                }
                Ok((d, full))
            })
            .collect::<Result<_, AnalysisError>>()?;
        let programs = results.len();
        let (d, w) = results.into_iter().min_by(|a, b| a.0.cmp(&b.0)).expect("at least one subset");
        return Ok(ConvDistance {
            lower: d.clone(),
            upper: d,
            weights: w,
            programs,
        });
    }
    let (lower, w) = hull_distance(y, &refs)?;
    let mut order_idx: Vec<usize> = (0..zs.len()).collect();
    order_idx.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
    let keep = &order_idx[..n];
    let kept: Rational = keep.iter().map(|&i| w[i].clone()).sum();
    let mut sparse = vec![zero(); zs.len()];
    for &i in keep {
        sparse[i] = if kept.is_zero() {
            Rational::new(1.into(), (n as i64).into())
        } else {
            &w[i] / &kept
        };
    }
    let upper = y.sub(&StepFunction::lin_comb(&sparse, zs)?)?.norm_l1();
    Ok(ConvDistance {
        lower,
        upper,
        weights: sparse,
        programs: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn spike(coord: u32) -> StepFunction {
        StepFunction::interval(coord, zero(), q(1, 4), int(4)).unwrap()
    }

    #[test]
    fn member_and_antipode() {
        let y = spike(1);
        let d = conv_distance(&y, &[y.clone(), StepFunction::one()], ConvOrder::All).unwrap();
        assert_eq!(d.upper, zero());
        let d = conv_distance(&y, &[y.neg()], ConvOrder::All).unwrap();
        assert_eq!(d.upper, int(2));
    }

    #[test]
    fn averaging_spikes_approaches_one() {
        let zs: Vec<StepFunction> = (1..=3).map(spike).collect();
        let full = conv_distance(&StepFunction::one(), &zs, ConvOrder::All).unwrap();
        let avg = StepFunction::lin_comb(&[q(1, 3), q(1, 3), q(1, 3)], &zs).unwrap();
        assert!(full.upper <= StepFunction::one().sub(&avg).unwrap().norm_l1());
        let two = conv_distance(&StepFunction::one(), &zs, ConvOrder::AtMost(2)).unwrap();
        let one_ = conv_distance(&StepFunction::one(), &zs, ConvOrder::AtMost(1)).unwrap();
        assert!(full.upper <= two.upper && two.upper <= one_.upper);
        assert_eq!(one_.upper, q(3, 2));
        assert_eq!(two.programs, 3);
    }

    #[test]
    fn witness_matches_primal() {
        let zs: Vec<StepFunction> = (1..=3).map(spike).collect();
        let refs: Vec<&StepFunction> = zs.iter().collect();
        let y = StepFunction::on_coordinate(2, vec![zero(), q(1, 3), one()], vec![int(2), q(-1, 2)]).unwrap();
        let (d, _) = hull_distance(&y, &refs).unwrap();
        let w = hull_witness(&y, &refs).unwrap();
        assert_eq!(w.value, d);
        assert!(w.certifies(&y, &refs).unwrap());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(binomial(20, 10), 184_756);
    }
}
