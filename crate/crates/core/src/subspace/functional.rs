use super::{Subspace, SubspaceError};
use crate::lp::{Bound, LinearProgram, Relation, Sense};
use crate::measure::StepFunction;
use crate::rational::{one, zero, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalNorm {
    pub value: Rational,
    /// Coefficients of a maximiser in the unit ball.
    pub argmax: Vec<Rational>,
}

/// `sup{∫ u·w dμ : u ∈ B(space)}` for the functional given by `weight`.
///
/// LP in the coefficients `a` with one `t ≥ |Σ aⱼ pⱼ|` per value class and
/// `Σ m·t ≤ 1`.
pub fn functional_norm(space: &Subspace, weight: &StepFunction) -> Result<FunctionalNorm, SubspaceError> {
    let d = space.dim();
    let w = space.pairings(weight)?;
    if w.iter().all(|x| x.is_zero()) {
        return Ok(FunctionalNorm {
            value: zero(),
            argmax: vec![zero(); d],
        });
    }
    let mut objective = w.clone();
    let mut bounds = vec![Bound::Free; d];
    let mut budget = Vec::new();
    for (c, (_, m)) in space.classes().enumerate() {
        objective.push(zero());
        bounds.push(Bound::NonNegative);
        budget.push((d + c, m.clone()));
    }
    let mut lp = LinearProgram::new(Sense::Maximize, objective, bounds);
    for (c, (pattern, _)) in space.classes().enumerate() {
        let t = d + c;
        let mut up = vec![(t, one())];
        let mut down = vec![(t, one())];
        for (j, v) in pattern.iter().enumerate() {
            if !v.is_zero() {
                up.push((j, -v.clone()));
                down.push((j, v.clone()));
            }
        }
        lp.constrain(up, Relation::Ge, zero());
        lp.constrain(down, Relation::Ge, zero());
    }
    lp.constrain(budget, Relation::Le, one());
    let sol = lp.solve()?;
    let argmax = sol.x[..d].to_vec();
    let check: Rational = w.iter().zip(&argmax).map(|(x, y)| x * y).sum();
    if check != sol.objective || space.coeff_norm_unchecked(&argmax) > one() {
        return Err(SubspaceError::Lp(crate::lp::LpError::Certificate(
            "functional optimum does not re-evaluate".into(),
        )));
    }
    Ok(FunctionalNorm {
        value: sol.objective,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::subspace::{build_net, DEFAULT_LATTICE_CAP};

    #[test]
    fn constants_against_one() {
        let s = Subspace::new(vec![StepFunction::one()]).unwrap();
        assert_eq!(functional_norm(&s, &StepFunction::one()).unwrap().value, one());
    }

    #[test]
    fn balanced_sign_pattern_kills_constants() {
        let s = Subspace::new(vec![StepFunction::one()]).unwrap();
        let w = StepFunction::on_coordinate(1, vec![zero(), q(1, 2), one()], vec![one(), -one()]).unwrap();
        assert_eq!(functional_norm(&s, &w).unwrap().value, zero());
    }

    #[test]
    fn plane_value_dominates_net_and_is_bounded() {
        let spike = StepFunction::interval(1, zero(), q(1, 4), int(4)).unwrap();
        let s = Subspace::new(vec![StepFunction::one(), spike]).unwrap();
        let w = StepFunction::on_coordinate(
            1,
            vec![zero(), q(1, 8), q(1, 2), one()],
            vec![int(3), q(-1, 2), one()],
        )
        .unwrap();
        let fnorm = functional_norm(&s, &w).unwrap();
        let net = build_net(&s, &q(1, 20), DEFAULT_LATTICE_CAP).unwrap();
        let pair = s.pairings(&w).unwrap();
        let mut best = zero();
        for p in &net.points {
            let v: Rational = pair.iter().zip(p).map(|(x, y)| x * y).sum();
            assert!(v <= fnorm.value);
            if v > best {
                best = v;
            }
        }
        // a 1/20-net sees the supremum up to 1/20·‖w‖_∞
        assert!(&fnorm.value - &best <= q(1, 20) * w.sup_abs());
        assert!(fnorm.value <= int(2) * w.sup_abs());
    }
}
