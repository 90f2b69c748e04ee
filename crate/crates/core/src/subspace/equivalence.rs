use super::{Subspace, SubspaceError};
use crate::lp::{Bound, LinearProgram, Relation, Sense};
use crate::rational::{int, one, zero, Rational};
use num_traits::Zero;
use rayon::prelude::*;

/// Constants with `c_min·‖a‖_∞ ≤ ‖Σ aᵢbᵢ‖ ≤ c_max·‖a‖_∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormEquivalence {
    pub c_min: Rational,
    pub c_max: Rational,
}

/// `c_max = Σ‖bᵢ‖`; `c_min` is the exact minimum of the coefficient norm over
/// the boundary of the unit cube, one linear program per face `aᵢ = 1` (the
/// faces `aᵢ = −1` give the same values by symmetry).
pub fn norm_equivalence(space: &Subspace) -> Result<NormEquivalence, SubspaceError> {
    let c_max: Rational = space.basis().iter().map(|b| b.norm_l1()).sum();
    let faces: Vec<Result<Rational, SubspaceError>> = (0..space.dim())
        .into_par_iter()
        .map(|i| face_minimum(space, i))
        .collect();
    let mut c_min: Option<Rational> = None;
    for f in faces {
        let f = f?;
        if c_min.as_ref().is_none_or(|m| f < *m) {
            c_min = Some(f);
        }
    }
    let c_min = c_min.ok_or(SubspaceError::Empty)?;
    if c_min.is_zero() {
        return Err(SubspaceError::RankDeficient {
            rank: space.dim() - 1,
            dim: space.dim(),
        });
    }
    Ok(NormEquivalence { c_min, c_max })
}

/// `min ‖Σ aⱼbⱼ‖` over `a ∈ [−1,1]^d` with `a_face = 1`.
///
/// Variables: `a` (free) then one `t ≥ |Σ aⱼ pⱼ|` per value class.
fn face_minimum(space: &Subspace, face: usize) -> Result<Rational, SubspaceError> {
    let d = space.dim();
    let k = space.class_count();
    let mut objective = vec![zero(); d];
    let mut bounds = vec![Bound::Free; d];
    for (_, m) in space.classes() {
        objective.push(m.clone());
        bounds.push(Bound::NonNegative);
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective, bounds);
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
    for j in 0..d {
        if j == face {
            lp.constrain(vec![(j, one())], Relation::Eq, one());
        } else {
            lp.constrain(vec![(j, one())], Relation::Le, one());
            lp.constrain(vec![(j, one())], Relation::Ge, int(-1));
        }
    }
    debug_assert_eq!(lp.num_vars(), d + k);
    let sol = lp.solve()?;
    // the LP value must be the norm at the returned coefficients
    let a = &sol.x[..d];
    let direct = space.coeff_norm_unchecked(a);
    if direct != sol.objective {
        return Err(SubspaceError::Lp(crate::lp::LpError::Certificate(
            "face optimum does not re-evaluate".into(),
        )));
    }
    Ok(sol.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::StepFunction;
    use crate::rational::q;

    #[test]
    fn line_of_constants() {
        let s = Subspace::new(vec![StepFunction::one()]).unwrap();
        let e = norm_equivalence(&s).unwrap();
        assert_eq!((e.c_min, e.c_max), (one(), one()));
    }

    #[test]
    fn constants_and_half_spike() {
        let spike = StepFunction::interval(1, zero(), q(1, 2), int(2)).unwrap();
        let s = Subspace::new(vec![StepFunction::one(), spike]).unwrap();
        let e = norm_equivalence(&s).unwrap();
        assert_eq!(e.c_max, int(2));
        // ‖a₁ + a₂ f‖ = ½|a₁ + 2a₂| + ½|a₁|; on a₁ = 1 the minimum ½ is at a₂ = −½
        assert_eq!(e.c_min, q(1, 2));
        // dense boundary sample never goes below the LP value
        let steps = 200;
        for k in -steps..=steps {
            let t = q(k, steps);
            for a in [[one(), t.clone()], [t.clone(), one()]] {
                assert!(s.coeff_norm(&a).unwrap() >= e.c_min);
            }
        }
    }

    #[test]
    fn disjoint_supports() {
        // unit-norm indicators of [0,½) and [½,1)
        let b1 = StepFunction::interval(1, zero(), q(1, 2), int(2)).unwrap();
        let b2 = StepFunction::interval(1, q(1, 2), one(), int(2)).unwrap();
        let s = Subspace::new(vec![b1, b2]).unwrap();
        let e = norm_equivalence(&s).unwrap();
        // coefficient norm is |a₁| + |a₂|, so the face minimum is 1 and c_max = 2
        assert_eq!((e.c_min, e.c_max), (one(), int(2)));
    }
}
