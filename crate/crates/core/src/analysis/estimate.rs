use super::{conv_distance, lplus_test, AnalysisError, ConvDistance, ConvOrder, LPlusQuery};
use crate::measure::StepFunction;
use crate::rational::{min_q, one, zero, Rational};
use crate::subspace::{build_net, functional_norm, SphereNet, Subspace};
use num_traits::Signed;
use rayon::prelude::*;

/// `dist(conv_n(pool), y)` for a pool of verified `l⁺(x, ε)` members: an
/// upper estimate of the inner distance in `Daug_n` for this `(x, y)`.
pub fn daug_upper_estimate(
    query: &LPlusQuery,
    y: &StepFunction,
    pool: &[StepFunction],
    order: ConvOrder,
) -> Result<ConvDistance, AnalysisError> {
    if pool.is_empty() {
        return Err(AnalysisError::EmptyPool);
    }
    for (i, z) in pool.iter().enumerate() {
        if !lplus_test(query, z)? {
            return Err(AnalysisError::Precondition(format!("pool member {i} is not in l⁺(x, ε)")));
        }
    }
    conv_distance(y, pool, order)
}

/// Estimates along increasing `n`, each over a pool that extends the
/// previous one. Returns `(n, estimate)` pairs.
pub fn daug_profile(
    query: &LPlusQuery,
    y: &StepFunction,
    pools: &[(usize, Vec<StepFunction>)],
) -> Result<Vec<(usize, ConvDistance)>, AnalysisError> {
    for w in pools.windows(2) {
        let (a, b) = (&w[0].1, &w[1].1);
        if w[1].0 < w[0].0 || b.len() < a.len() || b[..a.len()] != a[..] {
            return Err(AnalysisError::Precondition("pools must be nested along increasing n".into()));
        }
    }
    pools
        .iter()
        .map(|(n, pool)| Ok((*n, daug_upper_estimate(query, y, pool, ConvOrder::AtMost(*n))?)))
        .collect()
}

/// The slice `{u ∈ B : ∫ u·weight > alpha}`.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub weight: StepFunction,
    pub alpha: Rational,
}

#[derive(Debug, Clone)]
pub struct SliceHit {
    pub y: StepFunction,
    /// `∫ y·weight`.
    pub functional: Rational,
    /// `‖x + y‖ − (2 − ε)`.
    pub margin: Rational,
}

#[derive(Debug, Clone)]
pub struct SliceSearch {
    /// `sup_{B(space)} ∫ u·weight`.
    pub functional_norm: Rational,
    pub searched: usize,
    pub in_slice: usize,
    /// Best `l⁺` member found in the slice, by margin.
    pub found: Option<SliceHit>,
}

/// Looks for `y` in the slice with `‖x + y‖ ≥ 2 − ε` among the unit vectors
/// of `net` and the `extra` candidates (e.g. later-stage bush vectors).
/// Not finding one is a result, not an error.
pub fn slice_search(
    space: &Subspace,
    slice: &SliceSpec,
    query: &LPlusQuery,
    net: &SphereNet,
    extra: &[StepFunction],
) -> Result<SliceSearch, AnalysisError> {
    let fnorm = functional_norm(space, &slice.weight)?.value;
    if fnorm <= slice.alpha {
        return Err(AnalysisError::EmptySlice {
            norm: fnorm,
            alpha: slice.alpha.clone(),
        });
    }
    let mut candidates: Vec<StepFunction> = net.points.iter().map(|p| space.combine(p)).collect::<Result<_, _>>()?;
    candidates.extend(extra.iter().cloned());
    let scored: Vec<Option<SliceHit>> = candidates
        .par_iter()
        .map(|y| -> Result<Option<SliceHit>, AnalysisError> {
            if y.norm_l1() != one() {
                return Ok(None);
            }
            let functional = y.pairing(&slice.weight)?;
            if functional <= slice.alpha {
                return Ok(None);
            }
            let margin = query.margin(y)?;
            Ok(Some(SliceHit {
                y: y.clone(),
                functional,
                margin,
            }))
        })
        .collect::<Result<_, _>>()?;
    let in_slice = scored.iter().flatten().count();
    let found = scored
        .into_iter()
        .flatten()
        .filter(|h| !h.margin.is_negative())
        .max_by(|a, b| a.margin.cmp(&b.margin));
    Ok(SliceSearch {
        functional_norm: fnorm,
        searched: candidates.len(),
        in_slice,
        found,
    })
}

/// Bounds on `‖Id + T‖` for `T(u) = (∫ u·weight)·y` on a subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneDefect {
    /// `‖T‖ = ‖weight‖_{space*}·‖y‖`, exact.
    pub t_norm: Rational,
    /// Largest `‖u + T(u)‖` over the evaluated unit vectors.
    pub lower: Rational,
    /// `min(lower + (1 + ‖T‖)·mesh, 1 + ‖T‖)`, or `1 + ‖T‖` without a
    /// certified mesh.
    pub upper: Rational,
    /// `1 + ‖T‖ − lower`, the largest possible gap to the identity.
    pub defect: Rational,
    /// Covering radius of the evaluated points, when certified.
    pub mesh: Option<Rational>,
    pub points: usize,
}

/// Evaluates on a certified `theta`-net of the sphere.
pub fn rank_one_defect(
    space: &Subspace,
    weight: &StepFunction,
    y: &StepFunction,
    theta: &Rational,
    lattice_cap: usize,
) -> Result<RankOneDefect, AnalysisError> {
    let net = if space.dim() == 1 {
        SphereNet::line(space)
    } else {
        build_net(space, theta, lattice_cap)?
    };
    let mesh = net.certified.then_some(&net.mesh);
    rank_one_defect_at(space, weight, y, &net.points, mesh)
}

/// Evaluates on the given unit coefficient vectors; `mesh` is their
/// certified covering radius of the sphere, if any.
pub fn rank_one_defect_at(
    space: &Subspace,
    weight: &StepFunction,
    y: &StepFunction,
    points: &[Vec<Rational>],
    mesh: Option<&Rational>,
) -> Result<RankOneDefect, AnalysisError> {
    let y_coeffs = space.coefficients_of(y)?;
    let t_norm = functional_norm(space, weight)?.value * y.norm_l1();
    let pair = space.pairings(weight)?;
    let lower = points
        .par_iter()
        .map(|p| {
            let t: Rational = pair.iter().zip(p).map(|(w, a)| w * a).sum();
            let image: Vec<Rational> = p.iter().zip(&y_coeffs).map(|(a, b)| a + &t * b).collect();
            space.coeff_norm(&image)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or_else(zero);
    let ceiling = one() + &t_norm;
    let upper = match mesh {
        Some(m) => min_q(&(&lower + &ceiling * m), &ceiling).clone(),
        None => ceiling.clone(),
    };
    Ok(RankOneDefect {
        defect: &ceiling - &lower,
        t_norm,
        lower,
        upper,
        mesh: mesh.cloned(),
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::subspace::DEFAULT_LATTICE_CAP;

    fn spikes() -> Vec<StepFunction> {
        (1..=4)
            .map(|c| StepFunction::interval(c, zero(), q(1, 8), int(8)).unwrap())
            .collect()
    }

    #[test]
    fn estimate_is_monotone_on_nested_pools() {
        let query = LPlusQuery::new(StepFunction::one().neg(), q(1, 4)).unwrap();
        let pool = spikes();
        let pools: Vec<(usize, Vec<StepFunction>)> =
            [1, 2, 4].iter().map(|&n| (n, pool.clone())).collect();
        let profile = daug_profile(&query, &StepFunction::one(), &pools).unwrap();
        for w in profile.windows(2) {
            assert!(w[1].1.upper <= w[0].1.upper);
        }
        let member = daug_upper_estimate(&query, &pool[0], &pool, ConvOrder::All).unwrap();
        assert_eq!(member.upper, zero());
    }

    #[test]
    fn non_members_are_rejected() {
        let query = LPlusQuery::new(StepFunction::one(), q(1, 4)).unwrap();
        let mut pool = spikes();
        pool.push(StepFunction::one().neg());
        let err = daug_upper_estimate(&query, &StepFunction::one(), &pool, ConvOrder::All).unwrap_err();
        assert!(matches!(err, AnalysisError::Precondition(_)));
    }

    #[test]
    fn slice_through_x_contains_x() {
        let line = Subspace::new(vec![StepFunction::one()]).unwrap();
        let query = LPlusQuery::new(StepFunction::one(), q(1, 4)).unwrap();
        let slice = SliceSpec {
            weight: StepFunction::one(),
            alpha: zero(),
        };
        let s = slice_search(&line, &slice, &query, &SphereNet::line(&line), &[]).unwrap();
        let hit = s.found.unwrap();
        assert_eq!(hit.y, StepFunction::one());
        assert_eq!(hit.margin, q(1, 4));
        let empty = SliceSpec {
            weight: StepFunction::one(),
            alpha: one(),
        };
        assert!(slice_search(&line, &empty, &query, &SphereNet::line(&line), &[]).is_err());
    }

    #[test]
    fn rank_one_examples() {
        let line = Subspace::new(vec![StepFunction::one()]).unwrap();
        let d = rank_one_defect(&line, &StepFunction::one(), &StepFunction::one(), &q(1, 4), DEFAULT_LATTICE_CAP).unwrap();
        assert_eq!((d.t_norm, d.lower.clone(), d.defect), (one(), int(2), zero()));
        let z = rank_one_defect(&line, &StepFunction::zero(), &StepFunction::one(), &q(1, 4), DEFAULT_LATTICE_CAP).unwrap();
        assert_eq!((z.t_norm, z.lower, z.defect), (zero(), one(), zero()));
        let plane = Subspace::new(vec![StepFunction::one(), spikes()[0].clone()]).unwrap();
        let p = rank_one_defect(&plane, &StepFunction::one(), &spikes()[0], &q(1, 4), DEFAULT_LATTICE_CAP).unwrap();
        assert!(p.lower <= p.upper);
        assert!(p.lower <= one() + &p.t_norm);
        let basis: Vec<Vec<Rational>> = vec![vec![one(), zero()], vec![zero(), one()]];
        let at = rank_one_defect_at(&plane, &StepFunction::one(), &spikes()[0], &basis, None).unwrap();
        assert_eq!((at.upper, at.mesh, at.points), (one() + &at.t_norm, None, 2));
        assert!(at.lower <= p.upper);
    }
}
