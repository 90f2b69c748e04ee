use super::{MeasureError, StepFunction};
use crate::rational::{clamp_q, one, q, zero, Rational};
use num_traits::Signed;

/// Tail function of `|h|`: for each distinct positive value `v` of `|h|`,
/// in decreasing order, the measure `μ{|h| ≥ v}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    entries: Vec<(Rational, Rational)>,
}

impl LevelProfile {
    pub fn of(h: &StepFunction) -> Self {
        Self::from_distribution(h.distribution().into_iter().map(|(v, m)| (v.abs(), m)))
    }

    fn from_distribution(pairs: impl Iterator<Item = (Rational, Rational)>) -> Self {
        let mut pos: Vec<(Rational, Rational)> = pairs.filter(|(v, _)| v.is_positive()).collect();
        pos.sort_by(|a, b| b.0.cmp(&a.0));
        let mut entries: Vec<(Rational, Rational)> = Vec::with_capacity(pos.len());
        let mut acc = zero();
        for (v, m) in pos {
            acc += m;
            match entries.last_mut() {
                Some(last) if last.0 == v => last.1 = acc.clone(),
                _ => entries.push((v, acc.clone())),
            }
        }
        LevelProfile { entries }
    }

    /// `(threshold, tail measure)` pairs, thresholds strictly decreasing.
    pub fn entries(&self) -> &[(Rational, Rational)] {
        &self.entries
    }

    /// `μ{|h| ≥ t}` for `t > 0`.
    pub fn tail(&self, t: &Rational) -> Rational {
        self.entries
            .iter()
            .take_while(|(v, _)| v >= t)
            .last()
            .map(|(_, m)| m.clone())
            .unwrap_or_else(zero)
    }

    /// `inf{t > 0 : μ{|h| ≥ t} ≤ t}`.
    ///
    /// The tail is constant on each `(v_{i+1}, v_i]`, so on that interval the
    /// feasible set is `[M_i, ∞) ∩ (v_{i+1}, v_i]` and its infimum is
    /// `max(v_{i+1}, M_i)` whenever `M_i ≤ v_i`. Above the largest value the
    /// tail vanishes.
    pub fn ky_fan(&self) -> Rational {
        let Some((top, _)) = self.entries.first() else {
            return zero();
        };
        let mut best = top.clone();
        for (i, (v, m)) in self.entries.iter().enumerate() {
            let below = self.entries.get(i + 1).map(|e| e.0.clone()).unwrap_or_else(zero);
            if m <= v {
                let cand = if *m > below { m.clone() } else { below };
                if cand < best {
                    best = cand;
                }
            }
        }
        best
    }
}

/// `μ{|h| ≥ t}`.
pub fn tail_measure(h: &StepFunction, t: &Rational) -> Rational {
    if t.is_positive() {
        LevelProfile::of(h).tail(t)
    } else {
        one()
    }
}

/// Ky Fan distance `d(h, 0)`.
pub fn ky_fan_to_zero(h: &StepFunction) -> Rational {
    LevelProfile::of(h).ky_fan()
}

/// Ky Fan distance `d(f, g) = inf{ε > 0 : μ{|f − g| ≥ ε} ≤ ε}`.
pub fn ky_fan(f: &StepFunction, g: &StepFunction) -> Result<Rational, MeasureError> {
    Ok(ky_fan_to_zero(&f.sub(g)?))
}

/// The constant nearest to a step function in the Ky Fan metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestConstant {
    pub constant: Rational,
    pub distance: Rational,
}

/// Minimises `d(f, c)` over constants `c`, optionally restricted to
/// `[lo, hi]`.
///
/// `d(f, c) ≤ t` needs an open window `(c − t, c + t)` holding mass at least
/// `1 − t`. Windows that hold exactly the sorted values `v_i..v_j` exist once
/// `t` exceeds `τ_ij = max((v_j − v_i)/2, v_j − hi, lo − v_i)`, so the
/// minimum over `c` is the least `max(τ_ij, 1 − m_ij)` over value ranges
/// (or `1` for the empty window). It is attained at the clamped midpoint of
/// the optimal range.
pub fn best_constant(f: &StepFunction, bounds: Option<(&Rational, &Rational)>) -> BestConstant {
    let dist = f.distribution();
    let center = |c: Rational| match bounds {
        Some((lo, hi)) => clamp_q(c, lo, hi),
        None => c,
    };
    let mut best_t = one();
    let mut best_c = center(zero());
    let half = q(1, 2);
    for i in 0..dist.len() {
        let mut mass = zero();
        for j in i..dist.len() {
            mass += &dist[j].1;
            let (vi, vj) = (&dist[i].0, &dist[j].0);
            let mut tau = (vj - vi) * &half;
            if let Some((lo, hi)) = bounds {
                let a = vj - hi;
                let b = lo - vi;
                if a > tau {
                    tau = a;
                }
                if b > tau {
                    tau = b;
                }
            }
            let mut t = one() - &mass;
            if tau > t {
                t = tau;
            }
            if t.is_negative() {
                t = zero();
            }
            if t < best_t {
                best_t = t;
                best_c = center((vi + vj) * &half);
            }
        }
    }
    let distance = ky_fan_to_zero(&f.shift(&best_c));
    debug_assert_eq!(distance, best_t);
    BestConstant {
        constant: best_c,
        distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn spike(delta: Rational) -> StepFunction {
        let h = one() / &delta;
        StepFunction::interval(1, zero(), delta, h).unwrap()
    }

    #[test]
    fn identical_functions_are_at_distance_zero() {
        let f = spike(q(1, 3));
        assert_eq!(ky_fan(&f, &f).unwrap(), zero());
    }

    #[test]
    fn profile_of_two_on_a_quarter() {
        let h = StepFunction::interval(1, zero(), q(1, 4), int(2)).unwrap();
        let p = LevelProfile::of(&h);
        assert_eq!(p.entries(), &[(int(2), q(1, 4))]);
        assert_eq!(p.tail(&q(1, 100)), q(1, 4));
        assert_eq!(p.tail(&int(3)), zero());
        assert_eq!(p.ky_fan(), q(1, 4));
    }

    #[test]
    fn spike_distance_to_zero_is_its_support_mass() {
        assert_eq!(ky_fan_to_zero(&spike(q(1, 8))), q(1, 8));
    }

    #[test]
    fn small_values_on_large_sets() {
        // |h| = 1/10 on the whole space: the tail is 1 for t ≤ 1/10, so d = 1/10
        assert_eq!(ky_fan_to_zero(&StepFunction::constant(q(1, 10))), q(1, 10));
        // |h| = 5 everywhere: d = 1
        assert_eq!(ky_fan_to_zero(&StepFunction::constant(int(5))), one());
    }

    #[test]
    fn best_constant_for_a_spike_is_zero() {
        let f = spike(q(1, 8));
        let b = best_constant(&f, Some((&-one(), &one())));
        assert_eq!(b.constant, zero());
        assert_eq!(b.distance, q(1, 8));
    }

    #[test]
    fn best_constant_respects_bounds() {
        let f = StepFunction::constant(int(3));
        let free = best_constant(&f, None);
        assert_eq!((free.constant, free.distance), (int(3), zero()));
        // |3 - c| ≥ 2 everywhere for c in [-1, 1], so every admissible c is at distance 1
        let boxed = best_constant(&f, Some((&-one(), &one())));
        assert_eq!(boxed.distance, one());
        assert!(boxed.constant >= -one() && boxed.constant <= one());
    }

    #[test]
    fn best_constant_beats_every_grid_constant() {
        let f = StepFunction::on_coordinate(
            1,
            vec![zero(), q(1, 5), q(1, 2), q(3, 4), one()],
            vec![q(-3, 2), q(1, 3), q(1, 2), int(4)],
        )
        .unwrap();
        let b = best_constant(&f, Some((&-one(), &one())));
        for k in -40..=40 {
            let c = q(k, 40);
            assert!(ky_fan_to_zero(&f.shift(&c)) >= b.distance);
        }
    }
}
