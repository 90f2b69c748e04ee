use super::ConstructionError;
use crate::measure::StepFunction;
use crate::rational::{int, one, q, zero, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// The two-valued spike `(1/δ)·χ_{[0,δ)}` on one coordinate, `δ = eps/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeParams {
    pub eps: Rational,
    pub delta: Rational,
    pub coordinate: u32,
}

impl SpikeParams {
    pub fn new(eps: Rational, coordinate: u32) -> Result<Self, ConstructionError> {
        if !eps.is_positive() || eps >= one() {
            return Err(ConstructionError::InvalidParams(format!(
                "spike eps must lie in (0, 1), got {eps}"
            )));
        }
        let delta = &eps * q(1, 2);
        Ok(SpikeParams {
            eps,
            delta,
            coordinate,
        })
    }

    /// Height of the spike, `1/δ`.
    pub fn height(&self) -> Rational {
        one() / &self.delta
    }
}

/// `f ≥ 0` with `‖f‖ = 1` and `‖f − 1‖ = 2 − 2δ = 2 − eps`.
pub fn make_spike(params: &SpikeParams) -> StepFunction {
    StepFunction::interval(params.coordinate, zero(), params.delta.clone(), params.height())
        .expect("0 < δ < 1/2 gives a valid interval")
}

/// `‖n⁻¹ Σ_{j≤n} f_j − 1‖` for independent spikes of mass `delta`.
///
/// With `K` the number of spikes that fire, `K ~ Bin(n, δ)` and the average
/// equals `K/(nδ)`, so the norm is `Σ_k C(n,k) δ^k (1−δ)^{n−k} |k/(nδ) − 1|`.
pub fn law_of_large_numbers_norm(delta: &Rational, n: usize) -> Rational {
    assert!(n >= 1, "need at least one spike");
    let rest = one() - delta;
    let nd = int(n as i64) * delta;
    let mut binom = BigInt::from(1u32);
    let mut total = zero();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
        }
        let gap = (int(k as i64) / &nd - one()).abs();
        if gap.is_zero() {
            continue;
        }
        let p = Rational::from_integer(binom.clone()) * pow(delta, k) * pow(&rest, n - k);
        total += p * gap;
    }
    total
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// Smallest `n ≤ n_cap` with `law_of_large_numbers_norm(delta, n) ≤ eps`.
pub fn minimal_n(delta: &Rational, eps: &Rational, n_cap: usize) -> Result<usize, ConstructionError> {
    if !eps.is_positive() {
        return Err(ConstructionError::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    (1..=n_cap)
        .find(|&n| law_of_large_numbers_norm(delta, n) <= *eps)
        .ok_or_else(|| ConstructionError::FamilyTooLarge {
            delta: delta.clone(),
            eps: eps.clone(),
            n_cap,
        })
}
