use super::{ky_fan_to_zero, MeasureError, StepFunction};
use crate::rational::{int, one, q, zero, Rational};
use crate::report::{Status, VerificationReport};
use num_traits::{Signed, Zero};

/// `sup{∫_A |f| dμ : μ(A) ≤ budget}`, by filling the budget with the cells
/// of largest `|f|` first (the last one fractionally).
pub fn worst_set_integral(f: &StepFunction, budget: &Rational) -> Result<Rational, MeasureError> {
    if budget.is_negative() || *budget > one() {
        return Err(MeasureError::BudgetOutOfRange(budget.to_string()));
    }
    let mut levels: Vec<(Rational, Rational)> =
        f.distribution().into_iter().map(|(v, m)| (v.abs(), m)).collect();
    levels.sort_by(|a, b| b.0.cmp(&a.0));
    let mut left = budget.clone();
    let mut total = zero();
    for (v, m) in levels {
        if left.is_zero() || v.is_zero() {
            break;
        }
        let take = if m < left { m } else { left.clone() };
        total += &v * &take;
        left -= take;
    }
    Ok(total)
}

/// Whether `2·worst_set_integral(g, δ) + 2δ < eps` for every `g` in `family`.
/// Worst-set integrals are nondecreasing in the budget, so this also covers
/// every smaller `δ'`.
pub fn delta_is_valid(family: &[StepFunction], eps: &Rational, delta: &Rational) -> bool {
    if !delta.is_positive() || *delta > one() {
        return false;
    }
    let two = int(2);
    family.iter().all(|g| {
        let w = worst_set_integral(g, delta).expect("delta in range");
        &two * w + &two * delta < *eps
    })
}

/// A certified uniform-integrability radius for a finite family: halves
/// `eps/4` until [`delta_is_valid`] holds.
///
/// Terminates because worst-set integrals of step functions are bounded by
/// `sup|g|·δ`, so every `δ < eps / (2 + 2·max sup|g|)` is valid.
pub fn ui_delta(family: &[StepFunction], eps: &Rational) -> Result<Rational, MeasureError> {
    if family.is_empty() {
        return Err(MeasureError::Empty);
    }
    if !eps.is_positive() {
        return Err(MeasureError::BudgetOutOfRange(format!("eps = {eps}")));
    }
    let mut delta = eps * q(1, 4);
    if delta > one() {
        delta = one();
    }
    while !delta_is_valid(family, eps, &delta) {
        delta *= q(1, 2);
    }
    Ok(delta)
}

/// Exact record of one instance of `‖f + g‖ ≥ ‖f‖ + ‖g‖ − ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityCheck {
    pub status: Status,
    pub norm_f: Rational,
    pub norm_g: Rational,
    pub norm_sum: Rational,
    pub eps: Rational,
    pub delta: Rational,
    pub ky_fan_f: Rational,
    /// `‖f + g‖ − (‖f‖ + ‖g‖ − ε)`; nonnegative on a pass.
    pub slack: Rational,
}

impl OrthogonalityCheck {
    pub fn to_report(&self, suite: &str, case: impl Into<String>) -> VerificationReport {
        VerificationReport::new(suite, "l1-orthogonality", case, self.status)
            .q("norm_f", &self.norm_f)
            .q("norm_g", &self.norm_g)
            .q("norm_f_plus_g", &self.norm_sum)
            .q("eps", &self.eps)
            .q("delta", &self.delta)
            .q("ky_fan_f_0", &self.ky_fan_f)
            .q("slack", &self.slack)
    }
}

/// Checks the small-in-measure orthogonality inequality for `f` against `g`.
///
/// Hypotheses: `d(f, 0) < delta` and `delta` valid for `{g}` at `eps`. When
/// either fails the status is [`Status::PreconditionUnmet`].
pub fn check_orthogonality(
    f: &StepFunction,
    g: &StepFunction,
    eps: &Rational,
    delta: &Rational,
) -> Result<OrthogonalityCheck, MeasureError> {
    let norm_f = f.norm_l1();
    let norm_g = g.norm_l1();
    let norm_sum = f.add(g)?.norm_l1();
    let ky_fan_f = ky_fan_to_zero(f);
    let slack = &norm_sum - (&norm_f + &norm_g - eps);
    let hypotheses = ky_fan_f < *delta && delta_is_valid(std::slice::from_ref(g), eps, delta);
    let status = if !hypotheses {
        Status::PreconditionUnmet
    } else {
        Status::from_bool(!slack.is_negative())
    };
    Ok(OrthogonalityCheck {
        status,
        norm_f,
        norm_g,
        norm_sum,
        eps: eps.clone(),
        delta: delta.clone(),
        ky_fan_f,
        slack,
    })
}
