use super::{ConstructionError, Tower};
use crate::measure::{best_constant, ky_fan, StepFunction};
use crate::rational::{one, q, Rational};
use crate::subspace::{build_net, radial_steps, SphereNet, Subspace};
use num_traits::Zero;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMethod {
    /// The coarse-basis part of the coefficients, rescaled into the ball.
    Component,
    /// Exact best constant in `[−1, 1]` (the coarse space is the constants).
    BestConstant,
    /// Best point of a certified net of the coarse ball.
    BallNet,
}

/// A point `ψ ∈ B(coarse)` approximating `φ` in the Ky Fan metric.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Coefficients of `ψ` in the coarse basis.
    pub coefficients: Vec<Rational>,
    pub psi: StepFunction,
    /// `d(φ, ψ)`, exact.
    pub distance: Rational,
    pub bound: Rational,
    pub method: ReductionMethod,
}

impl Reduction {
    pub fn meets_bound(&self) -> bool {
        self.distance <= self.bound
    }
}

/// Finds `ψ ∈ B(coarse)` with `d(φ, ψ) ≤ bound` for `φ = Σ aᵢ bᵢ ∈ B(fine)`.
///
/// `coarse` must be spanned by a prefix of the fine basis. Tries the coarse
/// component of `φ` first; when that misses the bound, searches the coarse
/// ball (exactly for the constants, else over a certified ball net of mesh
/// `bound/2`). When nothing meets the bound, the error carries the best
/// candidate found.
pub fn reduce_to_substage(
    phi_coeffs: &[Rational],
    fine: &Subspace,
    coarse: &Subspace,
    bound: &Rational,
    lattice_cap: usize,
) -> Result<Reduction, ConstructionError> {
    let d = coarse.dim();
    if fine.basis().get(..d) != Some(coarse.basis()) {
        return Err(ConstructionError::InvalidParams("coarse basis is not a prefix of the fine basis".into()));
    }
    let norm = fine.coeff_norm(phi_coeffs)?;
    if norm > one() {
        return Err(ConstructionError::InvalidParams(format!("phi has norm {norm} > 1")));
    }
    let phi = fine.combine(phi_coeffs)?;
    let mut coeffs = phi_coeffs[..d].to_vec();
    let comp_norm = coarse.coeff_norm(&coeffs)?;
    if comp_norm > one() {
        coeffs.iter_mut().for_each(|c| *c /= &comp_norm);
    }
    let psi = coarse.combine(&coeffs)?;
    let component = Reduction {
        distance: ky_fan(&phi, &psi)?,
        coefficients: coeffs,
        psi,
        bound: bound.clone(),
        method: ReductionMethod::Component,
    };
    if component.meets_bound() {
        return Ok(component);
    }
    let searched = search_ball(&phi, coarse, bound, lattice_cap)?;
    let best = if searched.distance < component.distance {
        searched
    } else {
        component
    };
    if best.meets_bound() {
        Ok(best)
    } else {
        Err(ConstructionError::ReductionShortfall(Box::new(best)))
    }
}

fn constant_value(b: &StepFunction) -> Option<Rational> {
    let first = b.values().first()?;
    b.values().iter().all(|v| v == first).then(|| first.clone())
}

fn search_ball(
    phi: &StepFunction,
    coarse: &Subspace,
    bound: &Rational,
    lattice_cap: usize,
) -> Result<Reduction, ConstructionError> {
    if coarse.dim() == 1 {
        if let Some(beta) = constant_value(&coarse.basis()[0]).filter(|b| !b.is_zero()) {
            // B(coarse) = {c·1 : |c| ≤ 1}
            let best = best_constant(phi, Some((&-one(), &one())));
            let psi = StepFunction::constant(best.constant.clone());
            return Ok(Reduction {
                coefficients: vec![&best.constant / beta],
                psi,
                distance: best.distance,
                bound: bound.clone(),
                method: ReductionMethod::BestConstant,
            });
        }
    }
    // any b = ρs in the ball is within 1/(2r) + θ of a grid radius times a
    // net point; θ = 1/(2r) = bound/4 gives mesh bound/2
    let theta = bound * q(1, 4);
    let net = if coarse.dim() == 1 {
        SphereNet::line(coarse)
    } else {
        build_net(coarse, &theta, lattice_cap)?
    };
    let r = radial_steps(&theta);
    let mut candidates = vec![vec![Rational::zero(); coarse.dim()]];
    for i in 1..=r {
        let rho = Rational::new((i as i64).into(), (r as i64).into());
        for p in &net.points {
            candidates.push(p.iter().map(|x| x * &rho).collect());
        }
    }
    let scored: Vec<(Rational, usize)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, a)| -> Result<(Rational, usize), ConstructionError> {
            Ok((ky_fan(phi, &coarse.combine(a)?)?, i))
        })
        .collect::<Result<_, _>>()?;
    let (distance, i) = scored.into_iter().min().expect("origin is a candidate");
    let coefficients = candidates.swap_remove(i);
    Ok(Reduction {
        psi: coarse.combine(&coefficients)?,
        coefficients,
        distance,
        bound: bound.clone(),
        method: ReductionMethod::BallNet,
    })
}

/// A chain of reductions from a high stage down to a lower one.
#[derive(Debug, Clone)]
pub struct Compression {
    pub from: usize,
    pub to: usize,
    /// One reduction per step, highest stage first.
    pub steps: Vec<Reduction>,
    /// `g ∈ B(E_to)`.
    pub result: StepFunction,
    pub result_norm: Rational,
    /// `d(φ, g)`, computed directly.
    pub distance: Rational,
    /// `ε_{from} + … + ε_{to+1}`.
    pub chain_bound: Rational,
    /// `ε_to`.
    pub target: Rational,
}

impl Compression {
    /// Steps whose distance exceeded their per-step bound.
    pub fn shortfalls(&self) -> usize {
        self.steps.iter().filter(|s| !s.meets_bound()).count()
    }

    /// `d(φ, g) < ε_to` and `g ∈ B(E_to)`, both exact.
    pub fn holds(&self) -> bool {
        self.distance < self.target && self.result_norm <= one()
    }
}

/// Compresses `φ ∈ B(E_from)` (coefficients in the stage basis) to
/// `g ∈ B(E_to)` by repeated reduction, the step out of `E_{M+1}` using the
/// bound `ε_{M+1}`. A step that misses its bound still passes its best
/// candidate on; the final distance is what the result is judged by.
pub fn compress(tower: &Tower, phi_coeffs: &[Rational], from: usize, to: usize) -> Result<Compression, ConstructionError> {
    if to == 0 || to > from || from > tower.stages.len() {
        return Err(ConstructionError::InvalidParams(format!("cannot compress stage {from} to {to}")));
    }
    let phi = tower.stage(from).space.combine(phi_coeffs)?;
    let mut coeffs = phi_coeffs.to_vec();
    let mut steps = Vec::new();
    for m in (to..from).rev() {
        let fine = &tower.stage(m + 1).space;
        let coarse = &tower.stage(m).space;
        let bound = tower.params.eps(m + 1);
        let red = match reduce_to_substage(&coeffs, fine, coarse, &bound, tower.params.lattice_cap) {
            Ok(r) => r,
            Err(ConstructionError::ReductionShortfall(best)) => *best,
            Err(e) => return Err(e),
        };
        coeffs = red.coefficients.clone();
        steps.push(red);
    }
    let space = &tower.stage(to).space;
    let result = space.combine(&coeffs)?;
    Ok(Compression {
        from,
        to,
        distance: ky_fan(&phi, &result)?,
        result_norm: space.coeff_norm(&coeffs)?,
        result,
        steps,
        chain_bound: tower.params.chain_bound(from, to),
        target: tower.params.eps(to),
    })
}

/// A random point of `B(space)`: a random unit vector scaled by a random
/// radius in `(0, 1]` with denominator `den`.
pub fn sample_ball<R: rand::Rng>(space: &Subspace, rng: &mut R, den: i64) -> Vec<Rational> {
    let unit = space.sample_unit(rng, den);
    let rho = Rational::new(rng.gen_range(1..=den).into(), den.into());
    unit.into_iter().map(|x| x * &rho).collect()
}
