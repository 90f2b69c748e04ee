use super::AnalysisError;
use crate::measure::StepFunction;
use crate::rational::{int, one, Rational};
use crate::subspace::{build_net, SphereNet, Subspace, SubspaceError};
use rayon::prelude::*;

/// Membership query for `l⁺(x, ε) = {y ∈ S : ‖x + y‖ ≥ 2 − ε}`.
#[derive(Debug, Clone)]
pub struct LPlusQuery {
    x: StepFunction,
    eps: Rational,
}

impl LPlusQuery {
    pub fn new(x: StepFunction, eps: Rational) -> Result<Self, AnalysisError> {
        let norm = x.norm_l1();
        if norm != one() {
            return Err(AnalysisError::NotUnit { norm });
        }
        Ok(LPlusQuery { x, eps })
    }

    pub fn x(&self) -> &StepFunction {
        &self.x
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    /// `‖x + y‖ − (2 − ε)`; nonnegative exactly for members.
    pub fn margin(&self, y: &StepFunction) -> Result<Rational, AnalysisError> {
        let norm = y.norm_l1();
        if norm != one() {
            return Err(AnalysisError::NotUnit { norm });
        }
        Ok(self.x.add(y)?.norm_l1() - (int(2) - &self.eps))
    }
}

pub fn lplus_test(query: &LPlusQuery, y: &StepFunction) -> Result<bool, AnalysisError> {
    Ok(query.margin(y)? >= Rational::from_integer(0.into()))
}

/// A lower bound for `min{‖u + v‖ : u ∈ S(space)}` from a certified net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereBound {
    /// Smallest `‖u + v‖` over the net points.
    pub net_min: Rational,
    /// Index of the net point attaining it.
    pub witness: usize,
    pub mesh: Rational,
    /// `net_min − mesh`; valid because `u ↦ ‖u + v‖` is 1-Lipschitz.
    pub bound: Rational,
}

pub fn sphere_bound(space: &Subspace, net: &SphereNet, v: &StepFunction) -> Result<SphereBound, AnalysisError> {
    if !net.certified {
        return Err(AnalysisError::Precondition("sphere net is not certified".into()));
    }
    if net.is_empty() {
        return Err(SubspaceError::Empty.into());
    }
    let norms: Vec<Rational> = net
        .points
        .par_iter()
        .map(|p| -> Result<Rational, AnalysisError> { Ok(space.combine(p)?.add(v)?.norm_l1()) })
        .collect::<Result<_, _>>()?;
    let (witness, net_min) = norms
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("net is nonempty");
    let bound = &net_min - &net.mesh;
    Ok(SphereBound {
        net_min,
        witness,
        mesh: net.mesh.clone(),
        bound,
    })
}

/// Builds a certified `theta`-net of `S(space)` (the exact two-point sphere
/// for lines) and bounds `min ‖u + v‖` over the sphere from below.
pub fn certified_min_over_sphere(
    space: &Subspace,
    v: &StepFunction,
    theta: &Rational,
    lattice_cap: usize,
) -> Result<SphereBound, AnalysisError> {
    let net = if space.dim() == 1 {
        SphereNet::line(space)
    } else {
        build_net(space, theta, lattice_cap)?
    };
    sphere_bound(space, &net, v)
}
