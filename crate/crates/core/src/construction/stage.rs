use super::{law_of_large_numbers_norm, minimal_n, ConstructionError, IndependentFamily};
use crate::analysis::{sphere_bound, SphereBound};
use crate::measure::{cell_cap, MeasureError, StepFunction};
use crate::rational::{int, one, q, Rational};
use crate::subspace::{build_net, SphereNet, Subspace};
use rayon::prelude::*;

/// How an extension step chooses its spikes and certifies itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOptions {
    /// Fixed family size. When set, the averaging bound is recorded but not
    /// required, since a fixed size generally cannot reach it.
    pub family_size: Option<usize>,
    /// Mesh of the net used to certify the sphere bound, as a fraction of
    /// the step's `eps` (unused for lines, whose sphere is exact).
    pub certificate_mesh_ratio: Rational,
    pub lattice_cap: usize,
    /// How many times to halve the inner tolerance before giving up.
    pub max_rungs: usize,
    /// Largest grid the extended space may have.
    pub cell_cap: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            family_size: None,
            certificate_mesh_ratio: q(1, 4),
            lattice_cap: crate::subspace::DEFAULT_LATTICE_CAP,
            max_rungs: 8,
            cell_cap: cell_cap(),
        }
    }
}

/// Everything one extension step chose and verified.
#[derive(Debug, Clone)]
pub struct StageStep {
    pub eps: Rational,
    /// Tolerance of the spike (`δ = inner_eps/2`).
    pub inner_eps: Rational,
    pub delta: Rational,
    pub n: usize,
    /// Fresh coordinate of family `k`.
    pub coords: Vec<u32>,
    pub families: Vec<IndependentFamily>,
    /// `bush[k][j] = f_{k,j}·u_k`.
    pub bush: Vec<Vec<StepFunction>>,
    /// `‖n⁻¹ Σ_j f_j − 1‖`.
    pub law_norm: Rational,
    /// `‖u_k − n⁻¹ Σ_j v_{k,j}‖`, computed directly.
    pub average_gaps: Vec<Rational>,
    pub averaging_enforced: bool,
    /// Certified lower bounds of `min_{u∈S(G)} ‖u + v_{k,j}‖`.
    pub sphere_bounds: Vec<Vec<SphereBound>>,
    /// Rungs of the inner-tolerance ladder tried before this one succeeded.
    pub rejected_rungs: usize,
}

impl StageStep {
    pub fn bush_flat(&self) -> impl Iterator<Item = &StepFunction> {
        self.bush.iter().flatten()
    }

    pub fn unit_norms_hold(&self) -> bool {
        self.bush_flat().all(|v| v.norm_l1() == one())
    }

    /// The averaging bound `‖u_k − n⁻¹ Σ_j v_{k,j}‖ ≤ eps` and its
    /// factorisation through the binomial value.
    pub fn averaging_holds(&self) -> bool {
        self.average_gaps.iter().all(|g| *g == self.law_norm && *g <= self.eps)
    }

    /// The sphere bound `‖u + v_{k,j}‖ ≥ 2 − eps` for all `u ∈ S(G)`.
    pub fn sphere_bounds_hold(&self) -> bool {
        let target = int(2) - &self.eps;
        self.sphere_bounds.iter().flatten().all(|b| b.bound >= target)
    }

    pub fn independence_holds(&self) -> bool {
        self.families.iter().all(|f| f.is_jointly_independent())
    }
}

/// Extends `g` by one bush of spikes per net point.
///
/// Walks the ladder `inner_eps = eps, eps/2, eps/4, …` with spike mass
/// `δ = inner_eps/2` and the smallest family size that brings the averaging
/// norm under `eps`, and accepts the first rung whose sphere bounds all
/// certify `≥ 2 − eps`. Family `k` lives on the `k`-th coordinate after the
/// last one `g` uses.
pub fn extend_stage(
    g: &Subspace,
    net: &SphereNet,
    eps: &Rational,
    opts: &StepOptions,
) -> Result<(Subspace, StageStep), ConstructionError> {
    if !net.certified {
        return Err(ConstructionError::InvalidParams("stage net must be certified".into()));
    }
    let first = g.grid().coords().last().copied().unwrap_or(0) + 1;
    let coords: Vec<u32> = (0..net.len() as u32).map(|k| first + k).collect();
    let units: Vec<StepFunction> = net
        .points
        .iter()
        .map(|p| g.combine(p))
        .collect::<Result<_, _>>()?;
    let cert_net = if g.dim() == 1 {
        SphereNet::line(g)
    } else {
        build_net(g, &(eps * &opts.certificate_mesh_ratio), opts.lattice_cap)?
    };
    let cap = opts.cell_cap.min(cell_cap());
    let n_cap = (usize::BITS - 1 - cap.leading_zeros()) as usize;
    let target = int(2) - eps;
    let mut inner = eps.clone();
    let mut last_failure = None;
    for rung in 0..opts.max_rungs.max(1) {
        let delta = &inner * q(1, 2);
        let n = match opts.family_size {
            Some(n) => n,
            None => minimal_n(&delta, eps, n_cap)?,
        };
        let bits = n.checked_mul(coords.len()).unwrap_or(usize::MAX);
        let cells = g.grid().cell_count() as u128 * 1u128.checked_shl(bits as u32).unwrap_or(u128::MAX);
        if bits >= 128 || cells > cap as u128 {
            return Err(MeasureError::SizeLimit {
                cells: usize::try_from(cells).unwrap_or(usize::MAX),
                cap,
            }
            .into());
        }
        let families: Vec<IndependentFamily> = coords
            .iter()
            .map(|&c| IndependentFamily::new(c, n, delta.clone()))
            .collect::<Result<_, _>>()?;
        let bush: Vec<Vec<StepFunction>> = families
            .iter()
            .zip(&units)
            .map(|(fam, u)| fam.members.iter().map(|f| f.mul(u)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let sphere_bounds: Vec<Vec<SphereBound>> = bush
            .par_iter()
            .map(|row| row.iter().map(|v| sphere_bound(g, &cert_net, v)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let worst = sphere_bounds.iter().flatten().map(|b| &b.bound).min().expect("nonempty bush");
        if *worst < target {
            last_failure = Some(worst.clone());
            inner *= q(1, 2);
            continue;
        }
        let law_norm = law_of_large_numbers_norm(&delta, n);
        let inv_n = Rational::new(1.into(), (n as i64).into());
        let average_gaps = bush
            .iter()
            .zip(&units)
            .map(|(row, u)| {
                let avg = StepFunction::lin_comb(&vec![inv_n.clone(); n], row)?;
                Ok(u.sub(&avg)?.norm_l1())
            })
            .collect::<Result<Vec<Rational>, ConstructionError>>()?;
        let space = g.extend(&bush.iter().flatten().cloned().collect::<Vec<_>>())?;
        let step = StageStep {
            eps: eps.clone(),
            inner_eps: inner,
            delta,
            n,
            coords,
            families,
            bush,
            law_norm,
            average_gaps,
            averaging_enforced: opts.family_size.is_none(),
            sphere_bounds,
            rejected_rungs: rung,
        };
        if step.averaging_enforced && !step.averaging_holds() {
            return Err(ConstructionError::Certificate(format!(
                "averaging norm {} exceeds eps {}",
                step.law_norm, eps
            )));
        }
        return Ok((space, step));
    }
    Err(ConstructionError::Certificate(format!(
        "no inner tolerance certified the sphere bound; best was {} < {}",
        last_failure.unwrap_or_else(|| int(0)),
        target
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn line() -> (Subspace, SphereNet) {
        let g = Subspace::new(vec![StepFunction::one()]).unwrap();
        let net = SphereNet::line(&g);
        (g, net)
    }

    #[test]
    fn three_quarter_step_from_constants() {
        let (g, net) = line();
        let (f, step) = extend_stage(&g, &net, &q(3, 4), &StepOptions::default()).unwrap();
        assert_eq!(step.delta, q(3, 8));
        assert_eq!(step.n, 3);
        assert_eq!(step.coords, vec![1, 2]);
        assert_eq!(f.dim(), 7);
        assert_eq!(f.grid().cell_count(), 64);
        assert!(step.unit_norms_hold());
        assert!(step.averaging_holds());
        assert!(step.sphere_bounds_hold());
        assert!(step.independence_holds());
        // u = −1 against v = f·1 is the tight case: 2 − 2δ = 5/4
        let tight = step.sphere_bounds.iter().flatten().map(|b| b.bound.clone()).min().unwrap();
        assert_eq!(tight, q(5, 4));
        assert_eq!(step.law_norm, q(300, 512));
    }

    #[test]
    fn fixed_family_size_records_averaging() {
        let (g, net) = line();
        let opts = StepOptions {
            family_size: Some(2),
            ..StepOptions::default()
        };
        let (f, step) = extend_stage(&g, &net, &q(1, 50), &opts).unwrap();
        assert_eq!(step.delta, q(1, 100));
        assert_eq!(f.grid().cell_count(), 16);
        assert!(!step.averaging_enforced);
        assert!(!step.averaging_holds());
        assert!(step.sphere_bounds_hold());
    }
}
