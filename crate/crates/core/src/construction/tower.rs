use super::{extend_stage, ConstructionError, StageStep, StepOptions};
use crate::measure::StepFunction;
use crate::rational::{one, q, serde_q, Rational};
use crate::subspace::{build_net, SphereNet, Subspace, DEFAULT_LATTICE_CAP};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Parameters of a tower `E₁ ⊂ E₂ ⊂ …` with `ε_N = eps1·ratio^{N−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerParams {
    #[serde(with = "serde_q")]
    pub eps1: Rational,
    #[serde(with = "serde_q", default = "default_ratio")]
    pub ratio: Rational,
    #[serde(default = "default_max_stage")]
    pub max_stage: usize,
    /// Fixed family size for every step; by default each step picks the
    /// smallest size meeting the averaging bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_size: Option<usize>,
    /// Stage nets have mesh `net_mesh_ratio·ε_N`; the construction uses 1.
    #[serde(with = "serde_q", default = "one")]
    pub net_mesh_ratio: Rational,
    #[serde(default = "default_cell_cap")]
    pub cell_cap: usize,
    #[serde(default = "default_lattice_cap")]
    pub lattice_cap: usize,
}

fn default_ratio() -> Rational {
    q(1, 3)
}

fn default_max_stage() -> usize {
    2
}

fn default_cell_cap() -> usize {
    crate::measure::DEFAULT_CELL_CAP
}

fn default_lattice_cap() -> usize {
    DEFAULT_LATTICE_CAP
}

impl Default for TowerParams {
    fn default() -> Self {
        TowerParams {
            eps1: q(3, 4),
            ratio: default_ratio(),
            max_stage: default_max_stage(),
            family_size: None,
            net_mesh_ratio: one(),
            cell_cap: default_cell_cap(),
            lattice_cap: default_lattice_cap(),
        }
    }
}

impl TowerParams {
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: String| Err(ConstructionError::InvalidParams(m));
        if !self.eps1.is_positive() || self.eps1 >= one() {
            return bad(format!("eps1 must lie in (0, 1), got {}", self.eps1));
        }
        if !self.ratio.is_positive() || self.ratio >= q(1, 2) {
            return bad(format!("ratio must lie in (0, 1/2), got {}", self.ratio));
        }
        if self.max_stage == 0 {
            return bad("max_stage must be at least 1".into());
        }
        if !self.net_mesh_ratio.is_positive() || self.net_mesh_ratio > one() {
            return bad(format!("net_mesh_ratio must lie in (0, 1], got {}", self.net_mesh_ratio));
        }
        if self.family_size == Some(0) || self.cell_cap == 0 || self.lattice_cap == 0 {
            return bad("family size and caps must be positive".into());
        }
        Ok(())
    }

    /// `ε_N`, 1-based.
    pub fn eps(&self, stage: usize) -> Rational {
        assert!(stage >= 1, "stages are numbered from 1");
        &self.eps1 * num_traits::pow(self.ratio.clone(), stage - 1)
    }

    /// `Σ_{j>N} ε_j = ε_{N+1}/(1 − ratio)`.
    pub fn tail_sum(&self, stage: usize) -> Rational {
        self.eps(stage + 1) / (one() - &self.ratio)
    }

    /// `Σ_{j>N} ε_j < ε_N`, exactly.
    pub fn tail_condition_holds(&self, stage: usize) -> bool {
        self.tail_sum(stage) < self.eps(stage)
    }

    /// `ε_{from} + … + ε_{to+1}`: the accumulated distance of a chained
    /// compression from stage `from` down to stage `to`.
    pub fn chain_bound(&self, from: usize, to: usize) -> Rational {
        (to + 1..=from).map(|j| self.eps(j)).fold(Rational::zero(), |a, b| a + b)
    }

    fn step_options(&self) -> StepOptions {
        StepOptions {
            family_size: self.family_size,
            lattice_cap: self.lattice_cap,
            cell_cap: self.cell_cap,
            ..StepOptions::default()
        }
    }
}

/// One stage `E_N` of the tower, with the net and bush used to extend it.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub index: usize,
    pub eps: Rational,
    pub space: Subspace,
    /// The `ε_N`-net `{u_k}` of `S(E_N)`; absent on the top stage.
    pub net: Option<SphereNet>,
    /// The extension to `E_{N+1}`; absent on the top stage.
    pub step: Option<StageStep>,
}

#[derive(Debug, Clone)]
pub struct Tower {
    pub params: TowerParams,
    pub stages: Vec<StageRecord>,
}

impl Tower {
    /// Stage `E_N`, 1-based.
    pub fn stage(&self, index: usize) -> &StageRecord {
        &self.stages[index - 1]
    }

    pub fn top(&self) -> &StageRecord {
        self.stages.last().expect("a tower has at least one stage")
    }

    /// Every `v_{k,j}` of every stage, with its `(stage, k, j)` label.
    pub fn bush_vectors(&self) -> Vec<((usize, usize, usize), &StepFunction)> {
        let mut out = Vec::new();
        for s in &self.stages {
            if let Some(step) = &s.step {
                for (k, row) in step.bush.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        out.push(((s.index, k + 1, j + 1), v));
                    }
                }
            }
        }
        out
    }
}

/// Builds `E₁ = span{1}` and extends it `max_stage − 1` times, each step
/// using a certified `ε_N`-net of `S(E_N)`.
pub fn build_tower(params: &TowerParams) -> Result<Tower, ConstructionError> {
    params.validate()?;
    let mut stages = vec![StageRecord {
        index: 1,
        eps: params.eps(1),
        space: Subspace::new(vec![StepFunction::one()])?,
        net: None,
        step: None,
    }];
    let opts = params.step_options();
    for index in 1..params.max_stage {
        let current = stages.last_mut().expect("nonempty");
        let eps = params.eps(index);
        let mesh = &eps * &params.net_mesh_ratio;
        let net = if current.space.dim() == 1 {
            SphereNet::line(&current.space)
        } else {
            build_net(&current.space, &mesh, params.lattice_cap)?
        };
        let (next, step) = extend_stage(&current.space, &net, &eps, &opts)?;
        current.net = Some(net);
        current.step = Some(step);
        stages.push(StageRecord {
            index: index + 1,
            eps: params.eps(index + 1),
            space: next,
            net: None,
            step: None,
        });
    }
    Ok(Tower {
        params: params.clone(),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureError;
    use crate::subspace::SubspaceError;

    #[test]
    fn single_stage_is_the_constants() {
        let t = build_tower(&TowerParams {
            max_stage: 1,
            ..TowerParams::default()
        })
        .unwrap();
        assert_eq!(t.stages.len(), 1);
        assert_eq!(t.top().space.dim(), 1);
    }

    #[test]
    fn default_two_stage_tower() {
        let t = build_tower(&TowerParams::default()).unwrap();
        assert_eq!(t.stages.len(), 2);
        let e1 = t.stage(1);
        assert_eq!(e1.net.as_ref().unwrap().len(), 2);
        let step = e1.step.as_ref().unwrap();
        assert!(step.unit_norms_hold() && step.averaging_holds() && step.sphere_bounds_hold());
        let e2 = &t.stage(2).space;
        assert!(e2.dim() <= 1 + 2 * step.n);
        assert_eq!(&e2.basis()[..1], e1.space.basis());
        assert_eq!(t.bush_vectors().len(), 6);
    }

    #[test]
    fn geometric_tail() {
        let p = TowerParams::default();
        for n in 1..6 {
            assert_eq!(p.tail_sum(n), p.eps(n) * q(1, 2));
            assert!(p.tail_condition_holds(n));
        }
        assert_eq!(p.chain_bound(3, 1), q(1, 4) + q(1, 12));
    }

    #[test]
    fn third_stage_does_not_fit_default_caps() {
        let err = build_tower(&TowerParams {
            max_stage: 3,
            ..TowerParams::default()
        })
        .unwrap_err();
        assert!(matches!(
            err,
            ConstructionError::Subspace(SubspaceError::NetTooLarge { .. })
                | ConstructionError::Measure(MeasureError::SizeLimit { .. })
        ));
    }

    #[test]
    fn tiny_cell_cap_is_a_clean_error() {
        let err = build_tower(&TowerParams {
            cell_cap: 16,
            ..TowerParams::default()
        })
        .unwrap_err();
        assert!(matches!(err, ConstructionError::Measure(MeasureError::SizeLimit { .. })));
    }

    #[test]
    fn rejects_bad_params() {
        for p in [
            TowerParams { eps1: one(), ..TowerParams::default() },
            TowerParams { ratio: q(1, 2), ..TowerParams::default() },
            TowerParams { max_stage: 0, ..TowerParams::default() },
        ] {
            assert!(matches!(build_tower(&p), Err(ConstructionError::InvalidParams(_))));
        }
    }
}
