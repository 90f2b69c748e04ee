use super::{ConstructionError, Tower, TowerParams};
use crate::rational::{serde_q, Rational};
use crate::subspace::text::{write_net, write_subspace};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// What `build` writes: parameters, per-stage data and the files holding
/// each basis, net and bush.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerManifest {
    pub params: TowerParams,
    pub stages: Vec<StageEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEntry {
    pub index: usize,
    #[serde(with = "serde_q")]
    pub eps: Rational,
    pub dim: usize,
    pub coords: Vec<u32>,
    pub cells: usize,
    pub basis_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEntry {
    #[serde(with = "serde_q")]
    pub inner_eps: Rational,
    #[serde(with = "serde_q")]
    pub delta: Rational,
    pub n: usize,
    /// Fresh coordinate of each family, in net order.
    pub family_coords: Vec<u32>,
    #[serde(with = "serde_q")]
    pub law_norm: Rational,
    pub averaging_enforced: bool,
    pub averaging_holds: bool,
    pub sphere_bounds_hold: bool,
    pub unit_norms_hold: bool,
    #[serde(with = "serde_q")]
    pub worst_sphere_bound: Rational,
    pub rejected_rungs: usize,
}

impl TowerManifest {
    pub fn of(tower: &Tower) -> Self {
        let stages = tower
            .stages
            .iter()
            .map(|s| StageEntry {
                index: s.index,
                eps: s.eps.clone(),
                dim: s.space.dim(),
                coords: s.space.grid().coords().to_vec(),
                cells: s.space.grid().cell_count(),
                basis_file: format!("stage-{}-basis.txt", s.index),
                net_file: s.net.as_ref().map(|_| format!("stage-{}-net.txt", s.index)),
                net_points: s.net.as_ref().map(|n| n.len()),
                step: s.step.as_ref().map(|st| StepEntry {
                    inner_eps: st.inner_eps.clone(),
                    delta: st.delta.clone(),
                    n: st.n,
                    family_coords: st.coords.clone(),
                    law_norm: st.law_norm.clone(),
                    averaging_enforced: st.averaging_enforced,
                    averaging_holds: st.averaging_holds(),
                    sphere_bounds_hold: st.sphere_bounds_hold(),
                    unit_norms_hold: st.unit_norms_hold(),
                    worst_sphere_bound: st
                        .sphere_bounds
                        .iter()
                        .flatten()
                        .map(|b| b.bound.clone())
                        .min()
                        .expect("nonempty bush"),
                    rejected_rungs: st.rejected_rungs,
                }),
            })
            .collect();
        TowerManifest {
            params: tower.params.clone(),
            stages,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ConstructionError> {
        serde_json::from_str(text).map_err(|e| ConstructionError::Io(format!("bad manifest: {e}")))
    }
}

/// Writes `manifest.json` and the referenced basis and net files into `dir`.
pub fn write_tower(tower: &Tower, dir: &Path) -> Result<TowerManifest, ConstructionError> {
    let io = |e: std::io::Error| ConstructionError::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    let manifest = TowerManifest::of(tower);
    for (s, entry) in tower.stages.iter().zip(&manifest.stages) {
        std::fs::write(dir.join(&entry.basis_file), write_subspace(&s.space)).map_err(io)?;
        if let (Some(net), Some(file)) = (&s.net, &entry.net_file) {
            std::fs::write(dir.join(file), write_net(net)).map_err(io)?;
        }
    }
    std::fs::write(dir.join("manifest.json"), manifest.to_json()).map_err(io)?;
    Ok(manifest)
}
