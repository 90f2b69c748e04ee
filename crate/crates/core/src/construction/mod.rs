//! The stage tower `E₁ ⊂ E₂ ⊂ …` built from independent spikes.
//!
//! Each step takes a subspace `G`, a certified net `{u_k}` of its sphere and
//! a tolerance `ε`, puts a family of `n` independent spikes on a fresh
//! coordinate for every `u_k`, and adds the bush vectors `v_{k,j} = f_{k,j}·u_k`.
//! Every step records exact evidence for its three claims: unit norms,
//! the averaging bound `‖u_k − n⁻¹ Σ_j v_{k,j}‖ ≤ ε`, and the sphere bound
//! `‖u + v_{k,j}‖ ≥ 2 − ε` on all of `S(G)`.

mod family;
mod manifest;
mod reduce;
mod spike;
mod stage;
mod tower;

pub use family::IndependentFamily;
pub use manifest::{write_tower, StageEntry, StepEntry, TowerManifest};
pub use reduce::{compress, reduce_to_substage, sample_ball, Compression, Reduction, ReductionMethod};
pub use spike::{law_of_large_numbers_norm, make_spike, minimal_n, SpikeParams};
pub use stage::{extend_stage, StageStep, StepOptions};
pub use tower::{build_tower, StageRecord, Tower, TowerParams};

use crate::analysis::AnalysisError;
use crate::lp::LpError;
use crate::measure::MeasureError;
use crate::rational::Rational;
use crate::subspace::SubspaceError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no family of at most {n_cap} spikes of mass {delta} averages to within {eps} of 1")]
    FamilyTooLarge { delta: Rational, eps: Rational, n_cap: usize },
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("best reduction is at distance {} > {}", .0.distance, .0.bound)]
    ReductionShortfall(Box<Reduction>),
    #[error("{0}")]
    Io(String),
}

impl From<LpError> for ConstructionError {
    fn from(e: LpError) -> Self {
        ConstructionError::Subspace(e.into())
    }
}
