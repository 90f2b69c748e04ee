//! Slices, `l⁺` sets, convex-hull distances, the `Daug_n` lower-bound
//! certificate and the rank-one defect.

mod certificate;
mod conv;
mod estimate;
mod lplus;

pub use certificate::{
    certificate_pool, daug_lower_certificate, verify_certificate, CandidateAudit, CertificateCheck,
    CombinationAudit, ConstantAudit, DaugCertificate, HullAudit, Threshold,
};
pub use conv::{conv_distance, hull_distance, hull_witness, subsets, ConvDistance, ConvOrder, HullWitness, SUBSET_CAP};
pub use estimate::{
    daug_profile, daug_upper_estimate, rank_one_defect, rank_one_defect_at, slice_search, RankOneDefect, SliceHit, SliceSearch,
    SliceSpec,
};
pub use lplus::{certified_min_over_sphere, lplus_test, sphere_bound, LPlusQuery, SphereBound};

use crate::lp::LpError;
use crate::measure::MeasureError;
use crate::rational::Rational;
use crate::subspace::SubspaceError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("expected a unit vector, got norm {norm}")]
    NotUnit { norm: Rational },
    #[error("empty candidate pool")]
    EmptyPool,
    #[error("slice is empty: functional norm {norm} ≤ alpha {alpha}")]
    EmptySlice { norm: Rational, alpha: Rational },
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("malformed certificate: {0}")]
    Format(String),
}
