//! Invariant metric connections with skew torsion on reductive homogeneous
//! spaces carrying an Sp(3)-structure.

pub mod analysis;
pub mod curvature;
pub mod error;
pub mod groupconn;
pub mod invconn;
pub mod liealg;
pub mod numkernel;
pub mod repdecomp;
pub mod sp3catalog;
pub mod spaces;
pub mod spingeom;
pub mod tensor;

pub use error::{Error, Result};
pub use numkernel::ToleranceProfile;
pub use analysis::{analyze, verify_claims, AnalysisFlags, AnalysisReport, Claim};
pub use spaces::{MetricParams, SpaceId};
