//! Exit measures, harmonic function approximations and growth certificates
//! for random walks on finitely generated groups.

pub mod ball;
pub mod cache;
pub mod error;
pub mod exit;
pub mod group;
pub mod growth;
pub mod harmonic;
pub mod linalg;
pub mod walk;

pub use ball::DirectedBall;
pub use error::{Error, Result};
pub use exit::{ExitMeasure, ExitSolver, Mode, Value};
pub use group::{Group, GroupElement, GroupFamily, StepDistribution};
