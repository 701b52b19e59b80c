//! Correlation boxes, local-realism tests, and 2×2 games played over shared
//! boxes.
//!
//! - [`corrbox`]: the sixteen-entry probability box, validation, generators.
//! - [`fine`]: Bell-system checks, joint-distribution construction, LP oracle.
//! - [`gamecore`]: payoffs, equilibrium checks and exact enumeration.
//! - [`quantum`]: boxes from two-qubit states.
//! - [`paperlab`]: reproduction reports and the identity audit.

pub mod corrbox;
pub mod fine;
pub mod gamecore;
pub mod paperlab;
pub mod quantum;

pub use corrbox::{BoxError, JointProbBox, Outcome, DEFAULT_TOL};
pub use fine::{FineError, GammaMode};
pub use gamecore::{Game2x2, MixedProfile, NashSet};
