//! Reachable sets of the probability simplex under a Markovian relaxation
//! semigroup interleaved with instantaneous permutations.
//!
//! The crate covers the classical toy model (generators, the flow
//! `exp(−tB)`, permutation controls), its quantum origin (GKSL generators
//! whose diagonal restriction is the classical generator), constructive
//! steering schedules, and numerical checks of the majorization bound.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generators;
pub mod gksl;
pub mod linalg;
pub mod ode;
pub mod propagate;
pub mod simplex;
pub mod steering;
pub mod verify;

pub use error::{Error, Result};
pub use generators::{GeneratorMatrix, Temperature, ThermalModel};
pub use gksl::{DensityMatrix, GkslOperator};
pub use propagate::{ControlSchedule, Segment, Trajectory};
pub use simplex::{Block, Permutation, SimplexVector};
pub use steering::{Phase, SteeringPlan};

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
