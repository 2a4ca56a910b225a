//! Diagnostics for compressible gas flows built around the entropy relation
//! `ds = ω` in a frame that moves with the flow trajectories.
//!
//! The crate is organized in layers:
//!
//! * [`thermo`] ideal-gas state derivations and the Gibbs relation check.
//! * [`fields`] structured-grid storage, finite-difference operators,
//!   streamline tracing and the accompanying (tangent/normal) frame.
//! * [`evoform`] coefficients of the evolutionary 1-form, its commutator with
//!   a per-source attribution, the Lagrange criterion and regime tests.
//! * [`moc`] an unsteady 1-D nonisentropic method-of-characteristics solver
//!   with Riemann invariants, closure residuals and envelope detection.
//! * [`jumps`] weak discontinuities: synthesis, one-sided derivative jumps and
//!   the two jump relations across trajectories and characteristics.
//! * [`finite_volume`] and [`flows`] provide independent reference solutions
//!   and analytic test flows.

pub mod error;
pub mod evoform;
pub mod fields;
pub mod finite_volume;
pub mod flows;
pub mod jumps;
pub mod moc;
pub(crate) mod stencil;
pub mod thermo;

pub use error::{Error, Result};
pub use thermo::{DerivedState, EntropyConvention, GasModel, PrimitiveState};
