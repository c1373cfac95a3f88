//! Exact Riemann solutions for the one-dimensional relativistic full Euler
//! equations closed by the Chaplygin equation of state `p = -1/rho`.
//!
//! The crate is organised bottom-up:
//!
//! * [`state`]: primitive and conserved variables, admissibility, recovery.
//! * [`eigen`]: quasilinear matrices, characteristic speeds and vectors.
//! * [`wavecurves`]: contact-discontinuity curves and jump residuals.
//! * [`riemann`]: classification, classical fans, delta shocks, sampling.
//! * [`verify`]: weak-form, generalized jump and singular-limit checks.
//! * [`fvm`]: a first-order finite-volume simulator used as a cross-check.

pub mod eigen;
pub mod error;
pub mod fvm;
pub mod riemann;
pub mod state;
pub mod verify;
pub mod wavecurves;

pub use error::{Error, Result};
pub use riemann::{ClassicalFan, DeltaShock, Regime, Region, RiemannData, RiemannSolution, Sample, Wave};
pub use state::{Admissibility, ConservedState, ModelParams, PrimitiveState};
pub use wavecurves::ContactFamily;
