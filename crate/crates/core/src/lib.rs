//! Controlled Hamiltonian systems on cotangent bundles of SO(3) and SE(3).
//!
//! The crate covers the Lie kernel, Lie-Poisson and product brackets,
//! controlled systems with vertically lifted forces and controls, point
//! reduction to body-momentum coordinates, Hamilton-Jacobi residuals for
//! one-form sections, the rigid body and heavy top with internal rotors,
//! and an RK4 integrator with drift diagnostics.
//!
//! Everything is `no_std` with `alloc`.
#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod axioms;
pub mod error;
pub mod hj;
pub mod integrate;
pub mod lie;
pub mod poisson;
pub mod rch;
pub mod reduction;
pub mod sampling;
pub mod systems;

pub use error::{Error, Result};
pub use lie::{AlgebraKind, AlgebraVector, CoalgebraVector, GroupElement};
pub use poisson::{Gradient, ReducedPoint, ReducedTangent, ScalarField, Sign};
