//! Construction and verification of solutions of the quaternionic Riccati
//! equation `Df + f^2 = v`, where `D = i1 d1 + i2 d2 + i3 d3` acts on purely
//! vectorial complex-quaternion fields over a region of R^3.
//!
//! * [`cquat`]: complex quaternion arithmetic.
//! * [`jet`]: exact value/gradient/Hessian propagation.
//! * [`fields`]: field expressions and the operators grad, div, rot, Δ, D.
//! * [`constructors`]: every solution recipe, each returning a
//!   [`constructors::RiccatiPair`].
//! * [`grid`]: uniform grids, finite-difference jets and a
//!   conjugate-gradient solver for `div(e^{2ξ} grad Ψ) = 0`.
//! * [`verify`]: residual oracles and their reports.
//! * [`scenario`]: named end-to-end runs producing JSON reports.

pub mod constructors;
pub mod cquat;
pub mod fields;
pub mod grid;
pub mod ode;
pub mod quadrature;
pub mod randgen;
pub mod sampling;
pub mod scenario;
pub mod verify;

pub use cquat::{CQuat, CScalar};
pub use fields::{Point, QuatField, Region, ScalarField, VectorField};
pub use jet::Jet2;

pub mod jet;
