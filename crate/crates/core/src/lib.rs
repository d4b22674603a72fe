//! Point vortices on the unit sphere, integrated through the Hopf lift to S³.
//!
//! The crate is organised bottom-up:
//!
//! - [`su2`]: complex pairs, the Hopf map and its local sections, Pauli algebra
//!   and the Cayley transform.
//! - [`vortex`]: vortex states, the sphere and lifted Hamiltonians, their
//!   gradients and the continuous vector field.
//! - [`integrators`]: the Hopf variational midpoint step and the comparison
//!   methods (midpoint on S², projected RK4/RK2, Lie–Poisson, two-step
//!   trapezoid), together with the shared fixed-point solver.
//! - [`lifted_general`]: the slack-variable / Cayley solver for lifted
//!   Hamiltonians without the circle symmetry.
//! - [`planar`]: planar vortices and the α-family of two-step integrators.
//! - [`scenarios`]: benchmark initial conditions and exact solutions.
//! - [`harness`]: configuration, simulation driver, diagnostics output and
//!   convergence studies.

pub mod error;
pub mod harness;
pub mod integrators;
pub mod lifted_general;
pub mod planar;
pub mod scenarios;
pub mod su2;
pub mod vortex;

pub use error::{Result, VortexError};

/// Ambient 3-vector.
pub type Vec3 = nalgebra::Vector3<f64>;
pub use num_complex::Complex64;
