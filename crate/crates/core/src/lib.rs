//! Numerics for semilinear elliptic problems with critical Sobolev and
//! critical trace exponents:
//!
//! ```text
//! -Δu + u = |u|^{r-2} u   in Ω,      ∂u/∂ν = |u|^{q-2} u   on ∂Ω.
//! ```
//!
//! * [`bubbles`]: the explicit half-space solutions and their energies.
//! * [`quadrature`]: radial moments, curvature sign conditions, integrals
//!   over curved half-spaces.
//! * [`asymptotics`]: ε-sweeps, expansion fits and energy-gap checks.
//! * [`solver`]: radial ground and nodal states on balls.
//! * [`campaign`]: batch runs behind the `critbound` binary.

pub mod asymptotics;
pub mod bubbles;
pub mod campaign;
pub mod error;
pub mod fibering;
pub mod integrate;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
