//! Numerical laboratory for reaction-diffusion spreading.
//!
//! The equation under study is the semilinear heat equation
//!
//! ```text
//!     du/dt = Δu + f(u),      u(0, ·) = indicator of a set U,
//! ```
//!
//! with `f : [0,1] -> R`, `f(0) = f(1) = 0`. Solutions starting from an
//! indicator invade the state `1` at a well-defined asymptotic speed in each
//! direction, and the shape of the invaded region at large time is governed
//! by the geometry of `U` at infinity together with the minimal speed of
//! planar traveling fronts.
//!
//! The crate is organised around that story:
//!
//! - [`reaction`]: the nonlinearities `f` and the structural hypotheses they
//!   must satisfy for a unique spreading speed to exist.
//! - [`front`]: one-dimensional traveling-front machinery — minimal speeds via
//!   phase-plane shooting, front profiles, compactly supported subsolutions,
//!   and supersolution constructions used to bound spreading from above.
//! - [`geometry`]: support sets for the initial condition, their direction
//!   sets at infinity, and the predicted spreading set (envelope of balls).
//! - [`pde`]: explicit finite-difference solvers on lines, planes, and radial
//!   grids, with level-set extraction.
//! - [`metrics`]: measurements on computed solutions — directional speeds,
//!   Hausdorff distances between observed and predicted level sets.
//! - [`scenario`]: a declarative harness tying the above together into
//!   reproducible experiments with machine-checked expectations.

pub mod front;
pub mod geometry;
pub mod metrics;
pub mod pde;
pub mod reaction;
pub mod scenario;
