//! Numerical laboratory for the k-equivariant harmonic map heat flow from
//! the unit disk to the unit sphere.
//!
//! Equivariant maps v(r e^{i theta}) = (e^{i k theta} sin h, cos h) reduce
//! the flow to a scalar radial PDE for the colatitude angle h(r, t):
//!
//! ```text
//! h_t = h_rr + h_r / r - k^2 sin(2h) / (2 r^2),   0 < r < 1,
//! ```
//!
//! with Dirichlet data on the parabolic boundary (the initial profile plus
//! the trace at r = 1; h(0, t) is pinned to a multiple of pi).
//!
//! The crate provides the building blocks of the laboratory:
//!
//! - [`grid`]: graded radial meshes clustering nodes at the origin
//! - [`boundary`]: parabolic boundary data families and their validation
//! - [`stationary`]: exact steady states and barrier fitting
//! - [`solver`]: implicit time stepping of the radial flow
//! - [`energy`]: Dirichlet energy, its dissipation ledger, and the
//!   Sacks-Uhlenbeck pointwise identity
//! - [`checkers`]: comparison-principle, self-comparison, chain, and
//!   maximum-principle audits of computed flows
//! - [`blowup`]: gradient-blow-up detection, bubble extraction, and
//!   front tracking
//! - [`config`], [`report`], [`scenario`]: reproducible scenario runs with
//!   CSV/JSON artifacts
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod blowup;
pub mod boundary;
pub mod checkers;
pub mod config;
pub mod energy;
pub mod grid;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod stationary;
