//! Exact solver for the cooperative air-ground vehicle routing problem.
//!
//! A ground vehicle tours a subset of targets (the stops) starting from a
//! depot; a UAV launched from each stop flies a closed sub-tour over the
//! targets assigned to it, within a communication radius of that stop. The
//! objective is ground distance plus UAV distance scaled by `alpha`.
//!
//! The solver is a branch-and-cut over a linearized MILP: [`model`] builds
//! the static rows, [`lp`] solves relaxations, [`separation`] finds violated
//! subtour and 2-matching inequalities, and [`engine`] drives the search.
//! [`oracle`] is an independent brute-force solver for small instances.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod instance;
mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod row;
pub mod separation;

pub use engine::{solve, SolveOutcome, SolveParams, SolveResult, SolveStats};
pub use error::{Error, Result};
pub use instance::Instance;
pub use model::{validate, Solution, Violation, ViolationKind};
