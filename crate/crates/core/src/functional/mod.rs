//! The modified energy `J(u) = (1/p)|u|_H^p - 1/2 sum (R * F(u+)) F(u+)`,
//! its gradient, and the Nehari manifold `{u != 0 : |u|_H^p = A(u)}`.
//!
//! Only `u+` enters the Choquard term, so every nontrivial critical point is
//! positive.

mod energy;
mod nehari;
mod nonlinearity;
mod problem;

pub use energy::{EnergyBreakdown, Evaluation};
pub use nehari::{Projection, ProjectionMethod};
pub use nonlinearity::{
    tau_threshold, GrowthConstant, HypothesisCheck, HypothesisReport, Nonlinearity, NonlinearityKind,
};
pub use problem::{Problem, ProblemSpec};
