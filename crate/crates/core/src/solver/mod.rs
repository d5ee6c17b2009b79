//! Ground states by Nehari projected descent, a mountain-pass path solver as
//! an independent route to a critical level, and pointwise certificates.

mod certificate;
mod config;
mod descent;
mod init;
mod mountain;

use serde::Serialize;

use crate::functional::Problem;
use crate::lattice::Field;

pub use certificate::{certify_field, certify_solution, CertificateReport, FLOOR_SLACK};
pub use config::{Algorithm, Armijo, InitKind, SolverConfig};
pub use descent::solve_ground_state;
pub use init::{bump_field, initial_field, random_positive_field};
pub use mountain::{solve_mountain_pass, MountainPassInfo, PathState};

/// One line of the iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub level: f64,
    /// Scaled gradient sup-norm at the start of the iteration.
    pub grad_norm: f64,
    /// Nehari scaling of the accepted trial; 1 for path moves.
    pub t_u: f64,
    pub step: f64,
}

/// Outcome of one start of the descent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub index: usize,
    pub init: InitKind,
    pub seed: u64,
    pub level: f64,
    pub grad_supnorm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub algorithm: Algorithm,
    pub u: Field,
    /// `J(u)`.
    pub level: f64,
    /// `|u|_H^p - A(u)`.
    pub nehari_residual: f64,
    /// `|u|_H^p`.
    pub norm_p: f64,
    /// Gradient sup-norm divided by `max(1, |u|_inf^(p-1))`.
    pub grad_supnorm: f64,
    pub grad_supnorm_raw: f64,
    pub min_value: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    /// Starts that ran to completion, the reported one included.
    pub restarts: Vec<RestartSummary>,
    /// `(max - min) / |min|` of the restart levels.
    pub level_spread: f64,
    /// Starts abandoned because the ray lost its positive part.
    pub projection_failures: usize,
    pub notes: Vec<String>,
    pub trace: Vec<TraceRecord>,
    pub mountain_pass: Option<MountainPassInfo>,
}

/// `sup |g| / max(1, |u|_inf^(p-1))`.
pub fn scaled_supnorm(g: &Field, u: &Field, p: f64) -> f64 {
    g.sup_norm() / u.sup_norm().powf(p - 1.0).max(1.0)
}

/// Dispatches on `config.algorithm`.
pub fn solve(config: &SolverConfig, problem: &Problem) -> crate::Result<Solution> {
    match config.algorithm {
        Algorithm::NehariDescent => solve_ground_state(config, problem),
        Algorithm::MountainPass => solve_mountain_pass(config, problem),
    }
}
