use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NehariDescent,
    MountainPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `exp(-|x|_1^2 / L)`.
    Bump,
    RandomPositive,
    /// A field dump given by `init_file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Armijo {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Step shrink factor per rejected trial.
    pub factor: f64,
}

impl Default for Armijo {
    fn default() -> Self {
        Self { c1: 1e-4, factor: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Stop when `sup |J'(u)| / max(1, |u|_inf^(p-1))` drops to this.
    pub tol_grad: f64,
    pub max_iter: usize,
    pub step0: f64,
    pub armijo: Armijo,
    pub init: InitKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_file: Option<PathBuf>,
    pub seed: u64,
    pub restarts: usize,
    /// Mountain pass: nodes on the path, endpoints included.
    pub path_nodes: usize,
    /// Mountain pass: sweeps between arc-length re-equalizations.
    pub reequalize_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::NehariDescent,
            tol_grad: 1e-6,
            max_iter: 20_000,
            step0: 1.0,
            armijo: Armijo::default(),
            init: InitKind::Bump,
            init_file: None,
            seed: 0,
            restarts: 1,
            path_nodes: 32,
            reequalize_every: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_grad > 0.0) {
            return Err(Error::validation("tol_grad must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::validation("max_iter must be at least 1"));
        }
        if self.restarts < 1 {
            return Err(Error::validation("restarts must be at least 1"));
        }
        if !(self.step0 > 0.0) {
            return Err(Error::validation("step0 must be positive"));
        }
        let a = self.armijo;
        if !(a.c1 > 0.0 && a.c1 < 1.0 && a.factor > 0.0 && a.factor < 1.0) {
            return Err(Error::validation("armijo c1 and factor must lie in (0, 1)"));
        }
        if self.init == InitKind::File && self.init_file.is_none() {
            return Err(Error::validation("init = \"file\" needs init_file"));
        }
        if self.path_nodes < 3 {
            return Err(Error::validation("path_nodes must be at least 3"));
        }
        if self.reequalize_every < 1 {
            return Err(Error::validation("reequalize_every must be at least 1"));
        }
        Ok(())
    }
}
