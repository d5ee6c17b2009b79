use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::ProblemSpec;
use crate::solver::SolverConfig;
use crate::verify::VerifyConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    pub output_dir: PathBuf,
    pub cache_dir: PathBuf,
    /// Write `trace.jsonl` next to the report.
    pub trace: bool,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self { output_dir: "out".into(), cache_dir: "cache".into(), trace: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    /// Box radii to time, in the problem's dimension.
    pub sizes: Vec<usize>,
    /// Timings are the minimum over this many runs.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { sizes: vec![8, 16, 32], repeats: 3 }
    }
}

/// One run: the equation, the solver, files, and the verification and
/// benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub io: IoConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub bench: BenchConfig,
}

impl RunConfig {
    /// Parses a config file, or the `[config]` echo of a solve report.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Validation(e.to_string()))?;
        let table = match (table.get("config"), table.contains_key("problem")) {
            (Some(toml::Value::Table(echo)), false) => echo.clone(),
            _ => table,
        };
        let config: RunConfig = table.try_into().map_err(|e: toml::de::Error| Error::Validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Everything checkable before any table is built.
    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        self.solver.validate()?;
        self.verify.validate()?;
        if self.bench.repeats == 0 {
            return Err(Error::validation("bench.repeats must be at least 1"));
        }
        Ok(())
    }

    /// `--seed` sets both the solver and the verification seed.
    pub fn override_seed(&mut self, seed: u64) {
        self.solver.seed = seed;
        self.verify.seed = seed;
    }
}

/// Key reference printed by `--help`.
pub const CONFIG_KEYS: &str = "\
Config keys (TOML; unknown keys are errors):
  [problem]   (required)
    d              dimension, 1..=3
    L              box radius, sites x with |x_i| <= L
    s              fractional order in (0, 1)
    p              p >= 2
    alpha          Riesz order in (0, d)
    tau            power exponent, tau > (d + alpha) p / (2d)
    kernel_model   \"power-law\" (default) or \"spectral\"
    quadrature_N   torus points per axis for the Green's function; 0 = automatic
  [problem.potential]  h(x) = h0 + a |x - center|_1^beta
    h0, a, beta, center
  [solver]
    algorithm      \"nehari-descent\" (default) or \"mountain-pass\"
    tol_grad       scaled gradient sup-norm threshold (1e-6)
    max_iter       iteration cap (20000)
    step0          initial step (1.0)
    init           \"bump\" (default), \"random-positive\" or \"file\"
    init_file      field dump used when init = \"file\"
    seed           base seed (0)
    restarts       independent starts (1)
    path_nodes     mountain-pass nodes (32)
    reequalize_every  mountain-pass sweeps between re-equalizations (10)
  [solver.armijo]
    c1             sufficient decrease constant (1e-4)
    factor         backtracking factor (0.5)
  [io]
    output_dir     reports and field dumps (\"out\")
    cache_dir      Green's function and kernel tables (\"cache\")
    trace          write trace.jsonl (false)
  [verify]
    samples        cases per property (200)
    seed           base seed (0)
    rho            small-sphere radius (0.1)
    sphere_directions, hls_pairs, p_triples  sample counts (1000, 1000, 10000)
  [bench]
    sizes          box radii to time ([8, 16, 32])
    repeats        runs per timing, minimum reported (3)

A solve report (report.toml) is itself a valid config: its [config] echo is read back.
";
