use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeBox};
use crate::numerics::pairwise_sum_by;
use crate::operators::{
    ConvolutionMethod, GreenConvolver, KernelModel, KernelOperator, KernelTable, PotentialField,
    PotentialSpec,
};
use crate::spectral::{compute_green_table, default_quadrature_points, GreenTable};

use super::nonlinearity::{tau_threshold, Nonlinearity};

/// Everything that defines one equation on one box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub radius: usize,
    pub s: f64,
    pub p: f64,
    pub alpha: f64,
    pub tau: f64,
    #[serde(default = "default_kernel_model")]
    pub kernel_model: KernelModel,
    /// Torus points per axis for the Green's function; 0 picks the default.
    #[serde(rename = "quadrature_N", default)]
    pub quadrature_n: usize,
    pub potential: PotentialSpec,
}

fn default_kernel_model() -> KernelModel {
    KernelModel::PowerLaw
}

impl ProblemSpec {
    /// The default test problem `h(x) = 1 + |x|_1` centered at the origin.
    pub fn new(d: usize, radius: usize, s: f64, p: f64, alpha: f64, tau: f64) -> Self {
        Self {
            d,
            radius,
            s,
            p,
            alpha,
            tau,
            kernel_model: KernelModel::PowerLaw,
            quadrature_n: 0,
            potential: PotentialSpec { h0: 1.0, a: 1.0, beta: 1.0, center: vec![0; d] },
        }
    }

    /// Every constraint that can be checked without building a table.
    pub fn validate(&self) -> Result<()> {
        LatticeBox::new(self.d, self.radius)?;
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::validation(format!("s = {} must lie in (0, 1)", self.s)));
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::validation(format!("p = {} must satisfy p >= 2", self.p)));
        }
        if !(self.alpha > 0.0 && self.alpha < self.d as f64) {
            return Err(Error::validation(format!(
                "alpha = {} must lie in (0, d) = (0, {})",
                self.alpha, self.d
            )));
        }
        let bound = tau_threshold(self.d, self.alpha, self.p);
        if !(self.tau > bound) {
            return Err(Error::validation(format!(
                "hypothesis (f2) needs tau > (d + alpha) p / (2d) = {bound}, got tau = {}",
                self.tau
            )));
        }
        self.potential.validate(self.d)?;
        let n = self.quadrature_points();
        if n < 4 * self.radius + 2 {
            return Err(Error::validation(format!(
                "quadrature_N = {n} must be at least 4L + 2 = {}",
                4 * self.radius + 2
            )));
        }
        Ok(())
    }

    /// The Green's function resolution actually used.
    pub fn quadrature_points(&self) -> usize {
        if self.quadrature_n > 0 {
            self.quadrature_n
        } else {
            let n = default_quadrature_points(self.d).max(4 * self.radius + 2);
            n + n % 2
        }
    }

    pub fn lattice(&self) -> Result<LatticeBox> {
        LatticeBox::new(self.d, self.radius)
    }

    pub fn build_green(&self) -> Result<GreenTable> {
        compute_green_table(self.d, self.alpha, self.radius, self.quadrature_points())
    }

    /// Builds the bundle, computing the Green's function table.
    pub fn build(&self) -> Result<Problem> {
        self.validate()?;
        self.build_with_green(self.build_green()?)
    }

    /// Builds the bundle around an existing (e.g. cached) table.
    pub fn build_with_green(&self, green: GreenTable) -> Result<Problem> {
        self.validate()?;
        let kernel = KernelTable::build(self.kernel_model, self.s, &self.lattice()?)?;
        self.build_with_tables(green, kernel)
    }

    /// Builds the bundle around existing Green's function and kernel tables.
    /// The kernel is taken as is, so its bounds are not re-checked here.
    pub fn build_with_tables(&self, green: GreenTable, kernel: KernelTable) -> Result<Problem> {
        self.validate()?;
        if green.dim() != self.d || green.alpha() != self.alpha {
            return Err(Error::LatticeMismatch(format!(
                "Green table is for d = {}, alpha = {}; the problem has d = {}, alpha = {}",
                green.dim(),
                green.alpha(),
                self.d,
                self.alpha
            )));
        }
        if kernel.dim() != self.d || kernel.s() != self.s || kernel.model() != self.kernel_model {
            return Err(Error::LatticeMismatch(format!(
                "kernel table is for d = {}, s = {}, model {}; the problem has d = {}, s = {}, model {}",
                kernel.dim(),
                kernel.s(),
                kernel.model().name(),
                self.d,
                self.s,
                self.kernel_model.name()
            )));
        }
        let lattice = self.lattice()?;
        Problem::new(
            KernelOperator::new(lattice, kernel)?,
            GreenConvolver::new(lattice, green)?,
            PotentialField::new(lattice, &self.potential)?,
            Nonlinearity::power(self.tau, self.p, self.d, self.alpha)?,
        )
    }
}

/// The ingredients of one energy: kernel operator, Green's function
/// convolution, potential, and nonlinearity, all on the same box.
#[derive(Debug, Clone)]
pub struct Problem {
    lattice: LatticeBox,
    op: KernelOperator,
    conv: GreenConvolver,
    potential: PotentialField,
    nl: Nonlinearity,
    method: ConvolutionMethod,
}

impl Problem {
    pub fn new(
        op: KernelOperator,
        conv: GreenConvolver,
        potential: PotentialField,
        nl: Nonlinearity,
    ) -> Result<Self> {
        let lattice = *op.lattice();
        if *conv.lattice() != lattice || *potential.field().lattice() != lattice {
            return Err(Error::LatticeMismatch("problem parts live on different boxes".into()));
        }
        if !(nl.p() >= 2.0) {
            return Err(Error::validation(format!("p = {} must satisfy p >= 2", nl.p())));
        }
        Ok(Self { lattice, op, conv, potential, nl, method: ConvolutionMethod::Fft })
    }

    /// Selects the convolution path used by every evaluation.
    pub fn with_convolution(mut self, method: ConvolutionMethod) -> Self {
        self.method = method;
        self
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn operator(&self) -> &KernelOperator {
        &self.op
    }

    pub fn convolver(&self) -> &GreenConvolver {
        &self.conv
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn p(&self) -> f64 {
        self.nl.p()
    }

    pub fn theta(&self) -> f64 {
        self.nl.theta()
    }

    pub fn convolution_method(&self) -> ConvolutionMethod {
        self.method
    }

    pub(crate) fn check(&self, u: &Field) -> Result<()> {
        if *u.lattice() != self.lattice {
            return Err(Error::LatticeMismatch("field does not live on the problem box".into()));
        }
        Ok(())
    }

    /// `F(u+)` at every site.
    pub fn primitive_field(&self, u: &Field) -> Field {
        u.map(|v| self.nl.big_f(v))
    }

    /// `R_alpha * F(u+)`.
    pub fn choquard_potential(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        self.conv.convolve(&self.primitive_field(u), self.method)
    }

    pub(crate) fn sum(&self, term: impl Fn(usize) -> f64) -> f64 {
        pairwise_sum_by(self.lattice.len(), term)
    }
}
