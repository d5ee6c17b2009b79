use crate::error::{Error, Result};
use crate::lattice::{DisplacementGrid, LatticeBox};
use crate::numerics::{fit_line, LineFit};

use super::{check_alpha, compute_k_alpha_with_tolerance, symbol_power_coefficients, DEFAULT_BUILD_TOLERANCE};

/// Green's function of the discrete fractional Laplacian,
/// `R_alpha(z) = K_alpha (2 pi)^-d int e^{i z.k} mu^(-alpha/2)(k) dk`,
/// tabulated for every displacement a box of radius `L` can produce.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTable {
    alpha: f64,
    k_alpha: f64,
    radius: usize,
    quad_points: usize,
    grid: DisplacementGrid,
    values: Vec<f64>,
    refinement_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    /// Allowed `max_z |R_N(z) - R_2N(z)| / max_z |R(z)|`.
    pub tolerance: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_BUILD_TOLERANCE }
    }
}

impl GreenTable {
    /// Assembles a table from stored values (cache files, synthetic tables).
    pub fn from_parts(
        alpha: f64,
        k_alpha: f64,
        radius: usize,
        quad_points: usize,
        grid: DisplacementGrid,
        values: Vec<f64>,
        refinement_delta: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Data(format!(
                "green table has {} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if grid.reach() < 2 * radius {
            return Err(Error::Data("green table grid does not reach 2L".into()));
        }
        Ok(Self { alpha, k_alpha, radius, quad_points, grid, values, refinement_delta })
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    /// Box radius `L` the table was built for.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn grid(&self) -> &DisplacementGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest `|R_N - R_2N|` relative to the table maximum, from the build.
    pub fn refinement_delta(&self) -> f64 {
        self.refinement_delta
    }

    pub fn value(&self, z: &[i64]) -> Option<f64> {
        self.grid.index_of(z).map(|i| self.values[i])
    }

    pub fn covers(&self, lattice: &LatticeBox) -> bool {
        self.grid.covers(lattice)
    }
}

fn green_values(alpha: f64, k_alpha: f64, n: usize, grid: &DisplacementGrid) -> Result<Vec<f64>> {
    Ok(symbol_power_coefficients(-alpha, n, grid)?
        .into_iter()
        .map(|v| k_alpha * v)
        .collect())
}

pub fn compute_green_table(dim: usize, alpha: f64, radius: usize, n: usize) -> Result<GreenTable> {
    compute_green_table_with(dim, alpha, radius, n, &GreenOptions::default())
}

/// Builds the table for a box of radius `radius` on `n` torus points per axis
/// and certifies it against a `2n` rebuild.
pub fn compute_green_table_with(
    dim: usize,
    alpha: f64,
    radius: usize,
    n: usize,
    options: &GreenOptions,
) -> Result<GreenTable> {
    check_alpha(dim, alpha)?;
    if radius < 1 {
        return Err(Error::validation("box radius L must be at least 1"));
    }
    if n < 32 || n % 2 != 0 {
        return Err(Error::validation(format!("Green quadrature needs an even N >= 32, got {n}")));
    }
    if n < 4 * radius + 2 {
        return Err(Error::validation(format!(
            "N = {n} must be at least 4L + 2 = {} so displacements up to 2L do not wrap",
            4 * radius + 2
        )));
    }
    let grid = DisplacementGrid::new(dim, 2 * radius)?;
    let k = compute_k_alpha_with_tolerance(dim, alpha, n, options.tolerance)?;
    let values = green_values(alpha, k.value, n, &grid)?;
    let refined = green_values(alpha, k.refined, 2 * n, &grid)?;

    let scale = refined.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (worst, delta) = values
        .iter()
        .zip(&refined)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    let relative = delta / scale;
    if !(relative <= options.tolerance) {
        return Err(Error::Tolerance {
            what: format!("R_alpha at z = {:?}", grid.displacement_of(worst)),
            n,
            refined_n: 2 * n,
            coarse: values[worst],
            fine: refined[worst],
            delta: relative,
            tolerance: options.tolerance,
        });
    }
    if let Some(i) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Consistency(format!(
            "R_alpha({:?}) = {:e} is not positive",
            grid.displacement_of(i),
            values[i]
        )));
    }
    GreenTable::from_parts(alpha, k.value, radius, n, grid, values, relative)
}

/// Power-law fit `R(m e_1) ~ C m^slope` along the first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    /// `log C`.
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

pub fn fit_decay_exponent(table: &GreenTable, m_lo: usize, m_hi: usize) -> Result<DecayFit> {
    if !(m_lo >= 2 && m_hi > m_lo) {
        return Err(Error::validation(format!("decay fit needs m_hi > m_lo >= 2, got [{m_lo}, {m_hi}]")));
    }
    if m_hi > table.grid().reach() {
        return Err(Error::validation(format!(
            "decay fit up to m = {m_hi} but the table only reaches {}",
            table.grid().reach()
        )));
    }
    let mut z = vec![0i64; table.dim()];
    let mut points = Vec::with_capacity(m_hi - m_lo + 1);
    for m in m_lo..=m_hi {
        z[0] = m as i64;
        let v = table.value(&z).expect("axis point inside the table");
        if !(v > 0.0) {
            return Err(Error::Data(format!("R_alpha({z:?}) = {v:e} is not positive")));
        }
        points.push(((m as f64).ln(), v.ln()));
    }
    let LineFit { slope, intercept, rms_residual } =
        fit_line(&points).expect("at least two distinct abscissae");
    Ok(DecayFit { slope, intercept, residual: rms_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_law_slope() {
        let grid = DisplacementGrid::new(1, 40).unwrap();
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let m = grid.displacement_of(i)[0].unsigned_abs().max(1) as f64;
                m.powi(-2)
            })
            .collect();
        let table = GreenTable::from_parts(0.5, 1.0, 20, 0, grid, values, 0.0).unwrap();
        let fit = fit_decay_exponent(&table, 10, 30).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_validation() {
        let grid = DisplacementGrid::new(1, 10).unwrap();
        let mut values = vec![1.0; grid.len()];
        let table = GreenTable::from_parts(0.5, 1.0, 5, 0, grid, values.clone(), 0.0).unwrap();
        assert!(fit_decay_exponent(&table, 1, 5).is_err());
        assert!(fit_decay_exponent(&table, 5, 5).is_err());
        assert!(fit_decay_exponent(&table, 2, 11).is_err());
        values[grid.index_of(&[4]).unwrap()] = -1.0;
        let table = GreenTable::from_parts(0.5, 1.0, 5, 0, grid, values, 0.0).unwrap();
        assert!(matches!(fit_decay_exponent(&table, 2, 8), Err(Error::Data(_))));
    }

    #[test]
    fn one_dimensional_ordering() {
        let t = compute_green_table(1, 0.5, 4, 64).unwrap();
        let r0 = t.value(&[0]).unwrap();
        let r1 = t.value(&[1]).unwrap();
        assert!(r0 > r1 && r1 > 0.0);
        assert_eq!(t.value(&[3]), t.value(&[-3]));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(compute_green_table(2, 2.0, 4, 64), Err(Error::Validation(_))));
        assert!(matches!(compute_green_table(2, 1.0, 4, 30), Err(Error::Validation(_))));
        assert!(matches!(compute_green_table(2, 1.0, 20, 64), Err(Error::Validation(_))));
    }
}
