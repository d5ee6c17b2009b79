//! Text formats: Green's function and kernel caches, and field dumps.
//!
//! Cache files start with one header line of `key=value` pairs after a tag
//! (`# green ...` or `# kernel ...`), then a column line, then one row per
//! displacement in row-major order. Floats use Rust's shortest round-trip
//! formatting, so a table read back is bit-identical to the one written.
//!
//! Field dumps are `x1,...,xd,u` with one row per site in box order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lattice::{DisplacementGrid, Field, LatticeBox};
use crate::operators::{KernelModel, KernelTable};
use crate::spectral::{compute_green_table, GreenTable};

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), message: message.into() }
}

fn column_header(dim: usize, last: &str) -> String {
    let mut s: Vec<String> = (1..=dim).map(|j| format!("z{j}")).collect();
    s.push(last.into());
    s.join(",")
}

fn write_rows(out: &mut String, grid: &DisplacementGrid, values: &[f64]) {
    let mut z = vec![0i64; grid.dim()];
    for (i, v) in values.iter().enumerate() {
        grid.coords_into(i, &mut z);
        for c in &z {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{v:?}");
    }
}

fn parse_header(path: &Path, line: Option<&str>, tag: &str) -> Result<HashMap<String, String>> {
    let line = line.ok_or_else(|| format_err(path, "empty file"))?;
    let rest = line
        .strip_prefix(&format!("# {tag} "))
        .ok_or_else(|| format_err(path, format!("expected a '# {tag}' header")))?;
    rest.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| format_err(path, format!("bad header entry {kv:?}")))
        })
        .collect()
}

fn header_value<T: std::str::FromStr>(path: &Path, header: &HashMap<String, String>, key: &str) -> Result<T> {
    header
        .get(key)
        .ok_or_else(|| format_err(path, format!("header lacks {key}")))?
        .parse()
        .map_err(|_| format_err(path, format!("header value for {key} does not parse")))
}

fn read_rows<'a>(
    path: &Path,
    lines: impl Iterator<Item = &'a str>,
    grid: &DisplacementGrid,
) -> Result<Vec<f64>> {
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = 0;
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != grid.dim() + 1 {
            return Err(format_err(path, format!("row {} has {} columns", n + 3, parts.len())));
        }
        let z: Vec<i64> = parts[..grid.dim()]
            .iter()
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format_err(path, format!("row {} has a bad coordinate", n + 3)))?;
        let v: f64 = parts[grid.dim()]
            .trim()
            .parse()
            .map_err(|_| format_err(path, format!("row {} has a bad value", n + 3)))?;
        let i = grid
            .index_of(&z)
            .ok_or_else(|| format_err(path, format!("displacement {z:?} outside the table")))?;
        values[i] = v;
        seen += 1;
    }
    if seen != grid.len() || values.iter().any(|v| v.is_nan()) {
        return Err(format_err(path, format!("expected {} rows, found {seen}", grid.len())));
    }
    Ok(values)
}

/// Serializes a Green's function table.
pub fn green_to_string(table: &GreenTable) -> String {
    let mut out = format!(
        "# green d={} alpha={:?} L={} N={} K_alpha={:?} refinement_delta={:?}\n{}\n",
        table.dim(),
        table.alpha(),
        table.radius(),
        table.quad_points(),
        table.k_alpha(),
        table.refinement_delta(),
        column_header(table.dim(), "R")
    );
    write_rows(&mut out, table.grid(), table.values());
    out
}

pub fn write_green(path: &Path, table: &GreenTable) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, green_to_string(table))?;
    Ok(())
}

pub fn read_green(path: &Path) -> Result<GreenTable> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = parse_header(path, lines.next(), "green")?;
    let d: usize = header_value(path, &header, "d")?;
    let alpha: f64 = header_value(path, &header, "alpha")?;
    let l: usize = header_value(path, &header, "L")?;
    let n: usize = header_value(path, &header, "N")?;
    let k: f64 = header_value(path, &header, "K_alpha")?;
    let delta: f64 = header_value(path, &header, "refinement_delta")?;
    if lines.next() != Some(column_header(d, "R").as_str()) {
        return Err(format_err(path, "missing column line"));
    }
    let grid = DisplacementGrid::new(d, 2 * l)?;
    let values = read_rows(path, lines, &grid)?;
    GreenTable::from_parts(alpha, k, l, n, grid, values, delta)
}

/// Cache file name for `(d, alpha, L, N)`.
pub fn green_cache_path(dir: &Path, d: usize, alpha: f64, radius: usize, n: usize) -> PathBuf {
    dir.join(format!("green_d{d}_a{alpha:?}_L{radius}_N{n}.csv"))
}

/// Whether a `load_or_build_*` call found the table on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
}

/// Reads the cached table for `(d, alpha, L, N)` or builds and caches it.
pub fn load_or_build_green(
    dir: &Path,
    d: usize,
    alpha: f64,
    radius: usize,
    n: usize,
) -> Result<(GreenTable, CacheStatus)> {
    let path = green_cache_path(dir, d, alpha, radius, n);
    if path.exists() {
        let table = read_green(&path)?;
        if table.dim() == d && table.alpha() == alpha && table.radius() == radius && table.quad_points() == n {
            return Ok((table, CacheStatus::Hit));
        }
    }
    let table = compute_green_table(d, alpha, radius, n)?;
    write_green(&path, &table)?;
    Ok((table, CacheStatus::Built))
}

/// Cache file name for a kernel on the box of radius `radius`.
pub fn kernel_cache_path(dir: &Path, model: KernelModel, s: f64, lattice: &LatticeBox) -> PathBuf {
    dir.join(format!("kernel_d{}_{}_s{s:?}_L{}.csv", lattice.dim(), model.name(), lattice.radius()))
}

/// Reads the cached kernel table for the box or builds and caches it. The
/// cached values are used as stored, without re-checking bounds, so a
/// corrupted cache reaches the verification suite.
pub fn load_or_build_kernel(
    dir: &Path,
    model: KernelModel,
    s: f64,
    lattice: &LatticeBox,
) -> Result<(KernelTable, CacheStatus)> {
    let path = kernel_cache_path(dir, model, s, lattice);
    if path.exists() {
        let table = read_kernel(&path)?;
        if table.model() == model && table.s() == s && table.dim() == lattice.dim() && table.covers(lattice) {
            return Ok((table, CacheStatus::Hit));
        }
    }
    let table = KernelTable::build(model, s, lattice)?;
    write_kernel(&path, &table)?;
    Ok((table, CacheStatus::Built))
}

pub fn kernel_to_string(table: &KernelTable) -> String {
    let mut out = format!(
        "# kernel d={} model={} s={:?} reach={} N={} c_lo={:?} c_hi={:?}\n{}\n",
        table.dim(),
        table.model().name(),
        table.s(),
        table.grid().reach(),
        table.quad_points(),
        table.c_lo(),
        table.c_hi(),
        column_header(table.dim(), "W")
    );
    write_rows(&mut out, table.grid(), table.values());
    out
}

pub fn write_kernel(path: &Path, table: &KernelTable) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, kernel_to_string(table))?;
    Ok(())
}

pub fn read_kernel(path: &Path) -> Result<KernelTable> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = parse_header(path, lines.next(), "kernel")?;
    let d: usize = header_value(path, &header, "d")?;
    let model: KernelModel = header_value::<String>(path, &header, "model")?.parse()?;
    let s: f64 = header_value(path, &header, "s")?;
    let reach: usize = header_value(path, &header, "reach")?;
    let n: usize = header_value(path, &header, "N")?;
    let lo: f64 = header_value(path, &header, "c_lo")?;
    let hi: f64 = header_value(path, &header, "c_hi")?;
    if lines.next() != Some(column_header(d, "W").as_str()) {
        return Err(format_err(path, "missing column line"));
    }
    let grid = DisplacementGrid::new(d, reach)?;
    let values = read_rows(path, lines, &grid)?;
    KernelTable::from_parts(model, s, grid, values, (lo, hi), n)
}

/// `x1,...,xd,u` rows in box order.
pub fn field_to_string(u: &Field) -> String {
    let lattice = u.lattice();
    let mut cols: Vec<String> = (1..=lattice.dim()).map(|j| format!("x{j}")).collect();
    cols.push("u".into());
    let mut out = cols.join(",");
    out.push('\n');
    let mut x = vec![0i64; lattice.dim()];
    for (i, v) in u.values().iter().enumerate() {
        lattice.coords_into(i, &mut x);
        for c in &x {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{v:?}");
    }
    out
}

pub fn write_field(path: &Path, u: &Field) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, field_to_string(u))?;
    Ok(())
}

/// Reads a field dump onto `lattice`; sites missing from the file are zero.
pub fn read_field(path: &Path, lattice: LatticeBox) -> Result<Field> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    if header.split(',').count() != lattice.dim() + 1 {
        return Err(format_err(path, format!("header does not have {} columns", lattice.dim() + 1)));
    }
    let mut values = vec![0.0; lattice.len()];
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != lattice.dim() + 1 {
            return Err(format_err(path, format!("row {} has {} columns", n + 2, parts.len())));
        }
        let x: Vec<i64> = parts[..lattice.dim()]
            .iter()
            .map(|p| p.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format_err(path, format!("row {} has a bad coordinate", n + 2)))?;
        let v: f64 = parts[lattice.dim()]
            .parse()
            .map_err(|_| format_err(path, format!("row {} has a bad value", n + 2)))?;
        let i = lattice
            .index_of(&x)
            .ok_or_else(|| format_err(path, format!("site {x:?} outside the box")))?;
        values[i] = v;
    }
    Field::from_values(lattice, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let (a, status) = load_or_build_green(dir.path(), 2, 1.0, 2, 64).unwrap();
        assert_eq!(status, CacheStatus::Built);
        let (b, status) = load_or_build_green(dir.path(), 2, 1.0, 2, 64).unwrap();
        assert_eq!(status, CacheStatus::Hit);
        assert_eq!(a, b);
        let path = green_cache_path(dir.path(), 2, 1.0, 2, 64);
        assert_eq!(fs::read_to_string(&path).unwrap(), green_to_string(&b));
    }

    #[test]
    fn kernel_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let b = LatticeBox::new(1, 3).unwrap();
        let k = KernelTable::build(KernelModel::Spectral, 0.4, &b).unwrap();
        let path = dir.path().join("k.csv");
        write_kernel(&path, &k).unwrap();
        assert_eq!(read_kernel(&path).unwrap(), k);
        let (a, status) = load_or_build_kernel(dir.path(), KernelModel::PowerLaw, 0.4, &b).unwrap();
        assert_eq!(status, CacheStatus::Built);
        let (c, status) = load_or_build_kernel(dir.path(), KernelModel::PowerLaw, 0.4, &b).unwrap();
        assert_eq!(status, CacheStatus::Hit);
        assert_eq!(a, c);
    }

    #[test]
    fn field_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let b = LatticeBox::new(2, 2).unwrap();
        let u = Field::from_fn(b, |x| 0.1 * x[0] as f64 - (x[1] as f64).sin());
        let path = dir.path().join("u.csv");
        write_field(&path, &u).unwrap();
        assert_eq!(read_field(&path, b).unwrap(), u);
        fs::write(&path, "x1,x2,u\n0,9,1.0\n").unwrap();
        assert!(matches!(read_field(&path, b), Err(Error::Format { .. })));
        fs::write(&path, "# green d=1\n").unwrap();
        assert!(read_green(&path).is_err());
    }
}
