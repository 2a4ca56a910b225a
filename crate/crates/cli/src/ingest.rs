//! CSV and manifest ingestion.
//!
//! Field files carry the header `x,y,rho,u,v,p`, one row per grid node; the
//! grid is inferred from the unique sorted coordinates. Initial-data files for
//! the characteristic solver carry `x,rho,u,p` with strictly increasing `x`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use vortigen::evoform::ForceModel;
use vortigen::fields::{FieldSet, Snapshot, StructuredGrid2D};
use vortigen::moc::CharNode;
use vortigen::{GasModel, PrimitiveState};

use crate::error::CliError;

/// Relative tolerance on coordinate spacing.
pub const GRID_TOLERANCE: f64 = 1e-9;

const FIELD_HEADER: [&str; 6] = ["x", "y", "rho", "u", "v", "p"];
const INIT_HEADER: [&str; 4] = ["x", "rho", "u", "p"];
const FORCE_HEADER: [&str; 4] = ["x", "y", "fx", "fy"];

fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| CliError::parse(path, e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::parse(
            path,
            format!("header must be exactly `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e.to_string()))?;
        let row = record
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| CliError::parse(path, format!("row {}: expected {} finite numbers", line + 2, header.len())))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(path, "no data rows"));
    }
    Ok(rows)
}

/// Uniform axis `(origin, spacing, count)` through the given coordinates.
fn infer_axis(path: &Path, name: &str, coords: &[f64]) -> Result<(f64, f64, usize), CliError> {
    let mut sorted = coords.to_vec();
    sorted.sort_by(f64::total_cmp);
    let extent = sorted[sorted.len() - 1] - sorted[0];
    let mut unique: Vec<f64> = Vec::new();
    for v in sorted {
        match unique.last() {
            Some(last) if v - last <= GRID_TOLERANCE * extent => {}
            _ => unique.push(v),
        }
    }
    let n = unique.len();
    if n < 2 {
        return Err(CliError::grid(path, format!("{name} axis needs at least 2 distinct values")));
    }
    let h = extent / (n - 1) as f64;
    for (i, v) in unique.iter().enumerate() {
        if (v - (unique[0] + i as f64 * h)).abs() > GRID_TOLERANCE * h {
            return Err(CliError::grid(
                path,
                format!("{name} spacing is irregular at {name}={v} (expected uniform spacing {h})"),
            ));
        }
    }
    Ok((unique[0], h, n))
}

fn axis_index(v: f64, origin: f64, h: f64) -> usize {
    ((v - origin) / h).round() as usize
}

/// One field file as a grid plus node arrays `[rho, u, v, p]`.
fn read_field_file(path: &Path) -> Result<(StructuredGrid2D, [Vec<f64>; 4]), CliError> {
    let rows = read_table(path, &FIELD_HEADER)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (x0, hx, nx) = infer_axis(path, "x", &xs)?;
    let (y0, hy, ny) = infer_axis(path, "y", &ys)?;
    let grid = StructuredGrid2D::new(nx, ny, x0, y0, hx, hy)?;
    if rows.len() != grid.len() {
        return Err(CliError::grid(
            path,
            format!("{}x{} grid needs {} nodes, file has {} rows", nx, ny, grid.len(), rows.len()),
        ));
    }
    let mut arrays = [vec![f64::NAN; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    let mut seen = vec![false; grid.len()];
    for row in &rows {
        let k = grid.index(axis_index(row[0], x0, hx), axis_index(row[1], y0, hy));
        if std::mem::replace(&mut seen[k], true) {
            return Err(CliError::grid(path, format!("node ({}, {}) appears twice", row[0], row[1])));
        }
        for (a, v) in arrays.iter_mut().zip(&row[2..]) {
            a[k] = *v;
        }
    }
    // equal counts and no duplicates mean every node is present
    Ok((grid, arrays))
}

fn same_grid(a: &StructuredGrid2D, b: &StructuredGrid2D) -> bool {
    let close = |p: f64, q: f64, h: f64| (p - q).abs() <= GRID_TOLERANCE * h;
    a.nx == b.nx
        && a.ny == b.ny
        && close(a.x0, b.x0, a.hx)
        && close(a.y0, b.y0, a.hy)
        && close(a.hx, b.hx, a.hx)
        && close(a.hy, b.hy, a.hy)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub snapshots: Vec<ManifestEntry>,
    /// Index of the snapshot the field file represents.
    pub current: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub t: f64,
    pub file: PathBuf,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))?;
    if manifest.snapshots.is_empty() {
        return Err(CliError::parse(path, "manifest lists no snapshots"));
    }
    if manifest.snapshots.iter().any(|s| !s.t.is_finite()) {
        return Err(CliError::parse(path, "snapshot times must be finite"));
    }
    if manifest.snapshots.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(CliError::parse(path, "snapshot times must be strictly increasing"));
    }
    Ok(manifest)
}

/// Loads a field file; with a manifest, the listed snapshots form the time
/// series and the field file is the current snapshot.
///
/// The current snapshot is the manifest's `current` index, or else the entry
/// that names the same file as `path`.
pub fn load_fields(path: &Path, manifest: Option<&Path>) -> Result<FieldSet, CliError> {
    let (grid, [rho, u, v, p]) = read_field_file(path)?;
    let Some(mpath) = manifest else {
        return Ok(FieldSet::new(grid, rho, u, v, p)?);
    };
    let m = read_manifest(mpath)?;
    let files: Vec<PathBuf> = m.snapshots.iter().map(|s| resolve(mpath, &s.file)).collect();
    let current = match m.current {
        Some(c) if c < files.len() => c,
        Some(c) => {
            return Err(CliError::parse(mpath, format!("current index {c} out of range ({} snapshots)", files.len())));
        }
        None => {
            let own = fs::canonicalize(path).map_err(|e| CliError::read(path, e))?;
            files
                .iter()
                .position(|f| fs::canonicalize(f).is_ok_and(|c| c == own))
                .ok_or_else(|| CliError::parse(mpath, "manifest neither lists the field file nor gives `current`"))?
        }
    };
    let mut snapshots = Vec::with_capacity(files.len());
    for (entry, file) in m.snapshots.iter().zip(&files) {
        let (g, [rho, u, v, p]) = read_field_file(file)?;
        if !same_grid(&g, &grid) {
            return Err(CliError::grid(file, "snapshot grid differs from the field file's grid"));
        }
        snapshots.push(Snapshot { t: entry.t, rho, u, v, p });
    }
    Ok(FieldSet::from_snapshots(grid, snapshots, current)?)
}

/// Tabulated force (`x,y,fx,fy`) on the field grid.
pub fn load_force(path: &Path, grid: &StructuredGrid2D) -> Result<ForceModel, CliError> {
    let rows = read_table(path, &FORCE_HEADER)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (x0, hx, nx) = infer_axis(path, "x", &xs)?;
    let (y0, hy, ny) = infer_axis(path, "y", &ys)?;
    let own = StructuredGrid2D::new(nx, ny, x0, y0, hx, hy)?;
    if !same_grid(&own, grid) || rows.len() != grid.len() {
        return Err(CliError::grid(path, "force table must cover the field grid node for node"));
    }
    let mut fx = vec![0.0; grid.len()];
    let mut fy = vec![0.0; grid.len()];
    let mut seen = vec![false; grid.len()];
    for row in &rows {
        let k = grid.index(axis_index(row[0], x0, hx), axis_index(row[1], y0, hy));
        if std::mem::replace(&mut seen[k], true) {
            return Err(CliError::grid(path, format!("node ({}, {}) appears twice", row[0], row[1])));
        }
        fx[k] = row[2];
        fy[k] = row[3];
    }
    Ok(ForceModel::Tabulated { fx, fy })
}

/// Initial data on the line `t = 0`.
pub fn load_initial(path: &Path, m: &GasModel) -> Result<Vec<CharNode>, CliError> {
    let rows = read_table(path, &INIT_HEADER)?;
    if rows.len() < 2 {
        return Err(CliError::parse(path, "initial data needs at least 2 rows"));
    }
    if rows.windows(2).any(|w| !(w[1][0] > w[0][0])) {
        return Err(CliError::parse(path, "x must be strictly increasing"));
    }
    rows.iter()
        .map(|r| Ok(CharNode::from_primitive(r[0], 0.0, &PrimitiveState::one_d(r[1], r[2], r[3]), m)?))
        .collect()
}
