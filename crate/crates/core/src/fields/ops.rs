use crate::error::{Error, Result};
use crate::stencil;

use super::{FieldSet, Quantity, StructuredGrid2D};

/// Two node arrays holding the x and y components of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    /// Bilinearly interpolated vector at `p`.
    pub fn at(&self, grid: &StructuredGrid2D, p: [f64; 2]) -> Result<[f64; 2]> {
        Ok([interpolate(&self.x, grid, p)?, interpolate(&self.y, grid, p)?])
    }
}

/// Derivative along one grid line with second-order stencils, one-sided at
/// both ends. `at(k)` reads the k-th sample of the line.
fn line_derivative(n: usize, h: f64, at: impl Fn(usize) -> f64, k: usize) -> f64 {
    if k == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
    } else if k == n - 1 {
        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
    } else {
        (at(k + 1) - at(k - 1)) / (2.0 * h)
    }
}

pub fn gradient(field: &[f64], grid: &StructuredGrid2D) -> Result<VectorField> {
    grid.check(field)?;
    let (nx, ny) = (grid.nx, grid.ny);
    let mut gx = vec![0.0; grid.len()];
    let mut gy = vec![0.0; grid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            gx[k] = line_derivative(nx, grid.hx, |a| field[grid.index(a, j)], i);
            gy[k] = line_derivative(ny, grid.hy, |b| field[grid.index(i, b)], j);
        }
    }
    Ok(VectorField { x: gx, y: gy })
}

/// `∂v/∂x − ∂u/∂y` with the same stencils as [`gradient`].
pub fn curl2d(u: &[f64], v: &[f64], grid: &StructuredGrid2D) -> Result<Vec<f64>> {
    let gu = gradient(u, grid)?;
    let gv = gradient(v, grid)?;
    Ok(gv.x.iter().zip(&gu.y).map(|(dvdx, dudy)| dvdx - dudy).collect())
}

/// Time derivative of one primitive field at snapshot `index`: three-point
/// differences over the (possibly uneven) snapshot times, central in the
/// interior and one-sided at the ends. Two snapshots give the chord slope.
pub fn time_derivative(fs: &FieldSet, q: Quantity, index: usize) -> Result<Vec<f64>> {
    let snaps = fs.snapshots();
    if snaps.len() < 2 {
        return Err(Error::InsufficientSnapshots {
            needed: 2,
            have: snaps.len(),
        });
    }
    if index >= snaps.len() {
        return Err(Error::SnapshotIndex {
            index,
            len: snaps.len(),
        });
    }
    let n = snaps.len();
    let value = |s: usize, k: usize| snaps[s].field(q)[k];
    let out = (0..fs.grid().len())
        .map(|k| {
            if n == 2 {
                return (value(1, k) - value(0, k)) / (snaps[1].t - snaps[0].t);
            }
            let (a, b, c) = if index == 0 {
                (0, 1, 2)
            } else if index == n - 1 {
                (n - 3, n - 2, n - 1)
            } else {
                (index - 1, index, index + 1)
            };
            let t = [snaps[a].t, snaps[b].t, snaps[c].t];
            let f = [value(a, k), value(b, k), value(c, k)];
            if index == 0 {
                stencil::forward(t, f)
            } else if index == n - 1 {
                stencil::backward(t, f)
            } else {
                stencil::centered(t, f)
            }
        })
        .collect();
    Ok(out)
}

/// Bilinear interpolation of a node field.
pub fn interpolate(field: &[f64], grid: &StructuredGrid2D, p: [f64; 2]) -> Result<f64> {
    grid.check(field)?;
    let c = grid
        .locate(p)
        .ok_or(Error::PointOutsideDomain { x: p[0], y: p[1] })?;
    let f00 = field[grid.index(c.i, c.j)];
    let f10 = field[grid.index(c.i + 1, c.j)];
    let f01 = field[grid.index(c.i, c.j + 1)];
    let f11 = field[grid.index(c.i + 1, c.j + 1)];
    Ok((1.0 - c.fy) * ((1.0 - c.fx) * f00 + c.fx * f10) + c.fy * ((1.0 - c.fx) * f01 + c.fx * f11))
}

/// Node gradient interpolated to `point` and projected on `direction`.
pub fn directional_derivative(
    field: &[f64],
    grid: &StructuredGrid2D,
    point: [f64; 2],
    direction: [f64; 2],
) -> Result<f64> {
    let norm = direction[0].hypot(direction[1]);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("direction must be a unit vector, |d| = {norm}")));
    }
    if !grid.contains(point) {
        return Err(Error::PointOutsideDomain {
            x: point[0],
            y: point[1],
        });
    }
    let g = gradient(field, grid)?.at(grid, point)?;
    Ok(g[0] * direction[0] + g[1] * direction[1])
}
