//! Structured-grid flow fields and the operators built on them.
//!
//! Node `(i, j)` sits at `(x0 + i·hx, y0 + j·hy)` and is stored at flat index
//! `j·nx + i` (x runs fastest). Off-node values are obtained by bilinear
//! interpolation of node values.

mod ops;
mod trace;

pub use ops::{
    curl2d, directional_derivative, gradient, interpolate, time_derivative, VectorField,
};
pub use trace::{
    frame_along, trace_streamline, trace_streamline_with, AccompanyingFrame, StreamlineOptions,
    Trajectory,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{derive_state, DerivedState, GasModel, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuredGrid2D {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
}

/// Cell containing a point plus the local bilinear coordinates in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellLocation {
    pub i: usize,
    pub j: usize,
    pub fx: f64,
    pub fy: f64,
}

impl StructuredGrid2D {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3x3 nodes, got {nx}x{ny}")));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidGrid(format!("spacings must be positive, got ({hx}, {hy})")));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { nx, ny, x0, y0, hx, hy })
    }

    /// Grid spanning `[x_min, x_max] × [y_min, y_max]` with the given node counts.
    pub fn spanning(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 3x3 nodes, got {nx}x{ny}")));
        }
        let hx = (x.1 - x.0) / (nx - 1) as f64;
        let hy = (y.1 - y.0) / (ny - 1) as f64;
        Self::new(nx, ny, x.0, y.0, hx, hy)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn node(&self, k: usize) -> [f64; 2] {
        [self.x(k % self.nx), self.y(k / self.nx)]
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.ny - 1)
    }

    pub fn min_spacing(&self) -> f64 {
        self.hx.min(self.hy)
    }

    pub fn max_spacing(&self) -> f64 {
        self.hx.max(self.hy)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let ex = 1e-9 * self.hx;
        let ey = 1e-9 * self.hy;
        p[0] >= self.x0 - ex && p[0] <= self.x_max() + ex && p[1] >= self.y0 - ey && p[1] <= self.y_max() + ey
    }

    pub(crate) fn locate(&self, p: [f64; 2]) -> Option<CellLocation> {
        if !self.contains(p) || !p[0].is_finite() || !p[1].is_finite() {
            return None;
        }
        let sx = ((p[0] - self.x0) / self.hx).clamp(0.0, (self.nx - 1) as f64);
        let sy = ((p[1] - self.y0) / self.hy).clamp(0.0, (self.ny - 1) as f64);
        let i = (sx.floor() as usize).min(self.nx - 2);
        let j = (sy.floor() as usize).min(self.ny - 2);
        Some(CellLocation {
            i,
            j,
            fx: sx - i as f64,
            fy: sy - j as f64,
        })
    }

    pub(crate) fn check(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                actual: field.len(),
            });
        }
        Ok(())
    }

    /// Samples `f(x, y)` at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let [x, y] = self.node(k);
                f(x, y)
            })
            .collect()
    }
}

/// Which primitive node field to address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Rho,
    U,
    V,
    P,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::Rho, Quantity::U, Quantity::V, Quantity::P];
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Quantity::Rho => "rho",
            Quantity::U => "u",
            Quantity::V => "v",
            Quantity::P => "p",
        };
        f.write_str(name)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(Quantity::Rho),
            "u" => Ok(Quantity::U),
            "v" => Ok(Quantity::V),
            "p" => Ok(Quantity::P),
            other => Err(Error::InvalidInput(format!("unknown field `{other}`"))),
        }
    }
}

/// Node arrays of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
}

impl Snapshot {
    pub fn field(&self, q: Quantity) -> &[f64] {
        match q {
            Quantity::Rho => &self.rho,
            Quantity::U => &self.u,
            Quantity::V => &self.v,
            Quantity::P => &self.p,
        }
    }
}

/// Sampled flow state on a structured grid, optionally with a time series.
///
/// When snapshots are present, the primary arrays hold the snapshot selected
/// by [`FieldSet::current`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    grid: StructuredGrid2D,
    rho: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    p: Vec<f64>,
    snapshots: Vec<Snapshot>,
    current: usize,
    mask: Option<Vec<bool>>,
}

fn validate_arrays(grid: &StructuredGrid2D, rho: &[f64], u: &[f64], v: &[f64], p: &[f64]) -> Result<()> {
    for f in [rho, u, v, p] {
        grid.check(f)?;
    }
    for (k, (&r, &pk)) in rho.iter().zip(p).enumerate() {
        if !(r > 0.0) || !(pk > 0.0) || !r.is_finite() || !pk.is_finite() {
            let [x, y] = grid.node(k);
            return Err(Error::NonPhysicalState(format!(
                "rho={r}, p={pk} at node ({x}, {y})"
            )));
        }
    }
    if u.iter().chain(v).any(|c| !c.is_finite()) {
        return Err(Error::NonPhysicalState("velocity must be finite".into()));
    }
    Ok(())
}

impl FieldSet {
    pub fn new(grid: StructuredGrid2D, rho: Vec<f64>, u: Vec<f64>, v: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        validate_arrays(&grid, &rho, &u, &v, &p)?;
        Ok(Self {
            grid,
            rho,
            u,
            v,
            p,
            snapshots: Vec::new(),
            current: 0,
            mask: None,
        })
    }

    /// Builds a time-dependent field set whose primary arrays are `snapshots[current]`.
    pub fn from_snapshots(grid: StructuredGrid2D, snapshots: Vec<Snapshot>, current: usize) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InsufficientSnapshots { needed: 1, have: 0 });
        }
        if current >= snapshots.len() {
            return Err(Error::SnapshotIndex {
                index: current,
                len: snapshots.len(),
            });
        }
        for s in &snapshots {
            validate_arrays(&grid, &s.rho, &s.u, &s.v, &s.p)?;
        }
        if snapshots.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidInput("snapshot times must be strictly increasing".into()));
        }
        let base = &snapshots[current];
        Ok(Self {
            grid,
            rho: base.rho.clone(),
            u: base.u.clone(),
            v: base.v.clone(),
            p: base.p.clone(),
            snapshots,
            current,
            mask: None,
        })
    }

    /// Marks active (fluid) nodes; `false` nodes belong to bodies.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                actual: mask.len(),
            });
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn grid(&self) -> &StructuredGrid2D {
        &self.grid
    }

    pub fn field(&self, q: Quantity) -> &[f64] {
        match q {
            Quantity::Rho => &self.rho,
            Quantity::U => &self.u,
            Quantity::V => &self.v,
            Quantity::P => &self.p,
        }
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn has_time_series(&self) -> bool {
        self.snapshots.len() >= 2
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn state(&self, k: usize) -> PrimitiveState {
        PrimitiveState::new(self.rho[k], [self.u[k], self.v[k]], self.p[k])
    }

    pub fn derived(&self, m: &GasModel) -> Result<Vec<DerivedState>> {
        (0..self.grid.len()).map(|k| derive_state(&self.state(k), m)).collect()
    }

    /// Largest velocity magnitude over all nodes.
    pub fn max_speed(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| u.hypot(*v))
            .fold(0.0, f64::max)
    }
}
