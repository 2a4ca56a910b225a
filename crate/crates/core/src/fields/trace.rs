use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stencil;

use super::{interpolate, FieldSet};

/// Ordered samples along a flow line with cumulative arclength `ξ¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    points: Vec<[f64; 2]>,
    arclength: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from points, measuring arclength along the chords.
    pub fn from_points(points: Vec<[f64; 2]>) -> Result<Self> {
        let mut arclength = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        for (k, p) in points.iter().enumerate() {
            if k > 0 {
                let q = points[k - 1];
                acc += (p[0] - q[0]).hypot(p[1] - q[1]);
            }
            arclength.push(acc);
        }
        Self::new(points, arclength)
    }

    pub fn new(points: Vec<[f64; 2]>, arclength: Vec<f64>) -> Result<Self> {
        if points.len() != arclength.len() {
            return Err(Error::ShapeMismatch {
                expected: points.len(),
                actual: arclength.len(),
            });
        }
        if points.is_empty() || arclength[0] != 0.0 {
            return Err(Error::DegenerateTrajectory("arclength must start at 0".into()));
        }
        for k in 1..points.len() {
            if points[k] == points[k - 1] || !(arclength[k] > arclength[k - 1]) {
                return Err(Error::DegenerateTrajectory(format!(
                    "samples {} and {k} coincide or arclength does not increase",
                    k - 1
                )));
            }
        }
        Ok(Self { points, arclength })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.arclength.last().unwrap_or(&0.0)
    }
}

/// Unit tangent and left normal at each trajectory sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccompanyingFrame {
    pub tangent: Vec<[f64; 2]>,
    pub normal: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamlineOptions {
    /// Arclength step; defaults to `min(hx, hy) / 4`.
    pub step: Option<f64>,
    /// Relative stagnation threshold on `|U| / max|U|`.
    pub stagnation: f64,
}

impl Default for StreamlineOptions {
    fn default() -> Self {
        Self {
            step: None,
            stagnation: 1e-10,
        }
    }
}

/// Traces the instantaneous streamline through `seed` with default options
/// except for the step.
pub fn trace_streamline(fs: &FieldSet, seed: [f64; 2], step: Option<f64>, max_len: f64) -> Result<Trajectory> {
    trace_streamline_with(
        fs,
        seed,
        max_len,
        StreamlineOptions {
            step,
            ..Default::default()
        },
    )
}

/// Classical RK4 on `dx/dξ = U/|U|` with bilinear velocity interpolation.
///
/// Stops at `max_len`, before a step would leave the domain, or where `|U|`
/// drops below the stagnation threshold.
pub fn trace_streamline_with(
    fs: &FieldSet,
    seed: [f64; 2],
    max_len: f64,
    opts: StreamlineOptions,
) -> Result<Trajectory> {
    let grid = fs.grid();
    if !grid.contains(seed) {
        return Err(Error::SeedOutsideDomain { x: seed[0], y: seed[1] });
    }
    let step = opts.step.unwrap_or(grid.min_spacing() / 4.0);
    if !(step > 0.0) || !(max_len > 0.0) {
        return Err(Error::InvalidInput(format!("step {step} and max_len {max_len} must be positive")));
    }
    let (u, v) = (fs.field(super::Quantity::U), fs.field(super::Quantity::V));
    let threshold = opts.stagnation * fs.max_speed();
    // None when the point leaves the domain or stagnates
    let direction = |p: [f64; 2]| -> Option<[f64; 2]> {
        let a = interpolate(u, grid, p).ok()?;
        let b = interpolate(v, grid, p).ok()?;
        let speed = a.hypot(b);
        if speed <= threshold || speed == 0.0 {
            return None;
        }
        Some([a / speed, b / speed])
    };
    if direction(seed).is_none() {
        return Err(Error::StagnationAtSeed { x: seed[0], y: seed[1] });
    }

    let mut points = vec![seed];
    let mut arclength = vec![0.0];
    let mut pos = seed;
    let mut xi = 0.0;
    loop {
        let remaining = max_len - xi;
        if remaining <= 1e-12 * max_len {
            break;
        }
        let h = step.min(remaining);
        let Some(k1) = direction(pos) else { break };
        let Some(k2) = direction([pos[0] + 0.5 * h * k1[0], pos[1] + 0.5 * h * k1[1]]) else { break };
        let Some(k3) = direction([pos[0] + 0.5 * h * k2[0], pos[1] + 0.5 * h * k2[1]]) else { break };
        let Some(k4) = direction([pos[0] + h * k3[0], pos[1] + h * k3[1]]) else { break };
        let next = [
            pos[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            pos[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !grid.contains(next) || next == pos {
            break;
        }
        xi = if h == remaining { max_len } else { xi + h };
        pos = next;
        points.push(pos);
        arclength.push(xi);
        if direction(pos).is_none() {
            break;
        }
    }
    Trajectory::new(points, arclength)
}

/// Tangents from second-order arclength differencing, normals rotated +90°.
pub fn frame_along(traj: &Trajectory) -> Result<AccompanyingFrame> {
    if traj.len() < 2 {
        return Err(Error::DegenerateTrajectory(format!(
            "a frame needs at least 2 samples, got {}",
            traj.len()
        )));
    }
    let xs: Vec<f64> = traj.points().iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = traj.points().iter().map(|p| p[1]).collect();
    let dx = stencil::differentiate(traj.arclength(), &xs);
    let dy = stencil::differentiate(traj.arclength(), &ys);
    let mut tangent = Vec::with_capacity(traj.len());
    let mut normal = Vec::with_capacity(traj.len());
    for (a, b) in dx.into_iter().zip(dy) {
        let norm = a.hypot(b);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateTrajectory("zero tangent".into()));
        }
        let t = [a / norm, b / norm];
        tangent.push(t);
        normal.push([-t[1], t[0]]);
    }
    Ok(AccompanyingFrame { tangent, normal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::StructuredGrid2D;
    use std::f64::consts::PI;

    fn fieldset(g: StructuredGrid2D, u: impl Fn(f64, f64) -> f64, v: impl Fn(f64, f64) -> f64) -> FieldSet {
        FieldSet::new(g, vec![1.0; g.len()], g.sample(u), g.sample(v), vec![1.0; g.len()]).unwrap()
    }

    #[test]
    fn uniform_flow_reaches_exact_endpoint() {
        let g = StructuredGrid2D::spanning(21, 21, (-1.0, 2.0), (-1.0, 1.0)).unwrap();
        let fs = fieldset(g, |_, _| 1.0, |_, _| 0.0);
        let tr = trace_streamline(&fs, [0.0, 0.0], None, 1.0).unwrap();
        let end = *tr.points().last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-10 && end[1].abs() < 1e-10, "{end:?}");
        assert!((tr.length() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rigid_rotation_orbit_keeps_radius() {
        let g = StructuredGrid2D::spanning(41, 41, (-2.0, 2.0), (-2.0, 2.0)).unwrap();
        let fs = fieldset(g, |_, y| -y, |x, _| x);
        let tr = trace_streamline(&fs, [1.0, 0.0], Some(1e-3), 2.0 * PI).unwrap();
        let drift = tr
            .points()
            .iter()
            .map(|p| (p[0].hypot(p[1]) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-8, "drift {drift}");
        let end = *tr.points().last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-8 && end[1].abs() < 1e-8);
    }

    #[test]
    fn stagnation_seed_is_rejected() {
        let g = StructuredGrid2D::spanning(11, 11, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let fs = fieldset(g, |x, _| x, |_, y| -y);
        assert!(matches!(
            trace_streamline(&fs, [0.0, 0.0], None, 1.0),
            Err(Error::StagnationAtSeed { .. })
        ));
        assert!(matches!(
            trace_streamline(&fs, [3.0, 0.0], None, 1.0),
            Err(Error::SeedOutsideDomain { .. })
        ));
    }

    #[test]
    fn streamline_stops_at_boundary() {
        let g = StructuredGrid2D::spanning(11, 11, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let fs = fieldset(g, |_, _| 1.0, |_, _| 0.0);
        let tr = trace_streamline(&fs, [0.2, 0.5], None, 10.0).unwrap();
        let end = tr.points().last().unwrap();
        assert!(end[0] <= 1.0 + 1e-9 && end[0] > 0.97, "{end:?}");
    }

    #[test]
    fn straight_frame() {
        let tr = Trajectory::from_points((0..5).map(|i| [i as f64 * 0.3, 1.0]).collect()).unwrap();
        let f = frame_along(&tr).unwrap();
        for (t, n) in f.tangent.iter().zip(&f.normal) {
            assert!((t[0] - 1.0).abs() < 1e-15 && t[1].abs() < 1e-15);
            assert!(n[0].abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn circle_frame_normal_points_to_centre() {
        let n = 10000;
        let pts = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64 * 0.9;
                [th.cos(), th.sin()]
            })
            .collect();
        let tr = Trajectory::from_points(pts).unwrap();
        let f = frame_along(&tr).unwrap();
        for (p, nrm) in tr.points().iter().zip(&f.normal) {
            assert!((nrm[0] + p[0]).abs() < 1e-6 && (nrm[1] + p[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn two_point_frame() {
        let tr = Trajectory::from_points(vec![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let f = frame_along(&tr).unwrap();
        assert_eq!(f.tangent, vec![[0.6, 0.8]; 2]);
        assert_eq!(f.normal, vec![[-0.8, 0.6]; 2]);
        let single = Trajectory::from_points(vec![[0.0, 0.0]]).unwrap();
        assert!(matches!(frame_along(&single), Err(Error::DegenerateTrajectory(_))));
    }

    #[test]
    fn trajectory_rejects_repeated_points() {
        assert!(Trajectory::from_points(vec![[0.0, 0.0], [0.0, 0.0]]).is_err());
    }
}
