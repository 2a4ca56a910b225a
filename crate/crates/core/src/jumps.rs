//! Weak discontinuities: continuous fields whose normal derivatives jump
//! across a particle path or a characteristic.
//!
//! Two relations are checked. Across a particle path with `p` and `U`
//! continuous to first order,
//!
//! ```text
//! [∂a/∂η] = a/(2γs) · [∂s/∂η]
//! ```
//!
//! which follows from `a² = γ p^((γ−1)/γ) s^(1/γ)`. Across a C± characteristic
//! of 1-D flow the entropy derivative is continuous and
//!
//! ```text
//! [∂u/∂η] = ±2/(γ−1) · [∂a/∂η]
//! ```
//!
//! Both require the entropy function `s = p/ρ^γ`; the specific-entropy
//! convention is refused.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{interpolate, FieldSet, Quantity, StructuredGrid2D};
use crate::thermo::{DerivedState, EntropyConvention, GasModel, PrimitiveState};

/// Default pass threshold for the contact relation.
pub const CONTACT_TOLERANCE: f64 = 1e-2;
/// Default pass threshold for the characteristic relation.
pub const CHAR_TOLERANCE: f64 = 2e-2;
/// Both sides below this count as zero.
const ABSOLUTE_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Trajectory,
    CharacteristicPlus,
    CharacteristicMinus,
}

/// A surface through a point with unit normal `normal`; the plus side is the
/// one the normal points into. For characteristics the grid's second axis is
/// time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub normal: [f64; 2],
}

impl Surface {
    pub fn new(kind: SurfaceKind, normal: [f64; 2]) -> Result<Self> {
        let norm = normal[0].hypot(normal[1]);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("surface normal must be a unit vector, |n| = {norm}")));
        }
        Ok(Self { kind, normal })
    }
}

/// Measured jumps `(plus side) − (minus side)` of the normal derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jumps {
    pub u: f64,
    pub v: f64,
    pub a: f64,
    pub s: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakDiscontinuity {
    pub surface: Surface,
    pub point: [f64; 2],
    pub jumps: Jumps,
    /// Sound speed and entropy function at the point
    pub a: f64,
    pub s: f64,
    pub grid_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    ContactEq,
    CharEq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpCheckReport {
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// Worst of the relation's relative error and the side-condition errors
    pub rel_error: f64,
    pub passed: bool,
    pub grid_h: f64,
}

fn require_entropy_function(m: &GasModel) -> Result<()> {
    if m.convention() != EntropyConvention::EntropyFunction {
        return Err(Error::ConventionMismatch(
            "jump relations need the entropy function s = p/rho^gamma".into(),
        ));
    }
    Ok(())
}

/// Uniform flow along x with a kink in `s(y)` at the middle node row:
/// `s = s₀ + Δ·max(0, y − y₀)`, with `p` and `u` uniform.
/// Returns the field and the kink height `y₀`.
pub fn synthesize_contact_field(
    base: &PrimitiveState,
    delta_s_slope: f64,
    grid: StructuredGrid2D,
    m: &GasModel,
) -> Result<(FieldSet, f64)> {
    require_entropy_function(m)?;
    base.validate()?;
    if base.u[1] != 0.0 {
        return Err(Error::InvalidInput("base velocity must be along x".into()));
    }
    let y0 = grid.y(grid.ny / 2);
    let g = m.gamma();
    let s0 = m.entropy(base.rho, base.p);
    let s = grid.sample(|_, y| s0 + delta_s_slope * (y - y0).max(0.0));
    if s.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NonPhysicalState("synthesized entropy is not positive".into()));
    }
    let rho = s.iter().map(|si| (base.p / si).powf(1.0 / g)).collect();
    let n = grid.len();
    let fs = FieldSet::new(grid, rho, vec![base.u[0]; n], vec![0.0; n], vec![base.p; n])?;
    Ok((fs, y0))
}

/// Jump of the normal derivative of a node field across `surface` at `point`.
///
/// When the normal is grid-aligned and the point is a node, node values and
/// three-point one-sided stencils are used, second-order on each side.
/// Otherwise three samples at spacing `δ = 2·max(h)` are interpolated on each
/// side along the normal and the one-sided derivative is extrapolated to the
/// surface from them; bilinear interpolation limits this path to first order.
pub fn measure_jump(field: &[f64], grid: &StructuredGrid2D, surface: &Surface, point: [f64; 2]) -> Result<f64> {
    grid.check(field)?;
    if !grid.contains(point) {
        return Err(Error::PointOutsideDomain {
            x: point[0],
            y: point[1],
        });
    }
    if let Some(j) = aligned_jump(field, grid, surface, point)? {
        return Ok(j);
    }
    let delta = 2.0 * grid.max_spacing();
    let n = surface.normal;
    let sample = |side: f64| -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let d = side * (k + 1) as f64 * delta;
            let q = [point[0] + d * n[0], point[1] + d * n[1]];
            *o = interpolate(field, grid, q)
                .map_err(|_| Error::TooCloseToBoundary(format!("normal samples leave the grid at {q:?}")))?;
        }
        Ok(out)
    };
    let plus = sample(1.0)?;
    let minus = sample(-1.0)?;
    let one_sided = |f: [f64; 3]| (-5.0 * f[0] + 8.0 * f[1] - 3.0 * f[2]) / (2.0 * delta);
    // minus-side derivative is taken along −n, hence the sign flip
    Ok(one_sided(plus) + one_sided(minus))
}

fn aligned_jump(field: &[f64], grid: &StructuredGrid2D, surface: &Surface, point: [f64; 2]) -> Result<Option<f64>> {
    let n = surface.normal;
    let (axis, sign) = if n[1].abs() < 1e-12 {
        (0, n[0].signum())
    } else if n[0].abs() < 1e-12 {
        (1, n[1].signum())
    } else {
        return Ok(None);
    };
    let fi = (point[0] - grid.x0) / grid.hx;
    let fj = (point[1] - grid.y0) / grid.hy;
    if (fi - fi.round()).abs() > 1e-9 || (fj - fj.round()).abs() > 1e-9 {
        return Ok(None);
    }
    let (i, j) = (fi.round() as isize, fj.round() as isize);
    let (len, h) = if axis == 0 {
        (grid.nx as isize, grid.hx)
    } else {
        (grid.ny as isize, grid.hy)
    };
    let c = if axis == 0 { i } else { j };
    if c < 2 || c > len - 3 {
        return Err(Error::TooCloseToBoundary(format!(
            "need two nodes on each side of {point:?}"
        )));
    }
    let at = |step: isize| {
        let s = sign as isize * step;
        if axis == 0 {
            field[grid.index((i + s) as usize, j as usize)]
        } else {
            field[grid.index(i as usize, (j + s) as usize)]
        }
    };
    let plus = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    let minus = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
    Ok(Some(plus - minus))
}

/// Measures the jumps of `u`, `v`, `a`, `s`, `p` of a field set.
pub fn measure_weak_discontinuity(
    fs: &FieldSet,
    surface: Surface,
    point: [f64; 2],
    m: &GasModel,
) -> Result<WeakDiscontinuity> {
    require_entropy_function(m)?;
    let grid = fs.grid();
    let rho = fs.field(Quantity::Rho);
    let p = fs.field(Quantity::P);
    let a: Vec<f64> = rho.iter().zip(p).map(|(r, p)| m.sound_speed(*r, *p)).collect();
    let s: Vec<f64> = rho.iter().zip(p).map(|(r, p)| m.entropy(*r, *p)).collect();
    let jump = |f: &[f64]| measure_jump(f, grid, &surface, point);
    Ok(WeakDiscontinuity {
        surface,
        point,
        jumps: Jumps {
            u: jump(fs.field(Quantity::U))?,
            v: jump(fs.field(Quantity::V))?,
            a: jump(&a)?,
            s: jump(&s)?,
            p: jump(p)?,
        },
        a: interpolate(&a, grid, point)?,
        s: interpolate(&s, grid, point)?,
        grid_h: grid.max_spacing(),
    })
}

fn report(relation: Relation, lhs: f64, rhs: f64, side_errors: &[f64], tol: f64, grid_h: f64) -> JumpCheckReport {
    let scale = lhs.abs().max(rhs.abs());
    let main = if scale <= ABSOLUTE_ZERO {
        0.0
    } else {
        (lhs - rhs).abs() / scale.max(1e-300)
    };
    // side-condition jumps are compared with the relation's own scale
    let sides = side_errors
        .iter()
        .map(|e| {
            if *e <= ABSOLUTE_ZERO {
                0.0
            } else if scale <= ABSOLUTE_ZERO {
                f64::INFINITY
            } else {
                e / scale
            }
        })
        .fold(0.0, f64::max);
    let rel_error = main.max(sides);
    JumpCheckReport {
        relation,
        lhs,
        rhs,
        rel_error,
        passed: rel_error <= tol,
        grid_h,
    }
}

/// `[∂a/∂η] = [∂s/∂η]·a/(2γs)` across a particle path, with `[∂u/∂η]`,
/// `[∂v/∂η]` and `[∂p/∂η]/(ρa)` required to vanish on the same scale.
pub fn contact_jump_check(wd: &WeakDiscontinuity, state: &DerivedState, m: &GasModel, tol: f64) -> Result<JumpCheckReport> {
    require_entropy_function(m)?;
    if wd.surface.kind != SurfaceKind::Trajectory {
        return Err(Error::WrongSurfaceKind(format!(
            "contact relation needs a trajectory, got {:?}",
            wd.surface.kind
        )));
    }
    let (a, s) = (state.sound_speed, state.entropy);
    let lhs = wd.jumps.a;
    let rhs = wd.jumps.s * a / (2.0 * m.gamma() * s);
    let rho_a = m.density_from_sound_speed(a, s) * a;
    let sides = [wd.jumps.u.abs(), wd.jumps.v.abs(), wd.jumps.p.abs() / rho_a];
    Ok(report(Relation::ContactEq, lhs, rhs, &sides, tol, wd.grid_h))
}

/// `[∂u/∂η] = ±2/(γ−1)·[∂a/∂η]` across a C± characteristic, with
/// `[∂s/∂η]·a/(γ(γ−1)s)` required to vanish on the same scale.
pub fn char_jump_check(wd: &WeakDiscontinuity, m: &GasModel, tol: f64) -> Result<JumpCheckReport> {
    require_entropy_function(m)?;
    let sign = match wd.surface.kind {
        SurfaceKind::CharacteristicPlus => 1.0,
        SurfaceKind::CharacteristicMinus => -1.0,
        SurfaceKind::Trajectory => {
            return Err(Error::WrongSurfaceKind(
                "characteristic relation needs a C+ or C- surface".into(),
            ))
        }
    };
    let g = m.gamma();
    let lhs = wd.jumps.u;
    let rhs = sign * 2.0 / (g - 1.0) * wd.jumps.a;
    let sides = [wd.jumps.s.abs() * wd.a / (g * (g - 1.0) * wd.s)];
    Ok(report(Relation::CharEq, lhs, rhs, &sides, tol, wd.grid_h))
}

/// `det(λI − A)/a³` for the quasilinear 1-D system in `(u, a, s)` at slope
/// `λ`, equal to `(λ−u)((λ−u)² − a²)/a³`; it vanishes exactly on the three
/// characteristic slopes.
pub fn consistency_determinant(q: &PrimitiveState, slope: f64, m: &GasModel) -> Result<f64> {
    q.validate()?;
    let g = m.gamma();
    let a = m.sound_speed(q.rho, q.p);
    let s = q.p / q.rho.powf(g);
    let u = q.u[0];
    let coeff = [
        [u, 2.0 * a / (g - 1.0), -a * a / (g * (g - 1.0) * s)],
        [0.5 * (g - 1.0) * a, u, 0.0],
        [0.0, 0.0, u],
    ];
    let mut mtx = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            mtx[r][c] = if r == c { slope } else { 0.0 } - coeff[r][c];
        }
    }
    let det = mtx[0][0] * (mtx[1][1] * mtx[2][2] - mtx[1][2] * mtx[2][1])
        - mtx[0][1] * (mtx[1][0] * mtx[2][2] - mtx[1][2] * mtx[2][0])
        + mtx[0][2] * (mtx[1][0] * mtx[2][1] - mtx[1][1] * mtx[2][0]);
    Ok(det / (a * a * a))
}
