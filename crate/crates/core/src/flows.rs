//! Analytic and reference flows used as diagnostic scenarios.
//!
//! Every constructor returns a [`FieldSet`] whose nodes are sampled from a
//! closed form (or, for the shock tube, from [`crate::finite_volume`]).

use crate::error::{Error, Result};
use crate::fields::{FieldSet, Snapshot, StructuredGrid2D};
use crate::finite_volume::{Boundary, Cell, FvSolver};
use crate::thermo::{GasModel, PrimitiveState};

pub fn uniform(grid: StructuredGrid2D, q: PrimitiveState) -> Result<FieldSet> {
    q.validate()?;
    let n = grid.len();
    FieldSet::new(grid, vec![q.rho; n], vec![q.u[0]; n], vec![q.u[1]; n], vec![q.p; n])
}

/// Parallel shear `u = σ y`, `v = 0` at uniform density and pressure.
pub fn shear(grid: StructuredGrid2D, sigma: f64, rho: f64, p: f64) -> Result<FieldSet> {
    let n = grid.len();
    FieldSet::new(grid, vec![rho; n], grid.sample(|_, y| sigma * y), vec![0.0; n], vec![p; n])
}

/// Steady homentropic planar source flow with mass flux `q` per unit depth
/// and per radian, total enthalpy `h0` and entropy function `s`.
///
/// The subsonic branch of `ρ(U)·U·r = q` with `U²/2 + a²/(γ−1) = h0` is
/// solved by bisection at every node.
#[derive(Debug, Clone, Copy)]
pub struct SourceFlow {
    pub q: f64,
    pub h0: f64,
    pub s: f64,
}

impl SourceFlow {
    /// Speed at radius `r`; fails when the radius is inside the sonic circle.
    pub fn speed(&self, m: &GasModel, r: f64) -> Result<f64> {
        let g = m.gamma();
        let flux = |speed: f64| {
            let a2 = (g - 1.0) * (self.h0 - 0.5 * speed * speed);
            let rho = (a2 / (g * self.s)).powf(1.0 / (g - 1.0));
            rho * speed * r
        };
        let sonic = (2.0 * (g - 1.0) * self.h0 / (g + 1.0)).sqrt();
        if flux(sonic) < self.q {
            return Err(Error::InvalidInput(format!("radius {r} lies inside the sonic circle")));
        }
        let (mut lo, mut hi) = (0.0, sonic);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if flux(mid) < self.q {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * sonic {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn state(&self, m: &GasModel, x: f64, y: f64) -> Result<PrimitiveState> {
        let r = x.hypot(y);
        let speed = self.speed(m, r)?;
        let g = m.gamma();
        let a2 = (g - 1.0) * (self.h0 - 0.5 * speed * speed);
        let rho = (a2 / (g * self.s)).powf(1.0 / (g - 1.0));
        let p = self.s * rho.powf(g);
        Ok(PrimitiveState::new(rho, [speed * x / r, speed * y / r], p))
    }

    pub fn sample(&self, grid: StructuredGrid2D, m: &GasModel) -> Result<FieldSet> {
        let states = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.node(k);
                self.state(m, x, y)
            })
            .collect::<Result<Vec<_>>>()?;
        FieldSet::new(
            grid,
            states.iter().map(|q| q.rho).collect(),
            states.iter().map(|q| q.u[0]).collect(),
            states.iter().map(|q| q.u[1]).collect(),
            states.iter().map(|q| q.p).collect(),
        )
    }
}

/// Plane Couette flow between walls `y = 0` (at rest) and `y = height`
/// (moving at `wall_speed`), both held at `t_wall`.
#[derive(Debug, Clone, Copy)]
pub struct Couette {
    pub wall_speed: f64,
    pub height: f64,
    pub t_wall: f64,
    pub p: f64,
    pub mu: f64,
    pub k: f64,
}

impl Couette {
    /// `T(y) = T₀ + (μU²/2k)·η(1−η)` with `η = y/h`.
    pub fn temperature(&self, y: f64) -> f64 {
        let eta = y / self.height;
        self.t_wall + self.mu * self.wall_speed.powi(2) / (2.0 * self.k) * eta * (1.0 - eta)
    }

    pub fn sample(&self, grid: StructuredGrid2D, m: &GasModel) -> Result<FieldSet> {
        let n = grid.len();
        let rho = grid.sample(|_, y| self.p / (m.r() * self.temperature(y)));
        let u = grid.sample(|_, y| self.wall_speed * y / self.height);
        FieldSet::new(grid, rho, u, vec![0.0; n], vec![self.p; n])
    }
}

/// Riemann problem along x with a uniform added velocity `(boost_u, cross_v)`.
///
/// The initial discontinuity sits at `x_diaphragm`, halfway between nodes
/// when chosen so. Snapshots are taken at `t = 0` and after each of the first
/// `steps` finite-volume steps, with cells centred on the grid nodes.
#[derive(Debug, Clone, Copy)]
pub struct ShockTube {
    pub left: (f64, f64),
    pub right: (f64, f64),
    pub x_diaphragm: f64,
    pub boost_u: f64,
    pub cross_v: f64,
    pub cfl: f64,
}

impl Default for ShockTube {
    fn default() -> Self {
        Self {
            left: (1.0, 1.0),
            right: (0.125, 0.1),
            x_diaphragm: 0.5,
            boost_u: 0.5,
            cross_v: 0.5,
            cfl: 0.5,
        }
    }
}

impl ShockTube {
    pub fn series(&self, grid: StructuredGrid2D, m: &GasModel, steps: usize) -> Result<FieldSet> {
        let cells: Vec<Cell> = (0..grid.nx)
            .map(|i| {
                let (rho, p) = if grid.x(i) < self.x_diaphragm { self.left } else { self.right };
                Cell {
                    rho,
                    u: self.boost_u,
                    w: self.cross_v,
                    p,
                }
            })
            .collect();
        let mut solver = FvSolver::new(m.gamma(), grid.x0 - 0.5 * grid.hx, grid.hx, &cells, Boundary::Transmissive)?;
        let dt = solver.stable_dt(self.cfl);
        let mut snapshots = vec![self.snapshot(&grid, &solver)];
        for _ in 0..steps {
            solver.step(dt)?;
            snapshots.push(self.snapshot(&grid, &solver));
        }
        FieldSet::from_snapshots(grid, snapshots, 0)
    }

    fn snapshot(&self, grid: &StructuredGrid2D, solver: &FvSolver) -> Snapshot {
        let cells = solver.cells();
        let column = |f: &dyn Fn(&Cell) -> f64| -> Vec<f64> {
            (0..grid.len()).map(|k| f(&cells[k % grid.nx])).collect()
        };
        Snapshot {
            t: solver.time(),
            rho: column(&|c| c.rho),
            u: column(&|c| c.u),
            v: column(&|c| c.w),
            p: column(&|c| c.p),
        }
    }
}

/// Centered expansion fan at the origin of the `(x, t)` plane, bounded on the
/// right by a uniform state `(u_r, a_r)` along the head `x = (u_r + a_r)t`
/// and on the left by the tail where `u` reaches `u_tail`. The fan carries
/// uniform `J− = u − 2a/(γ−1)` and entropy function `s`.
#[derive(Debug, Clone, Copy)]
pub struct CenteredFan {
    pub u_r: f64,
    pub a_r: f64,
    pub u_tail: f64,
    pub s: f64,
}

impl CenteredFan {
    pub fn head_slope(&self) -> f64 {
        self.u_r + self.a_r
    }

    /// `(u, a)` at `(x, t)`, `t > 0`.
    pub fn velocity_and_sound_speed(&self, m: &GasModel, x: f64, t: f64) -> (f64, f64) {
        let g = m.gamma();
        let c = 2.0 / (g - 1.0);
        let j_minus = self.u_r - c * self.a_r;
        let a_tail = (self.u_tail - j_minus) / c;
        let xi = x / t;
        if xi >= self.head_slope() {
            (self.u_r, self.a_r)
        } else if xi <= self.u_tail + a_tail {
            (self.u_tail, a_tail)
        } else {
            let a = (g - 1.0) / (g + 1.0) * (xi - j_minus);
            (j_minus + c * a, a)
        }
    }

    /// Samples the fan on a grid whose second coordinate is time; the
    /// transverse velocity is zero.
    pub fn sample(&self, grid: StructuredGrid2D, m: &GasModel) -> Result<FieldSet> {
        if !(grid.y0 > 0.0) {
            return Err(Error::InvalidGrid("fan grid must start at t > 0".into()));
        }
        let g = m.gamma();
        let states: Vec<(f64, f64)> = (0..grid.len())
            .map(|k| {
                let [x, t] = grid.node(k);
                self.velocity_and_sound_speed(m, x, t)
            })
            .collect();
        let rho: Vec<f64> = states
            .iter()
            .map(|&(_, a)| (a * a / (g * self.s)).powf(1.0 / (g - 1.0)))
            .collect();
        let p = rho.iter().map(|r| self.s * r.powf(g)).collect();
        let n = grid.len();
        FieldSet::new(grid, rho, states.iter().map(|s| s.0).collect(), vec![0.0; n], p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_flow_conserves_mass_and_total_enthalpy() {
        let m = GasModel::new(1.4, 1.0).unwrap();
        let src = SourceFlow { q: 0.3, h0: 3.5, s: 1.0 };
        for r in [1.0, 1.7, 2.5] {
            let st = src.state(&m, r, 0.0).unwrap();
            let d = crate::thermo::derive_state(&st, &m).unwrap();
            assert!((st.rho * st.u[0] * r - 0.3).abs() < 1e-12);
            assert!((d.total_enthalpy - 3.5).abs() < 1e-12);
            assert!((m.entropy(st.rho, st.p) - 1.0).abs() < 1e-12);
        }
        assert!(src.state(&m, 1e-3, 0.0).is_err());
    }

    #[test]
    fn couette_profile_has_wall_temperature() {
        let c = Couette { wall_speed: 1.0, height: 1.0, t_wall: 1.0, p: 1.0, mu: 0.1, k: 0.1 };
        assert_eq!(c.temperature(0.0), 1.0);
        assert_eq!(c.temperature(1.0), 1.0);
        assert!((c.temperature(0.5) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn centered_fan_is_continuous_with_uniform_minus_invariant() {
        let m = GasModel::new(1.4, 1.0).unwrap();
        let fan = CenteredFan { u_r: 0.0, a_r: 1.0, u_tail: -0.3, s: 1.0 };
        let (u, a) = fan.velocity_and_sound_speed(&m, 1.0 - 1e-12, 1.0);
        assert!(u.abs() < 1e-10 && (a - 1.0).abs() < 1e-10);
        for xi in [0.2, 0.5, 0.9, 1.3] {
            let (u, a) = fan.velocity_and_sound_speed(&m, xi, 1.0);
            assert!((u - 5.0 * a + 5.0).abs() < 1e-13);
        }
        let (u, a) = fan.velocity_and_sound_speed(&m, 0.7, 1.0);
        assert!((u + a - 0.7).abs() < 1e-13);
    }
}
