//! First-order finite-volume solver for the 1-D Euler equations with a
//! passively advected transverse velocity.
//!
//! Fluxes come from Roe's linearized Riemann solver with Harten's entropy
//! fix. The solver shares no code with the characteristic solver in
//! [`crate::moc`] and serves as an independent reference.

use crate::error::{Error, Result};

/// Conserved variables `(ρ, ρu, ρw, E)`.
type Conserved = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells.
    Transmissive,
}

/// Cell state in primitive form: density, normal and transverse velocity, pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub rho: f64,
    pub u: f64,
    pub w: f64,
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct FvSolver {
    gamma: f64,
    x0: f64,
    dx: f64,
    boundary: Boundary,
    state: Vec<Conserved>,
    t: f64,
}

impl FvSolver {
    /// Cells of width `dx` with centres at `x0 + (i + ½)·dx`.
    pub fn new(gamma: f64, x0: f64, dx: f64, cells: &[Cell], boundary: Boundary) -> Result<Self> {
        if cells.len() < 3 {
            return Err(Error::InvalidInput("finite-volume grid needs at least 3 cells".into()));
        }
        if !(dx > 0.0) || !(gamma > 1.0) {
            return Err(Error::InvalidInput(format!("bad dx={dx} or gamma={gamma}")));
        }
        let mut state = Vec::with_capacity(cells.len());
        for c in cells {
            if !(c.rho > 0.0) || !(c.p > 0.0) {
                return Err(Error::NonPhysicalState(format!("rho={}, p={}", c.rho, c.p)));
            }
            state.push(to_conserved(gamma, c));
        }
        Ok(Self {
            gamma,
            x0,
            dx,
            boundary,
            state,
            t: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn centres(&self) -> Vec<f64> {
        (0..self.state.len())
            .map(|i| self.x0 + (i as f64 + 0.5) * self.dx)
            .collect()
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.state.iter().map(|q| to_primitive(self.gamma, q)).collect()
    }

    /// Largest stable step for the given CFL number.
    pub fn stable_dt(&self, cfl: f64) -> f64 {
        let max_speed = self
            .cells()
            .iter()
            .map(|c| c.u.abs() + (self.gamma * c.p / c.rho).sqrt())
            .fold(0.0, f64::max);
        cfl * self.dx / max_speed
    }

    /// One forward-Euler step of size `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let n = self.state.len();
        let ghost = |i: isize| -> Conserved {
            let idx = match self.boundary {
                Boundary::Periodic => i.rem_euclid(n as isize) as usize,
                Boundary::Transmissive => i.clamp(0, n as isize - 1) as usize,
            };
            self.state[idx]
        };
        let fluxes: Vec<Conserved> = (0..=n as isize)
            .map(|face| roe_flux(self.gamma, &ghost(face - 1), &ghost(face)))
            .collect();
        let ratio = dt / self.dx;
        for (i, q) in self.state.iter_mut().enumerate() {
            for c in 0..4 {
                q[c] -= ratio * (fluxes[i + 1][c] - fluxes[i][c]);
            }
            let prim = to_primitive(self.gamma, q);
            if !(prim.rho > 0.0) || !(prim.p > 0.0) {
                return Err(Error::NonPhysicalState(format!(
                    "finite-volume cell {i} lost positivity at t={}",
                    self.t
                )));
            }
        }
        self.t += dt;
        Ok(())
    }

    /// Advances to exactly `t_end`, calling `observe` after every step.
    pub fn advance_to(&mut self, t_end: f64, cfl: f64, mut observe: impl FnMut(&Self)) -> Result<()> {
        while self.t < t_end - 1e-14 * t_end.abs().max(1.0) {
            let dt = self.stable_dt(cfl).min(t_end - self.t);
            self.step(dt)?;
            observe(self);
        }
        Ok(())
    }
}

fn to_conserved(gamma: f64, c: &Cell) -> Conserved {
    let kinetic = 0.5 * c.rho * (c.u * c.u + c.w * c.w);
    [c.rho, c.rho * c.u, c.rho * c.w, c.p / (gamma - 1.0) + kinetic]
}

fn to_primitive(gamma: f64, q: &Conserved) -> Cell {
    let rho = q[0];
    let u = q[1] / rho;
    let w = q[2] / rho;
    let p = (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + w * w));
    Cell { rho, u, w, p }
}

fn physical_flux(gamma: f64, q: &Conserved) -> Conserved {
    let c = to_primitive(gamma, q);
    [q[1], q[1] * c.u + c.p, q[2] * c.u, (q[3] + c.p) * c.u]
}

fn roe_flux(gamma: f64, ql: &Conserved, qr: &Conserved) -> Conserved {
    let l = to_primitive(gamma, ql);
    let r = to_primitive(gamma, qr);
    let hl = (ql[3] + l.p) / l.rho;
    let hr = (qr[3] + r.p) / r.rho;
    let (sl, sr) = (l.rho.sqrt(), r.rho.sqrt());
    let u = (sl * l.u + sr * r.u) / (sl + sr);
    let w = (sl * l.w + sr * r.w) / (sl + sr);
    let h = (sl * hl + sr * hr) / (sl + sr);
    let a = ((gamma - 1.0) * (h - 0.5 * (u * u + w * w))).sqrt();

    let d: Conserved = std::array::from_fn(|c| qr[c] - ql[c]);
    let shear = d[2] - w * d[0];
    let d_energy = d[3] - shear * w;
    let alpha2 = (gamma - 1.0) / (a * a) * (d[0] * (h - u * u) + u * d[1] - d_energy);
    let alpha1 = (d[0] * (u + a) - d[1] - a * alpha2) / (2.0 * a);
    let alpha4 = d[0] - alpha1 - alpha2;

    let fix = |lambda: f64| {
        let delta = 0.1 * a;
        if lambda.abs() < delta {
            (lambda * lambda + delta * delta) / (2.0 * delta)
        } else {
            lambda.abs()
        }
    };
    let waves: [(f64, f64, Conserved); 4] = [
        (fix(u - a), alpha1, [1.0, u - a, w, h - u * a]),
        (u.abs(), alpha2, [1.0, u, w, 0.5 * (u * u + w * w)]),
        (u.abs(), shear, [0.0, 0.0, 1.0, w]),
        (fix(u + a), alpha4, [1.0, u + a, w, h + u * a]),
    ];
    let fl = physical_flux(gamma, ql);
    let fr = physical_flux(gamma, qr);
    std::array::from_fn(|c| {
        let dissipation: f64 = waves.iter().map(|(s, al, k)| s * al * k[c]).sum();
        0.5 * (fl[c] + fr[c]) - 0.5 * dissipation
    })
}
