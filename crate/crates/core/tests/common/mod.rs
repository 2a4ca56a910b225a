//! Reference solutions shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use vortigen::finite_volume::{Boundary, Cell, FvSolver};
use vortigen::moc::CharNode;

/// Right-running simple wave for γ = 1.4 with `J− = −5` and head speed
/// profile `λ(x₀) = 1 − 0.1 sin(2πx₀)`.
pub struct SimpleWave {
    pub amplitude: f64,
}

impl SimpleWave {
    pub fn lambda(&self, x0: f64) -> f64 {
        1.0 - self.amplitude * (2.0 * PI * x0).sin()
    }

    /// `(u, a)` carried by the C+ characteristic launched at `x0`.
    pub fn state(&self, x0: f64) -> (f64, f64) {
        let a = (self.lambda(x0) + 5.0) / 6.0;
        (-5.0 + 5.0 * a, a)
    }

    pub fn breaking_time(&self) -> f64 {
        1.0 / (2.0 * PI * self.amplitude)
    }

    pub fn initial(&self, x: (f64, f64), n: usize) -> Vec<CharNode> {
        (0..=n)
            .map(|i| {
                let x0 = x.0 + (x.1 - x.0) * i as f64 / n as f64;
                let (u, a) = self.state(x0);
                CharNode { x: x0, t: 0.0, u, a, s: 1.0 }
            })
            .collect()
    }

    /// Launch point of the straight C+ characteristic through `(x, t)`,
    /// found by bisection; valid before the breaking time, where
    /// `x₀ + λ(x₀)t` increases monotonically.
    pub fn foot(&self, x: f64, t: f64) -> f64 {
        let f = |x0: f64| x0 + self.lambda(x0) * t - x;
        let (mut lo, mut hi) = (x - 2.0 * t, x);
        assert!(f(lo) <= 0.0 && f(hi) >= 0.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn exact(&self, x: f64, t: f64) -> (f64, f64) {
        self.state(self.foot(x, t))
    }
}

/// Smooth periodic data with a 10% entropy-function variation and a weak
/// acoustic disturbance; returns `(s, u, p)`.
pub fn nonisentropic_profile(x: f64) -> (f64, f64, f64) {
    let s = 1.0 + 0.1 * (2.0 * PI * x).sin();
    let u = 0.05 * (2.0 * PI * x).cos();
    (s, u, 1.0)
}

pub fn nonisentropic_initial(gamma: f64, n: usize) -> Vec<CharNode> {
    (0..=n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let (s, u, p) = nonisentropic_profile(x);
            let rho = (p / s).powf(1.0 / gamma);
            CharNode { x, t: 0.0, u, a: (gamma * p / rho).sqrt(), s }
        })
        .collect()
}

/// Finite-volume history of the periodic nonisentropic data on `cells`
/// cells up to `t_end`; every step is kept.
pub struct FvHistory {
    gamma: f64,
    cells: usize,
    steps: Vec<(f64, Vec<Cell>)>,
}

impl FvHistory {
    pub fn run(gamma: f64, cells: usize, t_end: f64) -> Self {
        let init: Vec<Cell> = (0..cells)
            .map(|i| {
                let x = (i as f64 + 0.5) / cells as f64;
                let (s, u, p) = nonisentropic_profile(x);
                Cell { rho: (p / s).powf(1.0 / gamma), u, w: 0.0, p }
            })
            .collect();
        let mut fv = FvSolver::new(gamma, 0.0, 1.0 / cells as f64, &init, Boundary::Periodic).unwrap();
        let mut steps = vec![(0.0, fv.cells())];
        fv.advance_to(t_end, 0.5, |s| steps.push((s.time(), s.cells()))).unwrap();
        Self { gamma, cells, steps }
    }

    fn at_step(&self, k: usize, x: f64) -> [f64; 3] {
        let n = self.cells as isize;
        let pos = x * self.cells as f64 - 0.5;
        let i0 = pos.floor();
        let w = pos - i0;
        let value = |i: isize| {
            let c = self.steps[k].1[i.rem_euclid(n) as usize];
            [c.u, (self.gamma * c.p / c.rho).sqrt(), c.p / c.rho.powf(self.gamma)]
        };
        let (l, r) = (value(i0 as isize), value(i0 as isize + 1));
        std::array::from_fn(|c| l[c] + w * (r[c] - l[c]))
    }

    /// `(u, a, s)` at `(x, t)`, linear in space and time.
    pub fn sample(&self, x: f64, t: f64) -> [f64; 3] {
        let k = self.steps.partition_point(|s| s.0 < t).clamp(1, self.steps.len() - 1);
        let (t0, t1) = (self.steps[k - 1].0, self.steps[k].0);
        let w = if t1 > t0 { ((t - t0) / (t1 - t0)).clamp(0.0, 1.0) } else { 0.0 };
        let (l, r) = (self.at_step(k - 1, x), self.at_step(k, x));
        std::array::from_fn(|c| l[c] + w * (r[c] - l[c]))
    }
}

/// Observed convergence order between successive halvings.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}
