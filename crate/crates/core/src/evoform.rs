//! Coefficients of the evolutionary 1-form `ω = A₁ dξ¹ + A_ν dξ^ν`, its
//! commutator `K = ∂A_ν/∂ξ¹ − ∂A₁/∂ξ^ν`, and the equilibrium diagnostics
//! derived from them.
//!
//! `A_ν` comes from the momentum law in Crocco form projected on the left
//! normal of a trajectory; `A₁` comes from the energy law and vanishes for an
//! inviscid gas. Each additive physical piece is carried separately so the
//! commutator can be attributed to its sources.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    curl2d, gradient, time_derivative, AccompanyingFrame, FieldSet, Quantity, StructuredGrid2D,
    Trajectory, VectorField,
};
use crate::stencil;
use crate::thermo::{derive_state, GasModel, PrimitiveState};

/// Sign given to the `U × rot U` term.
///
/// `Consistent` (minus) agrees with the steady Euler equations; `PaperLiteral`
/// (plus) is kept as the literal variant for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CroccoSign {
    PaperLiteral,
    #[default]
    Consistent,
}

impl CroccoSign {
    fn factor(self) -> f64 {
        match self {
            CroccoSign::PaperLiteral => 1.0,
            CroccoSign::Consistent => -1.0,
        }
    }
}

/// Mass force per unit mass.
#[derive(Debug, Clone, PartialEq)]
pub enum ForceModel {
    None,
    /// Potential `Φ` (J/kg) at every node; the force is `−∇Φ`.
    Potential(Vec<f64>),
    /// Force components (N/kg) at every node.
    Tabulated { fx: Vec<f64>, fy: Vec<f64> },
}

impl ForceModel {
    /// Node force field, or `None` for a force-free model.
    pub fn components(&self, grid: &StructuredGrid2D) -> Result<Option<VectorField>> {
        match self {
            ForceModel::None => Ok(None),
            ForceModel::Potential(phi) => {
                let g = gradient(phi, grid)?;
                Ok(Some(VectorField {
                    x: g.x.iter().map(|v| -v).collect(),
                    y: g.y.iter().map(|v| -v).collect(),
                }))
            }
            ForceModel::Tabulated { fx, fy } => {
                grid.check(fx)?;
                grid.check(fy)?;
                Ok(Some(VectorField {
                    x: fx.clone(),
                    y: fy.clone(),
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportModel {
    /// Dynamic viscosity (Pa·s).
    pub mu: f64,
    /// Thermal conductivity (W/(m·K)).
    pub k: f64,
}

impl TransportModel {
    pub fn new(mu: f64, k: f64) -> Result<Self> {
        if !(mu >= 0.0) || !(k >= 0.0) {
            return Err(Error::InvalidInput(format!("mu={mu} and k={k} must be non-negative")));
        }
        Ok(Self { mu, k })
    }
}

/// Form of the two production terms of the viscous `A₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProductionVariant {
    /// `−q·∇T/(ρT)` and `τ:∇u/ρ`.
    #[default]
    PaperLiteral,
    /// `k|∇T|²/(ρT²)` and `τ:∇u/(ρT)`.
    StandardProduction,
}

/// Physical source of a commutator contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Nonstationarity,
    Vortical,
    Force,
    H0Gradient,
    HeatfluxDivergence,
    ConductionProduction,
    ViscousProduction,
}

impl Source {
    pub const ALL: [Source; 7] = [
        Source::Nonstationarity,
        Source::Vortical,
        Source::Force,
        Source::H0Gradient,
        Source::HeatfluxDivergence,
        Source::ConductionProduction,
        Source::ViscousProduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Source::Nonstationarity => "nonstationarity",
            Source::Vortical => "vortical",
            Source::Force => "force",
            Source::H0Gradient => "h0_gradient",
            Source::HeatfluxDivergence => "heatflux_divergence",
            Source::ConductionProduction => "conduction_production",
            Source::ViscousProduction => "viscous_production",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Additive pieces of `A_ν` sampled along a trajectory, each divided by `T`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalTerms {
    pub h0_gradient: Vec<f64>,
    pub vortical: Vec<f64>,
    pub force: Vec<f64>,
    pub nonstationarity: Vec<f64>,
}

impl NormalTerms {
    pub fn total(&self) -> Vec<f64> {
        (0..self.h0_gradient.len())
            .map(|i| self.h0_gradient[i] + self.vortical[i] + self.force[i] + self.nonstationarity[i])
            .collect()
    }

    fn pieces(&self) -> [(Source, &[f64]); 4] {
        [
            (Source::Nonstationarity, &self.nonstationarity),
            (Source::Vortical, &self.vortical),
            (Source::Force, &self.force),
            (Source::H0Gradient, &self.h0_gradient),
        ]
    }
}

/// Additive pieces of the viscous `A₁` as node fields.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTerms {
    pub heatflux_divergence: Vec<f64>,
    pub conduction_production: Vec<f64>,
    pub viscous_production: Vec<f64>,
}

impl EnergyTerms {
    pub fn total(&self) -> Vec<f64> {
        (0..self.heatflux_divergence.len())
            .map(|k| self.heatflux_divergence[k] + self.conduction_production[k] + self.viscous_production[k])
            .collect()
    }

    fn pieces(&self) -> [(Source, &[f64]); 3] {
        [
            (Source::HeatfluxDivergence, &self.heatflux_divergence),
            (Source::ConductionProduction, &self.conduction_production),
            (Source::ViscousProduction, &self.viscous_production),
        ]
    }
}

/// Node-wise primitive data shared by the coefficient evaluations.
struct NodeData {
    temperature: Vec<f64>,
    h0_grad: VectorField,
    vorticity: Vec<f64>,
    force: Option<VectorField>,
    dudt: Option<VectorField>,
}

impl NodeData {
    fn build(fs: &FieldSet, forces: &ForceModel, m: &GasModel, nonstationary: bool) -> Result<Self> {
        let grid = fs.grid();
        let derived = fs.derived(m)?;
        let h0: Vec<f64> = derived.iter().map(|d| d.total_enthalpy).collect();
        let dudt = if nonstationary {
            if !fs.has_time_series() {
                return Err(Error::MissingSnapshots(
                    "the nonstationary term needs at least 2 snapshots".into(),
                ));
            }
            Some(VectorField {
                x: time_derivative(fs, Quantity::U, fs.current())?,
                y: time_derivative(fs, Quantity::V, fs.current())?,
            })
        } else {
            None
        };
        Ok(Self {
            temperature: derived.iter().map(|d| d.temperature).collect(),
            h0_grad: gradient(&h0, grid)?,
            vorticity: curl2d(fs.field(Quantity::U), fs.field(Quantity::V), grid)?,
            force: forces.components(grid)?,
            dudt,
        })
    }

    /// `(h0_gradient, vortical, force, nonstationarity)` at a point for a normal.
    fn terms_at(&self, fs: &FieldSet, sign: CroccoSign, p: [f64; 2], n: [f64; 2]) -> Result<[f64; 4]> {
        let grid = fs.grid();
        let interp = |f: &[f64]| crate::fields::interpolate(f, grid, p);
        let dot = |v: [f64; 2]| v[0] * n[0] + v[1] * n[1];
        let t = interp(&self.temperature)?;
        let u = interp(fs.field(Quantity::U))?;
        let v = interp(fs.field(Quantity::V))?;
        let w = interp(&self.vorticity)?;
        let h0 = dot(self.h0_grad.at(grid, p)?);
        // U × (ω e_z) = (v ω, −u ω)
        let vortical = sign.factor() * dot([v * w, -u * w]);
        let force = match &self.force {
            Some(f) => -dot(f.at(grid, p)?),
            None => 0.0,
        };
        let unsteady = match &self.dudt {
            Some(d) => dot(d.at(grid, p)?),
            None => 0.0,
        };
        Ok([h0 / t, vortical / t, force / t, unsteady / t])
    }
}

/// `A_ν = (∂h₀/∂ξ^ν ± (U × rot U)·n − F·n + (∂U/∂t)·n) / T` along a trajectory.
///
/// With `nonstationary` set, `∂U/∂t` is taken from the snapshot series at the
/// current snapshot; otherwise that piece is zero.
pub fn crocco_normal_coefficient(
    fs: &FieldSet,
    traj: &Trajectory,
    frame: &AccompanyingFrame,
    forces: &ForceModel,
    m: &GasModel,
    sign: CroccoSign,
    nonstationary: bool,
) -> Result<NormalTerms> {
    if frame.normal.len() != traj.len() {
        return Err(Error::ShapeMismatch {
            expected: traj.len(),
            actual: frame.normal.len(),
        });
    }
    let data = NodeData::build(fs, forces, m, nonstationary)?;
    let mut out = NormalTerms::default();
    for (p, n) in traj.points().iter().zip(&frame.normal) {
        let [h0, vort, force, unsteady] = data.terms_at(fs, sign, *p, *n)?;
        out.h0_gradient.push(h0);
        out.vortical.push(vort);
        out.force.push(force);
        out.nonstationarity.push(unsteady);
    }
    Ok(out)
}

/// `A_ν` as a node field in the streamline frame (normal = `U/|U|` rotated
/// +90°). Nodes at rest get zero.
pub fn crocco_normal_field(
    fs: &FieldSet,
    forces: &ForceModel,
    m: &GasModel,
    sign: CroccoSign,
    nonstationary: bool,
) -> Result<Vec<f64>> {
    let data = NodeData::build(fs, forces, m, nonstationary)?;
    let grid = fs.grid();
    let (u, v) = (fs.field(Quantity::U), fs.field(Quantity::V));
    (0..grid.len())
        .map(|k| {
            let speed = u[k].hypot(v[k]);
            if speed == 0.0 {
                return Ok(0.0);
            }
            let n = [-v[k] / speed, u[k] / speed];
            let terms = data.terms_at(fs, sign, grid.node(k), n)?;
            Ok(terms.iter().sum())
        })
        .collect()
}

/// Energy-law coefficient of an inviscid gas: zero at every sample.
pub fn ideal_a1(traj: &Trajectory) -> Vec<f64> {
    vec![0.0; traj.len()]
}

/// Energy-law coefficient `A₁` of a viscous heat-conducting gas with a
/// Fourier heat flux and a Newtonian (Stokes) stress.
pub fn viscous_a1(fs: &FieldSet, tm: &TransportModel, m: &GasModel, variant: ProductionVariant) -> Result<EnergyTerms> {
    let grid = fs.grid();
    if grid.nx < 5 || grid.ny < 5 {
        return Err(Error::InvalidGrid(format!(
            "second derivatives need at least 5x5 nodes, got {}x{}",
            grid.nx, grid.ny
        )));
    }
    let rho = fs.field(Quantity::Rho);
    let temperature: Vec<f64> = (0..grid.len())
        .map(|k| m.temperature(rho[k], fs.field(Quantity::P)[k]))
        .collect();
    let grad_t = gradient(&temperature, grid)?;
    // −q/T = k ∇T / T
    let flux_x: Vec<f64> = (0..grid.len()).map(|k| tm.k * grad_t.x[k] / temperature[k]).collect();
    let flux_y: Vec<f64> = (0..grid.len()).map(|k| tm.k * grad_t.y[k] / temperature[k]).collect();
    let dfx = gradient(&flux_x, grid)?;
    let dfy = gradient(&flux_y, grid)?;
    let gu = gradient(fs.field(Quantity::U), grid)?;
    let gv = gradient(fs.field(Quantity::V), grid)?;

    let mut out = EnergyTerms {
        heatflux_divergence: Vec::with_capacity(grid.len()),
        conduction_production: Vec::with_capacity(grid.len()),
        viscous_production: Vec::with_capacity(grid.len()),
    };
    for k in 0..grid.len() {
        let (r, t) = (rho[k], temperature[k]);
        let grad_t2 = grad_t.x[k] * grad_t.x[k] + grad_t.y[k] * grad_t.y[k];
        let (a, b) = (gu.x[k], gv.y[k]);
        let shear = gu.y[k] + gv.x[k];
        // τ:∇u written as a sum of squares
        let dissipation = tm.mu * (2.0 / 3.0 * ((a - b) * (a - b) + a * a + b * b) + shear * shear);
        out.heatflux_divergence.push((dfx.x[k] + dfy.y[k]) / r);
        match variant {
            ProductionVariant::PaperLiteral => {
                out.conduction_production.push(tm.k * grad_t2 / (r * t));
                out.viscous_production.push(dissipation / r);
            }
            ProductionVariant::StandardProduction => {
                out.conduction_production.push(tm.k * grad_t2 / (r * t * t));
                out.viscous_production.push(dissipation / (r * t));
            }
        }
    }
    Ok(out)
}

/// `A₁` and `A_ν` along one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FormCoefficients {
    pub xi1: Vec<f64>,
    pub a1: Vec<f64>,
    pub a_nu: Vec<f64>,
    pub normal_terms: NormalTerms,
    /// Node fields of the viscous `A₁`; `None` for an inviscid gas.
    pub energy_terms: Option<EnergyTerms>,
    pub crocco_sign: CroccoSign,
}

impl FormCoefficients {
    pub fn inviscid(traj: &Trajectory, normal_terms: NormalTerms, crocco_sign: CroccoSign) -> Self {
        Self {
            xi1: traj.arclength().to_vec(),
            a1: ideal_a1(traj),
            a_nu: normal_terms.total(),
            normal_terms,
            energy_terms: None,
            crocco_sign,
        }
    }

    pub fn viscous(
        traj: &Trajectory,
        grid: &StructuredGrid2D,
        normal_terms: NormalTerms,
        energy_terms: EnergyTerms,
        crocco_sign: CroccoSign,
    ) -> Result<Self> {
        let total = energy_terms.total();
        let a1 = traj
            .points()
            .iter()
            .map(|p| crate::fields::interpolate(&total, grid, *p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            xi1: traj.arclength().to_vec(),
            a1,
            a_nu: normal_terms.total(),
            normal_terms,
            energy_terms: Some(energy_terms),
            crocco_sign,
        })
    }

    /// Prescribed `A_ν` samples attributed to `h0_gradient`, with `A₁ = 0`.
    pub fn prescribed(traj: &Trajectory, a_nu: Vec<f64>) -> Result<Self> {
        if a_nu.len() != traj.len() {
            return Err(Error::ShapeMismatch {
                expected: traj.len(),
                actual: a_nu.len(),
            });
        }
        let zeros = vec![0.0; a_nu.len()];
        let terms = NormalTerms {
            h0_gradient: a_nu,
            vortical: zeros.clone(),
            force: zeros.clone(),
            nonstationarity: zeros,
        };
        Ok(Self::inviscid(traj, terms, CroccoSign::Consistent))
    }
}

/// Per-source contributions to `K` along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    components: Vec<(Source, Vec<f64>)>,
}

impl Attribution {
    pub fn get(&self, source: Source) -> &[f64] {
        self.components
            .iter()
            .find(|(s, _)| *s == source)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Source, &[f64])> {
        self.components.iter().map(|(s, v)| (*s, v.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commutator {
    pub xi1: Vec<f64>,
    pub k: Vec<f64>,
    pub attribution: Attribution,
}

impl Commutator {
    pub fn max_abs(&self) -> f64 {
        self.k.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫|K_c| dξ¹` for one source (trapezoid rule).
    pub fn integral(&self, source: Source) -> f64 {
        let c = self.attribution.get(source);
        self.xi1
            .windows(2)
            .zip(c.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0].abs() + v[1].abs()))
            .sum()
    }

    /// Source with the largest integrated magnitude.
    pub fn dominant(&self) -> (Source, f64) {
        Source::ALL
            .iter()
            .map(|s| (*s, self.integral(*s)))
            .fold((Source::Nonstationarity, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Largest `|K − Σ components|`, relative to the sample's magnitude scale.
    pub fn attribution_residual(&self) -> f64 {
        (0..self.k.len())
            .map(|i| {
                let sum: f64 = self.attribution.iter().map(|(_, v)| v[i]).sum();
                let scale: f64 = self.attribution.iter().map(|(_, v)| v[i].abs()).sum::<f64>().max(self.k[i].abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (self.k[i] - sum).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `K = ∂A_ν/∂ξ¹ − ∂A₁/∂ξ^ν` with per-source attribution.
///
/// The along-trajectory derivative differences the samples over arclength;
/// the normal derivative of `A₁` uses the node gradient of its field.
pub fn commutator(fc: &FormCoefficients, traj: &Trajectory, frame: &AccompanyingFrame, grid: &StructuredGrid2D) -> Result<Commutator> {
    let n = traj.len();
    if fc.xi1.len() != n || fc.a_nu.len() != n || frame.normal.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            actual: fc.a_nu.len(),
        });
    }
    if n < 2 {
        return Err(Error::DegenerateTrajectory("commutator needs at least 2 samples".into()));
    }
    let along = |f: &[f64]| stencil::differentiate(&fc.xi1, f);
    let normal_derivative = |field: &[f64]| -> Result<Vec<f64>> {
        let g = gradient(field, grid)?;
        traj.points()
            .iter()
            .zip(&frame.normal)
            .map(|(p, nrm)| {
                let v = g.at(grid, *p)?;
                Ok(v[0] * nrm[0] + v[1] * nrm[1])
            })
            .collect()
    };

    let mut k = along(&fc.a_nu);
    let mut components = Vec::with_capacity(Source::ALL.len());
    for (source, piece) in fc.normal_terms.pieces() {
        components.push((source, along(piece)));
    }
    match &fc.energy_terms {
        Some(energy) => {
            let d_a1 = normal_derivative(&energy.total())?;
            for (ki, d) in k.iter_mut().zip(&d_a1) {
                *ki -= d;
            }
            for (source, piece) in energy.pieces() {
                let d = normal_derivative(piece)?;
                components.push((source, d.into_iter().map(|v| -v).collect()));
            }
        }
        None => {
            if fc.a1.iter().any(|v| *v != 0.0) {
                return Err(Error::InvalidInput(
                    "nonzero A1 samples need their node fields for the normal derivative".into(),
                ));
            }
            for source in [Source::HeatfluxDivergence, Source::ConductionProduction, Source::ViscousProduction] {
                components.push((source, vec![0.0; n]));
            }
        }
    }
    Ok(Commutator {
        xi1: fc.xi1.clone(),
        k,
        attribution: Attribution { components },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Equilibrium {
    LocallyEquilibrium,
    Nonequilibrium { dominant: Source, magnitude: f64 },
}

/// Locally equilibrium when `max|K| ≤ tol`; otherwise reports the dominant
/// source and `max|K|` as the intensity.
pub fn equilibrium_classifier(c: &Commutator, tol: f64) -> Result<Equilibrium> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let magnitude = c.max_abs();
    if magnitude <= tol {
        return Ok(Equilibrium::LocallyEquilibrium);
    }
    Ok(Equilibrium::Nonequilibrium {
        dominant: c.dominant().0,
        magnitude,
    })
}

/// Scale of the second-order stencil error in `A_ν` and `K` for a field set:
/// `(h/L)²` times `V²/(T L)` and `V²/(T L²)` respectively, with `h` the
/// largest spacing, `L` the smaller domain extent, `V² = max|U|² + max a²`
/// and `T` the smallest temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEstimate {
    pub a_nu: f64,
    pub k: f64,
}

pub fn truncation_estimate(fs: &FieldSet, m: &GasModel) -> Result<TruncationEstimate> {
    let grid = fs.grid();
    let derived = fs.derived(m)?;
    let t_min = derived.iter().map(|d| d.temperature).fold(f64::INFINITY, f64::min);
    let a_max = derived.iter().map(|d| d.sound_speed).fold(0.0, f64::max);
    let v2 = fs.max_speed().powi(2) + a_max * a_max;
    let extent = ((grid.nx - 1) as f64 * grid.hx).min((grid.ny - 1) as f64 * grid.hy);
    let ratio = (grid.max_spacing() / extent).powi(2);
    let a_nu = ratio * v2 / (t_min * extent);
    Ok(TruncationEstimate {
        a_nu,
        k: a_nu / extent,
    })
}

/// Ten times the commutator truncation estimate.
pub fn default_equilibrium_tolerance(fs: &FieldSet, m: &GasModel) -> Result<f64> {
    Ok(10.0 * truncation_estimate(fs, m)?.k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeReport {
    pub stationary: bool,
    pub potential: bool,
    pub simply_connected: bool,
    pub predicts_equilibrium: bool,
}

/// Relative size of `max|∂f/∂t|·Δt_total` below which a series counts as steady.
pub const STATIONARY_TOLERANCE: f64 = 1e-9;
/// Relative size of `max|rot F|·L / max|F|` below which a tabulated force counts as potential.
pub const POTENTIAL_TOLERANCE: f64 = 1e-3;

/// Checks the three Lagrange conditions: steady flow, potential forces and a
/// simply connected domain.
pub fn lagrange_criterion(fs: &FieldSet, forces: &ForceModel, has_time_series: bool) -> Result<LagrangeReport> {
    let grid = fs.grid();
    let stationary = if has_time_series && fs.has_time_series() {
        is_stationary(fs)?
    } else {
        true
    };
    let potential = match forces {
        ForceModel::None | ForceModel::Potential(_) => {
            forces.components(grid)?;
            true
        }
        ForceModel::Tabulated { fx, fy } => {
            let curl = curl2d(fx, fy, grid)?;
            let max_curl = curl.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let max_force = fx.iter().zip(fy).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)));
            let extent = ((grid.nx - 1) as f64 * grid.hx).min((grid.ny - 1) as f64 * grid.hy);
            max_curl * extent <= POTENTIAL_TOLERANCE * max_force || max_curl == 0.0
        }
    };
    let simply_connected = match fs.mask() {
        Some(mask) => mask_is_simply_connected(grid, mask),
        None => true,
    };
    Ok(LagrangeReport {
        stationary,
        potential,
        simply_connected,
        predicts_equilibrium: stationary && potential && simply_connected,
    })
}

fn is_stationary(fs: &FieldSet) -> Result<bool> {
    let snaps = fs.snapshots();
    let span = snaps[snaps.len() - 1].t - snaps[0].t;
    let max_abs = |f: &[f64]| f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let velocity_scale = snaps
        .iter()
        .flat_map(|s| {
            (0..s.rho.len()).map(move |k| s.u[k].hypot(s.v[k]).max((s.p[k] / s.rho[k]).sqrt()))
        })
        .fold(0.0, f64::max);
    for index in 0..snaps.len() {
        for q in Quantity::ALL {
            let scale = match q {
                Quantity::U | Quantity::V => velocity_scale,
                _ => snaps.iter().map(|s| max_abs(s.field(q))).fold(0.0, f64::max),
            };
            let rate = max_abs(&time_derivative(fs, q, index)?);
            if rate * span > STATIONARY_TOLERANCE * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Active nodes 4-connected and every inactive region reaching the outer
/// boundary (8-connected), i.e. no holes.
pub fn mask_is_simply_connected(grid: &StructuredGrid2D, mask: &[bool]) -> bool {
    let (nx, ny) = (grid.nx, grid.ny);
    let flood = |target: bool, seeds: Vec<usize>, diagonal: bool| -> Vec<bool> {
        let mut seen = vec![false; mask.len()];
        let mut stack = seeds;
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(k) = stack.pop() {
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            for di in -1..=1_isize {
                for dj in -1..=1_isize {
                    if (di == 0 && dj == 0) || (!diagonal && di != 0 && dj != 0) {
                        continue;
                    }
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
                        continue;
                    }
                    let n = b as usize * nx + a as usize;
                    if !seen[n] && mask[n] == target {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        seen
    };
    let Some(first) = mask.iter().position(|a| *a) else {
        return false;
    };
    let active = flood(true, vec![first], false);
    if mask.iter().zip(&active).any(|(m, a)| *m && !a) {
        return false;
    }
    let boundary: Vec<usize> = (0..mask.len())
        .filter(|&k| {
            let (i, j) = (k % nx, k / nx);
            !mask[k] && (i == 0 || j == 0 || i == nx - 1 || j == ny - 1)
        })
        .collect();
    let outside = flood(false, boundary, true);
    mask.iter().zip(&outside).all(|(m, o)| *m || *o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Supersonic: weak and shock waves form on characteristics and envelopes.
    Hyperbolic,
    /// Subsonic: structures of vortex type, transitions only at singular points.
    Elliptic,
    Sonic,
}

pub fn classify_regime(q: &PrimitiveState, m: &GasModel) -> Result<Regime> {
    let a = derive_state(q, m)?.sound_speed;
    let speed = q.speed();
    Ok(if (speed - a).abs() <= 1e-12 * a {
        Regime::Sonic
    } else if speed > a {
        Regime::Hyperbolic
    } else {
        Regime::Elliptic
    })
}
