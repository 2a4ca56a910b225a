//! Scenario pipeline: fields → trajectories → form coefficients → commutator
//! → classification, plus the characteristic net for 1-D initial data.

use serde::{Deserialize, Serialize};
use vortigen::evoform::{
    commutator, crocco_normal_coefficient, default_equilibrium_tolerance, lagrange_criterion, viscous_a1,
    classify_regime, Commutator, FormCoefficients, LagrangeReport, Regime, Source,
};
use vortigen::fields::{frame_along, interpolate, trace_streamline, FieldSet, Quantity};
use vortigen::jumps::{
    char_jump_check, contact_jump_check, measure_weak_discontinuity, JumpCheckReport, Surface, SurfaceKind,
};
use vortigen::moc::{
    advance_net_with, detect_envelope_analytic, pseudostructure_residual, riemann_invariants, CharNet, CharNode,
    EnvelopeEvent, Family, MocOptions,
};
use vortigen::thermo::derive_state;
use vortigen::{GasModel, PrimitiveState};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::ingest::{load_fields, load_initial};
use crate::output::{to_json, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LocallyEquilibrium,
    Nonequilibrium,
}

impl Classification {
    pub fn from_max_k(max_k: f64, tolerance: f64) -> Self {
        if max_k <= tolerance {
            Classification::LocallyEquilibrium
        } else {
            Classification::Nonequilibrium
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceIntegral {
    pub source: Source,
    /// `∫|K_c| dξ¹` summed over trajectories.
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub seed: [f64; 2],
    pub samples: usize,
    pub length: f64,
    pub max_k: f64,
    pub regime: Regime,
    pub file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudostructureResiduals {
    pub cplus: f64,
    pub cminus: f64,
    pub c0: f64,
}

/// Envelope outcome of a characteristic net; also written as `envelope.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub gamma: f64,
    /// `None` when the net is advanced until it closes or breaks.
    pub t_end: Option<f64>,
    pub levels: usize,
    pub nodes: usize,
    pub t_max: f64,
    /// Detected from the chain-pair Jacobians of the net.
    pub envelope: Option<EnvelopeEvent>,
    /// `−1/min λ′` of the initial slopes (exact for straight characteristics).
    pub analytic_estimate: Option<EnvelopeEvent>,
    pub residuals: PseudostructureResiduals,
}

/// Whether the identical relation holds on the characteristic structure
/// while the commutator stays nonzero off it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Largest C± compatibility residual relative to `max|J±|`.
    pub characteristic_residual: Option<f64>,
    pub identical_on_pseudostructure: Option<bool>,
    pub envelope_detected: bool,
    /// `max|K| > tolerance` on the traced trajectories.
    pub nonidentical_off_pseudostructure: Option<bool>,
    pub traced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub lagrange: Option<LagrangeReport>,
    pub max_k: Option<f64>,
    pub tolerance: Option<f64>,
    pub classification: Option<Classification>,
    pub dominant: Option<Source>,
    pub attribution: Vec<SourceIntegral>,
    pub trajectories: Vec<TrajectorySummary>,
    pub characteristics: Option<EnvelopeReport>,
    pub envelope: Option<EnvelopeEvent>,
    pub jump_checks: Vec<JumpCheckReport>,
    pub transition: Transition,
}

impl RunReport {
    /// The classification follows from `max_k` and `tolerance` alone.
    pub fn is_consistent(&self) -> bool {
        match (self.max_k, self.tolerance, self.classification) {
            (Some(k), Some(tol), Some(c)) => Classification::from_max_k(k, tol) == c,
            (None, None, None) => true,
            _ => false,
        }
    }
}

/// A file to be written into the output directory.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct ScenarioOutput {
    pub report: RunReport,
    pub artifacts: Vec<Artifact>,
}

struct FieldDiagnostics {
    lagrange: LagrangeReport,
    max_k: f64,
    tolerance: f64,
    attribution: Vec<SourceIntegral>,
    trajectories: Vec<TrajectorySummary>,
    jump_checks: Vec<JumpCheckReport>,
}

fn default_seeds(fs: &FieldSet) -> Vec<[f64; 2]> {
    let g = fs.grid();
    let (lx, ly) = (g.x_max() - g.x0, g.y_max() - g.y0);
    [0.25, 0.5, 0.75].iter().map(|f| [g.x0 + 0.1 * lx, g.y0 + f * ly]).collect()
}

fn state_at(fs: &FieldSet, p: [f64; 2]) -> Result<PrimitiveState, CliError> {
    let g = fs.grid();
    let at = |q| interpolate(fs.field(q), g, p);
    Ok(PrimitiveState::new(at(Quantity::Rho)?, [at(Quantity::U)?, at(Quantity::V)?], at(Quantity::P)?))
}

fn trajectory_table(c: &Commutator, fc: &FormCoefficients, points: &[[f64; 2]]) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["xi1", "A1", "Anu", "K"];
    header.extend(Source::ALL.iter().map(|s| s.name()));
    header.extend(["x", "y"]);
    let mut t = Table::new(&header)?;
    for (i, point) in points.iter().enumerate().take(c.xi1.len()) {
        let mut row = vec![Cell::F(c.xi1[i]), Cell::F(fc.a1[i]), Cell::F(fc.a_nu[i]), Cell::F(c.k[i])];
        row.extend(Source::ALL.iter().map(|s| Cell::F(c.attribution.get(*s)[i])));
        row.extend([Cell::F(point[0]), Cell::F(point[1])]);
        t.row(&row)?;
    }
    t.into_bytes()
}

fn diagnose_fields(
    cfg: &ScenarioConfig,
    fs: FieldSet,
    m: &GasModel,
    artifacts: &mut Vec<Artifact>,
) -> Result<FieldDiagnostics, CliError> {
    let grid = *fs.grid();
    let fs = match cfg.mask(&grid) {
        Some(mask) => fs.with_mask(mask)?,
        None => fs,
    };
    let forces = cfg.force_model(&grid)?;
    let lagrange = lagrange_criterion(&fs, &forces, fs.has_time_series())?;
    let tolerance = match cfg.tolerances.equilibrium {
        Some(t) => t,
        None => default_equilibrium_tolerance(&fs, m)?,
    };
    let energy = match cfg.transport {
        Some(tm) => Some(viscous_a1(&fs, &tm, m, cfg.a1_variant.into())?),
        None => None,
    };
    let sign = cfg.crocco_sign.into();
    let seeds = if cfg.seeds.is_empty() { default_seeds(&fs) } else { cfg.seeds.clone() };
    let max_len = cfg
        .max_len
        .unwrap_or_else(|| (grid.x_max() - grid.x0).hypot(grid.y_max() - grid.y0));

    let mut max_k = 0.0_f64;
    let mut integrals = vec![0.0; Source::ALL.len()];
    let mut trajectories = Vec::with_capacity(seeds.len());
    for (idx, seed) in seeds.iter().enumerate() {
        let traj = trace_streamline(&fs, *seed, None, max_len)?;
        let frame = frame_along(&traj)?;
        let terms = crocco_normal_coefficient(&fs, &traj, &frame, &forces, m, sign, cfg.nonstationary)?;
        let fc = match &energy {
            Some(e) => FormCoefficients::viscous(&traj, &grid, terms, e.clone(), sign)?,
            None => FormCoefficients::inviscid(&traj, terms, sign),
        };
        let c = commutator(&fc, &traj, &frame, &grid)?;
        for (acc, s) in integrals.iter_mut().zip(Source::ALL) {
            *acc += c.integral(s);
        }
        max_k = max_k.max(c.max_abs());
        let file = format!("trajectory_{idx}.csv");
        artifacts.push(Artifact {
            name: file.clone(),
            bytes: trajectory_table(&c, &fc, traj.points())?,
        });
        trajectories.push(TrajectorySummary {
            seed: *seed,
            samples: traj.len(),
            length: traj.length(),
            max_k: c.max_abs(),
            regime: classify_regime(&state_at(&fs, *seed)?, m)?,
            file,
        });
    }

    let mut jump_checks = Vec::with_capacity(cfg.jump_checks.len());
    for probe in &cfg.jump_checks {
        let surface = Surface::new(probe.surface, probe.normal)?;
        let wd = measure_weak_discontinuity(&fs, surface, probe.point, m)?;
        let tol = cfg.tolerances.jump_rel_error;
        jump_checks.push(match probe.surface {
            SurfaceKind::Trajectory => {
                let state = derive_state(&state_at(&fs, probe.point)?, m)?;
                contact_jump_check(&wd, &state, m, tol)?
            }
            _ => char_jump_check(&wd, m, tol)?,
        });
    }

    Ok(FieldDiagnostics {
        lagrange,
        max_k,
        tolerance,
        attribution: Source::ALL
            .iter()
            .zip(integrals)
            .map(|(s, integral)| SourceIntegral { source: *s, integral })
            .collect(),
        trajectories,
        jump_checks,
    })
}

/// Net nodes level by level with their parents on the previous level.
pub fn net_table(net: &CharNet) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(&["level", "index", "t", "x", "u", "a", "s", "cplus_parent", "cminus_parent", "c0_weight"])?;
    for (k, level) in net.levels().iter().enumerate() {
        let links = net.links(k);
        for (i, n) in level.iter().enumerate() {
            let mut row = vec![
                Cell::I(k as i64),
                Cell::I(i as i64),
                Cell::F(n.t),
                Cell::F(n.x),
                Cell::F(n.u),
                Cell::F(n.a),
                Cell::F(n.s),
            ];
            match links.get(i) {
                Some(l) => row.extend([Cell::I(l.cplus as i64), Cell::I(l.cminus as i64), Cell::F(l.c0_weight)]),
                None => row.extend([Cell::S(String::new()), Cell::S(String::new()), Cell::S(String::new())]),
            }
            t.row(&row)?;
        }
    }
    t.into_bytes()
}

/// Earliest straight-characteristic crossing over both acoustic families.
pub fn analytic_envelope(initial: &[CharNode]) -> Result<Option<EnvelopeEvent>, CliError> {
    let x: Vec<f64> = initial.iter().map(|n| n.x).collect();
    let plus: Vec<f64> = initial.iter().map(|n| n.u + n.a).collect();
    let minus: Vec<f64> = initial.iter().map(|n| n.u - n.a).collect();
    let events = [
        detect_envelope_analytic(&x, &plus, Family::CPlus)?,
        detect_envelope_analytic(&x, &minus, Family::CMinus)?,
    ];
    Ok(events.into_iter().flatten().min_by(|a, b| a.t_star.total_cmp(&b.t_star)))
}

/// Advances the net and summarizes it; `t_end = None` runs until the net
/// closes or an envelope forms.
pub fn characteristics(
    initial: &[CharNode],
    t_end: Option<f64>,
    m: &GasModel,
    corrector: f64,
) -> Result<(CharNet, EnvelopeReport), CliError> {
    let opts = MocOptions {
        tolerance: corrector,
        ..MocOptions::default()
    };
    let net = advance_net_with(initial, t_end.unwrap_or(f64::INFINITY), m, opts)?;
    let report = EnvelopeReport {
        gamma: m.gamma(),
        t_end,
        levels: net.levels().len(),
        nodes: net.nodes().count(),
        t_max: net.nodes().map(|n| n.t).fold(0.0, f64::max),
        envelope: net.envelope(),
        analytic_estimate: analytic_envelope(initial)?,
        residuals: PseudostructureResiduals {
            cplus: pseudostructure_residual(&net, Family::CPlus, m),
            cminus: pseudostructure_residual(&net, Family::CMinus, m),
            c0: pseudostructure_residual(&net, Family::C0, m),
        },
    };
    Ok((net, report))
}

/// Runs a validated scenario; nothing is written here.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, CliError> {
    cfg.validate()?;
    let m = cfg.gas.model()?;
    let mut artifacts = Vec::new();

    let fields = match &cfg.fields {
        Some(path) => {
            let fs = load_fields(path, cfg.manifest.as_deref())?;
            Some(diagnose_fields(cfg, fs, &m, &mut artifacts)?)
        }
        None => None,
    };

    let mut characteristic_residual = None;
    let chars = match &cfg.init {
        Some(path) => {
            let initial = load_initial(path, &m)?;
            let (net, env) = characteristics(&initial, cfg.t_end, &m, cfg.tolerances.corrector)?;
            let scale = initial
                .iter()
                .map(|n| {
                    let (jp, jm) = riemann_invariants(n, &m);
                    jp.abs().max(jm.abs())
                })
                .fold(0.0, f64::max);
            characteristic_residual = Some(env.residuals.cplus.max(env.residuals.cminus) / scale);
            artifacts.push(Artifact {
                name: "net.csv".into(),
                bytes: net_table(&net)?,
            });
            artifacts.push(Artifact {
                name: "envelope.json".into(),
                bytes: to_json(&env)?,
            });
            Some(env)
        }
        None => None,
    };

    let envelope = chars.as_ref().and_then(|c| c.envelope);
    let identical = characteristic_residual.map(|r| r <= cfg.tolerances.corrector);
    let nonidentical = fields.as_ref().map(|f| f.max_k > f.tolerance);
    let transition = Transition {
        characteristic_residual,
        identical_on_pseudostructure: identical,
        envelope_detected: envelope.is_some(),
        nonidentical_off_pseudostructure: nonidentical,
        traced: (identical == Some(true) || envelope.is_some()) && nonidentical == Some(true),
    };

    let report = match fields {
        Some(f) => {
            let classification = Classification::from_max_k(f.max_k, f.tolerance);
            let dominant = (classification == Classification::Nonequilibrium).then(|| {
                f.attribution
                    .iter()
                    .max_by(|a, b| a.integral.total_cmp(&b.integral))
                    .map(|s| s.source)
                    .unwrap_or(Source::Nonstationarity)
            });
            RunReport {
                scenario: cfg.id.clone(),
                lagrange: Some(f.lagrange),
                max_k: Some(f.max_k),
                tolerance: Some(f.tolerance),
                classification: Some(classification),
                dominant,
                attribution: f.attribution,
                trajectories: f.trajectories,
                characteristics: chars,
                envelope,
                jump_checks: f.jump_checks,
                transition,
            }
        }
        None => RunReport {
            scenario: cfg.id.clone(),
            lagrange: None,
            max_k: None,
            tolerance: None,
            classification: None,
            dominant: None,
            attribution: Vec::new(),
            trajectories: Vec::new(),
            characteristics: chars,
            envelope,
            jump_checks: Vec::new(),
            transition,
        },
    };
    artifacts.push(Artifact {
        name: "run_report.json".into(),
        bytes: to_json(&report)?,
    });
    Ok(ScenarioOutput { report, artifacts })
}
