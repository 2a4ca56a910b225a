use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use vortigen::fields::StructuredGrid2D;
use vortigen::flows::CenteredFan;
use vortigen::jumps::{
    char_jump_check, contact_jump_check, measure_weak_discontinuity, synthesize_contact_field, JumpCheckReport,
    Surface, SurfaceKind, CHAR_TOLERANCE, CONTACT_TOLERANCE,
};
use vortigen::thermo::derive_state;
use vortigen::{GasModel, PrimitiveState};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::ingest::load_initial;
use crate::output::{fmt_f64, to_json, write_atomic, Cell, Table};
use crate::scenario::{characteristics, net_table, run_scenario, Classification, RunReport};

pub const OUT_ENV: &str = "VORTIGEN_OUT";

/// `VORTIGEN_OUT`, then the command-line flag, then the configuration.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> Result<PathBuf, CliError> {
    if let Some(env) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return Ok(PathBuf::from(env));
    }
    flag.or(config)
        .map(Path::to_path_buf)
        .ok_or_else(|| CliError::Config(format!("no output directory: pass --out or set {OUT_ENV}")))
}

#[derive(Serialize)]
struct Timing {
    command: &'static str,
    wall_seconds: f64,
}

fn write_timing(dir: &Path, command: &'static str, start: Instant) -> Result<(), CliError> {
    let timing = Timing {
        command,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_atomic(dir, "timing.json", &to_json(&timing)?)?;
    Ok(())
}

pub fn solve_moc(init: &Path, gamma: f64, t_end: f64, out: &Path) -> Result<(), CliError> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(CliError::Config(format!("--t-end must be positive, got {t_end}")));
    }
    let start = Instant::now();
    let m = GasModel::new(gamma, 1.0)?;
    let initial = load_initial(init, &m)?;
    let (net, env) = characteristics(&initial, Some(t_end), &m, 1e-12)?;
    write_atomic(out, "net.csv", &net_table(&net)?)?;
    write_atomic(out, "envelope.json", &to_json(&env)?)?;
    write_timing(out, "solve-moc", start)
}

pub fn detect_shock(init: &Path, gamma: f64, out: &Path) -> Result<(), CliError> {
    let start = Instant::now();
    let m = GasModel::new(gamma, 1.0)?;
    let initial = load_initial(init, &m)?;
    let (_, env) = characteristics(&initial, None, &m, 1e-12)?;
    write_atomic(out, "envelope.json", &to_json(&env)?)?;
    match env.envelope {
        Some(e) => println!("envelope at t* = {} x* = {} ({:?})", fmt_f64(e.t_star), fmt_f64(e.x_star), e.family),
        None => println!("no envelope before the net closes at t = {}", fmt_f64(env.t_max)),
    }
    write_timing(out, "detect-shock", start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RelationArg {
    Contact,
    Char,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub cells: usize,
    pub report: JumpCheckReport,
}

/// Base resolution of the first refinement step.
const BASE_CELLS: usize = 50;
const MAX_REFINE: usize = 6;

fn contact_step(m: &GasModel, n: usize) -> Result<JumpCheckReport, CliError> {
    let base = PrimitiveState::new(1.0, [1.0, 0.0], 1.0);
    let grid = StructuredGrid2D::spanning(5, n + 1, (0.0, 4.0 / n as f64), (0.0, 1.0))?;
    let (fs, y0) = synthesize_contact_field(&base, 1.0, grid, m)?;
    let surface = Surface::new(SurfaceKind::Trajectory, [0.0, 1.0])?;
    let wd = measure_weak_discontinuity(&fs, surface, [grid.x(2), y0], m)?;
    Ok(contact_jump_check(&wd, &derive_state(&base, m)?, m, CONTACT_TOLERANCE)?)
}

fn char_step(m: &GasModel, n: usize) -> Result<JumpCheckReport, CliError> {
    let fan = CenteredFan {
        u_r: 0.0,
        a_r: 1.0,
        u_tail: -0.3,
        s: 1.0,
    };
    // head x = t through (1, 1); the normal points into the uniform region
    let grid = StructuredGrid2D::spanning(n + 1, n + 1, (0.5, 1.5), (0.5, 1.5))?;
    let fs = fan.sample(grid, m)?;
    let surface = Surface::new(SurfaceKind::CharacteristicPlus, [FRAC_1_SQRT_2, -FRAC_1_SQRT_2])?;
    let wd = measure_weak_discontinuity(&fs, surface, [1.0, 1.0], m)?;
    Ok(char_jump_check(&wd, m, CHAR_TOLERANCE)?)
}

/// Runs the relation check on `refine` successively doubled grids.
pub fn jump_refinement(relation: RelationArg, gamma: f64, refine: usize) -> Result<Vec<RefinementStep>, CliError> {
    if refine == 0 || refine > MAX_REFINE {
        return Err(CliError::Config(format!("--refine must be between 1 and {MAX_REFINE}, got {refine}")));
    }
    let m = GasModel::new(gamma, 1.0)?;
    (0..refine)
        .map(|k| {
            let cells = BASE_CELLS << k;
            let report = match relation {
                RelationArg::Contact => contact_step(&m, cells)?,
                RelationArg::Char => char_step(&m, cells)?,
            };
            Ok(RefinementStep { cells, report })
        })
        .collect()
}

pub fn verify_jumps(relation: RelationArg, gamma: f64, refine: usize, out: &Path) -> Result<(), CliError> {
    let start = Instant::now();
    let steps = jump_refinement(relation, gamma, refine)?;
    let mut table = Table::new(&["cells", "grid_h", "lhs", "rhs", "rel_error", "passed"])?;
    for s in &steps {
        let r = &s.report;
        table.row(&[
            Cell::I(s.cells as i64),
            Cell::F(r.grid_h),
            Cell::F(r.lhs),
            Cell::F(r.rhs),
            Cell::F(r.rel_error),
            Cell::S(r.passed.to_string()),
        ])?;
        println!(
            "cells {:>5}  rel_error {}  {}",
            s.cells,
            fmt_f64(r.rel_error),
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    write_atomic(out, "jump_checks.csv", &table.into_bytes()?)?;
    write_atomic(out, "jump_checks.json", &to_json(&steps)?)?;
    write_timing(out, "verify-jumps", start)?;
    let failed = steps.iter().filter(|s| !s.report.passed).count();
    if failed > 0 {
        return Err(CliError::CheckFailed(format!("{failed} of {} jump checks failed", steps.len())));
    }
    Ok(())
}

/// Loads a scenario, lets the command-line paths override its own, runs it
/// and writes every artifact.
pub fn diagnose(
    fields: Option<&Path>,
    manifest: Option<&Path>,
    config: &Path,
    out: Option<&Path>,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(f) = fields {
        cfg.fields = Some(f.to_path_buf());
    }
    if let Some(m) = manifest {
        cfg.manifest = Some(m.to_path_buf());
    }
    let dir = resolve_out_dir(out, cfg.output_dir.as_deref())?;
    let output = run_scenario(&cfg)?;
    for a in &output.artifacts {
        write_atomic(&dir, &a.name, &a.bytes)?;
    }
    write_timing(&dir, "diagnose", start)?;
    Ok(output.report)
}

pub fn load_report(run: &Path) -> Result<RunReport, CliError> {
    let path = run.join("run_report.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::read(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(&path, e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), fmt_f64)
}

/// Human-readable summary of a run report.
pub fn render_report(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario        {}", r.scenario);
    let class = match r.classification {
        Some(Classification::LocallyEquilibrium) => "locally equilibrium",
        Some(Classification::Nonequilibrium) => "nonequilibrium",
        None => "-",
    };
    let _ = writeln!(s, "classification  {class}");
    let _ = writeln!(s, "max |K|         {}", opt(r.max_k));
    let _ = writeln!(s, "tolerance       {}", opt(r.tolerance));
    if let Some(d) = r.dominant {
        let _ = writeln!(s, "dominant source {d}");
    }
    if let Some(l) = r.lagrange {
        let _ = writeln!(
            s,
            "lagrange        stationary={} potential={} simply_connected={} -> predicts {}",
            l.stationary,
            l.potential,
            l.simply_connected,
            if l.predicts_equilibrium { "equilibrium" } else { "nonequilibrium" }
        );
    }
    if !r.attribution.is_empty() {
        let _ = writeln!(s, "attribution (integral of |K_c| along trajectories)");
        for a in &r.attribution {
            let _ = writeln!(s, "  {:<22} {}", a.source.name(), fmt_f64(a.integral));
        }
    }
    for t in &r.trajectories {
        let _ = writeln!(
            s,
            "trajectory      seed ({}, {}) length {} max|K| {} {:?} -> {}",
            fmt_f64(t.seed[0]),
            fmt_f64(t.seed[1]),
            fmt_f64(t.length),
            fmt_f64(t.max_k),
            t.regime,
            t.file
        );
    }
    if let Some(c) = &r.characteristics {
        let _ = writeln!(s, "characteristics {} levels, {} nodes, t_max {}", c.levels, c.nodes, fmt_f64(c.t_max));
        let _ = writeln!(
            s,
            "  residuals     C+ {} C- {} C0 {}",
            fmt_f64(c.residuals.cplus),
            fmt_f64(c.residuals.cminus),
            fmt_f64(c.residuals.c0)
        );
        if let Some(e) = c.analytic_estimate {
            let _ = writeln!(s, "  analytic t*   {} ({:?})", fmt_f64(e.t_star), e.family);
        }
    }
    match r.envelope {
        Some(e) => {
            let _ = writeln!(s, "envelope        t* {} x* {} ({:?})", fmt_f64(e.t_star), fmt_f64(e.x_star), e.family);
        }
        None => {
            let _ = writeln!(s, "envelope        none");
        }
    }
    for j in &r.jump_checks {
        let _ = writeln!(
            s,
            "jump check      {:?} rel_error {} {}",
            j.relation,
            fmt_f64(j.rel_error),
            if j.passed { "pass" } else { "FAIL" }
        );
    }
    let t = &r.transition;
    let _ = writeln!(
        s,
        "transition      identical on characteristics: {:?}, envelope: {}, K nonzero off them: {:?} -> traced {}",
        t.identical_on_pseudostructure, t.envelope_detected, t.nonidentical_off_pseudostructure, t.traced
    );
    s
}
