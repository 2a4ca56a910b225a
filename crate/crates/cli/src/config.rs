//! Scenario configuration (JSON). Relative paths resolve against the
//! directory of the configuration file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vortigen::evoform::{CroccoSign, ForceModel, ProductionVariant, TransportModel};
use vortigen::fields::StructuredGrid2D;
use vortigen::jumps::SurfaceKind;
use vortigen::{EntropyConvention, GasModel};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(rename = "R", default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub entropy_convention: EntropyConvention,
    #[serde(default)]
    pub s_ref: f64,
}

fn default_gamma() -> f64 {
    1.4
}

fn default_r() -> f64 {
    1.0
}

impl Default for GasSpec {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            r: default_r(),
            entropy_convention: EntropyConvention::default(),
            s_ref: 0.0,
        }
    }
}

impl GasSpec {
    pub fn model(&self) -> Result<GasModel, CliError> {
        let m = GasModel::new(self.gamma, self.r)?;
        Ok(match self.entropy_convention {
            EntropyConvention::EntropyFunction => m,
            EntropyConvention::Specific => m.specific(self.s_ref),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceSpec {
    #[default]
    None,
    /// Constant force per unit mass.
    Uniform { fx: f64, fy: f64 },
    /// CSV with header `x,y,fx,fy` on the field grid.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSpec {
    #[default]
    Consistent,
    Paper,
}

impl From<SignSpec> for CroccoSign {
    fn from(s: SignSpec) -> Self {
        match s {
            SignSpec::Consistent => CroccoSign::Consistent,
            SignSpec::Paper => CroccoSign::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantSpec {
    #[default]
    Paper,
    Standard,
}

impl From<VariantSpec> for ProductionVariant {
    fn from(v: VariantSpec) -> Self {
        match v {
            VariantSpec::Paper => ProductionVariant::PaperLiteral,
            VariantSpec::Standard => ProductionVariant::StandardProduction,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// `None` selects ten times the truncation estimate.
    #[serde(default)]
    pub equilibrium: Option<f64>,
    #[serde(default = "default_jump_tol")]
    pub jump_rel_error: f64,
    #[serde(default = "default_corrector_tol")]
    pub corrector: f64,
}

fn default_jump_tol() -> f64 {
    vortigen::jumps::CONTACT_TOLERANCE
}

fn default_corrector_tol() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equilibrium: None,
            jump_rel_error: default_jump_tol(),
            corrector: default_corrector_tol(),
        }
    }
}

/// Axis-aligned solid region; nodes inside are inactive.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

/// A weak discontinuity to measure on the field set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpProbe {
    pub surface: SurfaceKind,
    pub point: [f64; 2],
    pub normal: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    #[serde(default)]
    pub gas: GasSpec,
    #[serde(default)]
    pub forces: ForceSpec,
    #[serde(default)]
    pub transport: Option<TransportModel>,
    #[serde(default)]
    pub crocco_sign: SignSpec,
    #[serde(default)]
    pub a1_variant: VariantSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// 2-D field file (`x,y,rho,u,v,p`).
    #[serde(default)]
    pub fields: Option<PathBuf>,
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    /// 1-D initial data (`x,rho,u,p`) for the characteristic solver.
    #[serde(default)]
    pub init: Option<PathBuf>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Include `∂U/∂t` in `A_ν`; needs a snapshot series.
    #[serde(default)]
    pub nonstationary: bool,
    /// Streamline seeds; defaults to three points near the left edge.
    #[serde(default)]
    pub seeds: Vec<[f64; 2]>,
    #[serde(default)]
    pub max_len: Option<f64>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub jump_checks: Vec<JumpProbe>,
}

impl ScenarioConfig {
    /// Reads and validates a configuration, resolving its relative paths.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut() {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut cfg.fields);
        fix(&mut cfg.manifest);
        fix(&mut cfg.init);
        fix(&mut cfg.output_dir);
        if let ForceSpec::File { path } = &mut cfg.forces {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.id.trim().is_empty() {
            return bad("scenario id must not be empty".into());
        }
        self.gas.model()?;
        let t = &self.tolerances;
        for (name, v) in [
            ("equilibrium", t.equilibrium.unwrap_or(1.0)),
            ("jump_rel_error", t.jump_rel_error),
            ("corrector", t.corrector),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.fields.is_none() && self.init.is_none() {
            return bad("scenario needs `fields` or `init`".into());
        }
        if self.manifest.is_some() && self.fields.is_none() {
            return bad("`manifest` needs `fields`".into());
        }
        let mut paths: Vec<&Path> = [&self.fields, &self.manifest, &self.init]
            .into_iter()
            .flatten()
            .map(PathBuf::as_path)
            .collect();
        if let ForceSpec::File { path } = &self.forces {
            paths.push(path);
        }
        for p in paths {
            if !p.is_file() {
                return bad(format!("referenced file {} does not exist", p.display()));
            }
        }
        if self.init.is_some() {
            match self.t_end {
                Some(t) if t > 0.0 => {}
                other => return bad(format!("`init` needs a positive `t_end`, got {other:?}")),
            }
        }
        if let Some(l) = self.max_len {
            if !(l > 0.0) {
                return bad(format!("max_len must be positive, got {l}"));
            }
        }
        if let Some(tm) = self.transport {
            TransportModel::new(tm.mu, tm.k)?;
        }
        for o in &self.obstacles {
            if !(o.x[0] < o.x[1]) || !(o.y[0] < o.y[1]) {
                return bad(format!("obstacle {o:?} has an empty extent"));
            }
        }
        Ok(())
    }

    pub fn force_model(&self, grid: &StructuredGrid2D) -> Result<ForceModel, CliError> {
        Ok(match &self.forces {
            ForceSpec::None => ForceModel::None,
            ForceSpec::Uniform { fx, fy } => ForceModel::Tabulated {
                fx: vec![*fx; grid.len()],
                fy: vec![*fy; grid.len()],
            },
            ForceSpec::File { path } => crate::ingest::load_force(path, grid)?,
        })
    }

    /// Active-node mask, or `None` without obstacles.
    pub fn mask(&self, grid: &StructuredGrid2D) -> Option<Vec<bool>> {
        if self.obstacles.is_empty() {
            return None;
        }
        Some(
            (0..grid.len())
                .map(|k| {
                    let [x, y] = grid.node(k);
                    !self
                        .obstacles
                        .iter()
                        .any(|o| x >= o.x[0] && x <= o.x[1] && y >= o.y[0] && y <= o.y[1])
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg: ScenarioConfig = serde_json::from_str(r#"{"id": "u", "init": "i.csv", "t_end": 1}"#).unwrap();
        assert_eq!(cfg.gas.gamma, 1.4);
        assert_eq!(cfg.crocco_sign, SignSpec::Consistent);
        assert_eq!(cfg.a1_variant, VariantSpec::Paper);
        assert_eq!(cfg.tolerances.corrector, 1e-12);
        assert!(matches!(cfg.forces, ForceSpec::None));
    }

    #[test]
    fn unknown_keys_and_bad_tolerances_are_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"id": "u", "typo": 1}"#).is_err());
        let dir = tempfile::tempdir().unwrap();
        let init = dir.path().join("i.csv");
        fs::write(&init, "x,rho,u,p\n0,1,0,1\n1,1,0,1\n").unwrap();
        let mut cfg: ScenarioConfig = serde_json::from_str(r#"{"id": "u", "t_end": 1}"#).unwrap();
        cfg.init = Some(init);
        cfg.validate().unwrap();
        cfg.tolerances.jump_rel_error = 0.0;
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        cfg.tolerances.jump_rel_error = 1e-2;
        cfg.init = Some(dir.path().join("missing.csv"));
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn obstacles_clear_mask_nodes() {
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"id": "b", "obstacles": [{"x": [0.35, 0.65], "y": [0.35, 0.65]}]}"#).unwrap();
        let g = StructuredGrid2D::spanning(11, 11, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let mask = cfg.mask(&g).unwrap();
        assert_eq!(mask.iter().filter(|a| !**a).count(), 9);
        assert!(!vortigen::evoform::mask_is_simply_connected(&g, &mask));
    }
}
