use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),
    #[error("invalid gas model: {0}")]
    InvalidGasModel(String),
    #[error("entropy convention mismatch: {0}")]
    ConventionMismatch(String),
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("insufficient snapshots: need at least {needed}, have {have}")]
    InsufficientSnapshots { needed: usize, have: usize },
    #[error("missing snapshots: {0}")]
    MissingSnapshots(String),
    #[error("snapshot index {index} out of range ({len} snapshots)")]
    SnapshotIndex { index: usize, len: usize },
    #[error("stagnation at seed ({x}, {y})")]
    StagnationAtSeed { x: f64, y: f64 },
    #[error("seed ({x}, {y}) lies outside the domain")]
    SeedOutsideDomain { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies outside the domain")]
    PointOutsideDomain { x: f64, y: f64 },
    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(String),
    #[error("too close to boundary: {0}")]
    TooCloseToBoundary(String),
    #[error("wrong surface kind: {0}")]
    WrongSurfaceKind(String),
    #[error("corrector did not converge after {iterations} iterations at level {level}")]
    NonConvergence { level: usize, iterations: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
