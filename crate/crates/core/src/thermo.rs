//! Ideal-gas state relations.
//!
//! Two entropy conventions are supported. [`EntropyConvention::EntropyFunction`]
//! uses `s = p / ρ^γ`, the form in which the weak-discontinuity relations close
//! without conversion factors. [`EntropyConvention::Specific`] uses the
//! physical specific entropy `s = c_v ln(p / ρ^γ) + s_ref`, which is what the
//! Gibbs relation `T ds = de + p dV` is stated for.
//!
//! All energies are per unit mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum EntropyConvention {
    /// `s = p / ρ^γ`
    #[default]
    EntropyFunction,
    /// `s = c_v ln(p / ρ^γ) + s_ref`
    Specific,
}

/// Calorically perfect gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    gamma: f64,
    r: f64,
    convention: EntropyConvention,
    s_ref: f64,
}

impl GasModel {
    /// Gas with the default entropy-function convention.
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidGasModel(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidGasModel(format!("R must be positive, got {r}")));
        }
        Ok(Self {
            gamma,
            r,
            convention: EntropyConvention::EntropyFunction,
            s_ref: 0.0,
        })
    }

    /// Switches to the specific-entropy convention with reference offset `s_ref`.
    pub fn specific(mut self, s_ref: f64) -> Self {
        self.convention = EntropyConvention::Specific;
        self.s_ref = s_ref;
        self
    }

    pub fn with_convention(mut self, convention: EntropyConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn convention(&self) -> EntropyConvention {
        self.convention
    }

    pub fn s_ref(&self) -> f64 {
        self.s_ref
    }

    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }

    pub fn cp(&self) -> f64 {
        self.gamma * self.r / (self.gamma - 1.0)
    }

    /// Entropy under the configured convention.
    pub fn entropy(&self, rho: f64, p: f64) -> f64 {
        let function = p / rho.powf(self.gamma);
        match self.convention {
            EntropyConvention::EntropyFunction => function,
            EntropyConvention::Specific => self.cv() * function.ln() + self.s_ref,
        }
    }

    /// Inverts [`GasModel::entropy`] for the pressure at given density.
    pub fn pressure_from_entropy(&self, rho: f64, s: f64) -> f64 {
        let function = match self.convention {
            EntropyConvention::EntropyFunction => s,
            EntropyConvention::Specific => ((s - self.s_ref) / self.cv()).exp(),
        };
        function * rho.powf(self.gamma)
    }

    /// `a² = γ p / ρ`
    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }

    pub fn temperature(&self, rho: f64, p: f64) -> f64 {
        p / (rho * self.r)
    }

    /// Density from sound speed and entropy function `s = p/ρ^γ`.
    pub fn density_from_sound_speed(&self, a: f64, s_function: f64) -> f64 {
        (a * a / (self.gamma * s_function)).powf(1.0 / (self.gamma - 1.0))
    }
}

/// Density, velocity (up to two components, unused ones zero) and pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: [f64; 2],
    pub p: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: [f64; 2], p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn one_d(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u: [u, 0.0], p }
    }

    pub fn speed(&self) -> f64 {
        self.u[0].hypot(self.u[1])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::NonPhysicalState(format!("density {} must be positive", self.rho)));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::NonPhysicalState(format!("pressure {} must be positive", self.p)));
        }
        if !self.u.iter().all(|c| c.is_finite()) {
            return Err(Error::NonPhysicalState("velocity must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedState {
    pub temperature: f64,
    pub sound_speed: f64,
    pub entropy: f64,
    pub internal_energy: f64,
    pub enthalpy: f64,
    pub total_enthalpy: f64,
}

pub fn derive_state(q: &PrimitiveState, m: &GasModel) -> Result<DerivedState> {
    q.validate()?;
    let temperature = m.temperature(q.rho, q.p);
    let internal_energy = m.cv() * temperature;
    let enthalpy = internal_energy + q.p / q.rho;
    let kinetic = 0.5 * (q.u[0] * q.u[0] + q.u[1] * q.u[1]);
    Ok(DerivedState {
        temperature,
        sound_speed: m.sound_speed(q.rho, q.p),
        entropy: m.entropy(q.rho, q.p),
        internal_energy,
        enthalpy,
        total_enthalpy: enthalpy + kinetic,
    })
}

/// Largest midpoint residual `|T̄ Δs − Δe − p̄ ΔV|` over consecutive states of
/// a thermodynamic path, with `V = 1/ρ`.
pub fn gibbs_residual(path: &[PrimitiveState], m: &GasModel) -> Result<f64> {
    if m.convention() != EntropyConvention::Specific {
        return Err(Error::ConventionMismatch(
            "the Gibbs relation needs the specific-entropy convention".into(),
        ));
    }
    if path.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "path needs at least 2 states, got {}",
            path.len()
        )));
    }
    let derived = path
        .iter()
        .map(|q| derive_state(q, m))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0_f64;
    for (k, pair) in derived.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let (qa, qb) = (&path[k], &path[k + 1]);
        let t_mid = 0.5 * (a.temperature + b.temperature);
        let p_mid = 0.5 * (qa.p + qb.p);
        let dv = 1.0 / qb.rho - 1.0 / qa.rho;
        let residual =
            t_mid * (b.entropy - a.entropy) - (b.internal_energy - a.internal_energy) - p_mid * dv;
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}
