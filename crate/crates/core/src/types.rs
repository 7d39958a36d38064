//! Physical parameters and the statistics sign convention.
//!
//! Units are natural by default (`hbar = mass = 1`) but every formula keeps
//! both symbols explicit, so any consistent unit system works.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-component real vector used for positions and momenta.
/// Lower-dimensional problems leave the unused components at zero.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Integer triple labelling a reciprocal-lattice vector `l a1 + m a2 + n a3`.
pub type LatticeIndex = [i32; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => -1.0,
        }
    }
}

/// Sign `(+-1)^P` attached to a permutation of parity `parity` (0 even, 1 odd).
pub fn statistics_sign(statistics: Statistics, permutation_parity: u32) -> Result<i32> {
    match (statistics, permutation_parity) {
        (_, p) if p > 1 => Err(Error::param(
            "permutation_parity",
            format!("parity must be 0 or 1, got {p}"),
        )),
        (Statistics::Bose, _) => Ok(1),
        (Statistics::Fermi, 0) => Ok(1),
        (Statistics::Fermi, _) => Ok(-1),
    }
}

/// The dimensional backbone shared by every formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// Temperature-like parameter of the weight `exp(-z/tau)`.
    pub tau: f64,
    /// Thermodynamic temperature; informational only.
    pub temperature: Option<f64>,
    /// `N / V`.
    pub density: f64,
    pub n_particles: f64,
    pub volume: f64,
    pub statistics: Statistics,
}

impl PhysicalParams {
    /// Natural units, density derived from `n_particles / volume`.
    pub fn new(n_particles: f64, volume: f64, tau: f64, statistics: Statistics) -> Result<Self> {
        let params = Self {
            hbar: 1.0,
            mass: 1.0,
            tau,
            temperature: None,
            density: n_particles / volume,
            n_particles,
            volume,
            statistics,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        self.mass = mass;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.tau = tau;
        self.validate()?;
        Ok(self)
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = Some(temperature);
        self
    }

    pub fn with_statistics(mut self, statistics: Statistics) -> Self {
        self.statistics = statistics;
        self
    }

    /// Rescale volume and particle number together, keeping the density.
    pub fn with_volume(mut self, volume: f64) -> Result<Self> {
        self.n_particles = self.density * volume;
        self.volume = volume;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        positive("volume", self.volume)?;
        if !self.tau.is_finite() {
            return Err(Error::param("tau", "must be finite"));
        }
        if !(self.n_particles >= 1.0) || !self.n_particles.is_finite() {
            return Err(Error::param(
                "n_particles",
                format!("must be >= 1, got {}", self.n_particles),
            ));
        }
        let implied = self.density * self.volume;
        if ((implied - self.n_particles) / self.n_particles).abs() > 1e-12 {
            return Err(Error::param(
                "density",
                format!(
                    "density * volume = {implied} does not match n_particles = {}",
                    self.n_particles
                ),
            ));
        }
        Ok(())
    }

    /// Continuous momentum distributions need `tau > 0`; `tau <= 0` signals condensation.
    pub fn require_positive_tau(&self) -> Result<()> {
        if self.tau > 0.0 {
            Ok(())
        } else {
            Err(Error::CondensateRegime { tau: self.tau })
        }
    }

    /// Free-particle kinetic energy `p^2 / 2m`.
    pub fn kinetic(&self, p: &Vec3) -> f64 {
        p.norm_squared() / (2.0 * self.mass)
    }

    /// `2 pi hbar^2 / (m tau)`, the squared thermal length attached to `tau`.
    pub fn thermal_length_sq(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar * self.hbar / (self.mass * self.tau)
    }
}
