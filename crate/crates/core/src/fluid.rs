//! Uniform fluids.
//!
//! With `U_1 = 0` the resolvent is `v_1(p, z) = 1 / (z - p^2/2m)` and the
//! momentum distribution is
//!
//! ```text
//! rho~_1(p) = A V / (2 pi hbar)^3 * (1 / 2 pi i) oint exp(-z/tau) v_1(p, z) dz
//!           = N / (2 pi m tau)^(3/2) * exp(-p^2 / 2 m tau)
//! ```
//!
//! The shape depends on the statistics only through `tau` and `A`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::contour::{contour_integral, residue_total, ContourSpec, PoleSet, WeightConstants};
use crate::error::{Error, Result};
use crate::types::{PhysicalParams, Statistics, Vec3};

/// `|z - p^2/2m|` below which the resolvent is reported as sitting on its pole.
pub const POLE_HIT_TOL: f64 = 1e-14;

/// `v_1(p, z) = 1 / (z - p^2/2m)`.
pub fn v1_uniform(p: &Vec3, z: Complex64, params: &PhysicalParams) -> Result<Complex64> {
    let d = z - params.kinetic(p);
    if d.norm() < POLE_HIT_TOL {
        return Err(Error::PoleHit { re: z.re, im: z.im });
    }
    Ok(1.0 / d)
}

/// Closed-form Maxwellian-type distribution `N (2 pi m tau)^(-3/2) exp(-p^2 / 2 m tau)`.
pub fn rho1_momentum_fluid(p: &Vec3, params: &PhysicalParams) -> Result<f64> {
    params.require_positive_tau()?;
    let mt = params.mass * params.tau;
    Ok(params.n_particles * (2.0 * PI * mt).powf(-1.5) * (-p.norm_squared() / (2.0 * mt)).exp())
}

/// Poles of the uniform resolvent: a single pole of residue 1 at `p^2/2m`.
pub fn uniform_poles(p: &Vec3, params: &PhysicalParams) -> PoleSet {
    PoleSet::single(params.kinetic(p), Complex64::new(1.0, 0.0))
}

/// Fix `A` from `int rho~_1 dp = N`, integrating the residue form with `A = 1`
/// radially (the integrand is isotropic).
pub fn fluid_normalization(params: &PhysicalParams) -> Result<WeightConstants> {
    params.require_positive_tau()?;
    let prefactor = params.volume / (2.0 * PI * params.hbar).powi(3);
    let p_max = (2.0 * params.mass * params.tau * 60.0).sqrt();
    let n = 4000;
    let h = p_max / n as f64;
    let mut integral = 0.0;
    for i in 0..=n {
        let p = Vec3::new(i as f64 * h, 0.0, 0.0);
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        let shell = 4.0 * PI * p.x * p.x;
        let unit = prefactor * residue_total(&uniform_poles(&p, params), params)?.re;
        integral += w * shell * unit;
    }
    WeightConstants::from_normalization(params.n_particles, integral, 3)
}

/// A uniform fluid with its normalization constant fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidSpec {
    pub params: PhysicalParams,
    pub weights: WeightConstants,
}

impl FluidSpec {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        let weights = fluid_normalization(&params)?;
        Ok(Self { params, weights })
    }

    fn prefactor(&self) -> f64 {
        self.weights.a * self.params.volume / (2.0 * PI * self.params.hbar).powi(3)
    }

    /// Closed form.
    pub fn rho1(&self, p: &Vec3) -> Result<f64> {
        rho1_momentum_fluid(p, &self.params)
    }

    /// `z` integral done by the residue theorem.
    pub fn rho1_via_residues(&self, p: &Vec3) -> Result<f64> {
        Ok(self.prefactor() * residue_total(&uniform_poles(p, &self.params), &self.params)?.re)
    }

    /// `z` integral done by quadrature along `contour` (default: rectangle around `p^2/2m`).
    pub fn rho1_via_contour(&self, p: &Vec3, contour: Option<&ContourSpec>) -> Result<f64> {
        let eps = self.params.kinetic(p);
        let default = ContourSpec::enclosing(eps, eps);
        let contour = contour.unwrap_or(&default);
        let tau = self.params.tau;
        let params = self.params;
        let mut failure = None;
        let integral = contour_integral(
            |z| match v1_uniform(p, z, &params) {
                Ok(v) => (-z / tau).exp() * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            contour,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(self.prefactor() * integral.re)
    }
}

/// `rho~_1(p)` from the contour integral of `exp(-z/tau) v_1`, with `A` fixed by normalization.
pub fn fluid_distribution_via_contour(
    p: &Vec3,
    params: &PhysicalParams,
    contour: Option<&ContourSpec>,
) -> Result<f64> {
    FluidSpec::new(*params)?.rho1_via_contour(p, contour)
}

/// Fermi energy of spinless fermions, `(hbar^2 / 2m) (6 pi^2 rho)^(2/3)`.
pub fn fermi_energy_spinless(params: &PhysicalParams) -> f64 {
    params.hbar * params.hbar / (2.0 * params.mass)
        * (6.0 * PI * PI * params.density).powf(2.0 / 3.0)
}

/// `tau = 2 eps_F / 5` for the ideal spinless Fermi gas at zero temperature.
pub fn tau_ideal_fermi_zero_temp(params: &PhysicalParams) -> Result<f64> {
    if params.statistics != Statistics::Fermi {
        return Err(Error::WrongStatistics);
    }
    if let Some(t) = params.temperature {
        if t != 0.0 {
            return Err(Error::param(
                "temperature",
                format!("zero-temperature value requested at temperature {t}"),
            ));
        }
    }
    Ok(0.4 * fermi_energy_spinless(params))
}
