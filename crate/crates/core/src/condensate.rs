//! Condensate contributions.
//!
//! The condensate part of the singlet matrix is
//! `rho_c exp(i p_0 (r - r') / hbar) u_1(r) conj(u_1(r'))` with
//! `u_1(r) = sum_A c_A exp(i A.r)` in a crystal and `u_1 = 1` in a superfluid.
//! Its momentum distribution is a set of delta peaks of weight `N_c |c_A|^2`
//! at `p_0 + hbar A`, stored exactly and never gridded.

use num_complex::Complex64;

use crate::crystal::ReciprocalLattice;
use crate::distribution::{DeltaPeak, DeltaPeakMeasure};
use crate::error::{Error, Result};
use crate::types::{LatticeIndex, Vec3};

/// Allowed deviation of `sum |c_A|^2` from one.
pub const COEFFICIENT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CondensateSpec {
    pub n_c: f64,
    pub p0: Vec3,
    pub hbar: f64,
    /// System volume; `rho_c = N_c / V`.
    pub volume: f64,
    coefficients: Vec<(LatticeIndex, Complex64)>,
    lattice: Option<ReciprocalLattice>,
}

impl CondensateSpec {
    /// Uniform superfluid, `u_1 = 1`.
    pub fn superfluid(n_c: f64, p0: Vec3, hbar: f64, volume: f64) -> Result<Self> {
        Self::build(n_c, p0, hbar, volume, vec![([0, 0, 0], Complex64::new(1.0, 0.0))], None)
    }

    /// Condensate crystal with coefficients `c_A` on `lattice`.
    pub fn crystal(
        n_c: f64,
        p0: Vec3,
        hbar: f64,
        volume: f64,
        coefficients: Vec<(LatticeIndex, Complex64)>,
        lattice: ReciprocalLattice,
    ) -> Result<Self> {
        Self::build(n_c, p0, hbar, volume, coefficients, Some(lattice))
    }

    fn build(
        n_c: f64,
        p0: Vec3,
        hbar: f64,
        volume: f64,
        coefficients: Vec<(LatticeIndex, Complex64)>,
        lattice: Option<ReciprocalLattice>,
    ) -> Result<Self> {
        if !(n_c >= 0.0 && n_c.is_finite()) {
            return Err(Error::param("n_c", format!("must be >= 0, got {n_c}")));
        }
        if !(hbar > 0.0) {
            return Err(Error::param("hbar", format!("must be > 0, got {hbar}")));
        }
        if !(volume > 0.0) {
            return Err(Error::param("volume", format!("must be > 0, got {volume}")));
        }
        if !p0.iter().all(|v| v.is_finite()) {
            return Err(Error::param("p0", "must be finite"));
        }
        for (i, (idx, c)) in coefficients.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::param("coefficients", format!("entry {idx:?} is not finite")));
            }
            if coefficients[..i].iter().any(|(j, _)| j == idx) {
                return Err(Error::param("coefficients", format!("duplicate entry {idx:?}")));
            }
            if let Some(l) = &lattice {
                if (l.dim()..3).any(|k| idx[k] != 0) {
                    return Err(Error::param(
                        "coefficients",
                        format!("entry {idx:?} exceeds lattice dimension {}", l.dim()),
                    ));
                }
            }
        }
        let norm: f64 = coefficients.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > COEFFICIENT_NORM_TOL {
            return Err(Error::CoefficientsNotNormalized { sum: norm });
        }
        Ok(Self {
            n_c,
            p0,
            hbar,
            volume,
            coefficients,
            lattice,
        })
    }

    pub fn coefficients(&self) -> &[(LatticeIndex, Complex64)] {
        &self.coefficients
    }

    pub fn lattice(&self) -> Option<&ReciprocalLattice> {
        self.lattice.as_ref()
    }

    pub fn density(&self) -> f64 {
        self.n_c / self.volume
    }

    fn norm(&self) -> f64 {
        self.coefficients.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `u_1(r)`; one for a superfluid.
    pub fn u1(&self, r: &Vec3) -> Complex64 {
        match &self.lattice {
            None => Complex64::new(1.0, 0.0),
            Some(l) => self
                .coefficients
                .iter()
                .map(|(idx, c)| c * Complex64::from_polar(1.0, l.vector(*idx).dot(r)))
                .sum(),
        }
    }
}

/// Single peak `(N_c, p_0)`; empty when `N_c = 0`.
pub fn condensate_fluid_distribution(spec: &CondensateSpec) -> Result<DeltaPeakMeasure> {
    if spec.lattice.is_some() {
        return Err(Error::SpecHasLattice);
    }
    if spec.n_c == 0.0 {
        return Ok(DeltaPeakMeasure::empty());
    }
    DeltaPeakMeasure::new(vec![DeltaPeak {
        weight: spec.n_c,
        location: spec.p0,
    }])
}

/// Peaks `(N_c |c_A|^2, p_0 + hbar A)`, zero weights dropped.
pub fn condensate_crystal_distribution(spec: &CondensateSpec) -> Result<DeltaPeakMeasure> {
    let lattice = spec.lattice.as_ref().ok_or(Error::MissingLattice)?;
    let norm = spec.norm();
    let peaks = spec
        .coefficients
        .iter()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(idx, c)| DeltaPeak {
            weight: spec.n_c * (c.norm_sqr() / norm),
            location: spec.p0 + lattice.vector(*idx) * spec.hbar,
        })
        .filter(|p| p.weight > 0.0)
        .collect();
    DeltaPeakMeasure::new(peaks)
}

/// `sum_i w_i p_i`.
pub fn total_momentum(measure: &DeltaPeakMeasure) -> Vec3 {
    measure.first_moment()
}

/// `N_c (p_0 + hbar sum_A A |c_A|^2)`.
pub fn total_momentum_closed_form(spec: &CondensateSpec) -> Vec3 {
    let shift = match &spec.lattice {
        None => Vec3::zeros(),
        Some(l) => {
            let norm = spec.norm();
            spec.coefficients
                .iter()
                .fold(Vec3::zeros(), |acc, (idx, c)| acc + l.vector(*idx) * (c.norm_sqr() / norm))
                * spec.hbar
        }
    };
    (spec.p0 + shift) * spec.n_c
}

/// `rho_c exp(i p_0 (r - r') / hbar) u_1(r) conj(u_1(r'))`.
pub fn condensate_position_matrix(spec: &CondensateSpec, r: &Vec3, r_prime: &Vec3) -> Complex64 {
    let phase = spec.p0.dot(&(r - r_prime)) / spec.hbar;
    spec.density() * Complex64::from_polar(1.0, phase) * spec.u1(r) * spec.u1(r_prime).conj()
}

/// Integer lattice coordinates of each peak relative to `p_0`; fails if any
/// peak is off the lattice by more than `1e-12` in any coordinate.
pub fn peak_lattice_indices(measure: &DeltaPeakMeasure, spec: &CondensateSpec) -> Result<Vec<LatticeIndex>> {
    let lattice = spec.lattice.as_ref().ok_or(Error::MissingLattice)?;
    measure
        .peaks()
        .iter()
        .map(|peak| {
            let coords = lattice.coordinates(&((peak.location - spec.p0) / spec.hbar));
            let mut idx = [0i32; 3];
            for k in 0..3 {
                let n = coords[k].round();
                if (coords[k] - n).abs() > 1e-12 {
                    return Err(Error::param(
                        "peaks",
                        format!("peak at {:?} is off the reciprocal lattice", peak.location.as_slice()),
                    ));
                }
                idx[k] = n as i32;
            }
            Ok(idx)
        })
        .collect()
}
