//! The complex energy plane: the weights `n_s(z)`, numerical contour
//! integration, and residue sums for meromorphic resolvents.
//!
//! Every resolvent met in this crate has simple real poles (free-particle
//! energies or eigenvalues of a Hermitian Bloch operator), and `exp(-z/tau)` is
//! entire, so the contour is taken to be a rectangle around the relevant part
//! of the real axis. Integrals are returned already divided by `2 pi i`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::types::PhysicalParams;

/// Gauss-Legendre order of each panel on the contour.
pub const PANEL_ORDER: usize = 16;
/// Below this many nodes per edge a contour is rejected.
pub const MIN_NODES_PER_EDGE: usize = 64;
/// Magnitude above which the integrand is treated as sitting on a pole.
pub const OVERFLOW_GUARD: f64 = 1e300;
/// Pole locations closer than this are considered degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Counterclockwise rectangle `[re_min, re_max] x [-im_height, im_height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_height: f64,
    pub nodes_per_edge: usize,
}

impl ContourSpec {
    pub fn new(re_min: f64, re_max: f64, im_height: f64, nodes_per_edge: usize) -> Result<Self> {
        if !(re_min < re_max) {
            return Err(Error::param(
                "contour",
                format!("need re_min < re_max, got {re_min} >= {re_max}"),
            ));
        }
        if !(im_height > 0.0) {
            return Err(Error::param("contour", "im_height must be > 0"));
        }
        if nodes_per_edge < MIN_NODES_PER_EDGE {
            return Err(Error::param(
                "contour",
                format!("need at least {MIN_NODES_PER_EDGE} nodes per edge, got {nodes_per_edge}"),
            ));
        }
        Ok(Self {
            re_min,
            re_max,
            im_height,
            nodes_per_edge,
        })
    }

    /// Rectangle around `[lo - 1, hi + 1]` with half-height 1, panels no longer than 0.5.
    pub fn enclosing(lo: f64, hi: f64) -> Self {
        Self::enclosing_with_margin(lo, hi, 1.0)
    }

    pub fn enclosing_with_margin(lo: f64, hi: f64, margin: f64) -> Self {
        let re_min = lo - margin;
        let re_max = hi + margin;
        let longest = (re_max - re_min).max(2.0 * margin);
        let panels = ((longest / (0.5 * margin)).ceil() as usize).max(MIN_NODES_PER_EDGE / PANEL_ORDER);
        Self {
            re_min,
            re_max,
            im_height: margin,
            nodes_per_edge: panels * PANEL_ORDER,
        }
    }

    /// Rectangle enclosing every pole whose Boltzmann weight `exp(-(e - e_min)/tau)`
    /// exceeds `exp(-cutoff)`; the right edge is moved into a gap between poles.
    pub fn for_weighted_poles(locations: &[f64], tau: f64, cutoff: f64) -> Self {
        let mut sorted: Vec<f64> = locations.to_vec();
        sorted.sort_by(f64::total_cmp);
        let lo = sorted[0];
        let limit = lo + cutoff * tau;
        let last_inside = sorted.iter().rposition(|&e| e <= limit).unwrap_or(0);
        let hi = sorted[last_inside];
        let mut spec = Self::enclosing(lo, hi);
        if let Some(&next) = sorted.get(last_inside + 1) {
            if next < spec.re_max + 0.25 {
                spec.re_max = 0.5 * (hi + next);
            }
        }
        spec
    }

    /// Whether `x` (on the real axis) lies strictly inside the rectangle.
    pub fn encloses(&self, x: f64) -> bool {
        x > self.re_min && x < self.re_max
    }

    /// Distance from a real point to the contour path.
    pub fn distance_to_path(&self, x: f64) -> f64 {
        let horizontal = self.im_height;
        let vertical = (x - self.re_min).abs().min((x - self.re_max).abs());
        horizontal.min(vertical)
    }

    fn panels(&self) -> usize {
        self.nodes_per_edge.div_ceil(PANEL_ORDER)
    }

    /// Quadrature nodes and `dz` weights along the path, counterclockwise.
    pub fn nodes(&self) -> Vec<(Complex64, Complex64)> {
        let rule = GaussRule::legendre(PANEL_ORDER);
        let h = self.im_height;
        let corners = [
            Complex64::new(self.re_min, -h),
            Complex64::new(self.re_max, -h),
            Complex64::new(self.re_max, h),
            Complex64::new(self.re_min, h),
        ];
        let panels = self.panels();
        let mut out = Vec::with_capacity(4 * panels * PANEL_ORDER);
        for e in 0..4 {
            let start = corners[e];
            let end = corners[(e + 1) % 4];
            let step = (end - start) / panels as f64;
            for k in 0..panels {
                let a = start + step * k as f64;
                for (t, w) in rule.mapped(0.0, 1.0) {
                    out.push((a + step * t, step * w));
                }
            }
        }
        out
    }
}

/// `(1 / 2 pi i) oint f(z) dz` along the rectangle.
pub fn contour_integral(mut f: impl FnMut(Complex64) -> Complex64, contour: &ContourSpec) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (z, dz) in contour.nodes() {
        let v = f(z);
        if !v.re.is_finite() || !v.im.is_finite() || v.norm() > OVERFLOW_GUARD {
            return Err(Error::PoleOnPath { re: z.re, im: z.im });
        }
        acc += v * dz;
    }
    Ok(acc / Complex64::new(0.0, 2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    pub residue: Complex64,
}

/// Simple real poles of a resolvent together with their residues.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
}

impl PoleSet {
    pub fn new(poles: Vec<Pole>) -> Result<Self> {
        for p in &poles {
            if !p.location.is_finite() || !p.residue.re.is_finite() || !p.residue.im.is_finite() {
                return Err(Error::param("pole", "locations and residues must be finite"));
            }
        }
        Ok(Self { poles })
    }

    pub fn single(location: f64, residue: Complex64) -> Self {
        Self {
            poles: vec![Pole { location, residue }],
        }
    }

    pub fn locations(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.location).collect()
    }

    pub fn min_location(&self) -> Option<f64> {
        self.poles.iter().map(|p| p.location).min_by(f64::total_cmp)
    }

    pub fn max_location(&self) -> Option<f64> {
        self.poles.iter().map(|p| p.location).max_by(f64::total_cmp)
    }

    /// Every pole must sit strictly inside `contour`.
    pub fn check_inside(&self, contour: &ContourSpec) -> Result<()> {
        match self.poles.iter().find(|p| !contour.encloses(p.location)) {
            Some(p) => Err(Error::PoleOutsideContour {
                location: p.location,
            }),
            None => Ok(()),
        }
    }

    /// `sum_n r_n / (z - e_n)`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.poles.iter().map(|p| p.residue / (z - p.location)).sum()
    }

    fn check_simple(&self) -> Result<()> {
        let mut locs = self.locations();
        locs.sort_by(f64::total_cmp);
        for w in locs.windows(2) {
            if (w[1] - w[0]).abs() < DEGENERACY_TOL {
                return Err(Error::DegeneratePoles {
                    first: w[0],
                    second: w[1],
                });
            }
        }
        Ok(())
    }
}

/// Per-pole contributions `r_n exp(-e_n / tau)` to `(1/2 pi i) oint exp(-z/tau) v(z) dz`.
///
/// Residues may be complex (position-resolved resolvents); for the diagonal
/// plane-wave component they are real and non-negative.
pub fn residue_weights(poles: &PoleSet, params: &PhysicalParams) -> Result<Vec<Complex64>> {
    params.require_positive_tau()?;
    poles.check_simple()?;
    Ok(poles
        .poles
        .iter()
        .map(|p| p.residue * (-p.location / params.tau).exp())
        .collect())
}

/// Sum of [`residue_weights`].
pub fn residue_total(poles: &PoleSet, params: &PhysicalParams) -> Result<Complex64> {
    Ok(residue_weights(poles, params)?.into_iter().sum())
}

/// Normalization constant `A` and the dimension it refers to.
///
/// `A` is never imported from elsewhere; callers fix it from the
/// normalization `int rho~_1(p) dp = N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConstants {
    pub a: f64,
    pub dim: usize,
}

impl WeightConstants {
    pub fn new(a: f64, dim: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::param("A", format!("must be > 0, got {a}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")));
        }
        Ok(Self { a, dim })
    }

    /// Fix `A` so that `A * unit_integral = N`, where `unit_integral` is the
    /// normalization integral evaluated with `A = 1`.
    pub fn from_normalization(n_particles: f64, unit_integral: f64, dim: usize) -> Result<Self> {
        if !(unit_integral > 0.0) {
            return Err(Error::param(
                "normalization",
                format!("unit integral must be > 0, got {unit_integral}"),
            ));
        }
        Self::new(n_particles / unit_integral, dim)
    }

    /// `A_s = s! rho^(s-1) (2 pi hbar^2 / m tau)^(d (s-1) / 2) A`.
    pub fn a_s(&self, s: usize, params: &PhysicalParams) -> Result<f64> {
        if s == 0 {
            return Err(Error::UnsupportedOrder(0));
        }
        params.require_positive_tau()?;
        let factorial: f64 = (1..=s).map(|k| k as f64).product();
        let sm1 = (s - 1) as f64;
        Ok(factorial
            * params.density.powf(sm1)
            * params.thermal_length_sq().powf(0.5 * self.dim as f64 * sm1)
            * self.a)
    }
}

/// `n_s(z) = A_s exp(-z / tau)`.
pub fn n_s(z: Complex64, s: usize, weights: &WeightConstants, params: &PhysicalParams) -> Result<Complex64> {
    let a_s = weights.a_s(s, params)?;
    Ok(a_s * (-z / params.tau).exp())
}
