//! Residual checkers for the governing equations.
//!
//! The one-particle resolvent equation
//!
//! ```text
//! (hbar^2/2m) lap v + (i hbar/m) p.grad v + [z - p^2/2m - U_1] v = 1
//! ```
//!
//! is checked with fourth-order periodic central differences, and the
//! effective-potential balance
//!
//! ```text
//! rho_s grad_1 U_s = rho_s grad_1 sum_{j>=2} K(|r_1 - r_j|)
//!                  + int rho_{s+1} grad_1 K(|r_1 - r_{s+1}|) dr_{s+1}
//! ```
//!
//! is checked on tabulated densities over a periodic box with minimum-image
//! separations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridKind};
use crate::types::{PhysicalParams, Vec3};

/// Largest tolerated truncation estimate of the difference operator, relative to the residual scale.
pub const TRUNCATION_LIMIT: f64 = 1e-2;
/// `|K|` at half the box must be below this fraction of `max |K|`.
pub const RANGE_TOL: f64 = 1e-8;
/// Largest number of tabulated values accepted for `rho_{s+1}`.
pub const MAX_TABULATED: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub rms_residual: f64,
    pub points: usize,
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl ResidualReport {
    fn from_values(values: &[f64], grid: &Grid) -> Self {
        let max = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt();
        Self {
            max_abs_residual: max,
            rms_residual: rms,
            points: values.len(),
            spacing: [grid.spacing(0), grid.spacing(1), grid.spacing(2)],
            counts: grid.counts(),
        }
    }
}

fn require_periodic(grid: &Grid, min_points: usize) -> Result<()> {
    if grid.kind() != GridKind::Periodic {
        return Err(Error::param("grid", "residual checks need a periodic grid"));
    }
    for axis in 0..grid.dim() {
        if grid.count(axis) < min_points {
            return Err(Error::param(
                "grid",
                format!("axis {axis} has {} points, need at least {min_points}", grid.count(axis)),
            ));
        }
    }
    Ok(())
}

fn shifted(grid: &Grid, flat: usize, axis: usize, step: isize) -> usize {
    let mut idx = grid.multi_index(flat);
    let n = grid.count(axis) as isize;
    idx[axis] = (idx[axis] as isize + step).rem_euclid(n) as usize;
    grid.flat_index(idx)
}

/// Fourth-order first and second derivatives along `axis` with stride `stride` points.
fn derivatives<T>(values: &[T], grid: &Grid, flat: usize, axis: usize, stride: isize) -> (T, T)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let h = grid.spacing(axis) * stride as f64;
    let at = |k: isize| values[shifted(grid, flat, axis, k * stride)];
    let (m2, m1, c, p1, p2) = (at(-2), at(-1), at(0), at(1), at(2));
    let first = ((m2 - p2) + (p1 - m1) * 8.0) * (1.0 / (12.0 * h));
    let second = ((p1 + m1) * 16.0 - (p2 + m2) - c * 30.0) * (1.0 / (12.0 * h * h));
    (first, second)
}

fn v1_operator(
    v: &[Complex64],
    grid: &Grid,
    flat: usize,
    stride: isize,
    p: &Vec3,
    z: Complex64,
    u: f64,
    params: &PhysicalParams,
) -> Complex64 {
    let (hbar, m) = (params.hbar, params.mass);
    let mut out = (z - params.kinetic(p) - u) * v[flat] - 1.0;
    for axis in 0..grid.dim() {
        let (d1, d2) = derivatives(v, grid, flat, axis, stride);
        out += d2 * (hbar * hbar / (2.0 * m)) + Complex64::new(0.0, hbar * p[axis] / m) * d1;
    }
    out
}

/// Residual of the one-particle resolvent equation for a field `v` sampled on a periodic grid.
///
/// Entries are normalized by `|z| + |U_1| + 1`. Fails with `GridTooCoarse` when the
/// Richardson estimate of the stencil error (from the residual on every other point)
/// exceeds [`TRUNCATION_LIMIT`].
pub fn v1_equation_residual(
    v: &[Complex64],
    grid: &Grid,
    p: &Vec3,
    z: Complex64,
    u1: &[f64],
    params: &PhysicalParams,
) -> Result<ResidualReport> {
    require_periodic(grid, 10)?;
    if v.len() != grid.len() || u1.len() != grid.len() {
        return Err(Error::Shape(format!(
            "grid has {} points, v has {}, U_1 has {}",
            grid.len(),
            v.len(),
            u1.len()
        )));
    }
    let even = (0..grid.dim()).all(|a| grid.count(a) % 2 == 0);
    let values: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let scale = z.norm() + u1[flat].abs() + 1.0;
            let fine = v1_operator(v, grid, flat, 1, p, z, u1[flat], params);
            let estimate = if even && grid.multi_index(flat).iter().all(|i| i % 2 == 0) {
                let coarse = v1_operator(v, grid, flat, 2, p, z, u1[flat], params);
                (fine - coarse).norm() / 15.0 / scale
            } else {
                0.0
            };
            (fine.norm() / scale, estimate)
        })
        .collect();
    let estimate = values.iter().fold(0.0, |m: f64, v| m.max(v.1));
    if estimate > TRUNCATION_LIMIT {
        return Err(Error::GridTooCoarse {
            estimate,
            limit: TRUNCATION_LIMIT,
        });
    }
    let residuals: Vec<f64> = values.iter().map(|v| v.0).collect();
    Ok(ResidualReport::from_values(&residuals, grid))
}

/// Central pair potential `K(r)` with its derivative.
pub trait PairPotential: Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
}

/// `K(r) = K_0 exp(-r^2 / 2 w^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    pub strength: f64,
    pub width: f64,
}

impl PairPotential for GaussianPair {
    fn value(&self, r: f64) -> f64 {
        self.strength * (-0.5 * r * r / (self.width * self.width)).exp()
    }

    fn derivative(&self, r: f64) -> f64 {
        -r / (self.width * self.width) * self.value(r)
    }
}

/// Pair potential from a closure returning `(K(r), K'(r))`.
pub struct PairFn<F>(pub F);

impl<F: Fn(f64) -> (f64, f64) + Sync> PairPotential for PairFn<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r).0
    }

    fn derivative(&self, r: f64) -> f64 {
        (self.0)(r).1
    }
}

/// Inputs of the effective-potential balance.
///
/// Each particle lives on the periodic grid `grid`; `rho_s` and `u_s` are indexed by
/// `(i_1, .., i_s)` with particle 1 slowest, `rho_next` by `(i_1, .., i_{s+1})`.
pub struct ClosureInput<'a> {
    pub order: usize,
    pub grid: Grid,
    pub rho_s: Vec<f64>,
    pub rho_next: Vec<f64>,
    pub u_s: Vec<f64>,
    pub pair: &'a dyn PairPotential,
}

impl ClosureInput<'_> {
    fn validate(&self) -> Result<usize> {
        if !(1..=2).contains(&self.order) {
            return Err(Error::UnsupportedOrder(self.order));
        }
        require_periodic(&self.grid, 5)?;
        let n = self.grid.len();
        let size_s = n.pow(self.order as u32);
        let size_next = n.checked_pow(self.order as u32 + 1).unwrap_or(usize::MAX);
        if size_next > MAX_TABULATED {
            return Err(Error::Shape(format!("{size_next} tabulated values exceed {MAX_TABULATED}")));
        }
        if self.rho_s.len() != size_s || self.u_s.len() != size_s || self.rho_next.len() != size_next {
            return Err(Error::Shape(format!(
                "expected {size_s} values for rho_s and U_s and {size_next} for rho_(s+1)"
            )));
        }
        if self.rho_s.iter().chain(&self.rho_next).any(|v| !(*v >= 0.0)) {
            return Err(Error::param("density", "densities must be non-negative"));
        }
        Ok(n)
    }

    fn check_range(&self) -> Result<()> {
        let mut max_k: f64 = 0.0;
        let mut edge: f64 = 0.0;
        for axis in 0..self.grid.dim() {
            let half = 0.5 * self.grid.spacing(axis) * self.grid.count(axis) as f64;
            for i in 0..=self.grid.count(axis) {
                max_k = max_k.max(self.pair.value(i as f64 * self.grid.spacing(axis)).abs());
            }
            edge = edge.max(self.pair.value(half).abs());
        }
        if max_k > 0.0 && edge > RANGE_TOL * max_k {
            return Err(Error::RangeNotCovered {
                edge: edge / max_k,
                limit: RANGE_TOL,
            });
        }
        Ok(())
    }

    fn max_derivative(&self) -> f64 {
        let mut max: f64 = 0.0;
        for axis in 0..self.grid.dim() {
            let n = 8 * self.grid.count(axis);
            let h = self.grid.spacing(axis) / 8.0;
            for i in 0..=n / 2 {
                max = max.max(self.pair.derivative(i as f64 * h).abs());
            }
        }
        max
    }
}

/// Minimum-image separation `r_a - r_b` on the periodic grid.
fn separation(grid: &Grid, a: usize, b: usize) -> Vec3 {
    let (ia, ib) = (grid.multi_index(a), grid.multi_index(b));
    let mut d = Vec3::zeros();
    for axis in 0..grid.dim() {
        let n = grid.count(axis) as isize;
        let mut k = ia[axis] as isize - ib[axis] as isize;
        if k > n / 2 {
            k -= n;
        } else if k < -(n / 2) {
            k += n;
        }
        d[axis] = k as f64 * grid.spacing(axis);
    }
    d
}

fn pair_gradient(pair: &dyn PairPotential, d: &Vec3) -> Vec3 {
    let r = d.norm();
    if r == 0.0 {
        Vec3::zeros()
    } else {
        d * (pair.derivative(r) / r)
    }
}

/// Residual of the effective-potential balance, componentwise over the grid,
/// normalized by `max rho_s * max |K'|`.
pub fn effective_potential_residual(input: &ClosureInput) -> Result<ResidualReport> {
    let field = effective_potential_residual_field(input)?;
    let scale = input.rho_s.iter().fold(0.0, |m: f64, v| m.max(*v)) * input.max_derivative();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let normalized: Vec<f64> = field.iter().map(|v| v / scale).collect();
    Ok(ResidualReport::from_values(&normalized, &input.grid))
}

/// Unnormalized residual components, `dim` entries per point of the `s`-particle grid.
pub fn effective_potential_residual_field(input: &ClosureInput) -> Result<Vec<f64>> {
    let n = input.validate()?;
    input.check_range()?;
    let grid = &input.grid;
    let dim = grid.dim();
    let s = input.order;
    let cell = grid.cell_measure();
    let size_s = input.rho_s.len();
    let components: Vec<Vec<f64>> = (0..size_s)
        .into_par_iter()
        .map(|flat| {
            let first = flat / n.pow(s as u32 - 1);
            let rest = flat % n.pow(s as u32 - 1);
            let rho = input.rho_s[flat];
            let mut balance = Vec3::zeros();
            for axis in 0..dim {
                let step = |k: isize| {
                    let moved = shifted(grid, first, axis, k);
                    input.u_s[moved * n.pow(s as u32 - 1) + rest]
                };
                let h = grid.spacing(axis);
                let grad = ((step(-2) - step(2)) + 8.0 * (step(1) - step(-1))) / (12.0 * h);
                balance[axis] = rho * grad;
            }
            if s == 2 {
                balance -= pair_gradient(input.pair, &separation(grid, first, rest)) * rho;
            }
            let mut integral = Vec3::zeros();
            for j in 0..n {
                let weight = input.rho_next[flat * n + j];
                if weight != 0.0 {
                    integral += pair_gradient(input.pair, &separation(grid, first, j)) * weight;
                }
            }
            balance -= integral * cell;
            (0..dim).map(|axis| balance[axis]).collect()
        })
        .collect();
    Ok(components.into_iter().flatten().collect())
}
