//! Phase-space function of `s` particles.
//!
//! ```text
//! W(x_s, m_s) = 1 / (2 pi i (2 pi hbar)^(d s) s!) oint n_s(z) v_s(x_s, m_s, z)
//!               sum_P (+-1)^P exp[(i/hbar) sum_k r_k (p_k - P p_k)] dz
//! ```
//!
//! Integrating over the momenta gives `rho_s(x_s)`; integrating over the
//! positions gives `rho~_s(m_s)`. Orders 1 and 2 are supported.
//!
//! For a periodic potential `W` is complex at points with `p != 0`; only its
//! marginals are real.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{contour_integral, residue_total, ContourSpec, Pole, PoleSet, WeightConstants};
use crate::crystal::{BlochOperator, PotentialCoefficients, ReciprocalLattice, DEGENERACY_TOL};
use crate::distribution::{GriddedDistribution, TAIL_THRESHOLD};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridKind};
use crate::types::{PhysicalParams, Statistics, Vec3};

/// Largest imaginary part tolerated in a marginal, relative to its maximum.
pub const MARGINAL_IMAGINARY_TOL: f64 = 1e-9;

/// `sum_P (+-1)^P exp[(i/hbar) sum_k r_k . (p_k - P p_k)]` for `s = 1, 2`.
pub fn exchange_sum(
    statistics: Statistics,
    positions: &[Vec3],
    momenta: &[Vec3],
    hbar: f64,
) -> Result<Complex64> {
    if positions.len() != momenta.len() {
        return Err(Error::Shape(format!(
            "{} positions but {} momenta",
            positions.len(),
            momenta.len()
        )));
    }
    match positions.len() {
        1 => Ok(Complex64::new(1.0, 0.0)),
        2 => {
            let phase = (positions[0] - positions[1]).dot(&(momenta[0] - momenta[1])) / hbar;
            Ok(Complex64::new(1.0, 0.0) + statistics.sign() * Complex64::from_polar(1.0, phase))
        }
        s => Err(Error::UnsupportedOrder(s)),
    }
}

/// Source of `v_s(x_s, m_s, z)`.
pub trait ResolventProvider: Sync {
    /// Number of particles `s`.
    fn order(&self) -> usize;

    /// Spatial dimension of one particle.
    fn dim(&self) -> usize;

    /// Real poles with residues, when they are known in closed form.
    fn poles(&self, positions: &[Vec3], momenta: &[Vec3]) -> Option<Result<PoleSet>>;

    fn value(&self, positions: &[Vec3], momenta: &[Vec3], z: Complex64) -> Result<Complex64>;

    /// Poles for many position sets at fixed momenta.
    fn poles_batch(&self, positions: &[Vec<Vec3>], momenta: &[Vec3]) -> Option<Result<Vec<PoleSet>>> {
        positions
            .iter()
            .map(|x| self.poles(x, momenta))
            .collect::<Option<Result<Vec<_>>>>()
    }
}

/// `v_s = 1 / (z - sum_k p_k^2 / 2m)`, the resolvent without interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeResolvent {
    pub params: PhysicalParams,
    pub order: usize,
    pub dim: usize,
}

impl FreeResolvent {
    pub fn new(params: PhysicalParams, order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(Self { params, order, dim })
    }

    fn energy(&self, momenta: &[Vec3]) -> f64 {
        momenta.iter().map(|p| self.params.kinetic(p)).sum()
    }
}

impl ResolventProvider for FreeResolvent {
    fn order(&self) -> usize {
        self.order
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn poles(&self, _positions: &[Vec3], momenta: &[Vec3]) -> Option<Result<PoleSet>> {
        Some(Ok(PoleSet::single(self.energy(momenta), Complex64::new(1.0, 0.0))))
    }

    fn value(&self, _positions: &[Vec3], momenta: &[Vec3], z: Complex64) -> Result<Complex64> {
        let d = z - self.energy(momenta);
        if d.norm() == 0.0 {
            return Err(Error::PoleHit { re: z.re, im: z.im });
        }
        Ok(1.0 / d)
    }
}

/// One particle in a periodic potential:
/// `v_1(r, p, z) = sum_A b_A(p, z) exp(i A.r)` at a fixed plane-wave cutoff.
#[derive(Debug, Clone)]
pub struct PeriodicResolvent {
    pub lattice: ReciprocalLattice,
    pub potential: PotentialCoefficients,
    pub params: PhysicalParams,
}

impl PeriodicResolvent {
    pub fn new(lattice: ReciprocalLattice, potential: PotentialCoefficients, params: PhysicalParams) -> Self {
        Self {
            lattice,
            potential,
            params,
        }
    }

    pub(crate) fn operator(&self, p: &Vec3) -> BlochOperator {
        BlochOperator::assemble(p, &self.lattice, &self.potential, &self.params)
    }

    /// Residue at `eps_n` is `u_n(r) conj(psi_{n,0})`; degenerate levels merged.
    fn poles_at(&self, positions: &[Vec<Vec3>], p: &Vec3) -> Result<Vec<PoleSet>> {
        let bands = self.operator(p).diagonalize();
        let vectors = bands.vectors.as_ref().expect("full diagonalization keeps eigenvectors");
        let origin = vectors.indices.len() / 2;
        let reciprocal: Vec<Vec3> = vectors.indices.iter().map(|i| self.lattice.vector(*i)).collect();
        positions
            .iter()
            .map(|x| {
                let r = &x[0];
                let phases: Vec<Complex64> = reciprocal
                    .iter()
                    .map(|a| Complex64::from_polar(1.0, a.dot(r)))
                    .collect();
                let mut poles: Vec<Pole> = Vec::new();
                for (n, e) in bands.energies.iter().enumerate() {
                    let col = vectors.vectors.column(n);
                    let u: Complex64 = col.iter().zip(&phases).map(|(c, ph)| c * ph).sum();
                    let residue = u * col[origin].conj();
                    match poles.last_mut() {
                        Some(last) if (e - last.location).abs() < DEGENERACY_TOL => last.residue += residue,
                        _ => poles.push(Pole {
                            location: *e,
                            residue,
                        }),
                    }
                }
                PoleSet::new(poles)
            })
            .collect()
    }
}

impl ResolventProvider for PeriodicResolvent {
    fn order(&self) -> usize {
        1
    }

    fn dim(&self) -> usize {
        self.lattice.dim()
    }

    fn poles(&self, positions: &[Vec3], momenta: &[Vec3]) -> Option<Result<PoleSet>> {
        Some(
            self.poles_at(&[positions.to_vec()], &momenta[0])
                .map(|mut v| v.remove(0)),
        )
    }

    fn poles_batch(&self, positions: &[Vec<Vec3>], momenta: &[Vec3]) -> Option<Result<Vec<PoleSet>>> {
        Some(self.poles_at(positions, &momenta[0]))
    }

    fn value(&self, positions: &[Vec3], momenta: &[Vec3], z: Complex64) -> Result<Complex64> {
        let b = self.operator(&momenta[0]).solve(z)?;
        Ok(b.evaluate(&positions[0], &self.lattice))
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if !(1..=2).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    if dim == 0 || order * dim > 3 {
        return Err(Error::param(
            "dim",
            format!("order {order} in {dim} dimensions exceeds three phase-space axes"),
        ));
    }
    Ok(())
}

/// Split a point of the `s d`-dimensional grid into `s` particle vectors.
fn split(point: &Vec3, order: usize, dim: usize) -> Vec<Vec3> {
    (0..order)
        .map(|k| {
            let mut v = Vec3::zeros();
            for a in 0..dim {
                v[a] = point[k * dim + a];
            }
            v
        })
        .collect()
}

fn prefactor(order: usize, dim: usize, hbar: f64) -> f64 {
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    1.0 / ((2.0 * PI * hbar).powi((dim * order) as i32) * factorial)
}

fn z_integral(
    provider: &dyn ResolventProvider,
    positions: &[Vec3],
    momenta: &[Vec3],
    poles: Option<PoleSet>,
    contour: Option<&ContourSpec>,
    params: &PhysicalParams,
) -> Result<Complex64> {
    if let Some(poles) = poles {
        return residue_total(&poles, params);
    }
    let contour = contour.ok_or_else(|| Error::param("contour", "required when the poles are unknown"))?;
    let tau = params.tau;
    let mut failure = None;
    let value = contour_integral(
        |z| match provider.value(positions, momenta, z) {
            Ok(v) => (-z / tau).exp() * v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::default()
            }
        },
        contour,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `W(x_s, m_s)` at one phase-space point. Uses the residue theorem when the
/// provider knows its poles, otherwise quadrature along `contour`.
pub fn wigner_function(
    positions: &[Vec3],
    momenta: &[Vec3],
    provider: &dyn ResolventProvider,
    weights: &WeightConstants,
    contour: Option<&ContourSpec>,
    params: &PhysicalParams,
) -> Result<Complex64> {
    let s = provider.order();
    check_shape(s, provider.dim())?;
    if positions.len() != s || momenta.len() != s {
        return Err(Error::Shape(format!("order {s} needs {s} positions and momenta")));
    }
    let poles = provider.poles(positions, momenta).transpose()?;
    let integral = z_integral(provider, positions, momenta, poles, contour, params)?;
    let exchange = exchange_sum(params.statistics, positions, momenta, params.hbar)?;
    Ok(weights.a_s(s, params)? * prefactor(s, provider.dim(), params.hbar) * integral * exchange)
}

/// `W` tabulated on a position grid times a momentum grid.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub order: usize,
    pub dim: usize,
    pub positions: Grid,
    pub momenta: Grid,
    /// System volume (length, area) of one particle.
    pub volume: f64,
    /// `values[ix * momenta.len() + im]`.
    pub values: Vec<Complex64>,
}

impl WignerField {
    /// Tabulate `W`. Both grids carry all `s` particles, so each has dimension `s d`.
    /// The position grid must be periodic and cover whole periods (or the whole box).
    pub fn compute(
        positions: Grid,
        momenta: Grid,
        provider: &dyn ResolventProvider,
        weights: &WeightConstants,
        contour: Option<&ContourSpec>,
        params: &PhysicalParams,
    ) -> Result<Self> {
        let (s, d) = (provider.order(), provider.dim());
        check_shape(s, d)?;
        if positions.dim() != s * d || momenta.dim() != s * d {
            return Err(Error::Shape(format!(
                "grids must be {}-dimensional for order {s} in {d} dimensions",
                s * d
            )));
        }
        if positions.kind() != GridKind::Periodic {
            return Err(Error::param("positions", "position grid must be periodic"));
        }
        let a_s = weights.a_s(s, params)?;
        let pref = a_s * prefactor(s, d, params.hbar);
        let xs: Vec<Vec<Vec3>> = positions.points().map(|x| split(&x, s, d)).collect();
        let ms: Vec<Vec<Vec3>> = momenta.points().map(|m| split(&m, s, d)).collect();
        let columns: Vec<Vec<Complex64>> = ms
            .par_iter()
            .map(|m| {
                let poles = provider.poles_batch(&xs, m).transpose()?;
                xs.iter()
                    .enumerate()
                    .map(|(ix, x)| {
                        let p = poles.as_ref().map(|v| v[ix].clone());
                        let integral = z_integral(provider, x, m, p, contour, params)?;
                        let exchange = exchange_sum(params.statistics, x, m, params.hbar)?;
                        Ok(pref * integral * exchange)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let (nx, nm) = (xs.len(), ms.len());
        let mut values = vec![Complex64::default(); nx * nm];
        for (im, col) in columns.into_iter().enumerate() {
            for (ix, v) in col.into_iter().enumerate() {
                values[ix * nm + im] = v;
            }
        }
        Ok(Self {
            order: s,
            dim: d,
            positions,
            momenta,
            volume: params.volume,
            values,
        })
    }

    pub fn get(&self, ix: usize, im: usize) -> Complex64 {
        self.values[ix * self.momenta.len() + im]
    }

    /// Largest `|Im W| / max |W|`.
    pub fn imaginary_fraction(&self) -> f64 {
        let max = self.values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        let im = self.values.iter().fold(0.0, |m: f64, v| m.max(v.im.abs()));
        if max == 0.0 {
            0.0
        } else {
            im / max
        }
    }

    fn check_momentum_tails(&self) -> Result<()> {
        let nm = self.momenta.len();
        let max = self.values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        let edge = (0..nm)
            .filter(|&im| self.momenta.is_boundary(im))
            .flat_map(|im| (0..self.positions.len()).map(move |ix| (ix, im)))
            .fold(0.0, |m: f64, (ix, im)| m.max(self.get(ix, im).norm()));
        if max > 0.0 && edge > TAIL_THRESHOLD * max {
            return Err(Error::TailNotDecayed {
                ratio: edge / max,
                limit: TAIL_THRESHOLD,
            });
        }
        Ok(())
    }

    /// `rho_s(x_s) = int W dm_s`.
    pub fn marginal_position(&self) -> Result<GriddedDistribution> {
        self.check_momentum_tails()?;
        let nm = self.momenta.len();
        let weights: Vec<f64> = (0..nm).map(|im| self.momenta.weight(im)).collect();
        let values: Vec<Complex64> = (0..self.positions.len())
            .into_par_iter()
            .map(|ix| {
                self.values[ix * nm..(ix + 1) * nm]
                    .iter()
                    .zip(&weights)
                    .map(|(v, w)| v * w)
                    .sum()
            })
            .collect();
        real_part(self.positions.clone(), values)
    }

    /// `rho~_s(m_s) = int W dx_s`, extended from the tabulated cells to the volume `V^s`.
    pub fn marginal_momentum(&self) -> Result<GriddedDistribution> {
        let nm = self.momenta.len();
        let scale = self.volume.powi(self.order as i32) / self.positions.measure();
        let weights: Vec<f64> = (0..self.positions.len()).map(|ix| self.positions.weight(ix)).collect();
        let values: Vec<Complex64> = (0..nm)
            .into_par_iter()
            .map(|im| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(ix, w)| self.get(ix, im) * *w)
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        let dist = real_part(self.momenta.clone(), values)?;
        dist.check_tails()?;
        Ok(dist)
    }
}

fn real_part(grid: Grid, values: Vec<Complex64>) -> Result<GriddedDistribution> {
    let max = values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
    let im = values.iter().fold(0.0, |m: f64, v| m.max(v.im.abs()));
    if max > 0.0 && im > MARGINAL_IMAGINARY_TOL * max {
        return Err(Error::ImaginaryResidue {
            residue: im / max,
            limit: MARGINAL_IMAGINARY_TOL,
        });
    }
    GriddedDistribution::new(grid, values.iter().map(|v| v.re).collect())
}
