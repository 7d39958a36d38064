//! Periodic systems.
//!
//! Substituting the plane-wave expansion `v_1 = sum_A b_A(p, z) exp(i A.r)` into
//! the `s = 1` resolvent equation gives the linear system
//!
//! ```text
//! (z - H(p)) b = e_0,   H_{A,A'} = |p + hbar A|^2 / 2m delta_{A,A'} + U_{A-A'}
//! ```
//!
//! so `b_0(p, z) = sum_n |psi_{n,0}|^2 / (z - eps_n(p))` in terms of the
//! eigenpairs of the Bloch operator. Only `b_0` survives the volume integral,
//! and the crystal momentum distribution keeps the lowest band:
//!
//! ```text
//! rho~_1(p) = V A v_0 / (2 pi hbar)^d  psi_0(p)^2 exp(-eps_0(p) / tau)
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{Pole, PoleSet};
use crate::distribution::GriddedDistribution;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::types::{LatticeIndex, PhysicalParams, Vec3};

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
const SOLVE_RESIDUAL_TOL: f64 = 1e-10;
const NEAR_SINGULAR_TOL: f64 = 1e-10;

/// Reciprocal lattice `A = l a1 + m a2 + n a3` truncated to `|l|, |m|, |n| <= cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalLattice {
    basis: Vec<Vec3>,
    cutoff: usize,
}

impl ReciprocalLattice {
    /// Basis vectors must be linearly independent and live in the first `basis.len()` components.
    pub fn new(basis: Vec<Vec3>, cutoff: usize) -> Result<Self> {
        let dim = basis.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::param("basis", format!("need 1 to 3 vectors, got {dim}")));
        }
        for (i, b) in basis.iter().enumerate() {
            if (dim..3).any(|k| b[k] != 0.0) {
                return Err(Error::param(
                    "basis",
                    format!("vector {i} has components beyond dimension {dim}"),
                ));
            }
        }
        let lattice = Self { basis, cutoff };
        let det = lattice.determinant();
        let scale: f64 = lattice.basis.iter().map(|b| b.norm()).product();
        if !(det.abs() > 1e-12 * scale) {
            return Err(Error::param("basis", "vectors are linearly dependent"));
        }
        Ok(lattice)
    }

    /// Simple cubic (square, linear) lattice with reciprocal spacing `a`.
    pub fn cubic(dim: usize, a: f64, cutoff: usize) -> Result<Self> {
        let basis = (0..dim)
            .map(|k| {
                let mut v = Vec3::zeros();
                v[k] = a;
                v
            })
            .collect();
        Self::new(basis, cutoff)
    }

    /// Default plane-wave cutoff: 8 per axis in 1D and 2D, 4 in 3D.
    pub fn default_cutoff(dim: usize) -> usize {
        if dim >= 3 {
            4
        } else {
            8
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec3] {
        &self.basis
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        Self {
            basis: self.basis.clone(),
            cutoff,
        }
    }

    fn determinant(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.basis[j][i]);
        m.determinant()
    }

    /// Volume of the direct-lattice cell, `(2 pi)^d / |det[a_1 .. a_d]|`.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim() as i32) / self.determinant().abs()
    }

    pub fn vector(&self, idx: LatticeIndex) -> Vec3 {
        self.basis
            .iter()
            .zip(idx)
            .fold(Vec3::zeros(), |acc, (b, n)| acc + b * n as f64)
    }

    /// All indices in the cutoff box, lexicographically ordered.
    pub fn indices(&self) -> Vec<LatticeIndex> {
        let c = self.cutoff as i32;
        let range = |k: usize| if k < self.dim() { -c..=c } else { 0..=0 };
        let mut out = Vec::new();
        for l in range(0) {
            for m in range(1) {
                for n in range(2) {
                    out.push([l, m, n]);
                }
            }
        }
        out
    }

    /// Real-valued coordinates of `v` in the basis (solves `sum_i x_i a_i = v`).
    pub fn coordinates(&self, v: &Vec3) -> [f64; 3] {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.basis[j][i]);
        let rhs = DVector::from_fn(d, |i, _| v[i]);
        let x = m.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(d));
        let mut out = [0.0; 3];
        for k in 0..d {
            out[k] = x[k];
        }
        out
    }

    /// Orthogonal basis, so that the Bloch problem may separate by axis.
    fn is_orthogonal(&self) -> bool {
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let (a, b) = (&self.basis[i], &self.basis[j]);
                if a.dot(b).abs() > 1e-12 * a.norm() * b.norm() {
                    return false;
                }
            }
        }
        true
    }
}

/// Fraction `|int_0^L exp(i a x) dx| / L` of a plane wave on a box of length `L`.
///
/// Non-zero reciprocal vectors average out of any volume integral; this is
/// bounded by `2 / (a L)` and vanishes on whole periods.
pub fn plane_wave_box_fraction(a: f64, box_len: f64) -> f64 {
    if a == 0.0 {
        return 1.0;
    }
    (2.0 * (0.5 * a * box_len).sin() / a).abs() / box_len
}

/// Fourier coefficients `U_B` of the periodic potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCoefficients {
    terms: Vec<(LatticeIndex, Complex64)>,
    lookup: HashMap<LatticeIndex, Complex64>,
}

impl PotentialCoefficients {
    /// Requires `U_{-B} = conj(U_B)` so that the Bloch operator is Hermitian.
    pub fn new(terms: Vec<(LatticeIndex, Complex64)>) -> Result<Self> {
        let mut lookup = HashMap::new();
        for &(idx, u) in &terms {
            if lookup.insert(idx, u).is_some() {
                return Err(Error::param("potential", format!("duplicate coefficient {idx:?}")));
            }
        }
        for &(idx, u) in &terms {
            let partner = lookup
                .get(&[-idx[0], -idx[1], -idx[2]])
                .copied()
                .unwrap_or_default();
            if (partner - u.conj()).norm() > HERMITIAN_TOL * u.norm().max(1.0) {
                return Err(Error::param(
                    "potential",
                    format!("U at {idx:?} and its negative are not complex conjugates"),
                ));
            }
        }
        Ok(Self { terms, lookup })
    }

    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    /// `U(x) = 2 u cos(a x)` along the first axis.
    pub fn cosine(u: f64) -> Self {
        Self::new(vec![
            ([1, 0, 0], Complex64::new(u, 0.0)),
            ([-1, 0, 0], Complex64::new(u, 0.0)),
        ])
        .expect("cosine coefficients are Hermitian")
    }

    pub fn terms(&self) -> &[(LatticeIndex, Complex64)] {
        &self.terms
    }

    pub fn get(&self, idx: &LatticeIndex) -> Complex64 {
        self.lookup.get(idx).copied().unwrap_or_default()
    }

    /// `U(r) = sum_B U_B exp(i B.r)`; real by construction.
    pub fn value_at(&self, r: &Vec3, lattice: &ReciprocalLattice) -> f64 {
        self.terms
            .iter()
            .map(|&(idx, u)| u * Complex64::from_polar(1.0, lattice.vector(idx).dot(r)))
            .sum::<Complex64>()
            .re
    }

    fn max_component(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(idx, _)| idx.iter().map(|n| n.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }
}

/// Truncated plane-wave Hamiltonian at fixed quasi-momentum.
#[derive(Debug, Clone)]
pub struct BlochOperator {
    pub p: Vec3,
    pub indices: Vec<LatticeIndex>,
    pub matrix: DMatrix<Complex64>,
}

impl BlochOperator {
    pub fn assemble(
        p: &Vec3,
        lattice: &ReciprocalLattice,
        potential: &PotentialCoefficients,
        params: &PhysicalParams,
    ) -> Self {
        let indices = lattice.indices();
        let n = indices.len();
        let mut matrix = DMatrix::<Complex64>::zeros(n, n);
        for (i, a) in indices.iter().enumerate() {
            let k = p + lattice.vector(*a) * params.hbar;
            matrix[(i, i)] += Complex64::new(k.norm_squared() / (2.0 * params.mass), 0.0);
        }
        if !potential.terms.is_empty() {
            for (i, a) in indices.iter().enumerate() {
                for (j, b) in indices.iter().enumerate() {
                    let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                    let u = potential.get(&diff);
                    if u != Complex64::default() {
                        matrix[(i, j)] += u;
                    }
                }
            }
        }
        Self {
            p: *p,
            indices,
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Position of the `A = 0` component.
    pub fn origin_index(&self) -> usize {
        self.indices.len() / 2
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Full eigendecomposition, eigenvalues ascending.
    pub fn diagonalize(&self) -> BandSolution {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let origin = self.origin_index();
        let energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::<Complex64>::zeros(self.dim(), self.dim());
        for (col, &i) in order.iter().enumerate() {
            let mut v = eig.eigenvectors.column(i).clone_owned();
            // deterministic phase: A = 0 component real and non-negative
            let c0 = v[origin];
            if c0.norm() > 1e-300 {
                let phase = c0.conj() / c0.norm();
                v *= phase;
            }
            vectors.set_column(col, &v);
        }
        let overlaps: Vec<f64> = (0..self.dim()).map(|n| vectors[(origin, n)].norm_sqr()).collect();
        BandSolution::from_spectrum(
            self.p,
            energies,
            overlaps,
            Some(BlochVectors {
                indices: self.indices.clone(),
                vectors,
            }),
        )
    }

    /// Solve `(z - H) b = e_0`.
    pub fn solve(&self, z: Complex64) -> Result<BlochCoefficients> {
        let n = self.dim();
        let shifted = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { z } else { Complex64::default() };
            d - self.matrix[(i, j)]
        });
        let mut rhs = DVector::<Complex64>::zeros(n);
        rhs[self.origin_index()] = Complex64::new(1.0, 0.0);
        let b = shifted
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(Error::NearSingular { distance: 0.0 })?;
        let residual = (&shifted * &b - &rhs).iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        let scale = shifted.iter().fold(0.0, |m: f64, v| m.max(v.norm()))
            * b.iter().fold(0.0, |m: f64, v| m.max(v.norm()))
            + 1.0;
        if residual > SOLVE_RESIDUAL_TOL * scale {
            return Err(Error::NearSingular {
                distance: residual / scale,
            });
        }
        Ok(BlochCoefficients {
            indices: self.indices.clone(),
            values: b.iter().copied().collect(),
        })
    }
}

/// Eigenvectors of a full (non-separated) Bloch operator, columns ordered as the energies.
#[derive(Debug, Clone)]
pub struct BlochVectors {
    pub indices: Vec<LatticeIndex>,
    pub vectors: DMatrix<Complex64>,
}

/// Spectrum of the Bloch operator at one quasi-momentum.
#[derive(Debug, Clone)]
pub struct BandSolution {
    pub p: Vec3,
    /// Ascending band energies `eps_n(p)`.
    pub energies: Vec<f64>,
    /// `|psi_{n,0}|^2`, the weight of the `A = 0` plane wave in band `n`.
    pub overlaps: Vec<f64>,
    /// Lowest energy `eps_0(p)`.
    pub eps0: f64,
    /// `psi_0(p) >= 0`; for a degenerate ground level, the norm of the projection
    /// of the `A = 0` plane wave onto that level.
    pub psi0: f64,
    pub vectors: Option<BlochVectors>,
}

impl BandSolution {
    fn from_spectrum(p: Vec3, energies: Vec<f64>, overlaps: Vec<f64>, vectors: Option<BlochVectors>) -> Self {
        let eps0 = energies[0];
        let psi0_sq: f64 = energies
            .iter()
            .zip(&overlaps)
            .take_while(|(e, _)| **e - eps0 < DEGENERACY_TOL)
            .map(|(_, w)| w)
            .sum();
        Self {
            p,
            energies,
            overlaps,
            eps0,
            psi0: psi0_sq.sqrt(),
            vectors,
        }
    }

    pub fn psi0_sq(&self) -> f64 {
        self.psi0 * self.psi0
    }

    /// `sum_n |psi_{n,0}|^2`; 1 for a complete basis.
    pub fn completeness(&self) -> f64 {
        self.overlaps.iter().sum()
    }

    /// `sum_n |psi_{n,0}|^2 exp(-eps_n / tau)`.
    pub fn boltzmann_sum(&self, tau: f64) -> f64 {
        self.energies
            .iter()
            .zip(&self.overlaps)
            .map(|(e, w)| w * (-e / tau).exp())
            .sum()
    }

    /// `b_0(p, z)` from the spectral decomposition.
    pub fn spectral_b0(&self, z: Complex64) -> Complex64 {
        self.energies
            .iter()
            .zip(&self.overlaps)
            .map(|(e, w)| *w / (z - e))
            .sum()
    }

    /// Poles of `b_0`, degenerate levels merged.
    pub fn poles(&self) -> PoleSet {
        let mut poles: Vec<Pole> = Vec::new();
        for (e, w) in self.energies.iter().zip(&self.overlaps) {
            match poles.last_mut() {
                Some(last) if (e - last.location).abs() < DEGENERACY_TOL => {
                    last.residue += Complex64::new(*w, 0.0);
                }
                _ => poles.push(Pole {
                    location: *e,
                    residue: Complex64::new(*w, 0.0),
                }),
            }
        }
        PoleSet { poles }
    }

    /// Distance from `z` to the nearest band energy.
    pub fn distance_to_spectrum(&self, z: Complex64) -> f64 {
        self.energies
            .iter()
            .map(|e| (z - e).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Plane-wave coefficients `b_A(p, z)` of `v_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochCoefficients {
    pub indices: Vec<LatticeIndex>,
    pub values: Vec<Complex64>,
}

impl BlochCoefficients {
    pub fn get(&self, idx: &LatticeIndex) -> Option<Complex64> {
        self.indices.iter().position(|i| i == idx).map(|k| self.values[k])
    }

    /// `v_1(r) = sum_A b_A exp(i A.r)`.
    pub fn evaluate(&self, r: &Vec3, lattice: &ReciprocalLattice) -> Complex64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(idx, b)| b * Complex64::from_polar(1.0, lattice.vector(*idx).dot(r)))
            .sum()
    }
}

/// Keep the volume-proportional term `b_000`: every other plane wave
/// integrates to something bounded while `V` grows.
pub fn volume_term_extraction(coeffs: &BlochCoefficients) -> Complex64 {
    coeffs.get(&[0, 0, 0]).unwrap_or_default()
}

/// Which bands enter the momentum distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandMode {
    /// Lowest band only.
    Ground,
    /// `sum_n |psi_{n,0}|^2 exp(-eps_n / tau)`.
    AllBands,
}

/// How the plane-wave cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// Use the lattice cutoff as given.
    Fixed,
    /// Double the cutoff until the monitored quantity changes by at most `tol`.
    Doubling { tol: f64, max_cutoff: usize },
}

impl CutoffPolicy {
    pub fn default_for(dim: usize) -> Self {
        match dim {
            1 => CutoffPolicy::Doubling { tol: 1e-8, max_cutoff: 128 },
            2 => CutoffPolicy::Doubling { tol: 1e-8, max_cutoff: 16 },
            _ => CutoffPolicy::Fixed,
        }
    }
}

/// A periodic one-body problem: lattice, potential and parameters.
#[derive(Debug, Clone)]
pub struct CrystalModel {
    pub lattice: ReciprocalLattice,
    pub potential: PotentialCoefficients,
    pub params: PhysicalParams,
    pub policy: CutoffPolicy,
    separable: Option<Vec<(f64, Vec3, PotentialCoefficients)>>,
}

impl CrystalModel {
    pub fn new(
        lattice: ReciprocalLattice,
        potential: PotentialCoefficients,
        params: PhysicalParams,
    ) -> Result<Self> {
        params.validate()?;
        let dim = lattice.dim();
        for (idx, _) in potential.terms() {
            if (dim..3).any(|k| idx[k] != 0) {
                return Err(Error::param(
                    "potential",
                    format!("coefficient {idx:?} exceeds lattice dimension {dim}"),
                ));
            }
        }
        if potential.max_component() > lattice.cutoff() {
            return Err(Error::param(
                "cutoff",
                "plane-wave cutoff is smaller than the potential's reach",
            ));
        }
        let separable = Self::split_axes(&lattice, &potential);
        let policy = if separable.is_some() {
            CutoffPolicy::default_for(1)
        } else {
            CutoffPolicy::default_for(dim)
        };
        Ok(Self {
            lattice,
            potential,
            params,
            policy,
            separable,
        })
    }

    pub fn with_policy(mut self, policy: CutoffPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Whether the problem is solved as independent one-dimensional problems.
    pub fn is_separable(&self) -> bool {
        self.separable.is_some()
    }

    /// Orthogonal basis with a potential of the form `sum_i U_i(r . a_i)`
    /// separates into 1D problems along each basis direction.
    fn split_axes(
        lattice: &ReciprocalLattice,
        potential: &PotentialCoefficients,
    ) -> Option<Vec<(f64, Vec3, PotentialCoefficients)>> {
        if lattice.dim() < 2 || !lattice.is_orthogonal() {
            return None;
        }
        if potential
            .terms()
            .iter()
            .any(|(idx, _)| idx.iter().filter(|n| **n != 0).count() > 1)
        {
            return None;
        }
        let axes = (0..lattice.dim())
            .map(|k| {
                let a = lattice.basis()[k];
                let terms: Vec<_> = potential
                    .terms()
                    .iter()
                    .filter_map(|&(idx, u)| {
                        let zero = idx == [0, 0, 0];
                        if (zero && k == 0) || (!zero && idx[k] != 0) {
                            Some(([idx[k], 0, 0], u))
                        } else {
                            None
                        }
                    })
                    .collect();
                let pot = PotentialCoefficients::new(terms).expect("sub-potential inherits Hermiticity");
                (a.norm(), a / a.norm(), pot)
            })
            .collect();
        Some(axes)
    }

    pub fn operator(&self, p: &Vec3, cutoff: usize) -> BlochOperator {
        BlochOperator::assemble(p, &self.lattice.with_cutoff(cutoff), &self.potential, &self.params)
    }

    fn solve_bands_at(&self, p: &Vec3, cutoff: usize) -> BandSolution {
        match &self.separable {
            None => self.operator(p, cutoff).diagonalize(),
            Some(axes) => {
                let parts: Vec<BandSolution> = axes
                    .iter()
                    .map(|(len, dir, pot)| {
                        let lat = ReciprocalLattice::cubic(1, *len, cutoff).expect("positive spacing");
                        let q = Vec3::new(p.dot(dir), 0.0, 0.0);
                        BlochOperator::assemble(&q, &lat, pot, &self.params).diagonalize()
                    })
                    .collect();
                combine_separable(*p, &parts)
            }
        }
    }

    fn converge<T>(
        &self,
        solve: impl Fn(usize) -> Result<T>,
        change: impl Fn(&T, &T) -> f64,
    ) -> Result<T> {
        let mut cutoff = self.lattice.cutoff();
        let mut current = solve(cutoff)?;
        match self.policy {
            CutoffPolicy::Fixed => Ok(current),
            CutoffPolicy::Doubling { tol, max_cutoff } => loop {
                let next_cutoff = (2 * cutoff).max(1);
                if next_cutoff > max_cutoff {
                    let probe = solve(max_cutoff.max(cutoff))?;
                    return Err(Error::NotConverged {
                        change: change(&current, &probe),
                        cutoff,
                    });
                }
                let next = solve(next_cutoff)?;
                let delta = change(&current, &next);
                if delta <= tol {
                    return Ok(next);
                }
                cutoff = next_cutoff;
                current = next;
            },
        }
    }

    /// Full spectrum and ground band at quasi-momentum `p`, cutoff converged per policy.
    pub fn ground_band(&self, p: &Vec3) -> Result<BandSolution> {
        self.converge(
            |c| Ok(self.solve_bands_at(p, c)),
            |a, b| (a.eps0 - b.eps0).abs().max((a.psi0_sq() - b.psi0_sq()).abs()),
        )
    }

    /// Plane-wave coefficients of `v_1(r, p, z)`.
    pub fn bloch_coefficients(&self, p: &Vec3, z: Complex64) -> Result<BlochCoefficients> {
        self.converge(
            |c| {
                let op = self.operator(p, c);
                let bands = op.diagonalize();
                let distance = bands.distance_to_spectrum(z);
                if distance < NEAR_SINGULAR_TOL {
                    return Err(Error::NearSingular { distance });
                }
                op.solve(z)
            },
            |a, b| {
                let (a0, b0) = (volume_term_extraction(a), volume_term_extraction(b));
                (a0 - b0).norm() / a0.norm().max(1.0)
            },
        )
    }

    /// `V v_0 / (2 pi hbar)^d`, the prefactor of the distribution with `A = 1`.
    fn unit_prefactor(&self) -> f64 {
        self.params.volume * self.lattice.cell_volume()
            / (2.0 * PI * self.params.hbar).powi(self.lattice.dim() as i32)
    }

    fn band_factor(&self, band: &BandSolution, mode: BandMode) -> f64 {
        match mode {
            BandMode::Ground => band.psi0_sq() * (-band.eps0 / self.params.tau).exp(),
            BandMode::AllBands => band.boltzmann_sum(self.params.tau),
        }
    }

    /// `rho~_1(p)` for a given normalization constant.
    pub fn rho1(&self, p: &Vec3, a_norm: f64, mode: BandMode) -> Result<f64> {
        self.params.require_positive_tau()?;
        let band = self.ground_band(p)?;
        Ok(a_norm * self.unit_prefactor() * self.band_factor(&band, mode))
    }

    /// Distribution on `grid`, with `A` fixed so that it integrates to `N`.
    pub fn distribution(&self, grid: &Grid, mode: BandMode) -> Result<CrystalDistribution> {
        self.params.require_positive_tau()?;
        if grid.dim() != self.lattice.dim() {
            return Err(Error::Shape(format!(
                "momentum grid is {}-D, lattice is {}-D",
                grid.dim(),
                self.lattice.dim()
            )));
        }
        let points: Vec<Vec3> = grid.points().collect();
        let bands: Vec<BandSolution> = points
            .par_iter()
            .map(|p| self.ground_band(p))
            .collect::<Result<_>>()?;
        let prefactor = self.unit_prefactor();
        let unit: Vec<f64> = bands
            .iter()
            .map(|b| prefactor * self.band_factor(b, mode))
            .collect();
        let unit = GriddedDistribution::new(grid.clone(), unit)?;
        let integral = unit.quadrature()?;
        if !(integral > 0.0) {
            return Err(Error::param("normalization", "distribution integrates to zero"));
        }
        let a_norm = self.params.n_particles / integral;
        Ok(CrystalDistribution {
            a_norm,
            rho: unit.scaled(a_norm),
            eps0: bands.iter().map(|b| b.eps0).collect(),
            psi0_sq: bands.iter().map(|b| b.psi0_sq()).collect(),
        })
    }
}

fn combine_separable(p: Vec3, parts: &[BandSolution]) -> BandSolution {
    let mut energies = vec![0.0];
    let mut overlaps = vec![1.0];
    for part in parts {
        let mut e2 = Vec::with_capacity(energies.len() * part.energies.len());
        let mut w2 = Vec::with_capacity(e2.capacity());
        for (e, w) in energies.iter().zip(&overlaps) {
            for (pe, pw) in part.energies.iter().zip(&part.overlaps) {
                e2.push(e + pe);
                w2.push(w * pw);
            }
        }
        energies = e2;
        overlaps = w2;
    }
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&i, &j| energies[i].total_cmp(&energies[j]));
    let energies: Vec<f64> = order.iter().map(|&i| energies[i]).collect();
    let overlaps: Vec<f64> = order.iter().map(|&i| overlaps[i]).collect();
    BandSolution::from_spectrum(p, energies, overlaps, None)
}

/// Gridded crystal distribution together with its band data.
#[derive(Debug, Clone)]
pub struct CrystalDistribution {
    pub a_norm: f64,
    pub rho: GriddedDistribution,
    pub eps0: Vec<f64>,
    pub psi0_sq: Vec<f64>,
}

/// Plane-wave coefficients of `v_1`, cutoff converged by doubling.
pub fn bloch_coefficients(
    p: &Vec3,
    z: Complex64,
    lattice: &ReciprocalLattice,
    potential: &PotentialCoefficients,
    params: &PhysicalParams,
) -> Result<BlochCoefficients> {
    let model = CrystalModel::new(lattice.clone(), potential.clone(), *params)?;
    let model = model.with_policy(CutoffPolicy::default_for(lattice.dim()));
    let model = CrystalModel { separable: None, ..model };
    model.bloch_coefficients(p, z)
}

/// Lowest band at quasi-momentum `p`.
pub fn ground_band(
    p: &Vec3,
    lattice: &ReciprocalLattice,
    potential: &PotentialCoefficients,
    params: &PhysicalParams,
) -> Result<BandSolution> {
    CrystalModel::new(lattice.clone(), potential.clone(), *params)?.ground_band(p)
}

/// `(V A v_0 / (2 pi hbar)^d) psi_0(p)^2 exp(-eps_0(p) / tau)`.
pub fn rho1_momentum_crystal(
    p: &Vec3,
    lattice: &ReciprocalLattice,
    potential: &PotentialCoefficients,
    params: &PhysicalParams,
    a_norm: f64,
) -> Result<f64> {
    CrystalModel::new(lattice.clone(), potential.clone(), *params)?.rho1(p, a_norm, BandMode::Ground)
}
