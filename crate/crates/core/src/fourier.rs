//! Position <-> momentum transforms of wavefunctions and reduced density matrices.
//!
//! Transforms are direct quadratures of the continuum integrals
//!
//! ```text
//! psi~(p) = (2 pi hbar)^(-d/2) int psi(x) exp(-i p.x / hbar) dx
//! R~(m, m') = (2 pi hbar)^(-d) int R(x, x') exp(-i (m.x - m'.x') / hbar) dx dx'
//! ```
//!
//! where `d` is the number of Cartesian coordinates carried by the grid. A
//! wavefunction of `N` particles on a line is a function on `R^N`, so the same
//! code handles one particle in 3D and three particles in 1D. The kernel is
//! separable, so each axis is applied in turn.
//!
//! Delta functions never live on grids. Where `delta(0)` appears it is
//! replaced by [`delta_zero_regularized`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::types::PhysicalParams;

const NORM_IN_TOL: f64 = 1e-8;
const NORM_OUT_TOL: f64 = 1e-6;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-6;

/// Complex amplitude sampled on a position or momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&crate::Vec3) -> Complex64) -> Self {
        let values = grid.points().map(|x| f(&x)).collect();
        Self { grid, values }
    }

    /// `int |psi|^2` by the grid's quadrature rule.
    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.weight(i) * v.norm_sqr())
            .sum()
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Self {
        let n = self.norm_sq().sqrt();
        for v in &mut self.values {
            *v /= n;
        }
        self
    }
}

/// Reduced density matrix on a grid of `s` particle coordinates.
///
/// Row `a` and column `b` index grid points, so `values[(a, b)] = R_s(x_a, x'_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixGrid {
    pub order: usize,
    pub grid: Grid,
    pub values: DMatrix<Complex64>,
}

impl DensityMatrixGrid {
    pub fn new(order: usize, grid: Grid, values: DMatrix<Complex64>) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        let n = grid.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::Shape(format!(
                "density matrix is {}x{}, grid has {n} points",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(Self {
            order,
            grid,
            values,
        })
    }

    pub fn from_fn(
        order: usize,
        grid: Grid,
        f: impl Fn(&crate::Vec3, &crate::Vec3) -> Complex64,
    ) -> Result<Self> {
        let pts: Vec<_> = grid.points().collect();
        let n = pts.len();
        let values = DMatrix::from_fn(n, n, |a, b| f(&pts[a], &pts[b]));
        Self::new(order, grid, values)
    }

    /// `N phi(x) phi*(x')`: every particle in the normalized orbital `phi`.
    pub fn from_orbital(phi: &WaveFunction, n_particles: f64) -> Result<Self> {
        let n = phi.values.len();
        let values = DMatrix::from_fn(n, n, |a, b| {
            phi.values[a] * phi.values[b].conj() * n_particles
        });
        Self::new(1, phi.grid.clone(), values)
    }

    /// Reduced density matrix of order `s` from an `N`-particle wavefunction on a line.
    ///
    /// The grid of `psi` must have `N` identical axes; the first `s` are kept and
    /// the rest integrated out, with the `N!/(N-s)!` prefactor.
    pub fn reduce(psi: &WaveFunction, order: usize) -> Result<Self> {
        let n_body = psi.grid.dim();
        if !(1..=2).contains(&order) || order > n_body {
            return Err(Error::UnsupportedOrder(order));
        }
        let counts = psi.grid.counts();
        let kept: usize = counts[..order].iter().product();
        let traced: usize = counts[order..n_body].iter().product();
        let axes: Vec<(f64, usize)> = (0..order)
            .map(|k| (psi.grid.spacing(k), (psi.grid.count(k) - 1) / 2))
            .collect();
        let reduced_grid = match psi.grid.kind() {
            crate::grid::GridKind::Symmetric => Grid::symmetric_axes(&axes)?,
            crate::grid::GridKind::Periodic => Grid::periodic_axes(
                &(0..order)
                    .map(|k| {
                        (
                            psi.grid.origin(k),
                            psi.grid.spacing(k) * psi.grid.count(k) as f64,
                            psi.grid.count(k),
                        )
                    })
                    .collect::<Vec<_>>(),
            )?,
        };
        let prefactor: f64 = ((n_body - order + 1)..=n_body).map(|k| k as f64).product();
        let traced_weight = |t: usize| -> f64 {
            let mut rem = t;
            let mut w = 1.0;
            for k in (order..n_body).rev() {
                let c = psi.grid.count(k);
                w *= psi.grid.axis_weight(k, rem % c);
                rem /= c;
            }
            w
        };
        let weights: Vec<f64> = (0..traced).map(traced_weight).collect();
        let values = DMatrix::from_fn(kept, kept, |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, w) in weights.iter().enumerate() {
                acc += psi.values[a * traced + t] * psi.values[b * traced + t].conj() * *w;
            }
            acc * prefactor
        });
        Self::new(order, reduced_grid, values)
    }

    /// Diagonal `rho_s(x) = R_s(x, x)` as a real field (imaginary parts dropped).
    pub fn diagonal(&self) -> crate::GriddedDistribution {
        crate::GriddedDistribution {
            grid: self.grid.clone(),
            values: (0..self.grid.len()).map(|a| self.values[(a, a)].re).collect(),
        }
    }

    /// `int rho_s` over the grid.
    pub fn trace(&self) -> f64 {
        self.diagonal().quadrature_unchecked()
    }

    /// `max |R(a,b) - conj R(b,a)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.values.nrows();
        let mut dev: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                dev = dev.max((self.values[(a, b)] - self.values[(b, a)].conj()).norm());
            }
        }
        dev
    }

    fn check_hermitian(&self) -> Result<()> {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm())).max(1e-300);
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL * scale {
            Err(Error::NotHermitian { deviation })
        } else {
            Ok(())
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self {
            order: self.order,
            grid: self.grid.clone(),
            values: self.values.adjoint(),
        }
    }
}

/// `delta(0)` in three dimensions for a finite box: `V / (2 pi hbar)^3`.
pub fn delta_zero_regularized(params: &PhysicalParams) -> f64 {
    delta_zero_regularized_in(3, params.volume, params.hbar)
}

/// `delta(0) = V / (2 pi hbar)^d` for a `d`-dimensional box of measure `volume`.
pub fn delta_zero_regularized_in(dim: usize, volume: f64, hbar: f64) -> f64 {
    volume / (2.0 * PI * hbar).powi(dim as i32)
}

#[derive(Clone, Copy)]
enum Direction {
    /// kernel `exp(-i p.x / hbar)`, integrating over x
    ToMomentum,
    /// kernel `exp(+i p.x / hbar)`, integrating over p
    ToPosition,
}

/// Per-axis kernel matrices from `source` to `target`, prefactor included.
fn axis_kernels(source: &Grid, target: &Grid, hbar: f64, dir: Direction) -> Vec<DMatrix<Complex64>> {
    let sign = match dir {
        Direction::ToMomentum => -1.0,
        Direction::ToPosition => 1.0,
    };
    let norm = (2.0 * PI * hbar).powf(-0.5);
    (0..source.dim())
        .map(|k| {
            let src = source.axis_coords(k);
            let dst = target.axis_coords(k);
            DMatrix::from_fn(dst.len(), src.len(), |j, i| {
                let phase = sign * dst[j] * src[i] / hbar;
                Complex64::from_polar(norm * source.axis_weight(k, i), phase)
            })
        })
        .collect()
}

/// Apply per-axis matrices to a vector laid out with `counts_in` (axis 0 slowest).
fn apply_separable(
    input: &[Complex64],
    counts_in: [usize; 3],
    mats: &[DMatrix<Complex64>],
) -> Vec<Complex64> {
    let mut data = input.to_vec();
    let mut counts = counts_in;
    for (axis, m) in mats.iter().enumerate() {
        let n_out = m.nrows();
        let n_in = counts[axis];
        let outer: usize = counts[..axis].iter().product();
        let inner: usize = counts[axis + 1..].iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); outer * n_out * inner];
        for o in 0..outer {
            for j in 0..n_out {
                for i in 0..n_in {
                    let k = m[(j, i)];
                    let src = (o * n_in + i) * inner;
                    let dst = (o * n_out + j) * inner;
                    for t in 0..inner {
                        out[dst + t] += k * data[src + t];
                    }
                }
            }
        }
        data = out;
        counts[axis] = n_out;
    }
    data
}

fn check_aliasing(source: &Grid, target: &Grid, hbar: f64) -> Result<()> {
    if source.dim() != target.dim() {
        return Err(Error::Shape(format!(
            "source grid is {}-D, target grid is {}-D",
            source.dim(),
            target.dim()
        )));
    }
    for axis in 0..source.dim() {
        let reach = target.half_extent(axis);
        if reach == 0.0 {
            continue;
        }
        let limit = PI * hbar / reach;
        let spacing = source.spacing(axis);
        if spacing >= limit {
            return Err(Error::AliasingRisk {
                axis,
                spacing,
                p_max: reach,
                limit,
            });
        }
    }
    Ok(())
}

fn transform_wavefunction(
    psi: &WaveFunction,
    target: &Grid,
    hbar: f64,
    dir: Direction,
) -> Result<WaveFunction> {
    check_aliasing(&psi.grid, target, hbar)?;
    let norm_in = psi.norm_sq();
    if (norm_in - 1.0).abs() > NORM_IN_TOL {
        return Err(Error::NotNormalized {
            norm: norm_in,
            tol: NORM_IN_TOL,
        });
    }
    let mats = axis_kernels(&psi.grid, target, hbar, dir);
    let values = apply_separable(&psi.values, psi.grid.counts(), &mats);
    let out = WaveFunction {
        grid: target.clone(),
        values,
    };
    let norm_out = out.norm_sq();
    if (norm_out - 1.0).abs() > NORM_OUT_TOL {
        return Err(Error::TruncatedSupport {
            input: norm_in,
            output: norm_out,
        });
    }
    Ok(out)
}

/// Momentum-space amplitude of a normalized wavefunction.
pub fn wavefunction_to_momentum(
    psi: &WaveFunction,
    momentum_grid: &Grid,
    params: &PhysicalParams,
) -> Result<WaveFunction> {
    transform_wavefunction(psi, momentum_grid, params.hbar, Direction::ToMomentum)
}

/// Inverse of [`wavefunction_to_momentum`].
pub fn momentum_to_wavefunction(
    psi_tilde: &WaveFunction,
    position_grid: &Grid,
    params: &PhysicalParams,
) -> Result<WaveFunction> {
    transform_wavefunction(psi_tilde, position_grid, params.hbar, Direction::ToPosition)
}

fn transform_density_matrix(
    dm: &DensityMatrixGrid,
    target: &Grid,
    hbar: f64,
    dir: Direction,
) -> Result<DensityMatrixGrid> {
    check_aliasing(&dm.grid, target, hbar)?;
    dm.check_hermitian()?;
    let mats = axis_kernels(&dm.grid, target, hbar, dir);
    let n_in = dm.grid.len();
    let n_out = target.len();
    let counts = dm.grid.counts();

    // X = F R (columns), then R~ = X F^dagger = (F X^dagger)^dagger.
    let mut x = DMatrix::<Complex64>::zeros(n_out, n_in);
    for b in 0..n_in {
        let col: Vec<Complex64> = dm.values.column(b).iter().copied().collect();
        let t = apply_separable(&col, counts, &mats);
        x.set_column(b, &nalgebra::DVector::from_vec(t));
    }
    let xh = x.adjoint();
    let mut y = DMatrix::<Complex64>::zeros(n_out, n_out);
    for b in 0..n_out {
        let col: Vec<Complex64> = xh.column(b).iter().copied().collect();
        let t = apply_separable(&col, counts, &mats);
        y.set_column(b, &nalgebra::DVector::from_vec(t));
    }
    let out = DensityMatrixGrid::new(dm.order, target.clone(), y.adjoint())?;
    out.check_hermitian()?;

    let trace_in = dm.trace();
    let trace_out = out.trace();
    if (trace_out - trace_in).abs() > TRACE_TOL * trace_in.abs().max(1e-300) {
        return Err(Error::TruncatedSupport {
            input: trace_in,
            output: trace_out,
        });
    }
    Ok(out)
}

/// `R_s(x, x') -> R~_s(m, m')`.
pub fn dm_position_to_momentum(
    dm: &DensityMatrixGrid,
    momentum_grid: &Grid,
    params: &PhysicalParams,
) -> Result<DensityMatrixGrid> {
    transform_density_matrix(dm, momentum_grid, params.hbar, Direction::ToMomentum)
}

/// `R~_s(m, m') -> R_s(x, x')`.
pub fn dm_momentum_to_position(
    dm: &DensityMatrixGrid,
    position_grid: &Grid,
    params: &PhysicalParams,
) -> Result<DensityMatrixGrid> {
    transform_density_matrix(dm, position_grid, params.hbar, Direction::ToPosition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Statistics;

    fn params() -> PhysicalParams {
        PhysicalParams::new(1.0, 1.0, 1.0, Statistics::Bose).unwrap()
    }

    /// Normalized `exp(-(x-x0)^2/4 sigma^2 + i k x)`.
    fn gaussian(x: f64, sigma: f64, x0: f64, k: f64) -> Complex64 {
        let amp = (2.0 * PI * sigma * sigma).powf(-0.25) * (-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp();
        Complex64::from_polar(amp, k * x)
    }

    fn grids() -> (Grid, Grid) {
        (
            Grid::symmetric(1, 0.1, 120).unwrap(),
            Grid::symmetric(1, 0.05, 160).unwrap(),
        )
    }

    #[test]
    fn gaussian_width_maps_to_hbar_over_two_sigma() {
        let (xg, pg) = grids();
        let sigma = 1.3;
        let psi = WaveFunction::from_fn(xg, |x| gaussian(x[0], sigma, 0.0, 0.0));
        let out = wavefunction_to_momentum(&psi, &pg, &params()).unwrap();
        let width = 1.0 / (2.0 * sigma);
        for (i, v) in out.values.iter().enumerate() {
            let p = pg.axis_coord(0, i);
            let expected = gaussian(p, width, 0.0, 0.0);
            assert!((v - expected).norm() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn shift_theorem() {
        let (xg, pg) = grids();
        let x0 = 1.7;
        let psi = WaveFunction::from_fn(xg.clone(), |x| gaussian(x[0], 1.0, 0.0, 0.0));
        let shifted = WaveFunction::from_fn(xg, |x| gaussian(x[0], 1.0, x0, 0.0));
        let a = wavefunction_to_momentum(&psi, &pg, &params()).unwrap();
        let b = wavefunction_to_momentum(&shifted, &pg, &params()).unwrap();
        for i in 0..pg.len() {
            let p = pg.axis_coord(0, i);
            assert!((a.values[i].norm() - b.values[i].norm()).abs() < 1e-10);
            let predicted = a.values[i] * Complex64::from_polar(1.0, -p * x0);
            assert!((predicted - b.values[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let (xg, pg) = grids();
        let psi = WaveFunction::from_fn(xg.clone(), |x| gaussian(x[0], 0.9, -0.4, 1.5));
        let there = wavefunction_to_momentum(&psi, &pg, &params()).unwrap();
        let back = momentum_to_wavefunction(&there, &xg, &params()).unwrap();
        for (u, v) in psi.values.iter().zip(&back.values) {
            assert!((u - v).norm() < 1e-8);
        }
    }

    #[test]
    fn narrow_momentum_packet_is_plane_wave_like() {
        let xg = Grid::symmetric(1, 0.1, 50).unwrap();
        let pg = Grid::symmetric(1, 0.002, 500).unwrap();
        let k0 = 0.3;
        let w = 0.05;
        let psi_t = WaveFunction::from_fn(pg, |p| gaussian(p[0], w, k0, 0.0));
        let psi = momentum_to_wavefunction_unchecked(&psi_t, &xg);
        // |psi(x)| varies on the scale 1/(2w) = 10 >> 1, phase advances as k0 x
        let centre = psi.values[50];
        for i in 45..=55 {
            let x = xg.axis_coord(0, i);
            let ratio = psi.values[i] / centre;
            assert!((ratio.arg() - k0 * x).abs() < 1e-9);
            assert!((ratio.norm() - (-x * x * w * w).exp()).abs() < 1e-9);
        }
    }

    fn momentum_to_wavefunction_unchecked(psi_t: &WaveFunction, target: &Grid) -> WaveFunction {
        let mats = axis_kernels(&psi_t.grid, target, 1.0, Direction::ToPosition);
        WaveFunction {
            grid: target.clone(),
            values: apply_separable(&psi_t.values, psi_t.grid.counts(), &mats),
        }
    }

    #[test]
    fn momentum_width_maps_back() {
        let pg = Grid::symmetric(1, 0.05, 160).unwrap();
        let xg = Grid::symmetric(1, 0.1, 120).unwrap();
        let w = 0.8;
        let psi_t = WaveFunction::from_fn(pg, |p| gaussian(p[0], w, 0.0, 0.0));
        let psi = momentum_to_wavefunction(&psi_t, &xg, &params()).unwrap();
        for (i, v) in psi.values.iter().enumerate() {
            let x = xg.axis_coord(0, i);
            assert!((v - gaussian(x, 1.0 / (2.0 * w), 0.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn coarse_grid_flags_aliasing() {
        let xg = Grid::symmetric(1, 1.0, 20).unwrap();
        let pg = Grid::symmetric(1, 0.1, 50).unwrap();
        let psi = WaveFunction::from_fn(xg, |x| gaussian(x[0], 3.0, 0.0, 0.0));
        assert!(matches!(
            wavefunction_to_momentum(&psi, &pg, &params()),
            Err(Error::AliasingRisk { .. })
        ));
    }

    #[test]
    fn unnormalized_input_rejected() {
        let (xg, pg) = grids();
        let psi = WaveFunction::from_fn(xg, |x| gaussian(x[0], 1.0, 0.0, 0.0) * 2.0);
        assert!(matches!(
            wavefunction_to_momentum(&psi, &pg, &params()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn orbital_density_matrix_transform_matches_orbital_transform() {
        let (xg, pg) = grids();
        let n = 7.0;
        let phi = WaveFunction::from_fn(xg, |x| gaussian(x[0], 1.1, 0.3, -0.7));
        let dm = DensityMatrixGrid::from_orbital(&phi, n).unwrap();
        let dm_p = dm_position_to_momentum(&dm, &pg, &params()).unwrap();
        let phi_p = wavefunction_to_momentum(&phi, &pg, &params()).unwrap();
        for (i, v) in phi_p.values.iter().enumerate() {
            assert!((dm_p.values[(i, i)].re - n * v.norm_sqr()).abs() < 1e-10);
        }
        assert!((dm_p.trace() - n).abs() < 1e-6 * n);
        assert!(dm_p.hermiticity_deviation() < 1e-10);
    }

    #[test]
    fn condensate_box_concentrates_on_dual_grid_point() {
        // R(x, x') = rho_c exp(i p0 (x - x') / hbar) on a periodic box of length L,
        // transformed onto the dual momentum grid dp = 2 pi hbar / L.
        let n = 32;
        let box_len = 8.0;
        let xg = Grid::periodic(1, -box_len / 2.0, box_len, n).unwrap();
        let dp = 2.0 * PI / box_len;
        let pg = Grid::symmetric(1, dp, 15).unwrap();
        let rho_c = 2.5;
        let k0 = 3;
        let p0 = k0 as f64 * dp;
        let dm = DensityMatrixGrid::from_fn(1, xg, |x, y| {
            Complex64::from_polar(rho_c, p0 * (x[0] - y[0]))
        })
        .unwrap();
        let out = dm_position_to_momentum(&dm, &pg, &params()).unwrap();
        let diag = out.diagonal();
        let peak_index = pg.flat_index([15 + k0 as usize, 0, 0]);
        let n_c = rho_c * box_len;
        // peak height = N_c delta(0) with delta(0) = L / (2 pi hbar)
        let delta0 = delta_zero_regularized_in(1, box_len, 1.0);
        assert!((diag.values[peak_index] - n_c * delta0).abs() < 1e-10 * n_c * delta0);
        for (i, v) in diag.values.iter().enumerate() {
            if i != peak_index {
                assert!(v.abs() < 1e-10);
            }
        }
        assert!((diag.quadrature_unchecked() - n_c).abs() < 1e-9);
    }

    #[test]
    fn hermitian_conjugate_commutes_with_transform() {
        let (xg, pg) = grids();
        let dm = DensityMatrixGrid::from_fn(1, xg, |x, y| {
            let a = gaussian(x[0], 1.0, 0.5, 0.2) * gaussian(y[0], 1.0, 0.5, 0.2).conj();
            let b = gaussian(x[0], 0.7, -0.8, -0.4) * gaussian(y[0], 0.7, -0.8, -0.4).conj();
            a * 3.0 + b * 2.0
        })
        .unwrap();
        let t1 = dm_position_to_momentum(&dm.conj_transpose(), &pg, &params()).unwrap();
        let t2 = dm_position_to_momentum(&dm, &pg, &params()).unwrap().conj_transpose();
        let diff = (t1.values - t2.values).iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        assert!(diff < 1e-12);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let xg = Grid::symmetric(1, 0.5, 5).unwrap();
        let pg = Grid::symmetric(1, 0.5, 5).unwrap();
        let dm = DensityMatrixGrid::from_fn(1, xg, |x, _| Complex64::new(x[0], 1.0)).unwrap();
        assert!(matches!(
            dm_position_to_momentum(&dm, &pg, &params()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn delta_zero_values() {
        let p = PhysicalParams::new(1.0, (2.0 * PI).powi(3), 1.0, Statistics::Bose).unwrap();
        assert!((delta_zero_regularized(&p) - 1.0).abs() < 1e-14);
        let p2 = p.with_volume(2.0 * p.volume).unwrap();
        assert!((delta_zero_regularized(&p2) - 2.0).abs() < 1e-14);
        let p3 = p.with_volume(1000.0).unwrap();
        assert_eq!(delta_zero_regularized(&p3), 1000.0 / (2.0 * PI).powi(3));
    }
}
