//! Continuous (gridded) and discrete (delta-peak) distribution containers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridKind};
use crate::types::Vec3;

/// Boundary-to-peak ratio above which a gridded integrand is considered truncated.
pub const TAIL_THRESHOLD: f64 = 1e-10;

/// A real scalar field sampled on a grid, e.g. a diagonal density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedDistribution {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GriddedDistribution {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&Vec3) -> f64) -> Self {
        let values = grid.points().map(|p| f(&p)).collect();
        Self { grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude found on the outer face of a symmetric grid (0 for periodic grids).
    pub fn boundary_max_abs(&self) -> f64 {
        if self.grid.kind() == GridKind::Periodic {
            return 0.0;
        }
        (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary(i))
            .fold(0.0, |m, i| m.max(self.values[i].abs()))
    }

    /// Verify the field has decayed at the grid boundary.
    pub fn check_tails(&self) -> Result<()> {
        let max = self.max_abs();
        if max == 0.0 {
            return Ok(());
        }
        let ratio = self.boundary_max_abs() / max;
        if ratio > TAIL_THRESHOLD {
            Err(Error::TailNotDecayed {
                ratio,
                limit: TAIL_THRESHOLD,
            })
        } else {
            Ok(())
        }
    }

    /// Trapezoid integral over the grid after the tail check.
    pub fn quadrature(&self) -> Result<f64> {
        self.check_tails()?;
        Ok(self.quadrature_unchecked())
    }

    /// Trapezoid integral without the tail check.
    pub fn quadrature_unchecked(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.weight(i) * v)
            .sum()
    }

    /// `a * self + b * other` on a shared grid.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Shape("grids differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Integral of a gridded field, erroring when the field has not decayed at the boundary.
pub fn quadrature(dist: &GriddedDistribution) -> Result<f64> {
    dist.quadrature()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaPeak {
    pub weight: f64,
    pub location: Vec3,
}

/// Exact discrete measure `sum_i w_i delta(p - p_i)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaPeakMeasure {
    peaks: Vec<DeltaPeak>,
}

impl DeltaPeakMeasure {
    pub fn new(peaks: Vec<DeltaPeak>) -> Result<Self> {
        for (i, peak) in peaks.iter().enumerate() {
            if !(peak.weight >= 0.0) || !peak.weight.is_finite() {
                return Err(Error::param(
                    "weight",
                    format!("peak {i} has weight {}", peak.weight),
                ));
            }
            if peaks[..i].iter().any(|q| q.location == peak.location) {
                return Err(Error::param(
                    "location",
                    format!("peak {i} duplicates location {:?}", peak.location.as_slice()),
                ));
            }
        }
        Ok(Self { peaks })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn peaks(&self) -> &[DeltaPeak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.peaks.iter().map(|p| p.weight).sum()
    }

    /// First moment `sum_i w_i p_i`.
    pub fn first_moment(&self) -> Vec3 {
        self.peaks
            .iter()
            .fold(Vec3::zeros(), |acc, p| acc + p.location * p.weight)
    }

    /// Visualization only: replace every peak by a normalized Gaussian of width `sigma`
    /// in the grid's dimension. The result is lossy and never used for data export.
    pub fn broaden(&self, grid: &Grid, sigma: f64) -> Result<GriddedDistribution> {
        if !(sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be > 0, got {sigma}")));
        }
        let d = grid.dim() as i32;
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.5 * d as f64);
        Ok(GriddedDistribution::from_fn(grid.clone(), |p| {
            self.peaks
                .iter()
                .map(|peak| {
                    let mut r2 = 0.0;
                    for k in 0..grid.dim() {
                        r2 += (p[k] - peak.location[k]).powi(2);
                    }
                    peak.weight * norm * (-0.5 * r2 / (sigma * sigma)).exp()
                })
                .sum()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_gaussian(sigma: f64) -> GriddedDistribution {
        let grid = Grid::symmetric(1, sigma / 8.0, 64).unwrap();
        GriddedDistribution::from_fn(grid, |p| {
            (-(p[0] * p[0]) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
        })
    }

    #[test]
    fn normalized_gaussian_integrates_to_one() {
        for sigma in [0.3, 1.0, 7.5] {
            let d = unit_gaussian(sigma);
            assert!((d.quadrature().unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_field_integrates_to_zero() {
        let grid = Grid::symmetric(2, 0.1, 5).unwrap();
        let d = GriddedDistribution::new(grid.clone(), vec![0.0; grid.len()]).unwrap();
        assert_eq!(d.quadrature().unwrap(), 0.0);
    }

    #[test]
    fn truncated_tail_is_rejected() {
        let grid = Grid::symmetric(1, 0.1, 10).unwrap();
        let d = GriddedDistribution::from_fn(grid, |p| (-p[0] * p[0]).exp());
        assert!(matches!(d.quadrature(), Err(Error::TailNotDecayed { .. })));
    }

    #[test]
    fn shape_mismatch() {
        let grid = Grid::symmetric(1, 0.1, 10).unwrap();
        assert!(GriddedDistribution::new(grid, vec![0.0; 3]).is_err());
    }

    #[test]
    fn peaks_validate() {
        let p = |w: f64, x: f64| DeltaPeak {
            weight: w,
            location: Vec3::new(x, 0.0, 0.0),
        };
        assert!(DeltaPeakMeasure::new(vec![p(-1.0, 0.0)]).is_err());
        assert!(DeltaPeakMeasure::new(vec![p(1.0, 0.0), p(2.0, 0.0)]).is_err());
        let m = DeltaPeakMeasure::new(vec![p(1.0, 0.0), p(2.0, 1.0)]).unwrap();
        assert_eq!(m.total_weight(), 3.0);
        assert_eq!(m.first_moment(), Vec3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn broadening_preserves_mass() {
        let m = DeltaPeakMeasure::new(vec![DeltaPeak {
            weight: 5.0,
            location: Vec3::new(0.5, 0.0, 0.0),
        }])
        .unwrap();
        let grid = Grid::symmetric(1, 0.02, 200).unwrap();
        let g = m.broaden(&grid, 0.2).unwrap();
        assert!((g.quadrature().unwrap() - 5.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn quadrature_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0,
                                w1 in 0.5f64..2.0, w2 in 0.5f64..2.0, shift in -1.0f64..1.0) {
            let grid = Grid::symmetric(1, 0.05, 400).unwrap();
            let f = GriddedDistribution::from_fn(grid.clone(), |p| (-(p[0] / w1).powi(2)).exp());
            let g = GriddedDistribution::from_fn(grid, |p| (-((p[0] - shift) / w2).powi(2)).exp() * p[0]);
            let combo = f.linear_combination(a, &g, b).unwrap();
            let lhs = combo.quadrature_unchecked();
            let rhs = a * f.quadrature_unchecked() + b * g.quadrature_unchecked();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn peak_weight_sum_is_order_independent(weights in proptest::collection::vec(0.0f64..10.0, 1..12),
                                                 seed in any::<u64>()) {
            let peaks: Vec<DeltaPeak> = weights.iter().enumerate()
                .map(|(i, &w)| DeltaPeak { weight: w, location: Vec3::new(i as f64, 0.0, 0.0) })
                .collect();
            let mut shuffled = peaks.clone();
            let n = shuffled.len();
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (state >> 33) as usize % (i + 1));
            }
            let a = DeltaPeakMeasure::new(peaks).unwrap().total_weight();
            let b = DeltaPeakMeasure::new(shuffled).unwrap().total_weight();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
