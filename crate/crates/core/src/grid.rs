//! Uniform Cartesian sampling lattices.
//!
//! Two flavours exist. A *symmetric* grid has an odd number of points per
//! axis centred on the origin and integrates with the trapezoid rule; it is
//! the natural momentum grid. A *periodic* grid samples one period
//! `[origin, origin + L)` without the duplicated endpoint and integrates with
//! the rectangle rule, which is the trapezoid rule for periodic integrands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Symmetric,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    kind: GridKind,
    spacing: [f64; 3],
    counts: [usize; 3],
    origin: [f64; 3],
}

/// Grids sampling momentum space; always symmetric about `p = 0`.
pub type MomentumGrid = Grid;
/// Grids sampling position space.
pub type PositionGrid = Grid;

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")))
    }
}

impl Grid {
    /// Symmetric grid with `2 * half_points + 1` points and the same spacing on every axis.
    pub fn symmetric(dim: usize, spacing: f64, half_points: usize) -> Result<Self> {
        Self::symmetric_axes(&vec![(spacing, half_points); dim])
    }

    /// Symmetric grid with per-axis `(spacing, half_points)`.
    pub fn symmetric_axes(axes: &[(f64, usize)]) -> Result<Self> {
        check_dim(axes.len())?;
        let mut spacing = [1.0; 3];
        let mut counts = [1; 3];
        let mut origin = [0.0; 3];
        for (k, &(h, half)) in axes.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::param("spacing", format!("must be > 0, got {h}")));
            }
            spacing[k] = h;
            counts[k] = 2 * half + 1;
            origin[k] = -(half as f64) * h;
        }
        Ok(Self {
            dim: axes.len(),
            kind: GridKind::Symmetric,
            spacing,
            counts,
            origin,
        })
    }

    /// Symmetric grid from a spacing and a half-extent; the extent must be a
    /// whole number of spacings.
    pub fn from_extent(dim: usize, spacing: f64, half_extent: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::param("spacing", format!("must be > 0, got {spacing}")));
        }
        let ratio = half_extent / spacing;
        let half = ratio.round();
        if half < 0.0 || (ratio - half).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::param(
                "extent",
                format!("half extent {half_extent} is not a whole multiple of spacing {spacing}"),
            ));
        }
        Self::symmetric(dim, spacing, half as usize)
    }

    /// Periodic grid of `points` samples per axis over the cube `[origin, origin + period)`.
    pub fn periodic(dim: usize, origin: f64, period: f64, points: usize) -> Result<Self> {
        Self::periodic_axes(&vec![(origin, period, points); dim])
    }

    /// Periodic grid with per-axis `(origin, period, points)`.
    pub fn periodic_axes(axes: &[(f64, f64, usize)]) -> Result<Self> {
        check_dim(axes.len())?;
        let mut spacing = [1.0; 3];
        let mut counts = [1; 3];
        let mut origin = [0.0; 3];
        for (k, &(o, period, n)) in axes.iter().enumerate() {
            if !(period > 0.0) || n == 0 {
                return Err(Error::param(
                    "period",
                    format!("need period > 0 and points > 0, got {period}, {n}"),
                ));
            }
            spacing[k] = period / n as f64;
            counts[k] = n;
            origin[k] = o;
        }
        Ok(Self {
            dim: axes.len(),
            kind: GridKind::Periodic,
            spacing,
            counts,
            origin,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    /// Largest coordinate magnitude reached on `axis` (half-extent for symmetric grids).
    pub fn half_extent(&self, axis: usize) -> f64 {
        let last = self.origin[axis] + (self.counts[axis] - 1) as f64 * self.spacing[axis];
        self.origin[axis].abs().max(last.abs())
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `prod_k h_k` of the used axes.
    pub fn cell_measure(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    /// Measure of the sampled region (`prod_k (n_k - 1) h_k` or `prod_k L_k`).
    pub fn measure(&self) -> f64 {
        (0..self.dim)
            .map(|k| match self.kind {
                GridKind::Symmetric => (self.counts[k] - 1) as f64 * self.spacing[k],
                GridKind::Periodic => self.counts[k] as f64 * self.spacing[k],
            })
            .product()
    }

    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis])
            .map(|i| self.axis_coord(axis, i))
            .collect()
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let [_, n1, n2] = self.counts;
        [flat / (n1 * n2), (flat / n2) % n1, flat % n2]
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.counts[1] + idx[1]) * self.counts[2] + idx[2]
    }

    pub fn point(&self, flat: usize) -> Vec3 {
        let idx = self.multi_index(flat);
        let mut v = Vec3::zeros();
        for k in 0..self.dim {
            v[k] = self.axis_coord(k, idx[k]);
        }
        v
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// One-dimensional quadrature weight of sample `i` on `axis`.
    pub fn axis_weight(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacing[axis];
        match self.kind {
            GridKind::Periodic => h,
            GridKind::Symmetric => {
                if i == 0 || i + 1 == self.counts[axis] {
                    0.5 * h
                } else {
                    h
                }
            }
        }
    }

    /// Product quadrature weight of flat sample `flat`.
    pub fn weight(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        (0..self.dim).map(|k| self.axis_weight(k, idx[k])).product()
    }

    /// Whether the sample sits on the outer face of a symmetric grid.
    pub fn is_boundary(&self, flat: usize) -> bool {
        if self.kind == GridKind::Periodic {
            return false;
        }
        let idx = self.multi_index(flat);
        (0..self.dim).any(|k| idx[k] == 0 || idx[k] + 1 == self.counts[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_contains_origin() {
        let g = Grid::symmetric(2, 0.5, 3).unwrap();
        assert_eq!(g.counts(), [7, 7, 1]);
        assert_eq!(g.len(), 49);
        let centre = g.flat_index([3, 3, 0]);
        assert_eq!(g.point(centre), Vec3::zeros());
        assert!((g.half_extent(0) - 1.5).abs() < 1e-15);
        assert!((g.measure() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::symmetric_axes(&[(1.0, 1), (0.5, 2), (0.25, 3)]).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(g.multi_index(flat)), flat);
        }
    }

    #[test]
    fn periodic_weights_sum_to_period() {
        let g = Grid::periodic(1, 0.0, 2.0, 16).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.weight(i)).sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert!(!g.is_boundary(0));
    }

    #[test]
    fn extent_must_be_commensurate() {
        assert!(Grid::from_extent(1, 0.3, 1.0).is_err());
        let g = Grid::from_extent(1, 0.25, 2.0).unwrap();
        assert_eq!(g.count(0), 17);
        assert!(Grid::symmetric(4, 1.0, 1).is_err());
        assert!(Grid::symmetric(1, 0.0, 1).is_err());
    }
}
