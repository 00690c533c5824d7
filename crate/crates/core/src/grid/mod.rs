//! Uniform grids on R^D and the differential and spectral operators built on them.
//!
//! Sample `i` along an axis of extent `L` with `n` points sits at
//! `x_i = -L/2 + i·h`, `h = L/n`. Periodic axes identify `x_n` with `x_0`.
//! Values are stored row-major (last axis fastest).

mod diagnostics;
mod field;
pub(crate) mod stencil;
pub(crate) mod spectral;

pub use diagnostics::{density_diagnostics, diagnostics, phase_diagnostics, Diagnostics};
pub use field::{divergence, gradient, gradient_fd, laplacian, laplacian_fd, ComplexField, RealField};
pub use spectral::{forward_transform, inverse_transform, spectral_tail_mass, MomentumField};

use crate::error::{Error, Result};

/// Smallest admissible per-axis point count.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    n: Vec<usize>,
    length: Vec<f64>,
    periodic: Vec<bool>,
}

impl UniformGrid {
    pub fn new(n: Vec<usize>, length: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        let dim = n.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if length.len() != dim || periodic.len() != dim {
            return Err(Error::InvalidGrid("per-axis lists differ in length".into()));
        }
        if let Some(&bad) = n.iter().find(|&&k| k < MIN_POINTS) {
            return Err(Error::InvalidGrid(format!("{bad} points per axis, need at least {MIN_POINTS}")));
        }
        if length.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidGrid("axis lengths must be finite and positive".into()));
        }
        n.iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k))
            .filter(|&total| total.checked_mul(16).is_some())
            .ok_or_else(|| Error::InvalidGrid("point count overflows addressable memory".into()))?;
        Ok(Self { n, length, periodic })
    }

    pub fn periodic_1d(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n], vec![length], vec![true])
    }

    pub fn open_1d(n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n], vec![length], vec![false])
    }

    /// Same point count and extent on every axis.
    pub fn cube(dim: usize, n: usize, length: f64, periodic: bool) -> Result<Self> {
        Self::new(vec![n; dim], vec![length; dim], vec![periodic; dim])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.n
    }

    pub fn lengths(&self) -> &[f64] {
        &self.length
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length[axis] / self.n[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Volume element h₁·…·h_D.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn origin(&self, axis: usize) -> f64 {
        -0.5 * self.length[axis]
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        self.origin(axis) + index as f64 * self.spacing(axis)
    }

    /// Sample coordinates along one axis.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.n[axis]).map(|i| self.coordinate(axis, i)).collect()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim() {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange { axis, dim: self.dim() })
        }
    }

    pub fn require_periodic(&self, what: &'static str) -> Result<()> {
        if self.is_periodic() {
            Ok(())
        } else {
            Err(Error::NonPeriodic(what))
        }
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.n[a + 1];
        }
        strides
    }

    pub fn linear_index(&self, index: &[usize]) -> usize {
        index.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut linear: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = linear % self.n[a];
            linear /= self.n[a];
        }
        idx
    }

    /// Physical position of a linear sample index.
    pub fn position(&self, linear: usize) -> Vec<f64> {
        self.multi_index(linear)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coordinate(a, i))
            .collect()
    }

    /// Nearest grid node to a physical point, or an error outside the sampled box.
    pub fn nearest_index(&self, point: &[f64]) -> Result<Vec<usize>> {
        if point.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, grid is {}-dimensional",
                point.len(),
                self.dim()
            )));
        }
        point
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let h = self.spacing(a);
                let lo = self.origin(a) - 0.5 * h;
                let hi = self.origin(a) + self.length[a] - 0.5 * h;
                if !(x >= lo && x < hi) {
                    return Err(Error::OutsideDomain(x));
                }
                let i = ((x - self.origin(a)) / h).round() as usize;
                Ok(i.min(self.n[a] - 1))
            })
            .collect()
    }

    /// Face neighbours of a linear index; periodic axes wrap.
    pub fn neighbors(&self, linear: usize) -> Vec<usize> {
        let idx = self.multi_index(linear);
        let strides = self.strides();
        let mut out = Vec::with_capacity(2 * self.dim());
        for a in 0..self.dim() {
            let i = idx[a];
            let n = self.n[a];
            let base = linear - i * strides[a];
            if i > 0 {
                out.push(base + (i - 1) * strides[a]);
            } else if self.periodic[a] {
                out.push(base + (n - 1) * strides[a]);
            }
            if i + 1 < n {
                out.push(base + (i + 1) * strides[a]);
            } else if self.periodic[a] {
                out.push(base);
            }
        }
        out
    }

    /// Grid of momentum samples `p_k = 2πk/L`, centred on zero.
    pub fn momentum_grid(&self) -> Result<UniformGrid> {
        self.require_periodic("momentum representation")?;
        if self.n.iter().any(|k| k % 2 == 1) {
            return Err(Error::InvalidGrid("momentum grid needs an even point count per axis".into()));
        }
        let lengths = (0..self.dim())
            .map(|a| 2.0 * std::f64::consts::PI * self.n[a] as f64 / self.length[a])
            .collect();
        UniformGrid::new(self.n.clone(), lengths, vec![true; self.dim()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(UniformGrid::periodic_1d(4, 1.0).is_err());
        assert!(UniformGrid::periodic_1d(16, 0.0).is_err());
        assert!(UniformGrid::new(vec![8; 4], vec![1.0; 4], vec![true; 4]).is_err());
        assert!(UniformGrid::new(vec![8, 8], vec![1.0], vec![true, true]).is_err());
    }

    #[test]
    fn index_round_trip_and_neighbours() {
        let g = UniformGrid::new(vec![8, 10, 12], vec![1.0, 2.0, 3.0], vec![true, false, true]).unwrap();
        for lin in [0, 17, 500, g.len() - 1] {
            assert_eq!(g.linear_index(&g.multi_index(lin)), lin);
        }
        // corner: periodic axes wrap, the open axis does not
        assert_eq!(g.neighbors(0).len(), 5);
    }

    #[test]
    fn nearest_index_bounds() {
        let g = UniformGrid::open_1d(10, 1.0).unwrap();
        assert_eq!(g.nearest_index(&[0.0]).unwrap(), vec![5]);
        assert!(g.nearest_index(&[0.6]).is_err());
        assert_eq!(g.nearest_index(&[-0.5]).unwrap(), vec![0]);
    }

    #[test]
    fn momentum_grid_spacing() {
        let g = UniformGrid::periodic_1d(64, 10.0).unwrap();
        let p = g.momentum_grid().unwrap();
        assert!((p.spacing(0) - 2.0 * std::f64::consts::PI / 10.0).abs() < 1e-15);
        assert!(UniformGrid::open_1d(64, 10.0).unwrap().momentum_grid().is_err());
    }
}
