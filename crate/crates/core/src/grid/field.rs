use num_complex::Complex64;

use super::spectral::spectral_derivative_lane;
use super::stencil::{self, Sample};
use super::UniformGrid;
use crate::error::{Error, Result};

/// Real samples on a grid: density, potential, phase, or one velocity component.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: UniformGrid,
    values: Vec<f64>,
}

/// Complex samples on a grid: the wave state or its Fourier image.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

macro_rules! field_common {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn new(grid: UniformGrid, values: Vec<$elem>) -> Result<Self> {
                if values.len() != grid.len() {
                    return Err(Error::InvalidArgument(format!(
                        "{} samples for a grid of {} points",
                        values.len(),
                        grid.len()
                    )));
                }
                Ok(Self { grid, values })
            }

            pub fn zeros(grid: &UniformGrid) -> Self {
                Self { values: vec![<$elem as Sample>::zero(); grid.len()], grid: grid.clone() }
            }

            /// Samples `f(position)` at every node.
            pub fn from_fn(grid: &UniformGrid, f: impl Fn(&[f64]) -> $elem) -> Self {
                let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
                Self { grid: grid.clone(), values }
            }

            pub fn grid(&self) -> &UniformGrid {
                &self.grid
            }

            pub fn values(&self) -> &[$elem] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [$elem] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<$elem> {
                self.values
            }

            pub fn map(&self, f: impl Fn($elem) -> $elem) -> Self {
                Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
            }

            pub fn zip_with(&self, other: &Self, f: impl Fn($elem, $elem) -> $elem) -> Result<Self> {
                self.same_grid(&other.grid)?;
                let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
                Ok(Self { grid: self.grid.clone(), values })
            }

            pub fn same_grid(&self, other: &UniformGrid) -> Result<()> {
                if &self.grid == other {
                    Ok(())
                } else {
                    Err(Error::GridMismatch)
                }
            }

            pub fn is_finite(&self) -> bool {
                self.values.iter().all(|v| v.is_finite())
            }

            /// First spatial derivative: spectral along periodic axes, fourth-order
            /// finite differences along open axes.
            pub fn gradient(&self, axis: usize) -> Result<Self> {
                self.grid.check_axis(axis)?;
                let h = self.grid.spacing(axis);
                if self.grid.periodic()[axis] {
                    Ok(self.map_lanes(axis, |lane, out| spectral_derivative_lane(lane, h, 1, out)))
                } else {
                    Ok(self.map_lanes(axis, |lane, out| stencil::first_derivative(lane, h, false, out)))
                }
            }

            /// First derivative by fourth-order central differences regardless of
            /// periodicity (periodic axes wrap).
            pub fn gradient_fd(&self, axis: usize) -> Result<Self> {
                self.grid.check_axis(axis)?;
                let h = self.grid.spacing(axis);
                let periodic = self.grid.periodic()[axis];
                Ok(self.map_lanes(axis, |lane, out| stencil::first_derivative(lane, h, periodic, out)))
            }

            /// First derivative treating every axis as open, whatever the grid says.
            #[allow(dead_code)]
            pub(crate) fn gradient_open(&self, axis: usize) -> Self {
                let h = self.grid.spacing(axis);
                self.map_lanes(axis, |lane, out| stencil::first_derivative(lane, h, false, out))
            }

            #[allow(dead_code)]
            pub(crate) fn second_derivative_open(&self, axis: usize) -> Self {
                let h = self.grid.spacing(axis);
                self.map_lanes(axis, |lane, out| stencil::second_derivative(lane, h, false, out))
            }

            pub fn laplacian(&self) -> Self {
                let mut acc = Self::zeros(&self.grid);
                for axis in 0..self.grid.dim() {
                    let h = self.grid.spacing(axis);
                    let d2 = if self.grid.periodic()[axis] {
                        self.map_lanes(axis, |lane, out| spectral_derivative_lane(lane, h, 2, out))
                    } else {
                        self.map_lanes(axis, |lane, out| stencil::second_derivative(lane, h, false, out))
                    };
                    for (a, b) in acc.values.iter_mut().zip(d2.values) {
                        *a = *a + b;
                    }
                }
                acc
            }

            pub fn laplacian_fd(&self) -> Self {
                let mut acc = Self::zeros(&self.grid);
                for axis in 0..self.grid.dim() {
                    let h = self.grid.spacing(axis);
                    let periodic = self.grid.periodic()[axis];
                    let d2 = self.map_lanes(axis, |lane, out| stencil::second_derivative(lane, h, periodic, out));
                    for (a, b) in acc.values.iter_mut().zip(d2.values) {
                        *a = *a + b;
                    }
                }
                acc
            }

            /// Applies `op` to every 1D lane along `axis`.
            pub(crate) fn map_lanes(&self, axis: usize, mut op: impl FnMut(&[$elem], &mut [$elem])) -> Self {
                let mut out = Self::zeros(&self.grid);
                let n = self.grid.shape()[axis];
                let stride = self.grid.strides()[axis];
                let mut lane = vec![<$elem as Sample>::zero(); n];
                let mut result = vec![<$elem as Sample>::zero(); n];
                for start in lane_starts(&self.grid, axis) {
                    for i in 0..n {
                        lane[i] = self.values[start + i * stride];
                    }
                    op(&lane, &mut result);
                    for i in 0..n {
                        out.values[start + i * stride] = result[i];
                    }
                }
                out
            }
        }
    };
}

field_common!(RealField, f64);
field_common!(ComplexField, Complex64);

/// Linear indices of the first sample of each lane along `axis`.
pub(crate) fn lane_starts(grid: &UniformGrid, axis: usize) -> impl Iterator<Item = usize> + '_ {
    let n = grid.shape()[axis];
    let stride = grid.strides()[axis];
    (0..grid.len()).filter(move |l| (l / stride) % n == 0)
}

impl RealField {
    pub fn constant(grid: &UniformGrid, value: f64) -> Self {
        Self { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    /// Midpoint-rule integral `Σ f·h^D`.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `sqrt(∫ f² dx)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }
}

impl ComplexField {
    /// `∫ |f|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `∫ conj(self)·other dx`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn modulus_sqr(&self) -> RealField {
        RealField { grid: self.grid.clone(), values: self.values.iter().map(|v| v.norm_sqr()).collect() }
    }

    pub fn re(&self) -> RealField {
        RealField { grid: self.grid.clone(), values: self.values.iter().map(|v| v.re).collect() }
    }

    pub fn im(&self) -> RealField {
        RealField { grid: self.grid.clone(), values: self.values.iter().map(|v| v.im).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.map(|v| v / n.sqrt()))
    }
}

pub fn gradient(f: &RealField, axis: usize) -> Result<RealField> {
    f.gradient(axis)
}

pub fn gradient_fd(f: &RealField, axis: usize) -> Result<RealField> {
    f.gradient_fd(axis)
}

pub fn laplacian(f: &RealField) -> RealField {
    f.laplacian()
}

pub fn laplacian_fd(f: &RealField) -> RealField {
    f.laplacian_fd()
}

/// `Σ_a ∂_a F_a` for one component per axis.
pub fn divergence(components: &[RealField]) -> Result<RealField> {
    let first = components.first().ok_or_else(|| Error::InvalidArgument("empty vector field".into()))?;
    let grid = first.grid();
    if components.len() != grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "{} components for a {}-dimensional grid",
            components.len(),
            grid.dim()
        )));
    }
    let mut acc = RealField::zeros(grid);
    for (axis, c) in components.iter().enumerate() {
        c.same_grid(grid)?;
        let d = c.gradient(axis)?;
        for (a, b) in acc.values.iter_mut().zip(d.values) {
            *a += b;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(x: f64, sigma: f64) -> f64 {
        (-x * x / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
    }

    #[test]
    fn integrate_constant_and_gaussian() {
        let g = UniformGrid::periodic_1d(1024, 40.0).unwrap();
        assert!((RealField::constant(&g, 1.0).integrate() - 40.0).abs() < 1e-12);
        let w = RealField::from_fn(&g, |x| gaussian(x[0], 1.0));
        assert!((w.integrate() - 1.0).abs() < 1e-9);
        let odd = RealField::from_fn(&g, |x| x[0] * (-x[0] * x[0]).exp());
        assert!(odd.integrate().abs() < 1e-12);
    }

    #[test]
    fn spectral_and_fd_gradients() {
        let l = 10.0;
        let g = UniformGrid::periodic_1d(128, l).unwrap();
        let k = 2.0 * PI / l;
        let f = RealField::from_fn(&g, |x| (k * x[0]).sin());
        let df = f.gradient(0).unwrap();
        for (i, v) in df.values().iter().enumerate() {
            let x = g.coordinate(0, i);
            assert!((v - k * (k * x).cos()).abs() < 1e-8);
        }
        let d2 = f.laplacian();
        for (i, v) in d2.values().iter().enumerate() {
            let x = g.coordinate(0, i);
            assert!((v + k * k * (k * x).sin()).abs() < 1e-8);
        }
        assert!(RealField::constant(&g, 3.0).gradient(0).unwrap().linf_norm() < 1e-12);

        let open = UniformGrid::open_1d(32, 2.0).unwrap();
        let lin = RealField::from_fn(&open, |x| x[0]);
        assert!(lin.gradient(0).unwrap().values().iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert!(matches!(lin.gradient(1), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn divergence_cases() {
        let g = UniformGrid::cube(2, 16, 4.0, false).unwrap();
        let x = RealField::from_fn(&g, |p| p[0]);
        let y = RealField::from_fn(&g, |p| p[1]);
        let div = divergence(&[x, y]).unwrap();
        assert!(div.values().iter().all(|v| (v - 2.0).abs() < 1e-8));
        let c = RealField::constant(&g, 1.5);
        assert!(divergence(&[c.clone(), c]).unwrap().linf_norm() < 1e-12);
    }
}
