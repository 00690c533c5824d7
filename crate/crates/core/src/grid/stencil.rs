//! Fourth-order finite-difference stencils on 1D lanes.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn to_complex(self) -> Complex64;
    /// Real samples keep the real part.
    fn from_complex(c: Complex64) -> Self;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(c: Complex64) -> Self {
        c
    }
}

fn dot<T: Sample>(f: &[T], at: impl Fn(usize) -> usize, coeffs: &[f64]) -> T {
    coeffs
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, &c)| acc + f[at(k)] * c)
}

/// First derivative. Periodic lanes wrap; open lanes close with one-sided
/// fourth-order stencils at the two outermost points of each end.
pub fn first_derivative<T: Sample>(f: &[T], h: f64, periodic: bool, out: &mut [T]) {
    let n = f.len();
    let s = 1.0 / (12.0 * h);
    const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    if periodic {
        for i in 0..n {
            out[i] = dot(f, |k| (i + n + k - 2) % n, &CENTRAL) * s;
        }
        return;
    }
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    for i in 2..n - 2 {
        out[i] = dot(f, |k| i + k - 2, &CENTRAL) * s;
    }
    out[0] = dot(f, |k| k, &EDGE0) * s;
    out[1] = dot(f, |k| k, &EDGE1) * s;
    out[n - 1] = dot(f, |k| n - 1 - k, &EDGE0) * (-s);
    out[n - 2] = dot(f, |k| n - 1 - k, &EDGE1) * (-s);
}

/// Second derivative, fourth order, same boundary treatment as [`first_derivative`].
pub fn second_derivative<T: Sample>(f: &[T], h: f64, periodic: bool, out: &mut [T]) {
    let n = f.len();
    let s = 1.0 / (12.0 * h * h);
    const CENTRAL: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    if periodic {
        for i in 0..n {
            out[i] = dot(f, |k| (i + n + k - 2) % n, &CENTRAL) * s;
        }
        return;
    }
    const EDGE0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    const EDGE1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    for i in 2..n - 2 {
        out[i] = dot(f, |k| i + k - 2, &CENTRAL) * s;
    }
    out[0] = dot(f, |k| k, &EDGE0) * s;
    out[1] = dot(f, |k| k, &EDGE1) * s;
    out[n - 1] = dot(f, |k| n - 1 - k, &EDGE0) * s;
    out[n - 2] = dot(f, |k| n - 1 - k, &EDGE1) * s;
}

/// Second derivative with homogeneous Dirichlet data just outside the lane
/// (samples beyond either end read as zero). Symmetric, so Hermitian operators
/// built from it stay Hermitian.
pub fn second_derivative_dirichlet<T: Sample>(f: &[T], h: f64, out: &mut [T]) {
    let n = f.len();
    let s = 1.0 / (12.0 * h * h);
    let get = |j: isize| if j < 0 || j >= n as isize { T::zero() } else { f[j as usize] };
    for i in 0..n {
        let i = i as isize;
        out[i as usize] = (get(i - 2) * -1.0 + get(i - 1) * 16.0 + get(i) * -30.0 + get(i + 1) * 16.0
            + get(i + 2) * -1.0)
            * s;
    }
}

/// Cumulative integral of `f` from index `start` along the lane, exact for cubics.
///
/// Each cell uses the four-point formula `h/24·(−f₋₁ + 13f₀ + 13f₁ − f₂)`,
/// falling back to one-sided cubic weights where the lane ends.
pub fn cumulative_integral(f: &[f64], h: f64, start: usize, out: &mut [f64]) {
    let n = f.len();
    out[start] = 0.0;
    let cell = |i: usize| -> f64 {
        // integral over [x_i, x_{i+1}]
        if n < 4 {
            return 0.5 * h * (f[i] + f[i + 1]);
        }
        if i >= 1 && i + 2 < n {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        } else if i == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else {
            // i == n-2
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        }
    };
    for i in start + 1..n {
        out[i] = out[i - 1] + cell(i - 1);
    }
    for i in (0..start).rev() {
        out[i] = out[i + 1] - cell(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(x: f64) -> f64 {
        1.0 - 2.0 * x + 0.5 * x * x - 0.3 * x * x * x + 0.1 * x.powi(4)
    }

    #[test]
    fn open_stencils_exact_on_quartics() {
        let h = 0.1;
        let xs: Vec<f64> = (0..12).map(|i| -0.4 + i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| poly(x)).collect();
        let mut d1 = vec![0.0; f.len()];
        let mut d2 = vec![0.0; f.len()];
        first_derivative(&f, h, false, &mut d1);
        second_derivative(&f, h, false, &mut d2);
        for (i, &x) in xs.iter().enumerate() {
            let e1 = -2.0 + x - 0.9 * x * x + 0.4 * x.powi(3);
            let e2 = 1.0 - 1.8 * x + 1.2 * x * x;
            assert!((d1[i] - e1).abs() < 1e-10, "d1 at {i}: {} vs {e1}", d1[i]);
            assert!((d2[i] - e2).abs() < 1e-8, "d2 at {i}: {} vs {e2}", d2[i]);
        }
    }

    #[test]
    fn cumulative_integral_exact_on_cubics() {
        let h = 0.25;
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| 1.0 + x - 3.0 * x * x + x.powi(3)).collect();
        let anti = |x: f64| x + 0.5 * x * x - x.powi(3) + 0.25 * x.powi(4);
        let mut out = vec![0.0; f.len()];
        cumulative_integral(&f, h, 3, &mut out);
        for (i, &x) in xs.iter().enumerate() {
            assert!((out[i] - (anti(x) - anti(xs[3]))).abs() < 1e-12);
        }
    }
}
