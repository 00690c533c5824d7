//! Du Bois-Reymond lemma as an executable oracle: if `∫N·τ' = 0` for every
//! compactly supported bump `τ`, then `N` is constant. Pairs of opposite
//! `sin³` bumps (1D) or `cos³` spheres (3D, as `div E`) either certify
//! constancy of sampled `N` or return a witness pair.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{RealField, UniformGrid};

/// Default constancy tolerance, relative to the bump norm.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Tolerance on `∫f(w)² = 1` for the `f = √w` screening.
pub const SQRT_TOL: f64 = 1e-8;

const GL_NODES: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
const GL_WEIGHTS: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// `∫ f` over `[a, b]` by `panels`-fold composite 8-point Gauss–Legendre.
fn gauss_legendre(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * w;
            let half = 0.5 * w;
            GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(&x, wt)| wt * (f(mid - half * x) + f(mid + half * x)))
                .sum::<f64>()
                * half
        })
        .sum()
}

/// `∫₀^{π/n} sin³(nx) dx = 4/(3n)`.
pub fn bump_norm_1d(n: u32) -> f64 {
    4.0 / (3.0 * n as f64)
}

/// `∫_{|r|<π/(2n)} cos³(n|r|) d³r = (4π/n³)·(π²/6 − 3/2 + 1/54)`.
pub fn bump_norm_3d(n: u32) -> f64 {
    4.0 * PI / (n as f64).powi(3) * (PI * PI / 6.0 - 1.5 + 1.0 / 54.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `τ' = sin³[n(x−x₀)]` on `[x₀, x₀+π/n]`, `−sin³[n(x−x₁)]` on `[x₁, x₁+π/n]`.
    Sin3Pair1D,
    /// `div E = ±cos³(n|r−r_i|)` inside spheres of radius `π/(2n)` about `r₁`, `r₂`.
    Cos3SpherePair3D,
}

/// One positive and one negative bump at scale `n`. For the 1D kind the
/// placements are interval starts; for 3D, sphere centres.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFamily {
    pub kind: BumpKind,
    pub n: u32,
    pub placements: (Vec<f64>, Vec<f64>),
}

impl BumpFamily {
    pub fn sin3(n: u32, x0: f64, x1: f64) -> Self {
        Self { kind: BumpKind::Sin3Pair1D, n, placements: (vec![x0], vec![x1]) }
    }

    pub fn cos3(n: u32, c1: [f64; 3], c2: [f64; 3]) -> Self {
        Self { kind: BumpKind::Cos3SpherePair3D, n, placements: (c1.to_vec(), c2.to_vec()) }
    }

    pub fn norm(&self) -> f64 {
        match self.kind {
            BumpKind::Sin3Pair1D => bump_norm_1d(self.n),
            BumpKind::Cos3SpherePair3D => bump_norm_3d(self.n),
        }
    }

    /// Interval width `π/n` (1D) or sphere radius `π/(2n)` (3D).
    pub fn extent(&self) -> f64 {
        match self.kind {
            BumpKind::Sin3Pair1D => PI / self.n as f64,
            BumpKind::Cos3SpherePair3D => PI / (2.0 * self.n as f64),
        }
    }
}

/// Four-point Lagrange weights and first index for coordinate `x` on an axis.
fn cubic_stencil(grid: &UniformGrid, axis: usize, x: f64) -> (usize, [f64; 4]) {
    let n = grid.shape()[axis];
    let h = grid.spacing(axis);
    let s = (x - grid.origin(axis)) / h;
    let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i0 as f64;
    let w = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    (i0, w)
}

/// Piecewise-cubic interpolant of `f` at `x` (tensor product in D > 1).
pub fn interpolate(f: &RealField, x: &[f64]) -> f64 {
    let grid = f.grid();
    let stencils: Vec<(usize, [f64; 4])> = (0..grid.dim()).map(|a| cubic_stencil(grid, a, x[a])).collect();
    let strides = grid.strides();
    let mut acc = 0.0;
    let total = 4usize.pow(grid.dim() as u32);
    for k in 0..total {
        let mut lin = 0;
        let mut weight = 1.0;
        let mut rest = k;
        for (a, (i0, w)) in stencils.iter().enumerate() {
            let o = rest % 4;
            rest /= 4;
            lin += (i0 + o) * strides[a];
            weight *= w[o];
        }
        acc += weight * f.values()[lin];
    }
    acc
}

fn axis_range(grid: &UniformGrid, axis: usize) -> (f64, f64) {
    (grid.coordinate(axis, 0), grid.coordinate(axis, grid.shape()[axis] - 1))
}

/// `∫ N(x)·sin³[n(x−x0)]` over `[x0, x0+π/n]`.
fn sin3_moment(f: &RealField, n: u32, x0: f64) -> f64 {
    let width = PI / n as f64;
    let panels = ((width / f.grid().spacing(0)).ceil() as usize).max(2);
    let nf = n as f64;
    gauss_legendre(x0, x0 + width, panels, |x| interpolate(f, &[x]) * (nf * (x - x0)).sin().powi(3))
}

/// `∫ N(r)·cos³(n|r−c|)` over the ball of radius `π/(2n)` about `c`.
fn cos3_moment(f: &RealField, n: u32, c: &[f64]) -> f64 {
    let radius = PI / (2.0 * n as f64);
    let h = f.grid().min_spacing();
    let r_panels = ((radius / h).ceil() as usize).max(2);
    let mu_panels = ((PI * radius / h / 4.0).ceil() as usize).max(2);
    let n_phi = ((2.0 * PI * radius / h).ceil() as usize).max(16);
    let nf = n as f64;
    gauss_legendre(0.0, radius, r_panels, |r| {
        let shell = gauss_legendre(-1.0, 1.0, mu_panels, |ct| {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            (0..n_phi)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / n_phi as f64;
                    let p = [c[0] + r * st * phi.cos(), c[1] + r * st * phi.sin(), c[2] + r * ct];
                    interpolate(f, &p)
                })
                .sum::<f64>()
                * (2.0 * PI / n_phi as f64)
        });
        shell * r * r * (nf * r).cos().powi(3)
    })
}

fn check_family(f: &RealField, family: &BumpFamily) -> Result<()> {
    let grid = f.grid();
    if family.n == 0 {
        return Err(Error::InvalidPlacement("bump scale n must be at least 1".into()));
    }
    let (a, b) = (&family.placements.0, &family.placements.1);
    let ext = family.extent();
    match family.kind {
        BumpKind::Sin3Pair1D => {
            if grid.dim() != 1 || a.len() != 1 || b.len() != 1 {
                return Err(Error::InvalidPlacement("sin³ pairs need a 1D field and scalar placements".into()));
            }
            let (lo, hi) = axis_range(grid, 0);
            for &x in [a[0], b[0]].iter() {
                if !(x >= lo && x + ext <= hi) {
                    return Err(Error::InvalidPlacement(format!("bump [{x}, {}] leaves [{lo}, {hi}]", x + ext)));
                }
            }
            if (a[0] - b[0]).abs() < ext {
                return Err(Error::InvalidPlacement("bump supports overlap".into()));
            }
        }
        BumpKind::Cos3SpherePair3D => {
            if grid.dim() != 3 || a.len() != 3 || b.len() != 3 {
                return Err(Error::InvalidPlacement("cos³ spheres need a 3D field and 3-vector centres".into()));
            }
            for c in [a, b] {
                for axis in 0..3 {
                    let (lo, hi) = axis_range(grid, axis);
                    if !(c[axis] - 2.0 * ext >= lo && c[axis] + 2.0 * ext <= hi) {
                        return Err(Error::InvalidPlacement(format!(
                            "sphere at {c:?} must keep one radius of clearance from the box"
                        )));
                    }
                }
            }
            let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            if d < 2.0 * ext {
                return Err(Error::InvalidPlacement("spheres overlap".into()));
            }
        }
    }
    Ok(())
}

/// `I = ∫N·τ'` (1D) or `∫N·div E` (3D) for one bump pair.
pub fn functional_i(f: &RealField, family: &BumpFamily) -> Result<f64> {
    check_family(f, family)?;
    let (a, b) = (&family.placements.0, &family.placements.1);
    Ok(match family.kind {
        BumpKind::Sin3Pair1D => sin3_moment(f, family.n, a[0]) - sin3_moment(f, family.n, b[0]),
        BumpKind::Cos3SpherePair3D => cos3_moment(f, family.n, a) - cos3_moment(f, family.n, b),
    })
}

/// A pair of bumps with `I > 0`, together with the bound
/// `I ≥ (d₁ − d₂)·4/(3n)` where `d₁ = min N` on the first bump and
/// `d₂ = max N` on the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub n: u32,
    pub x0: f64,
    pub x1: f64,
    pub i_value: f64,
    pub d1: f64,
    pub d2: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstancyVerdict {
    pub constant: bool,
    pub witness: Option<Witness>,
    /// Largest `|I|` over all tested pairs.
    pub max_abs_i: f64,
    pub pairs_tested: usize,
}

fn extremes_on(f: &RealField, lo: f64, hi: f64) -> (f64, f64) {
    let samples = 256;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut visit = |x: f64| {
        let v = interpolate(f, &[x]);
        min = min.min(v);
        max = max.max(v);
    };
    for k in 0..=samples {
        visit(lo + (hi - lo) * k as f64 / samples as f64);
    }
    let g = f.grid();
    for i in 0..g.shape()[0] {
        let x = g.coordinate(0, i);
        if x > lo && x < hi {
            visit(x);
        }
    }
    (min, max)
}

pub fn certify_constancy(f: &RealField, n_max: u32) -> Result<ConstancyVerdict> {
    certify_constancy_with_tol(f, n_max, DEFAULT_TOL)
}

/// Scans `sin³` pairs for every scale `n ≤ n_max` over interval starts spaced
/// by the grid step (coarsened to at most 512 starts). `N` is certified
/// constant iff every `|I| < tol·4/(3n)`. Otherwise the witness is taken at
/// the smallest falsifying scale: the pair with the largest `|I|` there (ties:
/// lowest placement). For monotone `N` that is `n = 1` at the domain ends.
pub fn certify_constancy_with_tol(f: &RealField, n_max: u32, tol: f64) -> Result<ConstancyVerdict> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidArgument("constancy scan works on 1D samples".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let (lo, hi) = axis_range(grid, 0);
    let mut constant = true;
    let mut best: Option<(f64, u32, f64, f64)> = None;
    let mut max_abs_i: f64 = 0.0;
    let mut pairs_tested = 0;
    for n in 1..=n_max {
        let width = PI / n as f64;
        if hi - lo < 2.0 * width {
            continue;
        }
        let stride = grid.spacing(0).max((hi - lo - width) / 512.0);
        let count = ((hi - lo - width) / stride).floor() as usize + 1;
        let starts: Vec<f64> = (0..count).map(|k| lo + k as f64 * stride).collect();
        let moments: Vec<f64> = starts.par_iter().map(|&x| sin3_moment(f, n, x)).collect();
        let norm = bump_norm_1d(n);
        let mut falsified = false;
        let mut best_here: Option<(f64, u32, f64, f64)> = None;
        // partner j > i must start at least one width later
        for i in 0..count {
            let first_j = starts.partition_point(|&x| x < starts[i] + width - 1e-12 * width);
            for j in first_j.max(i + 1)..count {
                pairs_tested += 1;
                let value = moments[i] - moments[j];
                max_abs_i = max_abs_i.max(value.abs());
                falsified |= value.abs() >= tol * norm;
                if best_here.map_or(true, |b| value.abs() > b.0) {
                    // orient so the first bump carries the larger moment
                    let (p, q) = if value >= 0.0 { (i, j) } else { (j, i) };
                    best_here = Some((value.abs(), n, starts[p], starts[q]));
                }
            }
        }
        if falsified && constant {
            constant = false;
            best = best_here;
        }
    }
    if pairs_tested == 0 {
        return Err(Error::InvalidArgument("domain too short for a pair of bumps".into()));
    }
    let witness = if constant {
        None
    } else {
        best.map(|(i_value, n, x0, x1)| {
            let width = PI / n as f64;
            let d1 = extremes_on(f, x0, x0 + width).0;
            let d2 = extremes_on(f, x1, x1 + width).1;
            Witness { n, x0, x1, i_value, d1, d2, bound: (d1 - d2) * bump_norm_1d(n) }
        })
    };
    Ok(ConstancyVerdict { constant, witness, max_abs_i, pairs_tested })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqrtVerdict {
    pub pass: bool,
    /// `∫ f(w)² dx` per sample.
    pub norms: Vec<f64>,
    pub max_deviation: f64,
    /// Samples with the largest and smallest norm, when they differ by more
    /// than the tolerance.
    pub witness: Option<(usize, usize)>,
}

/// Screens a pointwise amplitude rule `f(w)` against `∫f(w)² = 1` over
/// normalized densities. Only `f = √w` passes on every sample.
pub fn verify_f_equals_sqrt_w(trial: impl Fn(f64) -> f64 + Sync, samples: &[RealField]) -> Result<SqrtVerdict> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no density samples".into()));
    }
    let norms: Vec<f64> = samples.par_iter().map(|w| w.map(|v| trial(v).powi(2)).integrate()).collect();
    let max_deviation = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let (imax, imin) = norms.iter().enumerate().fold((0, 0), |(a, b), (k, &v)| {
        (if v > norms[a] { k } else { a }, if v < norms[b] { k } else { b })
    });
    let witness = (norms[imax] - norms[imin] > SQRT_TOL).then_some((imax, imin));
    Ok(SqrtVerdict { pass: max_deviation < SQRT_TOL, norms, max_deviation, witness })
}

/// Normalized mixtures of one to four Gaussians with random centres in the
/// middle half of the axis, widths in `[0.5, 2]` and random weights.
pub fn gaussian_mixture_samples(grid: &UniformGrid, count: usize, seed: u64) -> Result<Vec<RealField>> {
    if grid.dim() != 1 {
        return Err(Error::InvalidArgument("mixture samples are one-dimensional".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let quarter = 0.25 * grid.lengths()[0];
    (0..count)
        .map(|_| {
            let parts: Vec<(f64, f64, f64)> = (0..rng.random_range(1..=4))
                .map(|_| (rng.random_range(-quarter..quarter), rng.random_range(0.5..2.0), rng.random_range(0.1..1.0)))
                .collect();
            let w = RealField::from_fn(grid, |x| {
                parts.iter().map(|&(c, s, a)| a * (-(x[0] - c).powi(2) / (2.0 * s * s)).exp()).sum()
            });
            let norm = w.integrate();
            Ok(w.scale(1.0 / norm))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(g: &UniformGrid, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_fn(g, |x| f(x[0]))
    }

    #[test]
    fn norms_match_quadrature() {
        for n in [1, 3, 8] {
            let nf = n as f64;
            let q = gauss_legendre(0.0, PI / nf, 8, |x| (nf * x).sin().powi(3));
            assert!((q - bump_norm_1d(n)).abs() < 1e-13);
            let r = PI / (2.0 * nf);
            let q = gauss_legendre(0.0, r, 8, |x| 4.0 * PI * x * x * (nf * x).cos().powi(3));
            assert!((q - bump_norm_3d(n)).abs() < 1e-13);
        }
    }

    #[test]
    fn functional_on_spec_fields() {
        let g = UniformGrid::open_1d(400, 10.0).unwrap();
        let fam = BumpFamily::sin3(8, -1.0, 1.0);
        assert!(functional_i(&line(&g, |_| 5.0), &fam).unwrap().abs() < 1e-10);
        let i = functional_i(&line(&g, |x| x), &fam).unwrap();
        assert!((i + 2.0 * bump_norm_1d(8)).abs() < 1e-12);

        let len = 10.0;
        let s = line(&g, |x| (2.0 * PI * x / len).sin());
        let w = PI / 8.0;
        let peak = 2.5 - 0.5 * w;
        let trough = -2.5 - 0.5 * w;
        let i = functional_i(&s, &BumpFamily::sin3(8, peak, trough)).unwrap();
        assert!((i / (2.0 * bump_norm_1d(8)) - 1.0).abs() < 0.05);

        assert!(functional_i(&s, &BumpFamily::sin3(8, 0.0, 0.1)).is_err());
        assert!(functional_i(&s, &BumpFamily::sin3(8, 4.9, -3.0)).is_err());
    }

    #[test]
    fn constancy_scan() {
        let g = UniformGrid::open_1d(200, 10.0).unwrap();
        assert!(certify_constancy(&line(&g, |_| 2.5), 4).unwrap().constant);
        let v = certify_constancy(&line(&g, |x| x), 4).unwrap();
        assert!(!v.constant);
        let wit = v.witness.unwrap();
        assert!(wit.i_value > wit.bound && wit.bound > 0.0);
        assert_eq!(wit.n, 1);
        assert!(wit.x1 < -4.9 && wit.x0 + PI > 4.9);
    }

    #[test]
    fn sqrt_screening() {
        let g = UniformGrid::periodic_1d(512, 40.0).unwrap();
        let samples = gaussian_mixture_samples(&g, 20, 7).unwrap();
        assert!(verify_f_equals_sqrt_w(f64::sqrt, &samples).unwrap().pass);
        let v = verify_f_equals_sqrt_w(|w| w.powf(0.6), &samples).unwrap();
        assert!(!v.pass && v.witness.is_some());
        let v = verify_f_equals_sqrt_w(|w| 1.1 * w.sqrt(), &samples).unwrap();
        assert!(!v.pass);
        assert!(v.norms.iter().all(|n| (n - 1.21).abs() < 1e-8));
    }
}
