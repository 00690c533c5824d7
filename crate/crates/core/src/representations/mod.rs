//! State representations and the conversions between them.
//!
//! * observational: density `w` and flow velocity `v`
//! * phase: density `w` and phase `γ` (with the free constant `c_γ` kept explicit)
//! * dynamical: `η = √w·e^{iγ}`
//! * momentum: `w_p = |φ|²` and the auxiliary phase `β = arg φ`
//! * bilocal: the density matrix `ρ(r₁,r₂) = √(w₁w₂)·e^{iκ}`, `κ = γ(r₁) − γ(r₂)`

pub(crate) mod density;
pub(crate) mod path;

pub use density::{expectation, wave_expectation, DensityMatrix, Observable, MAX_DENSITY_POINTS};

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, ComplexField, RealField, UniformGrid};
use crate::topology::{label_components, SupportLabeling, Vortex};

/// Relative support threshold: `w_floor = 1e-14·max(w)`.
pub const W_FLOOR_REL: f64 = 1e-14;

/// Tolerance on `∫w = 1` accepted by state constructors.
pub const NORM_TOL: f64 = 1e-8;

pub fn support_floor(w: &RealField) -> f64 {
    W_FLOOR_REL * w.max().max(0.0)
}

pub fn support_mask(w: &RealField) -> Vec<bool> {
    let floor = support_floor(w);
    w.values().iter().map(|&v| v > floor).collect()
}

fn check_density(w: &RealField) -> Result<()> {
    if !w.is_finite() || w.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("density must be finite and nonnegative".into()));
    }
    let norm = w.integrate();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!("density integrates to {norm}, expected 1")));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("mass parameter {mu} must be positive")))
    }
}

/// Density and flow velocity. Velocity samples below the support floor are
/// undefined and stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationalState {
    w: RealField,
    v: Vec<RealField>,
}

impl ObservationalState {
    pub fn new(w: RealField, v: Vec<RealField>) -> Result<Self> {
        check_density(&w)?;
        if v.len() != w.grid().dim() {
            return Err(Error::InvalidArgument(format!(
                "{} velocity components on a {}-dimensional grid",
                v.len(),
                w.grid().dim()
            )));
        }
        let mask = support_mask(&w);
        let mut masked = Vec::with_capacity(v.len());
        for comp in v {
            comp.same_grid(w.grid())?;
            let mut comp = comp;
            for (val, &m) in comp.values_mut().iter_mut().zip(&mask) {
                if !m {
                    *val = 0.0;
                } else if !val.is_finite() {
                    return Err(Error::InvalidArgument("velocity not finite on the support".into()));
                }
            }
            masked.push(comp);
        }
        Ok(Self { w, v: masked })
    }

    pub fn density(&self) -> &RealField {
        &self.w
    }

    pub fn velocity(&self) -> &[RealField] {
        &self.v
    }

    pub fn support(&self) -> Vec<bool> {
        support_mask(&self.w)
    }

    /// Probability current `J = w·v`.
    pub fn flux(&self) -> Vec<RealField> {
        self.v.iter().map(|c| c.zip_with(&self.w, |a, b| a * b).expect("same grid")).collect()
    }

    /// `∫ w v dx`.
    pub fn mean_velocity(&self) -> Vec<f64> {
        self.flux().iter().map(RealField::integrate).collect()
    }
}

/// Density and phase. The phase is stored relative to a per-component
/// constant: `γ(x) = γ_rel(x) + c[owner(x)]`. Points off the support belong to
/// the nearest component and carry `γ_rel = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    w: RealField,
    gamma_rel: RealField,
    owner: Vec<u32>,
    constants: Vec<f64>,
    vortices: Vec<Vortex>,
}

impl PhaseState {
    /// A single-component state with `c_γ = 0`: `gamma` is taken as given on every point.
    pub fn new(w: RealField, gamma: RealField) -> Result<Self> {
        check_density(&w)?;
        gamma.same_grid(w.grid())?;
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument("phase must be finite".into()));
        }
        let n = w.grid().len();
        Ok(Self { w, gamma_rel: gamma, owner: vec![1; n], constants: vec![0.0], vortices: Vec::new() })
    }

    pub(crate) fn from_parts(
        w: RealField,
        gamma_rel: RealField,
        owner: Vec<u32>,
        constants: Vec<f64>,
        vortices: Vec<Vortex>,
    ) -> Self {
        Self { w, gamma_rel, owner, constants, vortices }
    }

    pub fn density(&self) -> &RealField {
        &self.w
    }

    /// Full phase `γ_rel + c`.
    pub fn gamma(&self) -> RealField {
        let mut g = self.gamma_rel.clone();
        for (val, &o) in g.values_mut().iter_mut().zip(&self.owner) {
            *val += self.constants[o as usize - 1];
        }
        g
    }

    pub fn gamma_relative(&self) -> &RealField {
        &self.gamma_rel
    }

    /// The free constant of the first (or only) component.
    pub fn c_gamma(&self) -> f64 {
        self.constants[0]
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    /// Component (1-based) each grid point's phase constant belongs to.
    pub fn owners(&self) -> &[u32] {
        &self.owner
    }

    pub fn vortices(&self) -> &[Vortex] {
        &self.vortices
    }

    /// Same state with every component constant shifted by `delta`.
    pub fn shift_constants(&self, delta: f64) -> Self {
        let mut s = self.clone();
        for c in &mut s.constants {
            *c += delta;
        }
        s
    }

    pub fn with_constants(&self, constants: Vec<f64>) -> Result<Self> {
        if constants.len() != self.constants.len() {
            return Err(Error::ConstantsMismatch { expected: self.constants.len(), got: constants.len() });
        }
        let mut s = self.clone();
        s.constants = constants;
        Ok(s)
    }

    /// Bilocal correlation `κ(r_i, r_j) = γ(r_i) − γ(r_j)`; free of any common constant.
    pub fn kappa(&self, i: usize, j: usize) -> f64 {
        let rel = self.gamma_rel.values()[i] - self.gamma_rel.values()[j];
        let (a, b) = (self.owner[i] as usize - 1, self.owner[j] as usize - 1);
        if a == b {
            rel
        } else {
            rel + (self.constants[a] - self.constants[b])
        }
    }

    /// `∂γ/∂x_axis` on the support (zero elsewhere). Vortex phase windings are
    /// differentiated analytically; the remaining regular phase by fourth-order
    /// differences; stencils that reach off-support points read whatever
    /// phase is stored there.
    pub fn phase_gradient(&self, axis: usize) -> Result<RealField> {
        let grid = self.w.grid();
        grid.check_axis(axis)?;
        let mut regular = self.gamma_rel.clone();
        for vortex in &self.vortices {
            for (i, val) in regular.values_mut().iter_mut().enumerate() {
                *val -= vortex.phase_at(&grid.position(i));
            }
        }
        let mut grad = regular.gradient_fd(axis)?;
        let mask = support_mask(&self.w);
        for (i, val) in grad.values_mut().iter_mut().enumerate() {
            if !mask[i] {
                *val = 0.0;
                continue;
            }
            let x = grid.position(i);
            for vortex in &self.vortices {
                *val += vortex.phase_gradient_at(&x)[axis];
            }
        }
        Ok(grad)
    }

    /// `{w, v}` with `v = ∇γ/μ`.
    pub fn to_observational(&self, mu: f64) -> Result<ObservationalState> {
        check_mu(mu)?;
        let v = (0..self.w.grid().dim())
            .map(|a| Ok(self.phase_gradient(a)?.scale(1.0 / mu)))
            .collect::<Result<Vec<_>>>()?;
        ObservationalState::new(self.w.clone(), v)
    }
}

/// Dynamical state `η` with its mass parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    eta: ComplexField,
    mu: f64,
}

impl WaveState {
    pub fn new(eta: ComplexField, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        if !eta.is_finite() {
            return Err(Error::InvalidArgument("wave state not finite".into()));
        }
        let norm = eta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("wave state has norm {norm}, expected 1")));
        }
        Ok(Self { eta, mu })
    }

    /// Rescales `eta` to unit norm.
    pub fn normalized(eta: ComplexField, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self { eta: eta.normalized()?, mu })
    }

    /// Wraps `eta` as-is, without checking its norm (evolution output, reloaded snapshots).
    pub fn from_evolved(eta: ComplexField, mu: f64) -> Self {
        Self { eta, mu }
    }

    pub fn eta(&self) -> &ComplexField {
        &self.eta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn grid(&self) -> &UniformGrid {
        self.eta.grid()
    }

    pub fn density(&self) -> RealField {
        self.eta.modulus_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.eta.norm_sqr()
    }

    /// `J_axis = Im(η*·∂η)/μ`.
    pub fn current(&self, axis: usize) -> Result<RealField> {
        let d = self.eta.gradient(axis)?;
        let values = self.eta.values().iter().zip(d.values()).map(|(e, de)| (e.conj() * de).im / self.mu).collect();
        RealField::new(self.grid().clone(), values)
    }

    pub fn inner(&self, other: &WaveState) -> Result<Complex64> {
        self.eta.inner(&other.eta)
    }
}

/// Momentum distribution `w_p` and auxiliary phase `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub w_p: RealField,
    /// `arg φ`, zero where `w_p` is below the support floor.
    pub beta: RealField,
}

impl MomentumState {
    /// Velocity distribution `w_u(u) = μ·w_p(μu)` on the rescaled grid.
    pub fn velocity_distribution(&self, mu: f64) -> Result<RealField> {
        check_mu(mu)?;
        let g = self.w_p.grid();
        let grid = UniformGrid::new(
            g.shape().to_vec(),
            g.lengths().iter().map(|l| l / mu).collect(),
            g.periodic().to_vec(),
        )?;
        RealField::new(grid, self.w_p.values().iter().map(|w| w * mu.powi(g.dim() as i32)).collect())
    }

    pub fn mean_momentum(&self) -> Vec<f64> {
        let g = self.w_p.grid();
        let dv = g.cell_volume();
        (0..g.dim())
            .map(|a| {
                self.w_p
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| g.position(i)[a] * w)
                    .sum::<f64>()
                    * dv
            })
            .collect()
    }
}

/// Nearest-support owner for every point (multi-source flood over face
/// neighbours, seeded in linear order).
pub(crate) fn assign_owners(grid: &UniformGrid, labels: &SupportLabeling) -> Vec<u32> {
    let mut owner = labels.ids.clone();
    let mut queue: VecDeque<usize> = (0..grid.len()).filter(|&i| owner[i] != 0).collect();
    while let Some(p) = queue.pop_front() {
        for q in grid.neighbors(p) {
            if owner[q] == 0 {
                owner[q] = owner[p];
                queue.push_back(q);
            }
        }
    }
    if owner.iter().any(|&o| o == 0) {
        owner.iter_mut().for_each(|o| *o = (*o).max(1));
    }
    owner
}

/// Integrates one support component's velocity from its anchor. Returns the
/// relative phase on that component and the path disagreement.
pub(crate) fn integrate_component(
    w: &RealField,
    v: &[RealField],
    mu: f64,
    labels: &SupportLabeling,
    id: u32,
) -> Result<(Vec<f64>, f64)> {
    let mask: Vec<bool> = labels.ids.iter().map(|&c| c == id).collect();
    let anchor = path::anchor_point(w, &mask).ok_or(Error::ZeroNorm)?;
    let (phase, mismatch) = path::integrate_velocity(v, mu, &mask, anchor);
    Ok((phase.into_iter().zip(&mask).map(|(p, &m)| if m { p } else { 0.0 }).collect(), mismatch))
}

/// Path tolerance beyond which a velocity field is treated as carrying circulation.
pub const PATH_MISMATCH_TOL: f64 = 1e-6 * 2.0 * PI;

/// `γ(x) = μ∫v + c_γ` on a single connected support component.
pub fn phase_from_velocity(s: &ObservationalState, mu: f64, c_gamma: f64) -> Result<PhaseState> {
    check_mu(mu)?;
    let labels = label_components(&s.w);
    match labels.count {
        0 => return Err(Error::ZeroNorm),
        1 => {}
        n => return Err(Error::DisjointSupport { components: n }),
    }
    let (rel, mismatch) = integrate_component(&s.w, &s.v, mu, &labels, 1)?;
    if mismatch > PATH_MISMATCH_TOL {
        return Err(Error::NodalCirculation { mismatch });
    }
    let grid = s.w.grid().clone();
    Ok(PhaseState {
        w: s.w.clone(),
        gamma_rel: RealField::new(grid.clone(), rel)?,
        owner: vec![1; grid.len()],
        constants: vec![c_gamma],
        vortices: Vec::new(),
    })
}

/// `η = √w·e^{iγ}` (the `+√w` branch).
pub fn wave_from_phase(s: &PhaseState, mu: f64) -> Result<WaveState> {
    check_mu(mu)?;
    let gamma = s.gamma();
    let values = s.w.values().iter().zip(gamma.values()).map(|(&w, &g)| Complex64::from_polar(w.sqrt(), g)).collect();
    WaveState::new(ComplexField::new(s.w.grid().clone(), values)?, mu)
}

/// `w = |η|²`, `γ = arg η` on the support. Each support component's constant is
/// the phase at its anchor point; phases elsewhere are reduced to `(−π, π]`
/// relative to it.
pub fn wave_to_phase(s: &WaveState) -> Result<PhaseState> {
    let w = s.density();
    let labels = label_components(&w);
    if labels.count == 0 {
        return Err(Error::ZeroNorm);
    }
    let grid = w.grid().clone();
    let mut constants = Vec::with_capacity(labels.count);
    for id in 1..=labels.count as u32 {
        let mask: Vec<bool> = labels.ids.iter().map(|&c| c == id).collect();
        let anchor = path::anchor_point(&w, &mask).ok_or(Error::ZeroNorm)?;
        constants.push(s.eta.values()[anchor].arg());
    }
    let rel = s
        .eta
        .values()
        .iter()
        .zip(&labels.ids)
        .map(|(e, &id)| if id == 0 { 0.0 } else { (e * Complex64::from_polar(1.0, -constants[id as usize - 1])).arg() })
        .collect();
    let owner = assign_owners(&grid, &labels);
    Ok(PhaseState { w, gamma_rel: RealField::new(grid, rel)?, owner, constants, vortices: Vec::new() })
}

/// Momentum representation via the unitary transform; requires a periodic grid.
pub fn momentum_state(s: &WaveState) -> Result<MomentumState> {
    let phi = forward_transform(&s.eta)?;
    let w_p = phi.modulus_sqr();
    let floor = support_floor(&w_p);
    let beta = phi
        .values()
        .iter()
        .zip(w_p.values())
        .map(|(f, &w)| if w > floor { f.arg() } else { 0.0 })
        .collect();
    Ok(MomentumState { beta: RealField::new(w_p.grid().clone(), beta)?, w_p })
}

/// Mean momentum along each axis, computed twice: `∫p·|φ|² dp` in momentum
/// space and `∫w·∂γ dx` in position space.
pub fn mean_momentum_two_paths(s: &WaveState) -> Result<(Vec<f64>, Vec<f64>)> {
    let spectral = momentum_state(s)?.mean_momentum();
    let grid = s.grid();
    let w = s.density();
    let floor = support_floor(&w);
    let mut positional = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let d = s.eta.gradient(axis)?;
        // w·∂γ = Im(η*∂η) on the support
        let sum: f64 = s
            .eta
            .values()
            .iter()
            .zip(d.values())
            .zip(w.values())
            .map(|((e, de), &wv)| if wv > floor { wv * ((e.conj() * de).im / wv) } else { 0.0 })
            .sum();
        positional.push(sum * grid.cell_volume());
    }
    Ok((spectral, positional))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_density(g: &UniformGrid, x0: f64, sigma: f64) -> RealField {
        RealField::from_fn(g, |x| {
            (-(x[0] - x0).powi(2) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
        })
    }

    fn obs(g: &UniformGrid, v: impl Fn(f64) -> f64) -> ObservationalState {
        let w = gaussian_density(g, 0.0, 1.0);
        ObservationalState::new(w, vec![RealField::from_fn(g, |x| v(x[0]))]).unwrap()
    }

    #[test]
    fn phase_from_zero_velocity_is_the_constant() {
        let g = UniformGrid::periodic_1d(256, 20.0).unwrap();
        let s = phase_from_velocity(&obs(&g, |_| 0.0), 1.0, 0.7).unwrap();
        assert!(s.gamma().values().iter().all(|&v| (v - 0.7).abs() < 1e-15));
    }

    #[test]
    fn phase_from_constant_and_linear_velocity() {
        let g = UniformGrid::periodic_1d(256, 20.0).unwrap();
        let mask = support_mask(&gaussian_density(&g, 0.0, 1.0));
        let first = mask.iter().position(|&m| m).unwrap();
        let x_min = g.coordinate(0, first);

        let s = phase_from_velocity(&obs(&g, |_| 0.4), 1.0, 0.2).unwrap();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                let x = g.coordinate(0, i);
                assert!((s.gamma().values()[i] - (0.4 * (x - x_min) + 0.2)).abs() < 1e-12);
            }
        }

        let alpha = 0.3;
        let s = phase_from_velocity(&obs(&g, |x| alpha * x), 2.0, -1.0).unwrap();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                let x = g.coordinate(0, i);
                let exact = alpha * (x * x - x_min * x_min) - 1.0;
                assert!((s.gamma().values()[i] - exact).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn disjoint_support_is_rejected() {
        let g = UniformGrid::periodic_1d(1024, 80.0).unwrap();
        let w = gaussian_density(&g, -10.0, 1.0).zip_with(&gaussian_density(&g, 10.0, 1.0), |a, b| 0.5 * (a + b)).unwrap();
        let s = ObservationalState::new(w, vec![RealField::zeros(&g)]).unwrap();
        assert!(matches!(phase_from_velocity(&s, 1.0, 0.0), Err(Error::DisjointSupport { components: 2 })));
    }

    #[test]
    fn wave_phase_round_trip() {
        let g = UniformGrid::periodic_1d(512, 30.0).unwrap();
        let w = gaussian_density(&g, 1.0, 1.3);
        let gamma = RealField::from_fn(&g, |x| 0.8 * x[0] + 0.1 * x[0].powi(3));
        let s = PhaseState::new(w.clone(), gamma.clone()).unwrap();
        let ws = wave_from_phase(&s, 1.0).unwrap();
        // real positive for zero phase
        let real = wave_from_phase(&PhaseState::new(w.clone(), RealField::zeros(&g)).unwrap(), 1.0).unwrap();
        assert!(real.eta().values().iter().all(|e| e.im == 0.0 && e.re >= 0.0));

        let back = wave_to_phase(&ws).unwrap();
        for (a, b) in back.density().values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let mask = support_mask(&w);
        for (i, &m) in mask.iter().enumerate() {
            if m {
                let d = back.gamma().values()[i] - gamma.values()[i];
                let wrapped = d - 2.0 * PI * (d / (2.0 * PI)).round();
                assert!(wrapped.abs() < 1e-9, "phase differs by {d} at {i}");
            }
        }
    }

    #[test]
    fn momentum_state_properties() {
        let g = UniformGrid::periodic_1d(1024, 40.0).unwrap();
        let w = gaussian_density(&g, 0.0, 1.0);
        let base = wave_from_phase(&PhaseState::new(w.clone(), RealField::zeros(&g)).unwrap(), 1.0).unwrap();
        let m0 = momentum_state(&base).unwrap();
        assert!((m0.w_p.integrate() - 1.0).abs() < 1e-10);

        // modulation by an on-grid momentum shifts w_p by whole bins
        let dp = 2.0 * PI / 40.0;
        let p0 = 16.0 * dp;
        let shifted = wave_from_phase(&PhaseState::new(w.clone(), RealField::from_fn(&g, |x| p0 * x[0])).unwrap(), 1.0).unwrap();
        let m1 = momentum_state(&shifted).unwrap();
        for j in 16..1024 {
            assert!((m1.w_p.values()[j] - m0.w_p.values()[j - 16]).abs() < 1e-10);
        }
        assert!((m1.mean_momentum()[0] - p0).abs() < 1e-6);

        // a global phase leaves w_p untouched
        let phased = wave_from_phase(&PhaseState::new(w, RealField::constant(&g, 2.1)).unwrap(), 1.0).unwrap();
        let m2 = momentum_state(&phased).unwrap();
        for (a, b) in m2.w_p.values().iter().zip(m0.w_p.values()) {
            assert!((a - b).abs() < 1e-12);
        }

        let wu = m0.velocity_distribution(2.0).unwrap();
        assert!((wu.integrate() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_paths_on_simple_states() {
        let g = UniformGrid::periodic_1d(1024, 40.0).unwrap();
        let w = gaussian_density(&g, 0.0, 1.0);
        let plane = wave_from_phase(&PhaseState::new(w.clone(), RealField::from_fn(&g, |x| 3.0 * x[0])).unwrap(), 1.0).unwrap();
        let (a, b) = mean_momentum_two_paths(&plane).unwrap();
        assert!((a[0] - 3.0).abs() < 1e-6 && (b[0] - 3.0).abs() < 1e-6);

        let real = wave_from_phase(&PhaseState::new(w, RealField::zeros(&g)).unwrap(), 1.0).unwrap();
        let (a, b) = mean_momentum_two_paths(&real).unwrap();
        assert!(a[0].abs() < 1e-12 && b[0].abs() < 1e-12);

        let counter = ComplexField::from_fn(&g, |x| {
            let env = |c: f64| (-(x[0] - c).powi(2) / 4.0).exp();
            Complex64::from_polar(env(-3.0), 2.0 * x[0]) + Complex64::from_polar(env(3.0), -2.0 * x[0])
        });
        let s = WaveState::normalized(counter, 1.0).unwrap();
        let (a, b) = mean_momentum_two_paths(&s).unwrap();
        assert!(a[0].abs() < 1e-6 && b[0].abs() < 1e-6);
    }
}
