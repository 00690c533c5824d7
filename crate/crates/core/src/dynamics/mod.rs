//! Time evolution of the wave state, the phase state and the density matrix,
//! and the consistency checks that single out the Schrödinger Hamiltonian.

mod checks;
mod crank_nicolson;
mod hamiltonian;
mod liouville;
mod madelung;
mod split_step;

pub use checks::{
    continuity_residual, default_scan_axes, hamiltonian_scan, mixture_weight_drift, orthogonality_preservation_check,
    HamiltonianScan, MixtureReport, OrthogonalityReport,
};
pub use hamiltonian::{Hamiltonian, Potential, PotentialFn};
pub use liouville::LiouvilleStepper;
pub use madelung::MADELUNG_STABILITY;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::representations::{DensityMatrix, PhaseState, WaveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Strang splitting with the kinetic factor applied exactly in Fourier space.
    SplitStep,
    CrankNicolson,
    /// RK4 on the `{w, γ}` system.
    Madelung,
    /// Exact conjugation in the eigenbasis of `Ĥ`.
    Liouville,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::SplitStep, Scheme::CrankNicolson, Scheme::Madelung, Scheme::Liouville];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SplitStep => "split-step-spectral",
            Scheme::CrankNicolson => "crank-nicolson",
            Scheme::Madelung => "madelung-fd",
            Scheme::Liouville => "liouville-dense",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    /// Observer cadence in steps.
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn new(scheme: Scheme, dt: f64, steps: usize) -> Self {
        Self { dt, steps, scheme, record_every: steps.max(1) }
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("time step {} must be positive", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("at least one step required".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    fn records(&self, step: usize) -> bool {
        step % self.record_every == 0 || step == self.steps
    }
}

/// Advances `η` by one step of a wave scheme.
pub(crate) enum WaveStepper {
    Split(split_step::SplitStepper),
    Cn(crank_nicolson::CnStepper),
    Liouville(LiouvilleStepper),
}

impl WaveStepper {
    pub(crate) fn new(h: &Hamiltonian, cfg: &EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        match cfg.scheme {
            Scheme::SplitStep => Ok(Self::Split(split_step::SplitStepper::new(h, cfg.dt)?)),
            Scheme::CrankNicolson => Ok(Self::Cn(crank_nicolson::CnStepper::new(h, cfg.dt)?)),
            Scheme::Liouville => Ok(Self::Liouville(LiouvilleStepper::new(h, cfg.dt, 0.0)?)),
            Scheme::Madelung => {
                Err(Error::InvalidArgument("madelung-fd evolves phase states, not wave states".into()))
            }
        }
    }

    pub(crate) fn step(&mut self, eta: &ComplexField, t: f64) -> Result<ComplexField> {
        match self {
            Self::Split(s) => s.step(eta, t),
            Self::Cn(s) => s.step(eta, t),
            Self::Liouville(s) => s.propagate_vector(eta, t),
        }
    }
}

fn check_finite(ok: bool, t: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// One Schrödinger step `i∂η/∂t = Ĥη` from time `t`.
pub fn schrodinger_step(s: &WaveState, h: &Hamiltonian, cfg: &EvolutionConfig, t: f64) -> Result<WaveState> {
    h.check_grid(s.grid())?;
    let eta = WaveStepper::new(h, cfg)?.step(s.eta(), t)?;
    check_finite(eta.is_finite(), t + cfg.dt)?;
    Ok(WaveState::from_evolved(eta, s.mu()))
}

/// Runs `cfg.steps` wave steps from `t = 0`. `observe(step, t, state)` sees the
/// initial state, every `record_every`-th state and the final one.
pub fn evolve_wave(
    s: &WaveState,
    h: &Hamiltonian,
    cfg: &EvolutionConfig,
    mut observe: impl FnMut(usize, f64, &WaveState) -> Result<()>,
) -> Result<WaveState> {
    h.check_grid(s.grid())?;
    let mut stepper = WaveStepper::new(h, cfg)?;
    observe(0, 0.0, s)?;
    let mut cur = s.clone();
    for step in 1..=cfg.steps {
        let t0 = (step - 1) as f64 * cfg.dt;
        let eta = stepper.step(cur.eta(), t0)?;
        let t = step as f64 * cfg.dt;
        check_finite(eta.is_finite(), t)?;
        cur = WaveState::from_evolved(eta, s.mu());
        if cfg.records(step) {
            observe(step, t, &cur)?;
        }
    }
    Ok(cur)
}

/// One Madelung step of `{w, γ}` from time `t`.
pub fn madelung_step(s: &PhaseState, h: &Hamiltonian, cfg: &EvolutionConfig, t: f64) -> Result<PhaseState> {
    cfg.validate()?;
    let mut m = madelung::MadelungStepper::new(s, h, cfg.dt)?;
    m.step(t)?;
    Ok(m.state())
}

pub fn evolve_phase(
    s: &PhaseState,
    h: &Hamiltonian,
    cfg: &EvolutionConfig,
    mut observe: impl FnMut(usize, f64, &PhaseState) -> Result<()>,
) -> Result<PhaseState> {
    cfg.validate()?;
    let mut m = madelung::MadelungStepper::new(s, h, cfg.dt)?;
    observe(0, 0.0, s)?;
    for step in 1..=cfg.steps {
        m.step((step - 1) as f64 * cfg.dt)?;
        if cfg.records(step) {
            observe(step, step as f64 * cfg.dt, &m.state())?;
        }
    }
    Ok(m.state())
}

/// One Liouville step `iρ̇ = [Ĥ, ρ]` from time `t`.
pub fn liouville_step(rho: &DensityMatrix, h: &Hamiltonian, cfg: &EvolutionConfig, t: f64) -> Result<DensityMatrix> {
    cfg.validate()?;
    h.check_grid(rho.grid())?;
    let mut l = LiouvilleStepper::new(h, cfg.dt, t)?;
    l.load(rho)?;
    l.step()?;
    l.density()
}

pub fn evolve_density(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    cfg: &EvolutionConfig,
    mut observe: impl FnMut(usize, f64, &DensityMatrix) -> Result<()>,
) -> Result<DensityMatrix> {
    cfg.validate()?;
    h.check_grid(rho.grid())?;
    let mut l = LiouvilleStepper::new(h, cfg.dt, 0.0)?;
    l.load(rho)?;
    observe(0, 0.0, rho)?;
    for step in 1..=cfg.steps {
        l.step()?;
        if cfg.records(step) {
            observe(step, step as f64 * cfg.dt, &l.density()?)?;
        }
    }
    l.density()
}
