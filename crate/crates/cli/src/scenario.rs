//! Scenario execution: `run` writes the time series and snapshots, `compare`
//! races the flow equations against a wave scheme.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fuzzmech_core::dynamics::{evolve_density, evolve_phase, evolve_wave};
use fuzzmech_core::grid::{density_diagnostics, diagnostics, phase_diagnostics, Diagnostics};
use fuzzmech_core::representations::{wave_from_phase, wave_to_phase};
use fuzzmech_core::topology::label_components;
use fuzzmech_core::{
    states, ComplexField, DensityMatrix, Error, EvolutionConfig, Hamiltonian, PhaseState, RealField, Scheme,
    UniformGrid, WaveState,
};
use num_complex::Complex64;

use crate::checkpoint::Checkpoint;
use crate::config::{InitialSpec, OutputFormat, PotentialSpec, ScenarioConfig};
use crate::error::{CliError, CliResult};

/// Largest tolerated `|∫w(t) − ∫w(0)|` during a run.
pub const NORM_DRIFT_MAX: f64 = 1e-6;

/// Final-time L² density gap below which `compare` passes.
pub const COMPARE_TOL: f64 = 1e-4;

pub fn build_grid(cfg: &ScenarioConfig) -> CliResult<UniformGrid> {
    Ok(UniformGrid::new(cfg.grid.n.clone(), cfg.grid.length.clone(), cfg.grid.periodic.clone())?)
}

/// Two-column `x U` samples (whitespace or comma separated, `#` comments).
pub fn read_potential_samples(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let pairs = read_columns(&text, path)?;
    if pairs.len() < 2 {
        return Err(CliError::Usage(format!("{}: need at least two samples", path.display())));
    }
    if pairs.windows(2).any(|p| !(p[1].0 > p[0].0)) {
        return Err(CliError::Usage(format!("{}: x column must increase strictly", path.display())));
    }
    Ok(pairs)
}

/// Parses rows of two numbers; a non-numeric first row is taken as a header.
pub fn read_columns(text: &str, path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => out.push((v[0], v[1])),
            None if out.is_empty() => continue,
            _ => {
                return Err(CliError::Usage(format!("{}:{}: expected two numeric columns", path.display(), k + 1)));
            }
        }
    }
    Ok(out)
}

/// Linear interpolation in `x`, constant beyond the sampled range.
fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let k = samples.partition_point(|&(xs, _)| xs <= x);
    if k == 0 {
        return samples[0].1;
    }
    if k == samples.len() {
        return samples[k - 1].1;
    }
    let ((x0, u0), (x1, u1)) = (samples[k - 1], samples[k]);
    u0 + (u1 - u0) * (x - x0) / (x1 - x0)
}

pub fn build_hamiltonian(cfg: &ScenarioConfig, grid: &UniformGrid) -> CliResult<Hamiltonian> {
    Ok(match &cfg.potential {
        PotentialSpec::Free => Hamiltonian::free(grid, cfg.mu)?,
        PotentialSpec::Harmonic { omega } => Hamiltonian::harmonic(grid, cfg.mu, *omega)?,
        PotentialSpec::Box { x1, x2 } => Hamiltonian::free(grid, cfg.mu)?.with_box(*x1, *x2)?,
        PotentialSpec::File { path } => {
            let samples = read_potential_samples(path)?;
            Hamiltonian::new(cfg.mu, RealField::from_fn(grid, |x| interpolate(&samples, x[0])))?
        }
    })
}

/// The configured initial state; two-packet states also keep their
/// per-component phase constants.
#[derive(Debug, Clone)]
pub struct Initial {
    pub wave: WaveState,
    pub phase: Option<PhaseState>,
}

pub fn build_initial(cfg: &ScenarioConfig, grid: &UniformGrid, h: &Hamiltonian) -> CliResult<Initial> {
    let mu = cfg.mu;
    let (wave, phase) = match &cfg.initial {
        InitialSpec::Gaussian { x0, sigma, p0 } => (states::gaussian(grid, x0, *sigma, p0, mu)?, None),
        InitialSpec::TwoGaussian { separation, sigma, c_d } => {
            let p = states::two_gaussian(grid, *separation, *sigma, *c_d)?;
            (wave_from_phase(&p, mu)?, Some(p))
        }
        InitialSpec::Vortex { charge } => (states::vortex(grid, *charge, mu)?, None),
        InitialSpec::Eigenstate { index, omega } if grid.dim() == 1 && index.len() > 1 => {
            let mut sum = ComplexField::zeros(grid);
            for &k in index {
                let s = states::harmonic_eigenstate(grid, &[k], mu, *omega)?;
                sum = sum.zip_with(s.eta(), |a, b| a + b)?;
            }
            (WaveState::normalized(sum, mu)?, None)
        }
        InitialSpec::Eigenstate { index, omega } => (states::harmonic_eigenstate(grid, index, mu, *omega)?, None),
    };
    // walls: the state starts inside the box
    let wave = match h.confinement() {
        Some(mask) => {
            let mut eta = wave.eta().clone();
            for (v, &inside) in eta.values_mut().iter_mut().zip(mask) {
                if !inside {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
            WaveState::normalized(eta, mu)?
        }
        None => wave,
    };
    Ok(Initial { wave, phase })
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn series_header(cfg: &ScenarioConfig, dim: usize) -> String {
    let mut out = String::from("# fuzzmech series\n");
    for line in cfg.resolved_lines() {
        writeln!(out, "# {line}").unwrap();
    }
    let mut cols = vec!["t".to_string(), "norm".into()];
    cols.extend((0..dim).map(|a| format!("mean_x_{a}")));
    cols.push("sigma_x".into());
    cols.extend((0..dim).map(|a| format!("mean_p_{a}")));
    cols.extend(["energy".into(), "continuity_residual".into(), "spectral_tail".into(), "n_components".into()]);
    writeln!(out, "{}", cols.join(",")).unwrap();
    out
}

fn series_row(t: f64, d: &Diagnostics, components: usize) -> String {
    let mut cells = vec![fmt_num(t), fmt_num(d.norm)];
    cells.extend(d.mean_x.iter().map(|&x| fmt_num(x)));
    cells.push(fmt_num(d.sigma_x));
    cells.extend(d.mean_p.iter().map(|&x| fmt_num(x)));
    cells.extend([fmt_num(d.energy), fmt_num(d.continuity_residual), fmt_num(d.spectral_tail), components.to_string()]);
    cells.join(",") + "\n"
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub series: Option<PathBuf>,
    pub checkpoints: Vec<PathBuf>,
    pub records: usize,
    pub final_time: f64,
    pub max_norm_drift: f64,
}

struct Recorder<'a> {
    cfg: &'a ScenarioConfig,
    csv: String,
    checkpoints: Vec<PathBuf>,
    records: usize,
    norm0: Option<f64>,
    max_drift: f64,
}

impl Recorder<'_> {
    fn record(&mut self, step: usize, t: f64, d: &Diagnostics, w: &RealField, snapshot: impl FnOnce() -> CliResult<Checkpoint>) -> CliResult<()> {
        let norm0 = *self.norm0.get_or_insert(d.norm);
        let drift = (d.norm - norm0).abs();
        self.max_drift = self.max_drift.max(drift);
        self.csv.push_str(&series_row(t, d, label_components(w).count));
        self.records += 1;
        if self.cfg.formats.contains(&OutputFormat::Checkpoint) {
            let path = self.cfg.output_path.join(format!("checkpoint_{step:06}.fzm"));
            snapshot()?.write(&path)?;
            self.checkpoints.push(path);
        }
        if !(drift <= NORM_DRIFT_MAX) {
            return Err(CliError::Invariant(format!("norm drifted by {drift:.3e} at t={t}")));
        }
        Ok(())
    }
}

/// Observer failures are parked in `pending` and surface after the core loop unwinds.
fn park(pending: &mut Option<CliError>, r: CliResult<()>) -> fuzzmech_core::Result<()> {
    r.map_err(|e| {
        let core = match &e {
            CliError::Core(c) => c.clone(),
            _ => Error::InvalidArgument("run interrupted".into()),
        };
        *pending = Some(e);
        core
    })
}

fn madelung_halt(e: Error) -> CliError {
    match e {
        Error::NodeFormed { t } => CliError::Invariant(format!("madelung halted at t={t}: a density node formed")),
        Error::NormDrift { t, drift } => {
            CliError::Invariant(format!("madelung halted at t={t}: norm drifted by {drift:.3e}"))
        }
        Error::NonFinite { t } => {
            CliError::Invariant(format!("madelung halted at t={t}: non-finite values, the flow is undefined there"))
        }
        e => CliError::Core(e),
    }
}

/// Executes a scenario, writing `series.csv` and snapshots under the configured output path.
pub fn run(cfg: &ScenarioConfig) -> CliResult<RunSummary> {
    let grid = build_grid(cfg)?;
    let h = build_hamiltonian(cfg, &grid)?;
    let init = build_initial(cfg, &grid, &h)?;
    let ecfg = EvolutionConfig::new(cfg.evolve.scheme, cfg.evolve.dt, cfg.evolve.steps)
        .with_record_every(cfg.evolve.record_every);
    std::fs::create_dir_all(&cfg.output_path).map_err(CliError::io(&cfg.output_path))?;

    let mut rec = Recorder {
        cfg,
        csv: series_header(cfg, grid.dim()),
        checkpoints: Vec::new(),
        records: 0,
        norm0: None,
        max_drift: 0.0,
    };
    let mut pending: Option<CliError> = None;
    let mu = cfg.mu;
    let outcome: CliResult<()> = match cfg.evolve.scheme {
        Scheme::SplitStep | Scheme::CrankNicolson => {
            let r = evolve_wave(&init.wave, &h, &ecfg, |step, t, s| {
                let d = diagnostics(s, Some(&h), t)?;
                park(&mut pending, rec.record(step, t, &d, &s.density(), || Checkpoint::from_wave(s, t, false)))
            });
            r.map(drop).map_err(|e| pending.take().unwrap_or(CliError::Core(e)))
        }
        Scheme::Madelung => {
            let p = match &init.phase {
                Some(p) => p.clone(),
                None => wave_to_phase(&init.wave)?,
            };
            let r = evolve_phase(&p, &h, &ecfg, |step, t, s| {
                let d = phase_diagnostics(s, mu, Some(&h), t)?;
                let snap = || {
                    Ok(Checkpoint {
                        grid: grid.clone(),
                        mu,
                        t,
                        w: s.density().values().to_vec(),
                        gamma: Some(s.gamma().into_values()),
                        v: None,
                    })
                };
                park(&mut pending, rec.record(step, t, &d, s.density(), snap))
            });
            r.map(drop).map_err(|e| pending.take().unwrap_or_else(|| madelung_halt(e)))
        }
        Scheme::Liouville => {
            let rho = DensityMatrix::from_wave(&init.wave)?;
            let r = evolve_density(&rho, &h, &ecfg, |step, t, r| {
                let d = density_diagnostics(r, &h, t)?;
                let w = r.diagonal();
                let snap = || Ok(Checkpoint { grid: grid.clone(), mu, t, w: w.values().to_vec(), gamma: None, v: None });
                park(&mut pending, rec.record(step, t, &d, &w, snap))
            });
            r.map(drop).map_err(|e| pending.take().unwrap_or(CliError::Core(e)))
        }
    };
    let series = if cfg.formats.contains(&OutputFormat::Csv) {
        let path = cfg.output_path.join("series.csv");
        std::fs::write(&path, &rec.csv).map_err(CliError::io(&path))?;
        Some(path)
    } else {
        None
    };
    outcome?;
    Ok(RunSummary {
        series,
        checkpoints: rec.checkpoints,
        records: rec.records,
        final_time: ecfg.final_time(),
        max_norm_drift: rec.max_drift,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompareVerdict {
    Pass,
    Fail,
    /// The flow equations stopped (node or norm halt); not a disagreement.
    SchemeLimitation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub reference: Scheme,
    pub times: Vec<f64>,
    /// `‖w_madelung − w_wave‖₂` at each recorded time.
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    pub verdict: CompareVerdict,
    pub csv: Option<PathBuf>,
}

impl CompareReport {
    pub fn final_l2(&self) -> f64 {
        self.l2.last().copied().unwrap_or(f64::NAN)
    }
}

/// The wave scheme `compare` checks the flow equations against.
pub fn reference_scheme(cfg: &ScenarioConfig, h: &Hamiltonian) -> Scheme {
    match cfg.evolve.scheme {
        s @ (Scheme::SplitStep | Scheme::CrankNicolson) => s,
        _ if h.grid().is_periodic() && h.confinement().is_none() => Scheme::SplitStep,
        _ => Scheme::CrankNicolson,
    }
}

/// Evolves the configured initial data with `madelung-fd` and a wave scheme
/// and records the density gap; writes `compare.csv` when CSV output is on.
pub fn compare(cfg: &ScenarioConfig) -> CliResult<CompareReport> {
    let grid = build_grid(cfg)?;
    let h = build_hamiltonian(cfg, &grid)?;
    let init = build_initial(cfg, &grid, &h)?;
    let reference = reference_scheme(cfg, &h);
    let every = cfg.evolve.record_every;
    let wave_cfg = EvolutionConfig::new(reference, cfg.evolve.dt, cfg.evolve.steps).with_record_every(every);
    let flow_cfg = EvolutionConfig::new(Scheme::Madelung, cfg.evolve.dt, cfg.evolve.steps).with_record_every(every);
    let phase = match &init.phase {
        Some(p) => p.clone(),
        None => wave_to_phase(&init.wave)?,
    };

    let (wave_run, flow_run) = rayon::join(
        || {
            let mut out = Vec::new();
            evolve_wave(&init.wave, &h, &wave_cfg, |_, t, s| {
                out.push((t, s.density()));
                Ok(())
            })
            .map(|_| out)
        },
        || {
            let mut out = Vec::new();
            let r = evolve_phase(&phase, &h, &flow_cfg, |_, t, s| {
                out.push((t, s.density().clone()));
                Ok(())
            });
            (out, r.err())
        },
    );
    let wave_run = wave_run?;
    let (flow_run, halt) = flow_run;
    let verdict = match halt {
        None => None,
        Some(e @ (Error::NodeFormed { .. } | Error::NormDrift { .. } | Error::NonFinite { .. })) => match madelung_halt(e) {
            CliError::Invariant(msg) => Some(CompareVerdict::SchemeLimitation(msg)),
            other => return Err(other),
        },
        Some(e) => return Err(e.into()),
    };

    let mut report =
        CompareReport { reference, times: Vec::new(), l2: Vec::new(), linf: Vec::new(), verdict: CompareVerdict::Fail, csv: None };
    let mut csv = String::from("# fuzzmech compare\n");
    for line in cfg.resolved_lines() {
        writeln!(csv, "# {line}").unwrap();
    }
    writeln!(csv, "# reference = {reference}").unwrap();
    csv.push_str("t,l2,linf\n");
    for ((t, a), (_, b)) in flow_run.iter().zip(&wave_run) {
        let diff = a.zip_with(b, |x, y| x - y)?;
        let (l2, linf) = (diff.l2_norm(), diff.linf_norm());
        writeln!(csv, "{},{},{}", fmt_num(*t), fmt_num(l2), fmt_num(linf)).unwrap();
        report.times.push(*t);
        report.l2.push(l2);
        report.linf.push(linf);
    }
    report.verdict = verdict.unwrap_or(if report.final_l2() < COMPARE_TOL { CompareVerdict::Pass } else { CompareVerdict::Fail });
    if cfg.formats.contains(&OutputFormat::Csv) {
        std::fs::create_dir_all(&cfg.output_path).map_err(CliError::io(&cfg.output_path))?;
        let path = cfg.output_path.join("compare.csv");
        std::fs::write(&path, csv).map_err(CliError::io(&path))?;
        report.csv = Some(path);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_interpolation_clamps() {
        let s = [(0.0, 1.0), (1.0, 3.0), (3.0, 3.0)];
        assert_eq!(interpolate(&s, -5.0), 1.0);
        assert_eq!(interpolate(&s, 0.5), 2.0);
        assert_eq!(interpolate(&s, 2.0), 3.0);
        assert_eq!(interpolate(&s, 9.0), 3.0);
    }

    #[test]
    fn columns_skip_header_and_comments() {
        let p = Path::new("x.csv");
        let rows = read_columns("x,N\n# note\n0, 1\n0.5 2\n", p).unwrap();
        assert_eq!(rows, vec![(0.0, 1.0), (0.5, 2.0)]);
        assert!(read_columns("0,1\nfoo,2\n", p).is_err());
    }
}
