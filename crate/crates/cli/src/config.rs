//! Flat `section.key = value` scenario files.
//!
//! ```text
//! # free packet
//! grid.n = 1024
//! grid.length = 40
//! particle.mu = 1
//! initial.kind = gaussian
//! initial.sigma = 1
//! evolve.scheme = split-step-spectral
//! evolve.dt = 1e-3
//! evolve.steps = 1000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fuzzmech_core::Scheme;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "grid.dim",
    "grid.n",
    "grid.length",
    "grid.periodic",
    "particle.mu",
    "potential.kind",
    "potential.omega",
    "potential.x1",
    "potential.x2",
    "potential.path",
    "initial.kind",
    "initial.x0",
    "initial.sigma",
    "initial.p0",
    "initial.separation",
    "initial.c_d",
    "initial.charge",
    "initial.index",
    "initial.omega",
    "evolve.scheme",
    "evolve.dt",
    "evolve.steps",
    "evolve.record_every",
    "output.path",
    "output.formats",
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    column: usize,
}

/// Parsed but not yet interpreted key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let err = |column: usize, message: String| CliError::Config { line, column, message };
            let eq = content.find('=').ok_or_else(|| err(content.trim_end().len() + 1, "expected 'section.key = value'".into()))?;
            let key = content[..eq].trim();
            if !key.contains('.') {
                return Err(err(indent + 1, format!("key '{key}' must be written as section.key")));
            }
            if !KEYS.contains(&key) {
                return Err(err(indent + 1, format!("unknown key '{key}'")));
            }
            let value = content[eq + 1..].trim();
            if value.is_empty() {
                return Err(err(eq + 2, format!("no value for '{key}'")));
            }
            let column = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
            let entry = Entry { value: value.to_string(), line, column };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(err(indent + 1, format!("'{key}' already set on line {}", prev.line)));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn parse_value<T: FromStr>(&self, key: &'static str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|e| {
                e.value.parse::<T>().map_err(|err| CliError::Config {
                    line: e.line,
                    column: e.column,
                    message: format!("{key}: cannot read '{}': {err}", e.value),
                })
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &'static str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parse_value(key)?.ok_or(CliError::MissingKey(key))
    }

    fn list<T: FromStr>(&self, key: &'static str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<T>().map_err(|err| CliError::Config {
                            line: e.line,
                            column: e.column,
                            message: format!("{key}: cannot read '{}': {err}", t.trim()),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn bad(&self, key: &'static str, message: String) -> CliError {
        match self.get(key) {
            Some(e) => CliError::Config { line: e.line, column: e.column, message: format!("{key}: {message}") },
            None => CliError::MissingKey(key),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub n: Vec<usize>,
    pub length: Vec<f64>,
    pub periodic: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    Harmonic { omega: f64 },
    /// Infinite walls outside `[x1, x2]` on every axis.
    Box { x1: f64, x2: f64 },
    /// Two-column `x U` samples, linearly interpolated along axis 0.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Gaussian { x0: Vec<f64>, sigma: f64, p0: Vec<f64> },
    TwoGaussian { separation: f64, sigma: f64, c_d: f64 },
    Vortex { charge: i32 },
    /// Oscillator eigenfunction; several indices in 1D give their equal-weight superposition.
    Eigenstate { index: Vec<usize>, omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSection {
    pub scheme: Scheme,
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Checkpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub grid: GridSection,
    pub mu: f64,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub evolve: EvolveSection,
    pub output_path: PathBuf,
    pub formats: Vec<OutputFormat>,
}

fn positive(raw: &RawConfig, key: &'static str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(raw.bad(key, format!("must be positive, got {v}")))
    }
}

fn per_axis<T: Clone>(raw: &RawConfig, key: &'static str, v: Vec<T>, dim: usize) -> CliResult<Vec<T>> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); dim]),
        k if k == dim => Ok(v),
        k => Err(raw.bad(key, format!("{k} values for a {dim}-dimensional grid"))),
    }
}

impl ScenarioConfig {
    /// `base` resolves relative paths (normally the config file's directory).
    pub fn from_raw(raw: &RawConfig, base: &Path) -> CliResult<Self> {
        let dim: usize = raw.parse_value("grid.dim")?.unwrap_or(1);
        if !(1..=3).contains(&dim) {
            return Err(raw.bad("grid.dim", format!("dimension {dim} not in 1..=3")));
        }
        let n = per_axis(raw, "grid.n", raw.list("grid.n")?.ok_or(CliError::MissingKey("grid.n"))?, dim)?;
        let length = per_axis(raw, "grid.length", raw.list("grid.length")?.ok_or(CliError::MissingKey("grid.length"))?, dim)?;
        for &l in &length {
            positive(raw, "grid.length", l)?;
        }
        let periodic = per_axis(raw, "grid.periodic", raw.list("grid.periodic")?.unwrap_or(vec![true]), dim)?;
        let mu = positive(raw, "particle.mu", raw.required("particle.mu")?)?;

        let kind: String = raw.parse_value("potential.kind")?.unwrap_or_else(|| "free".into());
        let potential = match kind.as_str() {
            "free" => PotentialSpec::Free,
            "harmonic" => PotentialSpec::Harmonic { omega: positive(raw, "potential.omega", raw.required("potential.omega")?)? },
            "box" => {
                let (x1, x2): (f64, f64) = (raw.required("potential.x1")?, raw.required("potential.x2")?);
                if !(x1 < x2) {
                    return Err(raw.bad("potential.x2", format!("box needs x1 < x2, got [{x1}, {x2}]")));
                }
                PotentialSpec::Box { x1, x2 }
            }
            "file" => {
                let p: String = raw.required("potential.path")?;
                let path = base.join(p);
                if !path.is_file() {
                    return Err(raw.bad("potential.path", format!("no such file {}", path.display())));
                }
                PotentialSpec::File { path }
            }
            other => return Err(raw.bad("potential.kind", format!("unknown potential '{other}'"))),
        };

        let kind: String = raw.required("initial.kind")?;
        let sigma = |raw: &RawConfig| -> CliResult<f64> { positive(raw, "initial.sigma", raw.parse_value("initial.sigma")?.unwrap_or(1.0)) };
        let initial = match kind.as_str() {
            "gaussian" => InitialSpec::Gaussian {
                x0: per_axis(raw, "initial.x0", raw.list("initial.x0")?.unwrap_or(vec![0.0]), dim)?,
                sigma: sigma(raw)?,
                p0: per_axis(raw, "initial.p0", raw.list("initial.p0")?.unwrap_or(vec![0.0]), dim)?,
            },
            "two-gaussian" => InitialSpec::TwoGaussian {
                separation: positive(raw, "initial.separation", raw.required("initial.separation")?)?,
                sigma: sigma(raw)?,
                c_d: raw.parse_value("initial.c_d")?.unwrap_or(0.0),
            },
            "vortex" => {
                if dim < 2 {
                    return Err(raw.bad("initial.kind", "a vortex needs grid.dim of at least 2".into()));
                }
                InitialSpec::Vortex { charge: raw.required("initial.charge")? }
            }
            "eigenstate" => {
                let index: Vec<usize> = raw.list("initial.index")?.unwrap_or(vec![0]);
                if dim > 1 && index.len() != dim {
                    return Err(raw.bad("initial.index", format!("one quantum number per axis ({dim})")));
                }
                let omega = match (&potential, raw.parse_value::<f64>("initial.omega")?) {
                    (_, Some(w)) => positive(raw, "initial.omega", w)?,
                    (PotentialSpec::Harmonic { omega }, None) => *omega,
                    _ => 1.0,
                };
                InitialSpec::Eigenstate { index, omega }
            }
            other => return Err(raw.bad("initial.kind", format!("unknown initial state '{other}'"))),
        };

        let scheme: String = raw.required("evolve.scheme")?;
        let scheme = Scheme::from_str(&scheme).map_err(|e| raw.bad("evolve.scheme", e.to_string()))?;
        let dt = positive(raw, "evolve.dt", raw.required("evolve.dt")?)?;
        let steps: usize = raw.required("evolve.steps")?;
        if steps == 0 {
            return Err(raw.bad("evolve.steps", "at least one step required".into()));
        }
        let record_every: usize = raw.parse_value("evolve.record_every")?.unwrap_or(steps);
        if record_every == 0 {
            return Err(raw.bad("evolve.record_every", "must be at least 1".into()));
        }
        let nonperiodic = periodic.iter().any(|p| !p) || matches!(potential, PotentialSpec::Box { .. });
        if scheme == Scheme::SplitStep && nonperiodic {
            return Err(CliError::SchemeIncompatible(format!(
                "{} needs a periodic grid without walls; use crank-nicolson",
                scheme.name()
            )));
        }

        let output_path = base.join(raw.parse_value::<String>("output.path")?.unwrap_or_else(|| ".".into()));
        let formats = raw
            .list::<String>("output.formats")?
            .unwrap_or(vec!["csv".into()])
            .into_iter()
            .map(|f| match f.as_str() {
                "csv" => Ok(OutputFormat::Csv),
                "checkpoint" => Ok(OutputFormat::Checkpoint),
                other => Err(raw.bad("output.formats", format!("unknown format '{other}'"))),
            })
            .collect::<CliResult<Vec<_>>>()?;

        Ok(Self {
            grid: GridSection { n, length, periodic },
            mu,
            potential,
            initial,
            evolve: EvolveSection { scheme, dt, steps, record_every },
            output_path,
            formats,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_raw(&RawConfig::parse(&text)?, base)
    }

    /// Every setting, defaults included, as `section.key = value` lines.
    pub fn resolved_lines(&self) -> Vec<String> {
        let join = |v: &[String]| v.join(",");
        let fmt_f = |v: &[f64]| join(&v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>());
        let mut out = vec![
            format!("grid.dim = {}", self.grid.n.len()),
            format!("grid.n = {}", join(&self.grid.n.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
            format!("grid.length = {}", fmt_f(&self.grid.length)),
            format!("grid.periodic = {}", join(&self.grid.periodic.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
            format!("particle.mu = {:?}", self.mu),
        ];
        match &self.potential {
            PotentialSpec::Free => out.push("potential.kind = free".into()),
            PotentialSpec::Harmonic { omega } => {
                out.push("potential.kind = harmonic".into());
                out.push(format!("potential.omega = {omega:?}"));
            }
            PotentialSpec::Box { x1, x2 } => {
                out.push("potential.kind = box".into());
                out.push(format!("potential.x1 = {x1:?}"));
                out.push(format!("potential.x2 = {x2:?}"));
            }
            PotentialSpec::File { path } => {
                out.push("potential.kind = file".into());
                out.push(format!("potential.path = {}", path.display()));
            }
        }
        match &self.initial {
            InitialSpec::Gaussian { x0, sigma, p0 } => {
                out.push("initial.kind = gaussian".into());
                out.push(format!("initial.x0 = {}", fmt_f(x0)));
                out.push(format!("initial.sigma = {sigma:?}"));
                out.push(format!("initial.p0 = {}", fmt_f(p0)));
            }
            InitialSpec::TwoGaussian { separation, sigma, c_d } => {
                out.push("initial.kind = two-gaussian".into());
                out.push(format!("initial.separation = {separation:?}"));
                out.push(format!("initial.sigma = {sigma:?}"));
                out.push(format!("initial.c_d = {c_d:?}"));
            }
            InitialSpec::Vortex { charge } => {
                out.push("initial.kind = vortex".into());
                out.push(format!("initial.charge = {charge}"));
            }
            InitialSpec::Eigenstate { index, omega } => {
                out.push("initial.kind = eigenstate".into());
                out.push(format!("initial.index = {}", join(&index.iter().map(|x| x.to_string()).collect::<Vec<_>>())));
                out.push(format!("initial.omega = {omega:?}"));
            }
        }
        out.push(format!("evolve.scheme = {}", self.evolve.scheme));
        out.push(format!("evolve.dt = {:?}", self.evolve.dt));
        out.push(format!("evolve.steps = {}", self.evolve.steps));
        out.push(format!("evolve.record_every = {}", self.evolve.record_every));
        out.push(format!("output.path = {}", self.output_path.display()));
        let formats: Vec<String> = self
            .formats
            .iter()
            .map(|f| match f {
                OutputFormat::Csv => "csv".to_string(),
                OutputFormat::Checkpoint => "checkpoint".to_string(),
            })
            .collect();
        out.push(format!("output.formats = {}", join(&formats)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = "grid.n = 256\ngrid.length = 40\nparticle.mu = 1\ninitial.kind = gaussian\n\
                        evolve.scheme = split-step-spectral\nevolve.dt = 0.01\nevolve.steps = 10\n";

    fn load(text: &str) -> CliResult<ScenarioConfig> {
        ScenarioConfig::from_raw(&RawConfig::parse(text)?, Path::new("/tmp"))
    }

    #[test]
    fn defaults_fill_in() {
        let c = load(FREE).unwrap();
        assert_eq!(c.grid.periodic, vec![true]);
        assert_eq!(c.potential, PotentialSpec::Free);
        assert_eq!(c.evolve.record_every, 10);
        assert_eq!(c.formats, vec![OutputFormat::Csv]);
        // the resolved listing parses back to the same scenario
        let again = load(&c.resolved_lines().join("\n")).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_mass_is_named() {
        let e = load(&FREE.replace("particle.mu = 1\n", "")).unwrap_err();
        assert!(e.to_string().contains("particle.mu"));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        match RawConfig::parse("grid.n = 8\n  bogus line\n").unwrap_err() {
            CliError::Config { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        match load(&FREE.replace("evolve.dt = 0.01", "evolve.dt = fast")).unwrap_err() {
            CliError::Config { line, column, .. } => assert_eq!((line, column), (6, 13)),
            e => panic!("{e}"),
        }
        assert!(matches!(RawConfig::parse("grid.nn = 3"), Err(CliError::Config { column: 1, .. })));
        assert!(matches!(RawConfig::parse("grid.n = 3\ngrid.n = 4"), Err(CliError::Config { line: 2, .. })));
    }

    #[test]
    fn walls_rule_out_split_step() {
        let text = format!("{FREE}potential.kind = box\npotential.x1 = -5\npotential.x2 = 5\n");
        let e = load(&text).unwrap_err();
        assert!(e.to_string().starts_with("scheme incompatible with non-periodic boundary"));
        assert_eq!(e.exit_code(), 2);
        assert!(load(&text.replace("split-step-spectral", "crank-nicolson")).is_ok());
        assert!(load(&FREE.replace("grid.n = 256", "grid.n = 256\ngrid.periodic = false")).is_err());
    }
}
