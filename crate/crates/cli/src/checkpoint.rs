//! `FZM1` binary snapshots.
//!
//! Header: magic `FZM1`, version `u16`, dim `u16`, per-axis counts `u32`,
//! per-axis lengths `f64`, `μ`, `t`, flags `u32`. Flag bit 0 marks a phase
//! array, bit 1 velocity arrays, bit `2 + a` a non-periodic axis `a`.
//! Payload: `w`, then `γ`, then one `v` array per axis, all `f64`,
//! little-endian, row-major.

use std::path::Path;

use fuzzmech_core::{ComplexField, RealField, UniformGrid, WaveState};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"FZM1";
pub const VERSION: u16 = 1;

const HAS_GAMMA: u32 = 1;
const HAS_V: u32 = 2;
const OPEN_AXIS_SHIFT: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub grid: UniformGrid,
    pub mu: f64,
    pub t: f64,
    pub w: Vec<f64>,
    pub gamma: Option<Vec<f64>>,
    pub v: Option<Vec<Vec<f64>>>,
}

impl Checkpoint {
    /// `w = |η|²`, `γ = arg η`, and optionally `v = Im(η*∇η)/(μ|η|²)` (zero where `η = 0`).
    pub fn from_wave(s: &WaveState, t: f64, with_velocity: bool) -> CliResult<Self> {
        let grid = s.grid().clone();
        let eta = s.eta().values();
        let w = eta.iter().map(|e| e.norm_sqr()).collect();
        let gamma = Some(eta.iter().map(|e| e.arg()).collect());
        let v = if with_velocity {
            let v = (0..grid.dim())
                .map(|a| {
                    let d = s.eta().gradient(a)?;
                    Ok(eta
                        .iter()
                        .zip(d.values())
                        .map(|(e, de)| {
                            let m = e.norm_sqr();
                            if m > 0.0 {
                                (e.conj() * de).im / (s.mu() * m)
                            } else {
                                0.0
                            }
                        })
                        .collect())
                })
                .collect::<fuzzmech_core::Result<Vec<Vec<f64>>>>()?;
            Some(v)
        } else {
            None
        };
        Ok(Self { grid, mu: s.mu(), t, w, gamma, v })
    }

    /// `η = √w·e^{iγ}`; needs the phase array.
    pub fn to_wave(&self) -> CliResult<WaveState> {
        let gamma = self.gamma.as_ref().ok_or_else(|| CliError::Checkpoint("no phase array stored".into()))?;
        let eta = self.w.iter().zip(gamma).map(|(&w, &g)| Complex64::from_polar(w.max(0.0).sqrt(), g)).collect();
        Ok(WaveState::from_evolved(ComplexField::new(self.grid.clone(), eta)?, self.mu))
    }

    pub fn density(&self) -> CliResult<RealField> {
        Ok(RealField::new(self.grid.clone(), self.w.clone())?)
    }

    fn flags(&self) -> u32 {
        let mut f = 0;
        if self.gamma.is_some() {
            f |= HAS_GAMMA;
        }
        if self.v.is_some() {
            f |= HAS_V;
        }
        for (a, &p) in self.grid.periodic().iter().enumerate() {
            if !p {
                f |= 1 << (OPEN_AXIS_SHIFT + a as u32);
            }
        }
        f
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let dim = self.grid.dim();
        let arrays = 1 + self.gamma.is_some() as usize + if self.v.is_some() { dim } else { 0 };
        let mut out = Vec::with_capacity(32 + 12 * dim + 8 * arrays * self.w.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(dim as u16).to_le_bytes());
        for &n in self.grid.shape() {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        for &l in self.grid.lengths() {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.extend_from_slice(&self.mu.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.flags().to_le_bytes());
        let mut put = |xs: &[f64]| xs.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
        put(&self.w);
        if let Some(g) = &self.gamma {
            put(g);
        }
        for v in self.v.iter().flatten() {
            put(v);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(CliError::Checkpoint("bad magic, not an FZM1 file".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(CliError::Checkpoint(format!("unsupported version {version}")));
        }
        let dim = r.u16()? as usize;
        if !(1..=3).contains(&dim) {
            return Err(CliError::Checkpoint(format!("dimension {dim} not in 1..=3")));
        }
        let counts = (0..dim).map(|_| r.u32().map(|n| n as usize)).collect::<CliResult<Vec<_>>>()?;
        let lengths = (0..dim).map(|_| r.f64()).collect::<CliResult<Vec<_>>>()?;
        let mu = r.f64()?;
        let t = r.f64()?;
        let flags = r.u32()?;
        if flags >> (OPEN_AXIS_SHIFT + dim as u32) != 0 {
            return Err(CliError::Checkpoint(format!("unknown flag bits in {flags:#x}")));
        }
        let periodic = (0..dim).map(|a| flags & (1 << (OPEN_AXIS_SHIFT + a as u32)) == 0).collect();
        let grid = UniformGrid::new(counts, lengths, periodic).map_err(|e| CliError::Checkpoint(e.to_string()))?;
        let n = grid.len();
        let arrays = 1 + (flags & HAS_GAMMA != 0) as usize + if flags & HAS_V != 0 { dim } else { 0 };
        let expected = n.checked_mul(8 * arrays).ok_or_else(|| CliError::Checkpoint("payload size overflows".into()))?;
        let remaining = bytes.len() - r.pos;
        if remaining != expected {
            return Err(CliError::Checkpoint(format!("payload holds {remaining} bytes, header implies {expected}")));
        }
        let w = r.array(n)?;
        let gamma = if flags & HAS_GAMMA != 0 { Some(r.array(n)?) } else { None };
        let v = if flags & HAS_V != 0 { Some((0..dim).map(|_| r.array(n)).collect::<CliResult<Vec<_>>>()?) } else { None };
        Ok(Self { grid, mu, t, w, gamma, v })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_bytes()).map_err(CliError::io(path))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Self::from_bytes(&std::fs::read(path).map_err(CliError::io(path))?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> CliResult<&'a [u8]> {
        let end = self.pos + k;
        let s = self.bytes.get(self.pos..end).ok_or_else(|| CliError::Checkpoint("truncated header".into()))?;
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> CliResult<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> CliResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> CliResult<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn array(&mut self, n: usize) -> CliResult<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let grid = UniformGrid::new(vec![8, 10], vec![2.0, 3.5], vec![true, false]).unwrap();
        let n = grid.len();
        Checkpoint {
            grid,
            mu: 1.5,
            t: 0.25,
            w: (0..n).map(|i| (i as f64).sin().abs()).collect(),
            gamma: Some((0..n).map(|i| -0.1 * i as f64).collect()),
            v: None,
        }
    }

    #[test]
    fn round_trip_keeps_open_axes() {
        let c = sample();
        let back = Checkpoint::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.grid.periodic(), &[true, false]);
    }

    #[test]
    fn size_mismatch_rejected() {
        let mut bytes = sample().to_bytes();
        bytes.pop();
        assert!(matches!(Checkpoint::from_bytes(&bytes), Err(CliError::Checkpoint(_))));
        bytes[0] = b'X';
        assert!(Checkpoint::from_bytes(&bytes).is_err());
    }
}
