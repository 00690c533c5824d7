//! Shared fixtures for the benchmarks.

use fuzzmech_core::states::{gaussian, vortex};
use fuzzmech_core::{Hamiltonian, RealField, UniformGrid, WaveState};

/// Unit-width packet at rest on a periodic line of length 40.
pub fn free_packet(n: usize) -> (WaveState, Hamiltonian) {
    let g = UniformGrid::periodic_1d(n, 40.0).expect("grid");
    let s = gaussian(&g, &[0.0], 1.0, &[0.5], 1.0).expect("packet");
    (s, Hamiltonian::free(&g, 1.0).expect("hamiltonian"))
}

pub fn harmonic_packet(n: usize) -> (WaveState, Hamiltonian) {
    let g = UniformGrid::periodic_1d(n, 24.0).expect("grid");
    let s = gaussian(&g, &[1.0], 0.8, &[0.0], 1.0).expect("packet");
    (s, Hamiltonian::harmonic(&g, 1.0, 1.0).expect("hamiltonian"))
}

pub fn charged_vortex(n: usize, charge: i32) -> WaveState {
    let g = UniformGrid::cube(2, n, 10.0, true).expect("grid");
    vortex(&g, charge, 1.0).expect("vortex")
}

/// N(x) = x on an open line, the simplest field the constancy scan falsifies.
pub fn ramp(n: usize) -> RealField {
    let g = UniformGrid::cube(1, n, 12.0, false).expect("grid");
    RealField::from_fn(&g, |x| x[0])
}
