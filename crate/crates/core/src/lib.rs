//! Density/flow mechanics on fuzzy configuration spaces: grids, state
//! representations, evolution schemes, support topology and the variational
//! constancy oracle.

pub mod dynamics;
pub mod error;
pub mod fuzzy_core;
pub mod grid;
pub mod representations;
pub mod states;
pub mod topology;
pub mod variational;

pub use dynamics::{EvolutionConfig, Hamiltonian, Scheme};
pub use error::{Error, Result};
pub use grid::{ComplexField, MomentumField, RealField, UniformGrid};
pub use representations::{DensityMatrix, MomentumState, ObservationalState, PhaseState, WaveState};
