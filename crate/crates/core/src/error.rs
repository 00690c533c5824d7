use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("operation requires a periodic grid: {0}")]
    NonPeriodic(&'static str),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("confinement interval ({l}, {n}) has no interior element")]
    EmptyInterior { l: usize, n: usize },
    #[error("point {0} lies outside the grid domain")]
    OutsideDomain(f64),
    #[error("support has {components} disjoint components; use the per-component construction")]
    DisjointSupport { components: usize },
    #[error("velocity field carries circulation (path mismatch {mismatch:.3e} rad); use the winding-aware construction")]
    NodalCirculation { mismatch: f64 },
    #[error("{points} grid points exceed the dense-matrix limit of {limit}")]
    ResourceBound { points: usize, limit: usize },
    #[error("stability bound violated: {0}")]
    StabilityBound(String),
    #[error("unsupported hamiltonian: {0}")]
    UnsupportedHamiltonian(String),
    #[error("scheme incompatible with non-periodic boundary: {0}")]
    SchemeIncompatible(String),
    #[error("density dipped below the support floor at t = {t}: flow velocity undefined")]
    NodeFormed { t: f64 },
    #[error("norm drifted by {drift:.3e} at t = {t}")]
    NormDrift { t: f64, drift: f64 },
    #[error("evolution produced non-finite values at t = {t}")]
    NonFinite { t: f64 },
    #[error("loop point {index} lies on a nodal point")]
    LoopTouchesNode { index: usize },
    #[error("winding residual {residual:.3e} rad exceeds the quantization bound; vortex under-resolved")]
    UnderResolvedWinding { residual: f64 },
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("invalid bump placement: {0}")]
    InvalidPlacement(String),
    #[error("components already overlap at the initial time")]
    ComponentsMerged,
    #[error("expected {expected} phase constants, got {got}")]
    ConstantsMismatch { expected: usize, got: usize },
    #[error("linear solver did not converge: {0}")]
    SolverDiverged(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rational weight arithmetic overflowed")]
    Overflow,
}
