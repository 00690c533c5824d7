//! Scenario runner, checkpoints and demonstrations behind the `fuzzmech` binary.

pub mod checkpoint;
pub mod config;
pub mod demos;
pub mod error;
pub mod scenario;

pub use error::{CliError, CliResult};

/// Caps the global rayon pool at `FUZZMECH_THREADS` workers when set.
pub fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FUZZMECH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("FUZZMECH_THREADS must be a positive integer, got '{raw}'")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
