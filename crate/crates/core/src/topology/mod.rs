//! Support structure of a state: connected components, closed-loop phase
//! circulation and its integer quantization, and the per-component phase
//! construction that disjoint or vortex-carrying supports require.

mod construct;
mod labeling;
mod loops;
mod wallstrom;
mod winding;

pub use construct::{detect_vortices, phase_from_velocity_multicomponent, phase_from_velocity_winding_aware};
pub use labeling::{label_components, label_components_tracked, SupportLabeling};
pub use loops::GridLoop;
pub use wallstrom::{wallstrom_demo, WallstromReport, WallstromSetup};
pub use winding::{winding_number, WindingResult, WINDING_RESIDUAL_MAX};

/// A straight nodal line crossing the (axis 0, axis 1) plane at `center`,
/// carrying phase `charge·atan2(y − y_c, x − x_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vortex {
    pub center: [f64; 2],
    pub charge: i32,
}

impl Vortex {
    pub fn phase_at(&self, x: &[f64]) -> f64 {
        self.charge as f64 * (x[1] - self.center[1]).atan2(x[0] - self.center[0])
    }

    pub fn phase_gradient_at(&self, x: &[f64]) -> Vec<f64> {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let r2 = dx * dx + dy * dy;
        let mut g = vec![0.0; x.len()];
        if r2 > 0.0 {
            let n = self.charge as f64;
            g[0] = -n * dy / r2;
            g[1] = n * dx / r2;
        }
        g
    }
}
