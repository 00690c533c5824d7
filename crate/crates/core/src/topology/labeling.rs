use std::collections::VecDeque;

use crate::grid::RealField;
use crate::representations::support_floor;

/// Connected components of the support `w > w_floor`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportLabeling {
    /// Component id per grid point, 1-based; 0 marks points below the floor.
    pub ids: Vec<u32>,
    pub count: usize,
    /// `∫ w` over each component, indexed by `id - 1`.
    pub masses: Vec<f64>,
    pub floor: f64,
}

impl SupportLabeling {
    pub fn in_support(&self, linear: usize) -> bool {
        self.ids[linear] != 0
    }

    /// Linear indices of component `id` (1-based), ascending.
    pub fn members(&self, id: u32) -> Vec<usize> {
        self.ids.iter().enumerate().filter(|(_, &c)| c == id).map(|(i, _)| i).collect()
    }

    pub fn support_mask(&self) -> Vec<bool> {
        self.ids.iter().map(|&c| c != 0).collect()
    }
}

/// Flood-fill labelling with face adjacency (periodic axes wrap). Labels are
/// assigned in order of each component's lowest linear index.
pub fn label_components(w: &RealField) -> SupportLabeling {
    let floor = support_floor(w);
    let mask: Vec<bool> = w.values().iter().map(|&v| v > floor).collect();
    label_mask(w, &mask, floor)
}

/// Labelling with a hysteresis band: a point already in `previous`'s support
/// stays in while `w > floor/10`, which keeps labels from flickering during
/// evolution.
pub fn label_components_tracked(w: &RealField, previous: &SupportLabeling) -> SupportLabeling {
    let floor = support_floor(w);
    let mask: Vec<bool> = w
        .values()
        .iter()
        .zip(&previous.ids)
        .map(|(&v, &id)| v > floor || (id != 0 && v > 0.1 * floor))
        .collect();
    label_mask(w, &mask, floor)
}

pub(crate) fn label_mask(w: &RealField, mask: &[bool], floor: f64) -> SupportLabeling {
    let grid = w.grid();
    let mut ids = vec![0u32; grid.len()];
    let mut masses = Vec::new();
    let mut queue = VecDeque::new();
    let dv = grid.cell_volume();
    for seed in 0..grid.len() {
        if !mask[seed] || ids[seed] != 0 {
            continue;
        }
        let id = masses.len() as u32 + 1;
        let mut mass = 0.0;
        ids[seed] = id;
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            mass += w.values()[p];
            for q in grid.neighbors(p) {
                if mask[q] && ids[q] == 0 {
                    ids[q] = id;
                    queue.push_back(q);
                }
            }
        }
        masses.push(mass * dv);
    }
    SupportLabeling { ids, count: masses.len(), masses, floor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use std::f64::consts::PI;

    fn gauss(x: f64, c: f64) -> f64 {
        (-(x - c).powi(2) / 2.0).exp() / (2.0 * PI).sqrt()
    }

    #[test]
    fn single_double_and_empty() {
        let g = UniformGrid::periodic_1d(1024, 80.0).unwrap();
        let one = RealField::from_fn(&g, |x| gauss(x[0], 0.0));
        assert_eq!(label_components(&one).count, 1);

        let two = RealField::from_fn(&g, |x| 0.5 * gauss(x[0], -10.0) + 0.5 * gauss(x[0], 10.0));
        let lab = label_components(&two);
        assert_eq!(lab.count, 2);
        for m in &lab.masses {
            assert!((m - 0.5).abs() < 1e-8, "mass {m}");
        }
        assert!((lab.masses.iter().sum::<f64>() - two.integrate()).abs() < 1e-8);

        assert_eq!(label_components(&RealField::zeros(&g)).count, 0);
    }

    #[test]
    fn periodic_wrap_joins_edges() {
        let g = UniformGrid::periodic_1d(16, 16.0).unwrap();
        let mut w = RealField::zeros(&g);
        w.values_mut()[0] = 1.0;
        w.values_mut()[15] = 1.0;
        assert_eq!(label_components(&w).count, 1);
        let open = UniformGrid::open_1d(16, 16.0).unwrap();
        let w2 = RealField::new(open, w.values().to_vec()).unwrap();
        assert_eq!(label_components(&w2).count, 2);
    }

    #[test]
    fn hysteresis_keeps_fading_points() {
        let g = UniformGrid::open_1d(16, 16.0).unwrap();
        let mut w = RealField::constant(&g, 1.0);
        let prev = label_components(&w);
        w.values_mut()[8] = 5e-15;
        assert_eq!(label_components(&w).count, 2);
        assert_eq!(label_components_tracked(&w, &prev).count, 1);
    }
}
