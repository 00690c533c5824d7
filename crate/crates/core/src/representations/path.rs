//! Line integration of a velocity field along axis-ordered staircase paths.

use std::collections::{HashSet, VecDeque};

use crate::grid::stencil::cumulative_integral;
use crate::grid::{RealField, UniformGrid};

/// Run of masked points along `axis` through `p`, in lane order, with the
/// position of `p` inside it. A fully masked periodic lane starts at index 0.
pub(crate) fn segment_through(grid: &UniformGrid, mask: &[bool], p: usize, axis: usize) -> (Vec<usize>, usize) {
    let n = grid.shape()[axis];
    let stride = grid.strides()[axis];
    let idx = grid.multi_index(p)[axis];
    let base = p - idx * stride;
    let periodic = grid.periodic()[axis];
    let at = |i: usize| base + i * stride;

    let mut start = idx;
    let mut steps = 0;
    loop {
        let prev = if start > 0 {
            Some(start - 1)
        } else if periodic {
            Some(n - 1)
        } else {
            None
        };
        match prev {
            Some(j) if mask[at(j)] && steps + 1 < n => {
                start = j;
                steps += 1;
            }
            _ => break,
        }
    }
    if steps + 1 == n && periodic && mask[at((idx + 1) % n)] {
        // the whole ring is in the mask
        return ((0..n).map(at).collect(), idx);
    }
    let mut seg = Vec::new();
    let mut i = start;
    loop {
        seg.push(at(i));
        let next = if i + 1 < n {
            Some(i + 1)
        } else if periodic {
            Some(0)
        } else {
            None
        };
        match next {
            Some(j) if mask[at(j)] && seg.len() < n && j != start => i = j,
            _ => break,
        }
    }
    let pos = seg.iter().position(|&q| q == p).expect("segment contains its seed");
    (seg, pos)
}

/// `μ∫v·dl` from `anchor` to every reachable masked point, extending along
/// `order[0]`, then `order[1]`, …  Unreached points stay `None`.
pub(crate) fn staircase(
    v: &[RealField],
    mu: f64,
    mask: &[bool],
    anchor: usize,
    order: &[usize],
) -> Vec<Option<f64>> {
    let grid = v[0].grid();
    let mut phase: Vec<Option<f64>> = vec![None; grid.len()];
    phase[anchor] = Some(0.0);
    let mut assigned = vec![anchor];
    for &axis in order {
        let h = grid.spacing(axis);
        let mut seen = HashSet::new();
        let snapshot = assigned.clone();
        for q in snapshot {
            let (seg, pos) = segment_through(grid, mask, q, axis);
            if !seen.insert(seg[0]) {
                continue;
            }
            let lane: Vec<f64> = seg.iter().map(|&s| v[axis].values()[s]).collect();
            let mut cum = vec![0.0; lane.len()];
            cumulative_integral(&lane, h, pos, &mut cum);
            let base = phase[q].expect("assigned");
            for (k, &s) in seg.iter().enumerate() {
                if phase[s].is_none() {
                    phase[s] = Some(base + mu * cum[k]);
                    assigned.push(s);
                }
            }
        }
    }
    phase
}

/// Lowest point of the support run along axis 0 in 1D, or the density maximum
/// (lowest index on ties) in higher dimensions.
pub(crate) fn anchor_point(w: &RealField, mask: &[bool]) -> Option<usize> {
    let grid = w.grid();
    if grid.dim() == 1 {
        let first = mask.iter().position(|&m| m)?;
        let (seg, _) = segment_through(grid, mask, first, 0);
        return Some(seg[0]);
    }
    let mut best: Option<usize> = None;
    for (i, &m) in mask.iter().enumerate() {
        if m && best.is_none_or(|b| w.values()[i] > w.values()[b]) {
            best = Some(i);
        }
    }
    best
}

/// Relative phase `γ − γ(anchor)` over the masked region, plus the largest
/// disagreement between the forward and reversed staircase orders.
pub(crate) fn integrate_velocity(v: &[RealField], mu: f64, mask: &[bool], anchor: usize) -> (Vec<f64>, f64) {
    let grid = v[0].grid();
    let dim = grid.dim();
    let forward: Vec<usize> = (0..dim).collect();
    let mut phase = staircase(v, mu, mask, anchor, &forward);
    let mut mismatch: f64 = 0.0;
    if dim > 1 {
        let reverse: Vec<usize> = (0..dim).rev().collect();
        let other = staircase(v, mu, mask, anchor, &reverse);
        for (a, b) in phase.iter_mut().zip(&other) {
            match (*a, *b) {
                (Some(x), Some(y)) => mismatch = mismatch.max((x - y).abs()),
                (None, Some(y)) => *a = Some(y),
                _ => {}
            }
        }
        fill_by_neighbours(grid, v, mu, mask, &mut phase);
    }
    (phase.into_iter().map(|p| p.unwrap_or(0.0)).collect(), mismatch)
}

/// Trapezoid steps from already-assigned neighbours for points no staircase reached.
fn fill_by_neighbours(grid: &UniformGrid, v: &[RealField], mu: f64, mask: &[bool], phase: &mut [Option<f64>]) {
    let mut queue: VecDeque<usize> = (0..grid.len()).filter(|&i| phase[i].is_some()).collect();
    while let Some(p) = queue.pop_front() {
        let pi = grid.multi_index(p);
        for q in grid.neighbors(p) {
            if !mask[q] || phase[q].is_some() {
                continue;
            }
            let qi = grid.multi_index(q);
            let axis = (0..grid.dim()).find(|&a| pi[a] != qi[a]).expect("neighbour differs on one axis");
            let forward = qi[axis] == pi[axis] + 1 || (qi[axis] == 0 && pi[axis] == grid.shape()[axis] - 1);
            let sign = if forward { 1.0 } else { -1.0 };
            let step = 0.5 * grid.spacing(axis) * (v[axis].values()[p] + v[axis].values()[q]);
            phase[q] = Some(phase[p].expect("assigned") + sign * mu * step);
            queue.push_back(q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_respect_mask_and_wrap() {
        let g = UniformGrid::periodic_1d(10, 10.0).unwrap();
        let mask = [true, true, false, false, true, true, true, false, true, true];
        let (seg, pos) = segment_through(&g, &mask, 5, 0);
        assert_eq!(seg, vec![4, 5, 6]);
        assert_eq!(pos, 1);
        let (seg, pos) = segment_through(&g, &mask, 0, 0);
        assert_eq!(seg, vec![8, 9, 0, 1]);
        assert_eq!(pos, 2);
        let full = [true; 10];
        let (seg, pos) = segment_through(&g, &full, 3, 0);
        assert_eq!(seg.len(), 10);
        assert_eq!(pos, 3);
    }

    #[test]
    fn curl_free_field_paths_agree() {
        let g = UniformGrid::cube(2, 32, 4.0, false).unwrap();
        // v = ∇(x²y + y)
        let vx = RealField::from_fn(&g, |p| 2.0 * p[0] * p[1]);
        let vy = RealField::from_fn(&g, |p| p[0] * p[0] + 1.0);
        let mask = vec![true; g.len()];
        let anchor = g.linear_index(&[16, 16]);
        let (phase, mismatch) = integrate_velocity(&[vx, vy], 1.0, &mask, anchor);
        assert!(mismatch < 1e-10, "mismatch {mismatch}");
        for (i, &ph) in phase.iter().enumerate() {
            let p = g.position(i);
            let exact = p[0] * p[0] * p[1] + p[1];
            assert!((ph - exact).abs() < 1e-10);
        }
    }
}
