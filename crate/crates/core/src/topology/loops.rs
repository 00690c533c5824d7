use crate::error::{Error, Result};
use crate::grid::UniformGrid;

/// Closed cycle of grid points joined by single axis steps. The step from the
/// last point back to the first closes the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLoop {
    points: Vec<usize>,
}

impl GridLoop {
    /// Validates closure, unit axis steps and absence of self-intersection.
    pub fn new(grid: &UniformGrid, points: Vec<usize>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InvalidLoop(format!("{} points cannot enclose anything", points.len())));
        }
        let mut seen = std::collections::HashSet::new();
        for &p in &points {
            if p >= grid.len() {
                return Err(Error::InvalidLoop(format!("index {p} outside the grid")));
            }
            if !seen.insert(p) {
                return Err(Error::InvalidLoop(format!("point {p} visited twice")));
            }
        }
        for k in 0..points.len() {
            let (a, b) = (points[k], points[(k + 1) % points.len()]);
            if step_axis(grid, a, b).is_none() {
                return Err(Error::InvalidLoop(format!("points {a} and {b} are not axis neighbours")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Rasterised closed polygon through `vertices` (physical coordinates in
    /// the axis-0/axis-1 plane). Other axes are held at `plane` indices.
    pub fn polygon(grid: &UniformGrid, vertices: &[[f64; 2]], plane: &[usize]) -> Result<Self> {
        if grid.dim() < 2 {
            return Err(Error::InvalidLoop("loops need at least two dimensions".into()));
        }
        if plane.len() != grid.dim() - 2 {
            return Err(Error::InvalidLoop("plane must fix every axis beyond the first two".into()));
        }
        let h = grid.min_spacing();
        let mut cells: Vec<[usize; 2]> = Vec::new();
        let nv = vertices.len();
        for k in 0..nv {
            let (a, b) = (vertices[k], vertices[(k + 1) % nv]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let steps = ((len / h) * 8.0).ceil().max(1.0) as usize;
            for s in 0..steps {
                let t = s as f64 / steps as f64;
                let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let mut full = vec![p[0], p[1]];
                full.extend(plane.iter().enumerate().map(|(i, &j)| grid.coordinate(i + 2, j)));
                let idx = grid.nearest_index(&full)?;
                let cell = [idx[0], idx[1]];
                match cells.last() {
                    Some(&last) if last == cell => {}
                    Some(&last) => {
                        if last[0] != cell[0] && last[1] != cell[1] {
                            cells.push([cell[0], last[1]]);
                        }
                        cells.push(cell);
                    }
                    None => cells.push(cell),
                }
            }
        }
        // close the path
        if let (Some(&first), Some(&last)) = (cells.first(), cells.last()) {
            if last == first {
                cells.pop();
            } else if last[0] != first[0] && last[1] != first[1] {
                cells.push([first[0], last[1]]);
            }
        }
        remove_spikes(&mut cells);
        let points = cells
            .iter()
            .map(|c| {
                let mut idx = vec![c[0], c[1]];
                idx.extend_from_slice(plane);
                grid.linear_index(&idx)
            })
            .collect();
        Self::new(grid, points)
    }

    /// Axis-aligned rectangle with corners `lo`, `hi`.
    pub fn rectangle(grid: &UniformGrid, lo: [f64; 2], hi: [f64; 2], plane: &[usize]) -> Result<Self> {
        Self::polygon(grid, &[lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]], plane)
    }

    /// Rasterised circle.
    pub fn circle(grid: &UniformGrid, center: [f64; 2], radius: f64, plane: &[usize]) -> Result<Self> {
        let m = ((2.0 * std::f64::consts::PI * radius / grid.min_spacing()) * 2.0).ceil().max(16.0) as usize;
        let vertices: Vec<[f64; 2]> = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        Self::polygon(grid, &vertices, plane)
    }

    /// Square rotated by 45°, vertices at distance `radius` from `center`.
    pub fn diamond(grid: &UniformGrid, center: [f64; 2], radius: f64, plane: &[usize]) -> Result<Self> {
        let [cx, cy] = center;
        Self::polygon(grid, &[[cx + radius, cy], [cx, cy + radius], [cx - radius, cy], [cx, cy - radius]], plane)
    }
}

/// Axis and direction (+1/−1) of a single step `a → b`, if it is one.
pub(crate) fn step_axis(grid: &UniformGrid, a: usize, b: usize) -> Option<(usize, f64)> {
    let ia = grid.multi_index(a);
    let ib = grid.multi_index(b);
    let diff: Vec<usize> = (0..grid.dim()).filter(|&k| ia[k] != ib[k]).collect();
    if diff.len() != 1 {
        return None;
    }
    let axis = diff[0];
    let n = grid.shape()[axis];
    if ib[axis] == ia[axis] + 1 || (grid.periodic()[axis] && ia[axis] == n - 1 && ib[axis] == 0) {
        Some((axis, 1.0))
    } else if ia[axis] == ib[axis] + 1 || (grid.periodic()[axis] && ib[axis] == n - 1 && ia[axis] == 0) {
        Some((axis, -1.0))
    } else {
        None
    }
}

/// Drops back-and-forth excursions `A → B → A` left by corner insertion.
fn remove_spikes(cells: &mut Vec<[usize; 2]>) {
    loop {
        let n = cells.len();
        if n < 3 {
            return;
        }
        let spike = (0..n).find(|&k| cells[(k + n - 1) % n] == cells[(k + 1) % n]);
        match spike {
            Some(k) => {
                // remove the tip and one copy of the repeated point
                let next = (k + 1) % n;
                let (first, second) = if k < next { (next, k) } else { (k, next) };
                cells.remove(first);
                cells.remove(second);
            }
            None => return,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_valid_loops() {
        let g = UniformGrid::cube(2, 64, 8.0, true).unwrap();
        for l in [
            GridLoop::rectangle(&g, [-1.0, -1.0], [1.0, 1.5], &[]).unwrap(),
            GridLoop::circle(&g, [0.0, 0.0], 1.7, &[]).unwrap(),
            GridLoop::diamond(&g, [0.2, -0.1], 2.0, &[]).unwrap(),
        ] {
            assert!(l.points().len() > 8);
        }
    }

    #[test]
    fn rejects_broken_loops() {
        let g = UniformGrid::cube(2, 16, 4.0, false).unwrap();
        let a = g.linear_index(&[2, 2]);
        let b = g.linear_index(&[2, 3]);
        let c = g.linear_index(&[3, 4]);
        let d = g.linear_index(&[3, 2]);
        assert!(GridLoop::new(&g, vec![a, b, c, d]).is_err());
        assert!(GridLoop::new(&g, vec![a, b, a, b]).is_err());
        let one_d = UniformGrid::open_1d(16, 1.0).unwrap();
        assert!(GridLoop::circle(&one_d, [0.0, 0.0], 0.2, &[]).is_err());
    }
}
