//! Discrete fuzzy posets: ordered elements `b_i`, fuzzy elements `a_j`
//! confined between `b_l` and `b_n`, and their membership weights.

use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{CheckedAdd, Zero};

use crate::error::{Error, Result};
use crate::grid::{RealField, UniformGrid};
use crate::representations::NORM_TOL;

/// Membership weights `w_i` over the ordered elements `b_0, b_1, …`, summing to
/// one exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyPoint {
    weights: Vec<Rational64>,
}

fn exact_sum(weights: &[Rational64]) -> Result<Rational64> {
    weights.iter().try_fold(Rational64::zero(), |acc, w| acc.checked_add(w).ok_or(Error::Overflow))
}

impl FuzzyPoint {
    pub fn new(weights: Vec<Rational64>) -> Result<Self> {
        if weights.iter().any(|w| *w < Rational64::zero()) {
            return Err(Error::InvalidArgument("membership weights must be nonnegative".into()));
        }
        let sum = exact_sum(&weights)?;
        if sum != Rational64::from_integer(1) {
            return Err(Error::InvalidArgument(format!("membership weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Weight of `b_i` (zero beyond the stored range).
    pub fn weight(&self, i: usize) -> Rational64 {
        self.weights.get(i).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| *w.numer() as f64 / *w.denom() as f64).collect()
    }

    pub fn sum(&self) -> Rational64 {
        exact_sum(&self.weights).expect("checked at construction")
    }

    /// First and last element with nonzero weight.
    pub fn support(&self) -> (usize, usize) {
        let nz = |w: &Rational64| !w.is_zero();
        let first = self.weights.iter().position(nz).expect("weights sum to one");
        let last = self.weights.iter().rposition(nz).expect("weights sum to one");
        (first, last)
    }

    /// Number of ordered elements spanned by the support.
    pub fn tolerance_scale(&self) -> usize {
        let (a, b) = self.support();
        b - a + 1
    }

    /// All weight on a single element.
    pub fn is_ordered_point(&self) -> bool {
        self.tolerance_scale() == 1
    }
}

/// Uniform weights `1/(n−l−1)` on `b_{l+1}, …, b_{n−1}`.
pub fn confinement_weights(l: usize, n: usize) -> Result<FuzzyPoint> {
    if l + 2 > n {
        return Err(Error::EmptyInterior { l, n });
    }
    let width = (n - l - 1) as i64;
    let mut weights = vec![Rational64::zero(); n];
    for w in &mut weights[l + 1..n] {
        *w = Rational64::new(1, width);
    }
    FuzzyPoint::new(weights)
}

/// Ordered elements `b_0 … b_{K−1}` and fuzzy elements `a_j` with the relation
/// matrix `M` (`M[j][i]` set iff `a_j ∼ b_i`) and the two order relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyPoset {
    ordered: usize,
    incomparable: Vec<Vec<bool>>,
    /// `below[j][i]`: `b_i ≤ a_j`.
    below: Vec<Vec<bool>>,
    /// `above[j][i]`: `a_j ≤ b_i`.
    above: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Row `j` of `M` is not a single contiguous block.
    Contiguity { row: usize },
    /// `a_j` and `b_i` are both ordered and incomparable, or neither.
    Exclusivity { row: usize, col: usize },
    /// The order relation with `b_i` contradicts the total order of the `b`s.
    Transitivity { row: usize, col: usize },
}

impl FuzzyPoset {
    pub fn new(ordered: usize, incomparable: Vec<Vec<bool>>, below: Vec<Vec<bool>>, above: Vec<Vec<bool>>) -> Result<Self> {
        let rows = incomparable.len();
        let shaped = |m: &Vec<Vec<bool>>| m.len() == rows && m.iter().all(|r| r.len() == ordered);
        if !(shaped(&incomparable) && shaped(&below) && shaped(&above)) {
            return Err(Error::InvalidArgument("relation matrices must be (fuzzy × ordered)".into()));
        }
        Ok(Self { ordered, incomparable, below, above })
    }

    /// Each `a_j` incomparable with `b_{l+1} … b_{n−1}`, above `b_0 … b_l` and
    /// below `b_n …`.
    pub fn from_intervals(ordered: usize, intervals: &[(usize, usize)]) -> Result<Self> {
        let mut m = Vec::new();
        let mut below = Vec::new();
        let mut above = Vec::new();
        for &(l, n) in intervals {
            if l + 2 > n {
                return Err(Error::EmptyInterior { l, n });
            }
            if n > ordered {
                return Err(Error::InvalidArgument(format!("interval end {n} beyond {ordered} ordered elements")));
            }
            m.push((0..ordered).map(|i| i > l && i < n).collect());
            below.push((0..ordered).map(|i| i <= l).collect());
            above.push((0..ordered).map(|i| i >= n).collect());
        }
        Self::new(ordered, m, below, above)
    }

    pub fn ordered_len(&self) -> usize {
        self.ordered
    }

    pub fn fuzzy_len(&self) -> usize {
        self.incomparable.len()
    }

    pub fn relation_matrix(&self) -> &[Vec<bool>] {
        &self.incomparable
    }

    pub fn is_incomparable(&self, j: usize, i: usize) -> bool {
        self.incomparable[j][i]
    }

    /// `(l, n)` with row `j`'s incomparable block equal to `l+1 .. n−1`, if the
    /// block is a single run.
    pub fn interval(&self, j: usize) -> Option<(usize, usize)> {
        let row = &self.incomparable[j];
        let first = row.iter().position(|&b| b)?;
        let last = row.iter().rposition(|&b| b)?;
        if first == 0 || !row[first..=last].iter().all(|&b| b) {
            return None;
        }
        Some((first - 1, last + 1))
    }
}

/// First structural violation, scanning rows in order and, within a row,
/// exclusivity, then contiguity, then transitivity.
pub fn check_poset_consistency(p: &FuzzyPoset) -> std::result::Result<(), Violation> {
    for j in 0..p.fuzzy_len() {
        let m = &p.incomparable[j];
        for i in 0..p.ordered {
            let ordered = p.below[j][i] || p.above[j][i];
            if ordered == m[i] {
                return Err(Violation::Exclusivity { row: j, col: i });
            }
        }
        if let (Some(first), Some(last)) = (m.iter().position(|&b| b), m.iter().rposition(|&b| b)) {
            if !m[first..=last].iter().all(|&b| b) {
                return Err(Violation::Contiguity { row: j });
            }
        }
        // b_k ≤ a_j forces b_m ≤ a_j for m < k; a_j ≤ b_k forces a_j ≤ b_m for m > k
        for i in 0..p.ordered {
            if p.below[j][i] && (0..i).any(|m| !p.below[j][m]) {
                return Err(Violation::Transitivity { row: j, col: i });
            }
            if p.above[j][i] && (i + 1..p.ordered).any(|m| !p.above[j][m]) {
                return Err(Violation::Transitivity { row: j, col: i });
            }
            if p.below[j][i] && p.above[j][i] && ((0..i).any(|m| p.above[j][m]) || (i + 1..p.ordered).any(|m| p.below[j][m])) {
                return Err(Violation::Transitivity { row: j, col: i });
            }
        }
    }
    Ok(())
}

/// Plain-text listing: a header `ordered: K`, then one line per fuzzy element,
/// `a3: interval 5..9, weights uniform` (or an explicit list of rationals
/// for the interior elements, `weights 1/4 1/2 1/4`). Fuzzy elements are
/// numbered from 1.
pub fn to_listing(p: &FuzzyPoset, points: &[FuzzyPoint]) -> Result<String> {
    if points.len() != p.fuzzy_len() {
        return Err(Error::InvalidArgument("one fuzzy point per fuzzy element required".into()));
    }
    let mut out = format!("ordered: {}\n", p.ordered);
    for (j, fp) in points.iter().enumerate() {
        let (l, n) = p
            .interval(j)
            .ok_or_else(|| Error::InvalidArgument(format!("row {j} is not an interval")))?;
        let interior: Vec<Rational64> = (l + 1..n).map(|i| fp.weight(i)).collect();
        let uniform = interior.iter().all(|w| *w == Rational64::new(1, (n - l - 1) as i64));
        let weights = if uniform {
            "uniform".to_string()
        } else {
            interior.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "a{}: interval {l}..{n}, weights {weights}", j + 1).expect("string write");
    }
    Ok(out)
}

/// Inverse of [`to_listing`]; errors carry the 1-based line number.
pub fn parse_listing(text: &str) -> Result<(FuzzyPoset, Vec<FuzzyPoint>)> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut ordered = None;
    let mut intervals = Vec::new();
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(':').ok_or_else(|| err(line_no, "expected 'key: value'".into()))?;
        let key = key.trim();
        if key == "ordered" {
            ordered = Some(rest.trim().parse::<usize>().map_err(|e| err(line_no, format!("ordered count: {e}")))?);
            continue;
        }
        let index: usize = key
            .strip_prefix('a')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(line_no, format!("expected a fuzzy element name like 'a1', got '{key}'")))?;
        if index != intervals.len() + 1 {
            return Err(err(line_no, format!("fuzzy elements must be listed in order; expected a{}", intervals.len() + 1)));
        }
        let k_ordered = ordered.ok_or_else(|| err(line_no, "'ordered: K' header must come first".into()))?;
        let (interval, weights) =
            rest.split_once(',').ok_or_else(|| err(line_no, "expected 'interval l..n, weights ...'".into()))?;
        let range = interval
            .trim()
            .strip_prefix("interval")
            .ok_or_else(|| err(line_no, "expected 'interval l..n'".into()))?
            .trim();
        let (l, n) = range.split_once("..").ok_or_else(|| err(line_no, format!("bad interval '{range}'")))?;
        let l: usize = l.trim().parse().map_err(|e| err(line_no, format!("interval start: {e}")))?;
        let n: usize = n.trim().parse().map_err(|e| err(line_no, format!("interval end: {e}")))?;
        if l + 2 > n || n > k_ordered {
            return Err(err(line_no, format!("interval {l}..{n} has no interior inside {k_ordered} ordered elements")));
        }
        let spec = weights
            .trim()
            .strip_prefix("weights")
            .ok_or_else(|| err(line_no, "expected 'weights ...'".into()))?
            .trim();
        let point = if spec == "uniform" {
            confinement_weights(l, n)?
        } else {
            let interior = spec
                .split_whitespace()
                .map(|t| t.parse::<Rational64>().map_err(|e| err(line_no, format!("weight '{t}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if interior.len() != n - l - 1 {
                return Err(err(line_no, format!("{} weights for {} interior elements", interior.len(), n - l - 1)));
            }
            let mut w = vec![Rational64::zero(); n];
            w[l + 1..n].copy_from_slice(&interior);
            FuzzyPoint::new(w).map_err(|e| err(line_no, e.to_string()))?
        };
        intervals.push((l, n));
        points.push(point);
    }
    let ordered = ordered.ok_or_else(|| err(0, "missing 'ordered: K' header".into()))?;
    Ok((FuzzyPoset::from_intervals(ordered, &intervals)?, points))
}

/// A normalized nonnegative density: the continuum fuzzy point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumFuzzyPoint {
    density: RealField,
}

impl ContinuumFuzzyPoint {
    pub fn new(density: RealField) -> Result<Self> {
        if !density.is_finite() || density.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("density must be finite and nonnegative".into()));
        }
        let norm = density.integrate();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("density integrates to {norm}, expected 1")));
        }
        Ok(Self { density })
    }

    pub fn density(&self) -> &RealField {
        &self.density
    }

    pub fn mean(&self) -> Vec<f64> {
        let g = self.density.grid();
        let mut m = vec![0.0; g.dim()];
        for (i, &w) in self.density.values().iter().enumerate() {
            for (a, x) in g.position(i).into_iter().enumerate() {
                m[a] += x * w;
            }
        }
        m.iter().map(|v| v * g.cell_volume()).collect()
    }
}

/// The ordered point `δ(x − x_c)` on the grid: `1/h^D` at the nearest node.
pub fn ordered_point_density(x_c: &[f64], grid: &UniformGrid) -> Result<ContinuumFuzzyPoint> {
    let idx = grid.nearest_index(x_c)?;
    let mut w = RealField::zeros(grid);
    w.values_mut()[grid.linear_index(&idx)] = 1.0 / grid.cell_volume();
    ContinuumFuzzyPoint::new(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_weights() {
        let p = confinement_weights(2, 6).unwrap();
        assert_eq!(p.weights()[3..], [Rational64::new(1, 3); 3]);
        assert_eq!(p.sum(), Rational64::from_integer(1));
        assert!(confinement_weights(0, 2).unwrap().is_ordered_point());
        let p = confinement_weights(1, 10).unwrap();
        assert_eq!(p.tolerance_scale(), 8);
        assert_eq!(p.weight(2), Rational64::new(1, 8));
        assert_eq!(confinement_weights(3, 4), Err(Error::EmptyInterior { l: 3, n: 4 }));
    }

    #[test]
    fn violations_are_flagged() {
        let ok = FuzzyPoset::from_intervals(8, &[(1, 4), (0, 7)]).unwrap();
        assert_eq!(check_poset_consistency(&ok), Ok(()));

        let mut gap = ok.clone();
        gap.incomparable[0] = vec![false, true, false, true, false, false, false, false];
        gap.below[0] = vec![true, false, true, false, false, false, false, false];
        gap.above[0] = vec![false, false, false, false, true, true, true, true];
        assert!(matches!(check_poset_consistency(&gap), Err(Violation::Transitivity { .. } | Violation::Contiguity { .. })));
        gap.below[0] = vec![true, false, false, false, false, false, false, false];
        gap.above[0] = vec![false, false, true, false, true, true, true, true];
        assert_eq!(check_poset_consistency(&gap), Err(Violation::Contiguity { row: 0 }));

        let mut both = ok.clone();
        both.below[1][3] = true;
        assert_eq!(check_poset_consistency(&both), Err(Violation::Exclusivity { row: 1, col: 3 }));

        let mut twisted = ok;
        twisted.above[0] = vec![false, false, false, false, true, false, true, true];
        twisted.incomparable[0][5] = false;
        twisted.below[0][5] = true;
        assert!(matches!(check_poset_consistency(&twisted), Err(Violation::Transitivity { row: 0, .. })));
    }

    #[test]
    fn listing_round_trip() {
        let text = "ordered: 10\na1: interval 5..9, weights uniform\na2: interval 0..4, weights 1/4 1/2 1/4\n";
        let (p, pts) = parse_listing(text).unwrap();
        assert_eq!(p.interval(0), Some((5, 9)));
        assert_eq!(pts[1].weight(2), Rational64::new(1, 2));
        assert_eq!(to_listing(&p, &pts).unwrap(), text);
        assert!(matches!(parse_listing("ordered: 4\na1: interval 3..4, weights uniform"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn discrete_delta() {
        let g = UniformGrid::open_1d(100, 10.0).unwrap();
        let p = ordered_point_density(&[0.0], &g).unwrap();
        assert_eq!(p.density().max(), 10.0);
        assert_eq!(p.density().integrate(), 1.0);
        assert!(ordered_point_density(&[7.0], &g).is_err());
    }
}
