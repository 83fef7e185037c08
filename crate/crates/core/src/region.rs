//! Down-closed two-dimensional rate regions stored as sampled boundaries.
//!
//! Inner regions interpolate linearly between samples (time sharing), outer
//! regions use a left step so that resampling never understates the bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::uniform;

/// Default number of R1 samples.
pub const DEFAULT_POINTS: usize = 2048;
/// Bisection tolerance of the gap metrics, in bits (and relative for ratios).
pub const GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Inner,
    Outer,
}

/// Boundary `R2max(R1)` of a down-closed region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub kind: RegionKind,
    pub id: String,
    r1: Vec<f64>,
    r2: Vec<f64>,
    /// Names of the per-point maximizer columns.
    pub param_names: Vec<String>,
    /// One row per R1 sample (empty when no parameters are tracked).
    pub params: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub additive: f64,
    pub multiplicative: f64,
    pub worst_r1_additive: f64,
    pub worst_r1_multiplicative: f64,
}

impl RateRegion {
    /// Build from boundary samples; monotonicity is enforced conservatively for the kind.
    pub fn from_samples(kind: RegionKind, id: &str, r1: Vec<f64>, mut r2: Vec<f64>) -> Result<Self> {
        if r1.is_empty() || r1.len() != r2.len() {
            return Err(Error::EmptyInput);
        }
        if r1[0] != 0.0 || r1.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("r1 grid must ascend strictly from 0".into()));
        }
        if r2.iter().chain(&r1).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite boundary sample".into()));
        }
        for v in &mut r2 {
            *v = v.max(0.0);
        }
        match kind {
            RegionKind::Outer => {
                for k in (0..r2.len() - 1).rev() {
                    r2[k] = r2[k].max(r2[k + 1]);
                }
            }
            RegionKind::Inner => {
                for k in 1..r2.len() {
                    r2[k] = r2[k].min(r2[k - 1]);
                }
            }
        }
        Ok(RateRegion { kind, id: id.to_string(), r1, r2, param_names: vec![], params: vec![] })
    }

    /// Sample `f` on a uniform grid over `[0, r1_max]`.
    pub fn from_fn(kind: RegionKind, id: &str, r1_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let r1 = grid(r1_max, n);
        let r2 = r1.iter().map(|&x| f(x)).collect();
        Self::from_samples(kind, id, r1, r2).expect("valid grid")
    }

    /// Attach per-point parameter columns.
    pub fn with_params(mut self, names: &[&str], rows: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(rows.len(), self.r1.len());
        self.param_names = names.iter().map(|s| s.to_string()).collect();
        self.params = rows;
        self
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }

    pub fn r1(&self) -> &[f64] {
        &self.r1
    }

    pub fn r2(&self) -> &[f64] {
        &self.r2
    }

    pub fn r1_max(&self) -> f64 {
        *self.r1.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.r1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r1.is_empty()
    }

    /// Boundary value at `r1`; `-inf` beyond the support.
    pub fn value_at(&self, r1: f64) -> f64 {
        let last = self.r1_max();
        if r1 > last * (1.0 + 1e-12) + 1e-15 {
            return f64::NEG_INFINITY;
        }
        if r1 >= last {
            return self.r2[self.r2.len() - 1];
        }
        if r1 <= 0.0 {
            return self.r2[0];
        }
        let i = self.r1.partition_point(|&x| x <= r1) - 1;
        match self.kind {
            RegionKind::Outer => self.r2[i],
            RegionKind::Inner => {
                let (x0, x1) = (self.r1[i], self.r1[i + 1]);
                let t = (r1 - x0) / (x1 - x0);
                self.r2[i] + t * (self.r2[i + 1] - self.r2[i])
            }
        }
    }

    /// Whether `(r1, r2)` lies in the region.
    pub fn contains_point(&self, r1: f64, r2: f64) -> bool {
        r2 <= self.value_at(r1) + 1e-12
    }

    /// Boundary points, including the R1-axis corner when the last sample is positive.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.r1.iter().copied().zip(self.r2.iter().copied()).collect()
    }

    /// Copy on a new uniform grid with `n` points; conservative for the kind.
    pub fn resample(&self, n: usize) -> Self {
        let r1 = grid(self.r1_max(), n);
        let r2 = r1.iter().map(|&x| self.value_at(x)).collect();
        let mut out = Self::from_samples(self.kind, &self.id, r1, r2).expect("valid grid");
        if !self.params.is_empty() {
            let rows = out.r1.iter().map(|&x| self.params[self.nearest(x)].clone()).collect();
            out.params = rows;
            out.param_names = self.param_names.clone();
        }
        out
    }

    fn nearest(&self, x: f64) -> usize {
        let i = self.r1.partition_point(|&v| v <= x).max(1) - 1;
        if i + 1 < self.r1.len() && (self.r1[i + 1] - x) < (x - self.r1[i]) {
            i + 1
        } else {
            i
        }
    }
}

/// Uniform grid on `[0, r1_max]`; a single point when the support is empty.
pub fn grid(r1_max: f64, n: usize) -> Vec<f64> {
    if !(r1_max > 0.0) {
        return vec![0.0];
    }
    uniform(0.0, r1_max, n.max(2))
}

/// Upper concave hull of a down-closed point set, left to right, from `(0, ymax)` to `(xmax, 0)`.
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    // Abscissae are snapped so that round-off past a common R1 cap cannot claim the endpoint.
    let snap = |x: f64| (x.max(0.0) * 1e12).round() * 1e-12;
    let mut pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).map(|&(x, y)| (snap(x), y.max(0.0))).collect();
    if pts.is_empty() {
        return vec![];
    }
    let xmax = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    pts.push((0.0, ymax));
    pts.push((xmax, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(&last) = hull.last() {
            if p.0 == last.0 {
                continue;
            }
        }
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Piecewise-linear interpolation along hull vertices.
pub(crate) fn hull_value(hull: &[(f64, f64)], x: f64) -> f64 {
    if hull.len() == 1 {
        return hull[0].1;
    }
    let i = hull.partition_point(|p| p.0 <= x).clamp(1, hull.len() - 1);
    let (a, b) = (hull[i - 1], hull[i]);
    if x >= b.0 {
        return b.1;
    }
    a.1 + (x - a.0) / (b.0 - a.0) * (b.1 - a.1)
}

/// Pareto points to region on the default grid.
pub fn from_pareto_points(points: &[(f64, f64)], kind: RegionKind) -> Result<RateRegion> {
    from_pareto_points_n(points, kind, DEFAULT_POINTS)
}

pub fn from_pareto_points_n(points: &[(f64, f64)], kind: RegionKind, n: usize) -> Result<RateRegion> {
    let tagged: Vec<(f64, f64, Vec<f64>)> = points.iter().map(|&(x, y)| (x, y, vec![])).collect();
    from_tagged_points(&tagged, &[], kind, "points", n)
}

/// Pareto points carrying maximizer parameters.
pub fn from_tagged_points(
    points: &[(f64, f64, Vec<f64>)],
    names: &[&str],
    kind: RegionKind,
    id: &str,
    n: usize,
) -> Result<RateRegion> {
    let pts: Vec<(f64, f64, &Vec<f64>)> = points
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .map(|p| (p.0.max(0.0), p.1.max(0.0), &p.2))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    // Pareto filter: sort by r1 descending, keep strictly rising r2.
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[j].0.total_cmp(&pts[i].0).then(pts[j].1.total_cmp(&pts[i].1)));
    let mut front: Vec<usize> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for i in order {
        if pts[i].1 > best {
            front.push(i);
            best = pts[i].1;
        }
    }
    front.reverse();
    let xmax = pts[front[front.len() - 1]].0;
    let r1 = grid(xmax, n);
    let (r2, rows): (Vec<f64>, Vec<Vec<f64>>) = match kind {
        RegionKind::Outer => r1
            .iter()
            .map(|&x| {
                let k = front.partition_point(|&i| pts[i].0 <= x).max(1) - 1;
                let i = front[k];
                (if x < pts[front[0]].0 { pts[front[0]].1 } else { pts[i].1 }, pts[i].2.clone())
            })
            .unzip(),
        RegionKind::Inner => {
            let fp: Vec<(f64, f64)> = front.iter().map(|&i| (pts[i].0, pts[i].1)).collect();
            let hull = upper_hull(&fp);
            r1.iter()
                .map(|&x| {
                    let k = front.partition_point(|&i| pts[i].0 < x).min(front.len() - 1);
                    (hull_value(&hull, x), pts[front[k]].2.clone())
                })
                .unzip()
        }
    };
    let mut reg = RateRegion::from_samples(kind, id, r1, r2)?;
    if !names.is_empty() {
        reg = reg.with_params(names, rows);
    }
    Ok(reg)
}

fn same_kind(regions: &[RateRegion]) -> Result<RegionKind> {
    let first = regions.first().ok_or(Error::EmptyInput)?.kind;
    if regions.iter().any(|r| r.kind != first) {
        return Err(Error::MixedKinds);
    }
    Ok(first)
}

/// Pointwise maximum; inner unions are convexified by time sharing.
pub fn union(regions: &[RateRegion]) -> Result<RateRegion> {
    let kind = same_kind(regions)?;
    let n = regions.iter().map(|r| r.len()).max().unwrap();
    match kind {
        RegionKind::Inner => {
            let pts: Vec<(f64, f64)> = regions.iter().flat_map(|r| r.points()).collect();
            Ok(from_pareto_points_n(&pts, kind, n)?.with_id("union"))
        }
        RegionKind::Outer => {
            let top = regions.iter().map(|r| r.r1_max()).fold(0.0, f64::max);
            Ok(RateRegion::from_fn(kind, "union", top, n, |x| {
                regions.iter().map(|r| r.value_at(x)).fold(0.0, f64::max)
            }))
        }
    }
}

/// Pointwise minimum on `[0, min r1_max]`.
pub fn intersect(regions: &[RateRegion]) -> Result<RateRegion> {
    let kind = same_kind(regions)?;
    let n = regions.iter().map(|r| r.len()).max().unwrap();
    let top = regions.iter().map(|r| r.r1_max()).fold(f64::INFINITY, f64::min);
    Ok(RateRegion::from_fn(kind, "intersect", top, n, |x| {
        regions.iter().map(|r| r.value_at(x)).fold(f64::INFINITY, f64::min)
    }))
}

/// Checks `inner <= outer + tol` on the union of both grids.
pub fn contains(outer: &RateRegion, inner: &RateRegion, tol: f64) -> (bool, Vec<(f64, f64)>) {
    let mut xs: Vec<f64> = inner.r1.iter().chain(outer.r1.iter().filter(|&&x| x <= inner.r1_max())).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut viol = Vec::new();
    let omax = outer.r1_max();
    for x in xs {
        let yi = inner.value_at(x);
        let excess = if x <= omax + tol {
            yi - outer.value_at(x.min(omax))
        } else {
            x - omax
        };
        if excess > tol {
            viol.push((x, excess));
        }
    }
    (viol.is_empty(), viol)
}

/// Smallest shift `d` that moves the outer sample into the inner region.
fn point_shift(inner: &RateRegion, x: f64, y: f64) -> f64 {
    let ok = |d: f64| inner.contains_point((x - d).max(0.0), (y - d).max(0.0));
    if ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, x.max(y));
    if !ok(hi) {
        return f64::INFINITY;
    }
    while hi - lo > GAP_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest `M >= 1` with the scaled outer sample inside the inner region.
fn point_ratio(inner: &RateRegion, x: f64, y: f64) -> Option<f64> {
    let ok = |m: f64| inner.contains_point(x / m, y / m);
    if ok(1.0) {
        return Some(1.0);
    }
    // Axis samples cannot be reached when the inner region is flat on that axis.
    if (x == 0.0 && inner.value_at(0.0) <= 0.0) || (y == 0.0 && inner.r1_max() <= 0.0) {
        return None;
    }
    let mut hi = 2.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Some(f64::INFINITY);
        }
    }
    let mut lo = hi / 2.0;
    while hi - lo > GAP_TOL * lo {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Additive gap over the outer samples, with its worst R1.
pub fn additive_gap_at(outer: &RateRegion, inner: &RateRegion) -> (f64, f64) {
    outer
        .points()
        .into_iter()
        .map(|(x, y)| (point_shift(inner, x, y), x))
        .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

pub fn additive_gap(outer: &RateRegion, inner: &RateRegion) -> f64 {
    additive_gap_at(outer, inner).0
}

/// Multiplicative gap over the outer samples, with its worst R1.
pub fn multiplicative_gap_at(outer: &RateRegion, inner: &RateRegion) -> (f64, f64) {
    outer
        .points()
        .into_iter()
        .filter_map(|(x, y)| point_ratio(inner, x, y).map(|m| (m, x)))
        .fold((1.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

pub fn multiplicative_gap(outer: &RateRegion, inner: &RateRegion) -> f64 {
    multiplicative_gap_at(outer, inner).0
}

pub fn gap_report(outer: &RateRegion, inner: &RateRegion) -> GapReport {
    let (additive, worst_r1_additive) = additive_gap_at(outer, inner);
    let (multiplicative, worst_r1_multiplicative) = multiplicative_gap_at(outer, inner);
    GapReport { additive, multiplicative, worst_r1_additive, worst_r1_multiplicative }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(kind: RegionKind, c: f64, slope: f64) -> RateRegion {
        RateRegion::from_fn(kind, "line", c / slope, 513, |x| c - slope * x)
    }

    #[test]
    fn straight_and_dominated_points() {
        let r = from_pareto_points(&[(0.0, 2.0), (1.0, 1.0), (2.0, 0.0)], RegionKind::Inner).unwrap();
        let r2 = from_pareto_points(&[(0.0, 2.0), (1.0, 0.5), (2.0, 0.0)], RegionKind::Inner).unwrap();
        for x in [0.0, 0.3, 1.0, 1.7, 2.0] {
            assert!((r.value_at(x) - (2.0 - x)).abs() < 1e-9);
            assert!((r2.value_at(x) - (2.0 - x)).abs() < 1e-9);
        }
    }

    #[test]
    fn outer_step_up() {
        let r = from_pareto_points(&[(0.0, 2.0), (1.0, 1.0)], RegionKind::Outer).unwrap();
        assert_eq!(r.value_at(0.5), 2.0);
        assert_eq!(r.value_at(1.0), 1.0);
    }

    #[test]
    fn empty_input() {
        assert_eq!(from_pareto_points(&[], RegionKind::Inner).err(), Some(Error::EmptyInput));
    }

    #[test]
    fn union_hull_and_intersection() {
        let a = line(RegionKind::Inner, 1.0, 1.0);
        let b = line(RegionKind::Inner, 2.0, 2.0);
        let u = union(&[a.clone(), b]).unwrap();
        // Hull of {(0,2),(1,0)} and {(0,1),(1,0)} is the chord from (0,2) to (1,0).
        assert!((u.value_at(0.5) - 1.0).abs() < 1e-9);
        let i = intersect(&[a.clone(), a.clone()]).unwrap();
        assert!((i.value_at(0.25) - a.value_at(0.25)).abs() < 1e-12);
        let o = line(RegionKind::Outer, 1.0, 1.0);
        assert_eq!(intersect(&[a, o]).err(), Some(Error::MixedKinds));
    }

    #[test]
    fn containment() {
        let r = line(RegionKind::Outer, 2.0, 1.0);
        assert!(contains(&r, &r, 0.0).0);
        let big = line(RegionKind::Inner, 3.0, 1.0);
        let (ok, v) = contains(&r, &big, 0.0);
        assert!(!ok);
        assert_eq!(v[0].0, 0.0);
        assert!((v[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_regions_have_trivial_gaps() {
        let o = line(RegionKind::Outer, 2.0, 1.0);
        let i = line(RegionKind::Inner, 2.0, 1.0);
        let g = gap_report(&o, &i);
        assert_eq!((g.additive, g.multiplicative), (0.0, 1.0));
    }

    #[test]
    fn shifted_line_gap() {
        // Outer R2 = 2 - R1 on [0,1], inner R2 = 1 - R1: interior samples need 0.5, the R2-axis corner needs 1.
        let o = RateRegion::from_fn(RegionKind::Outer, "o", 1.0, 1025, |x| 2.0 - x);
        let i = line(RegionKind::Inner, 1.0, 1.0);
        let (g, at) = additive_gap_at(&o, &i);
        assert!((g - 1.0).abs() < 2.0 * GAP_TOL && at == 0.0);
        let interior = o.points().into_iter().filter(|p| p.0 >= 0.5).map(|(x, y)| point_shift(&i, x, y)).fold(0.0, f64::max);
        assert!((interior - 0.5).abs() < 2.0 * GAP_TOL);
    }

    #[test]
    fn multiplicative_factor_two() {
        let o = line(RegionKind::Outer, 2.0, 1.0);
        let i = line(RegionKind::Inner, 1.0, 1.0);
        assert!((multiplicative_gap(&o, &i) - 2.0).abs() < 1e-5);
        let flat = RateRegion::from_samples(RegionKind::Inner, "z", vec![0.0], vec![0.0]).unwrap();
        assert!(multiplicative_gap(&o, &flat) == 1.0 || multiplicative_gap(&o, &flat).is_infinite());
    }

    proptest! {
        #[test]
        fn constructed_regions_are_monotone(pts in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..30)) {
            for kind in [RegionKind::Inner, RegionKind::Outer] {
                let r = from_pareto_points_n(&pts, kind, 257).unwrap();
                prop_assert!(r.r2().windows(2).all(|w| w[1] <= w[0] + 1e-12));
                match kind {
                    RegionKind::Outer => {
                        for p in &pts {
                            prop_assert!(r.contains_point(p.0, p.1 - 1e-9));
                        }
                    }
                    RegionKind::Inner => {
                        // Grid samples sit on the hull and never above it.
                        let hull = upper_hull(&pts);
                        for (x, y) in r.points() {
                            prop_assert!((y - hull_value(&hull, x)).abs() <= 1e-9);
                        }
                    }
                }
            }
        }

        #[test]
        fn outer_coarsening_never_decreases(pts in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..30)) {
            let fine = from_pareto_points_n(&pts, RegionKind::Outer, 1025).unwrap();
            let coarse = fine.resample(65);
            for &x in fine.r1() {
                prop_assert!(coarse.value_at(x) >= fine.value_at(x) - 1e-12);
            }
        }

        #[test]
        fn gap_bisection_matches_sum_rate_oracle(c in 1.0f64..4.0, f in 0.1f64..0.9) {
            let d = f * c / 2.0;
            // Interior samples need a shift of d, the axis corners need 2d.
            let o = RateRegion::from_fn(RegionKind::Outer, "o", c, 513, |x| (c - x).min(c));
            let i = from_pareto_points(&[(0.0, c - 2.0 * d), (c - 2.0 * d, 0.0)], RegionKind::Inner).unwrap();
            let g = additive_gap(&o, &i);
            prop_assert!((g - 2.0 * d).abs() <= 2.0 * GAP_TOL);
        }
    }
}
