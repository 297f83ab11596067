//! Dominance relations over objective-space points, non-dominated filtering and
//! the conservative staircase (single-run attainment) frontier.
//!
//! All objectives are minimized: `a` weakly dominates `b` when it is no worse in
//! every coordinate.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::score::ScoreModel;

/// A point in the M-dimensional objective space (M >= 2, all coordinates finite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectivePoint(Vec<f64>);

impl ObjectivePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "objective points need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {v}")));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectivePoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectivePoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ObjectivePoint> for Vec<f64> {
    fn from(p: ObjectivePoint) -> Self {
        p.0
    }
}

/// A collection of objective points sharing one dimension.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<ObjectivePoint>", into = "Vec<ObjectivePoint>")]
pub struct PointSet {
    points: Vec<ObjectivePoint>,
}

impl TryFrom<Vec<ObjectivePoint>> for PointSet {
    type Error = Error;

    fn try_from(points: Vec<ObjectivePoint>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PointSet> for Vec<ObjectivePoint> {
    fn from(s: PointSet) -> Self {
        s.points
    }
}

impl PointSet {
    pub fn new(points: Vec<ObjectivePoint>) -> Result<Self> {
        if let Some(first) = points.first() {
            let m = first.dim();
            for p in &points {
                check_dim(m, p.dim())?;
            }
        }
        Ok(Self { points })
    }

    /// Builds a set from raw coordinate rows, validating every row.
    pub fn from_rows<I, R>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .map(|r| ObjectivePoint::new(r.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Dimension of the members, `None` for an empty set.
    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.dim())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ObjectivePoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectivePoint> {
        self.points.iter()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }

    pub fn push(&mut self, p: ObjectivePoint) -> Result<()> {
        if let Some(m) = self.dim() {
            check_dim(m, p.dim())?;
        }
        self.points.push(p);
        Ok(())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a ObjectivePoint;
    type IntoIter = std::slice::Iter<'a, ObjectivePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// `a ⪯ b`: `a_i <= b_i` for every coordinate. Reflexive.
pub fn dominates_weak(a: &[f64], b: &[f64]) -> Result<bool> {
    check_dim(a.len(), b.len())?;
    Ok(weak(a, b))
}

/// `a ≺ b`: `a_i < b_i` for every coordinate. Irreflexive.
pub fn dominates_strong(a: &[f64], b: &[f64]) -> Result<bool> {
    check_dim(a.len(), b.len())?;
    Ok(strong(a, b))
}

#[inline]
pub(crate) fn weak(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[inline]
pub(crate) fn strong(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x < y)
}

/// Members of `s` not weakly dominated by any distinct member. Exact duplicates
/// of a retained point are all retained; input order is preserved.
pub fn non_dominated_filter(s: &PointSet) -> PointSet {
    let pts = s.points();
    let kept = pts
        .iter()
        .filter(|p| !pts.iter().any(|q| q.0 != p.0 && weak(q, p)))
        .cloned()
        .collect();
    PointSet { points: kept }
}

/// Where a point lies relative to the frontier encoded by a score function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierSide {
    Dominated,
    Nondominated,
    Frontier,
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Maps the sign of `f(y)` onto the dominated / non-dominated / frontier partition.
pub fn classify_against_frontier<F: ScoreModel + ?Sized>(
    f: &F,
    y: &[f64],
    zero_tol: f64,
) -> Result<FrontierSide> {
    let v = f.value(y)?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            value: v,
            point: y.to_vec(),
        });
    }
    Ok(if v.abs() <= zero_tol {
        FrontierSide::Frontier
    } else if v > 0.0 {
        FrontierSide::Dominated
    } else {
        FrontierSide::Nondominated
    })
}

/// Score model whose zero set is the boundary of the region strongly dominated by
/// a finite point set.
///
/// The value is a signed Chebyshev distance: positive inside the dominated region
/// (distance to its boundary), negative outside its closure (distance to it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseFrontier {
    points: PointSet,
}

/// Builds the staircase score model for `s`. Only the non-dominated subset matters.
pub fn staircase_frontier(s: &PointSet) -> Result<StaircaseFrontier> {
    if s.is_empty() {
        return Err(Error::Empty("staircase_frontier needs at least one point"));
    }
    Ok(StaircaseFrontier {
        points: non_dominated_filter(s),
    })
}

impl StaircaseFrontier {
    /// Non-dominated support points.
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    fn signed_distance(&self, y: &[f64]) -> f64 {
        // Depth inside the union of open orthants {y > p}.
        let inside = self
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(y)
                    .map(|(pi, yi)| yi - pi)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if inside > 0.0 {
            return inside;
        }
        // Distance to the closure of that union.
        let outside = self
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(y)
                    .map(|(pi, yi)| (pi - yi).max(0.0))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        -outside
    }

    /// The zero set as one polyline, sorted by the first objective and stepping
    /// down then right. The two unbounded rays are cut at the coordinates of
    /// `upper`. Requires M = 2.
    ///
    /// Ties in the first objective are broken lexicographically.
    pub fn polyline(&self, upper: [f64; 2]) -> Result<Vec<[f64; 2]>> {
        check_dim(2, self.points.dim().unwrap_or(2))?;
        let mut pts: Vec<[f64; 2]> = self.points.iter().map(|p| [p[0], p[1]]).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        let mut out = Vec::with_capacity(2 * pts.len() + 2);
        let first = pts[0];
        out.push([first[0], upper[1].max(first[1])]);
        for (k, p) in pts.iter().enumerate() {
            if k > 0 {
                let prev = pts[k - 1];
                out.push([p[0], prev[1]]);
            }
            out.push(*p);
        }
        let last = pts[pts.len() - 1];
        out.push([upper[0].max(last[0]), last[1]]);
        out.dedup();
        Ok(out)
    }
}

impl ScoreModel for StaircaseFrontier {
    fn dim(&self) -> usize {
        self.points.dim().unwrap_or(0)
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        Ok(self.signed_distance(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(rows.iter().map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn weak_dominance_examples() {
        assert!(dominates_weak(&[1.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(dominates_weak(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates_weak(&[2.0, 1.0], &[1.0, 2.0]).unwrap());
        assert!(dominates_weak(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn strong_dominance_examples() {
        assert!(dominates_strong(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates_strong(&[1.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(!dominates_strong(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(dominates_strong(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn point_validation() {
        assert!(ObjectivePoint::new(vec![1.0]).is_err());
        assert!(ObjectivePoint::new(vec![1.0, f64::NAN]).is_err());
        assert!(ObjectivePoint::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(PointSet::from_rows(vec![vec![0.0, 1.0], vec![0.0, 1.0, 2.0]]).is_err());
    }

    #[test]
    fn filter_examples() {
        let s = ps(&[&[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(non_dominated_filter(&s), ps(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(non_dominated_filter(&PointSet::empty()).is_empty());
        let eps = 1e-3;
        let p1 = ps(&[&[0.0, 1.0], &[eps, eps], &[1.0, 0.0]]);
        assert_eq!(non_dominated_filter(&p1), p1);
    }

    #[test]
    fn filter_keeps_duplicates() {
        let s = ps(&[&[0.0, 1.0], &[0.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(non_dominated_filter(&s).len(), 2);
    }

    #[test]
    fn staircase_examples() {
        let st = staircase_frontier(&ps(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!(st.value(&[2.0, 2.0]).unwrap() > 0.0);
        assert!(st.value(&[-1.0, -1.0]).unwrap() < 0.0);
        assert_eq!(st.value(&[0.5, 1.0]).unwrap(), 0.0);
        // Chebyshev magnitudes
        assert_eq!(st.value(&[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(st.value(&[-1.0, -1.0]).unwrap(), -2.0);
        assert!(staircase_frontier(&PointSet::empty()).is_err());
    }

    #[test]
    fn staircase_polyline_shape() {
        let st = staircase_frontier(&ps(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let line = st.polyline([2.0, 2.0]).unwrap();
        assert_eq!(
            line,
            vec![[0.0, 2.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [2.0, 0.0]]
        );
        for v in &line {
            assert_eq!(st.value(v).unwrap(), 0.0);
        }
    }

    #[test]
    fn classification_examples() {
        let f = crate::score::FnScore::new(2, |y: &[f64]| y[0] + y[1] - 1.0);
        let c = |y: [f64; 2]| classify_against_frontier(&f, &y, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(c([1.0, 1.0]), FrontierSide::Dominated);
        assert_eq!(c([0.0, 0.0]), FrontierSide::Nondominated);
        assert_eq!(c([0.5, 0.5]), FrontierSide::Frontier);
        let bad = crate::score::FnScore::new(2, |_: &[f64]| f64::NAN);
        assert!(classify_against_frontier(&bad, &[0.0, 0.0], DEFAULT_ZERO_TOL).is_err());
    }
}
