use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dominance::{non_dominated_filter, ObjectivePoint, PointSet};
use crate::error::{Error, Result};
use crate::levelset::AxisBox;

/// Sample offset used by the sharp-corner problems.
pub const SHARP_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    PointList,
    Analytic,
}

/// Objective maps available to analytic problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objectives {
    /// `f1 = x1`, `f2 = 1 + x2² − x1 − 0.2 sin(3π x1)`.
    DiscontinuousSine,
}

impl Objectives {
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Objectives::DiscontinuousSine => {
                vec![
                    x[0],
                    1.0 + x[1] * x[1] - x[0] - 0.2 * (3.0 * PI * x[0]).sin(),
                ]
            }
        }
    }

    pub fn decision_dim(&self) -> usize {
        match self {
            Objectives::DiscontinuousSine => 2,
        }
    }
}

/// A point with a prescribed score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub point: ObjectivePoint,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestProblem {
    pub name: String,
    pub kind: ProblemKind,
    /// Frontier samples; for analytic problems the non-dominated grid points.
    pub frontier_points: PointSet,
    pub anchor_points: Vec<Anchor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<Objectives>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_box: Option<AxisBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
}

fn anchor(point: Vec<f64>, target: f64) -> Result<Anchor> {
    Ok(Anchor {
        point: ObjectivePoint::new(point)?,
        target,
    })
}

impl TestProblem {
    pub fn point_list(name: &str, points: Vec<Vec<f64>>, anchors: Vec<Anchor>) -> Result<Self> {
        let p = Self {
            name: name.to_string(),
            kind: ProblemKind::PointList,
            frontier_points: PointSet::from_rows(points)?,
            anchor_points: anchors,
            objectives: None,
            decision_box: None,
            grid_step: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds an analytic problem. The frontier samples are the non-dominated
    /// grid points; anchors sit at the lower (target −1) and upper (target +1)
    /// corners of their bounding box.
    pub fn analytic(
        name: &str,
        objectives: Objectives,
        decision_box: AxisBox,
        grid_step: f64,
    ) -> Result<Self> {
        let mut p = Self {
            name: name.to_string(),
            kind: ProblemKind::Analytic,
            frontier_points: PointSet::empty(),
            anchor_points: Vec::new(),
            objectives: Some(objectives),
            decision_box: Some(decision_box),
            grid_step: Some(grid_step),
        };
        let grid = p.grid_points()?;
        p.frontier_points = non_dominated_filter(&grid);
        let b = AxisBox::around(&p.frontier_points.rows(), 0.0)?;
        p.anchor_points = vec![anchor(b.lo, -1.0)?, anchor(b.hi, 1.0)?];
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ProblemKind::PointList if self.frontier_points.is_empty() => {
                Err(Error::Empty("frontier points of a point-list problem"))
            }
            ProblemKind::Analytic
                if self.objectives.is_none()
                    || self.decision_box.is_none()
                    || self.grid_step.is_none() =>
            {
                Err(Error::InvalidParameter(format!(
                    "analytic problem {} needs objectives, a decision box and a grid step",
                    self.name
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.frontier_points.dim().unwrap_or(2)
    }

    /// Objective values over the decision grid (inclusive of both ends on every
    /// axis); for point-list problems, the frontier points.
    pub fn grid_points(&self) -> Result<PointSet> {
        let (Some(obj), Some(bx), Some(step)) =
            (self.objectives, &self.decision_box, self.grid_step)
        else {
            return Ok(self.frontier_points.clone());
        };
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if bx.dim() != obj.decision_dim() {
            return Err(Error::DimensionMismatch {
                expected: obj.decision_dim(),
                got: bx.dim(),
            });
        }
        let counts: Vec<usize> = (0..bx.dim())
            .map(|d| ((bx.hi[d] - bx.lo[d]) / step + 1e-9).floor() as usize + 1)
            .collect();
        let total: usize = counts.iter().product();
        let mut rows = Vec::with_capacity(total);
        for mut idx in 0..total {
            let x: Vec<f64> = (0..bx.dim())
                .map(|d| {
                    let i = idx % counts[d];
                    idx /= counts[d];
                    bx.lo[d] + i as f64 * step
                })
                .collect();
            rows.push(obj.evaluate(&x));
        }
        PointSet::from_rows(rows)
    }

    /// Reference samples the frontier estimate is compared against.
    pub fn reference_samples(&self) -> &PointSet {
        &self.frontier_points
    }

    /// Regression data: frontier samples with target 0 followed by the anchors.
    pub fn gp_training(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut inputs = self.frontier_points.rows();
        let mut targets = vec![0.0; inputs.len()];
        for a in &self.anchor_points {
            inputs.push(a.point.to_vec());
            targets.push(a.target);
        }
        (inputs, targets)
    }

    /// One-class training data: the full grid for analytic problems.
    pub fn svm_training(&self) -> Result<PointSet> {
        self.grid_points()
    }

    /// Every point the problem supplies to any model.
    pub fn all_points(&self) -> Result<Vec<Vec<f64>>> {
        let mut rows = self.grid_points()?.rows();
        rows.extend(self.anchor_points.iter().map(|a| a.point.to_vec()));
        Ok(rows)
    }

    /// Plotting box: bounding box of all problem points with a 20% margin.
    pub fn default_box(&self) -> Result<AxisBox> {
        AxisBox::around(&self.all_points()?, 0.2)
    }
}

/// Convex sharp-corner samples with a dominated anchor.
pub fn p1() -> TestProblem {
    let e = SHARP_EPS;
    TestProblem::point_list(
        "p1",
        vec![vec![0.0, 1.0], vec![e, e], vec![1.0, 0.0]],
        vec![anchor(vec![1.0, 1.0], 1.0).unwrap()],
    )
    .unwrap()
}

/// Concave sharp-corner samples with a non-dominated anchor.
pub fn p2() -> TestProblem {
    let e = SHARP_EPS;
    TestProblem::point_list(
        "p2",
        vec![vec![0.0, 1.0], vec![1.0 - e, 1.0 - e], vec![1.0, 0.0]],
        vec![anchor(vec![0.0, 0.0], -1.0).unwrap()],
    )
    .unwrap()
}

/// Disconnected-frontier problem sampled on a 0.05 grid over `[0,1] × [−2,2]`.
pub fn discontinuous() -> TestProblem {
    let bx = AxisBox::new(vec![0.0, -2.0], vec![1.0, 2.0]).unwrap();
    TestProblem::analytic("discontinuous", Objectives::DiscontinuousSine, bx, 0.05).unwrap()
}

pub fn builtin_problems() -> Vec<TestProblem> {
    vec![p1(), p2(), discontinuous()]
}

pub fn builtin_problem(name: &str) -> Result<TestProblem> {
    builtin_problems()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown problem {name:?}; expected p1, p2 or discontinuous"
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_problems() {
        let a = p1();
        assert!(a.frontier_points.iter().any(|p| p[..] == [1e-3, 1e-3]));
        assert_eq!(a.anchor_points[0].target, 1.0);
        let b = p2();
        assert_eq!(b.anchor_points[0].point.to_vec(), vec![0.0, 0.0]);
        assert_eq!(b.anchor_points[0].target, -1.0);
        let (x, z) = b.gp_training();
        assert_eq!(x.len(), 4);
        assert_eq!(z, vec![0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn discontinuous_grid() {
        let d = discontinuous();
        let g = d.grid_points().unwrap();
        assert_eq!(g.len(), 21 * 81);
        assert!(d.frontier_points.len() < g.len());
        // Every frontier sample comes from the x2 = 0 row.
        for p in &d.frontier_points {
            let f2 = 1.0 - p[0] - 0.2 * (3.0 * PI * p[0]).sin();
            assert!((p[1] - f2).abs() < 1e-12);
        }
        assert_eq!(d.anchor_points.len(), 2);
    }

    #[test]
    fn problems_roundtrip_json() {
        for p in builtin_problems() {
            let s = serde_json::to_string(&p).unwrap();
            let back: TestProblem = serde_json::from_str(&s).unwrap();
            assert_eq!(back, p);
        }
        assert!(builtin_problem("p3").is_err());
    }
}
