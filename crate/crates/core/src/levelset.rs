//! Zero-level-set extraction for two-objective score functions by marching
//! squares with bisection refinement, plus frontier quality metrics.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dominance::PointSet;
use crate::error::{check_dim, Error, Result};
use crate::score::{finite_value, ScoreModel};

pub const DEFAULT_REFINE_TOL: f64 = 1e-8;
const MAX_BISECTIONS: usize = 60;

/// Axis-aligned box `[lo, hi]` in any dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty()
            || lo
                .iter()
                .zip(&hi)
                .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "degenerate box {lo:?} .. {hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Bounding box of `points` grown by `margin` times its extent on every side.
    /// Zero-extent axes grow by `margin` in absolute terms.
    pub fn around(points: &[Vec<f64>], margin: f64) -> Result<Self> {
        let first = points
            .first()
            .ok_or(Error::Empty("box of an empty point list"))?;
        let m = first.len();
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            check_dim(m, p.len())?;
            for d in 0..m {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        for d in 0..m {
            let ext = hi[d] - lo[d];
            let pad = if ext > 0.0 {
                margin * ext
            } else {
                margin.max(1e-6)
            };
            lo[d] -= pad;
            hi[d] += pad;
        }
        Self::new(lo, hi)
    }

    /// `n` evenly spaced values along axis `d`, endpoints included.
    pub fn axis(&self, d: usize, n: usize) -> Vec<f64> {
        let (a, b) = (self.lo[d], self.hi[d]);
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Row-major 2D grid (first coordinate fastest).
    pub fn grid2(&self, nx: usize, ny: usize) -> Vec<[f64; 2]> {
        let xs = self.axis(0, nx);
        let ys = self.axis(1, ny);
        ys.iter()
            .flat_map(|&y| xs.iter().map(move |&x| [x, y]))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractionDiagnostics {
    /// Cells with alternating corner signs, resolved by the centre sign.
    pub saddle_cells: usize,
    /// Vertices where bisection stopped before reaching the tolerance.
    pub unrefined_vertices: usize,
    /// Set when the function has one sign over the whole grid.
    pub message: Option<String>,
}

/// Discrete representation of a zero level set in two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierEstimate {
    pub polylines: Vec<Vec<[f64; 2]>>,
    /// Whether each polyline is a closed loop (first vertex repeated at the end).
    pub closed: Vec<bool>,
    pub bounding_box: AxisBox,
    pub grid_resolution: (usize, usize),
    pub component_count: usize,
    pub refine_tol: f64,
    pub diagnostics: ExtractionDiagnostics,
}

impl FrontierEstimate {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.polylines.iter().flatten()
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    /// Diagonal of one grid cell; zero when the grid is unknown.
    pub fn cell_diagonal(&self) -> f64 {
        let (nx, ny) = self.grid_resolution;
        if nx < 2 || ny < 2 {
            return 0.0;
        }
        let dx = (self.bounding_box.hi[0] - self.bounding_box.lo[0]) / (nx - 1) as f64;
        let dy = (self.bounding_box.hi[1] - self.bounding_box.lo[1]) / (ny - 1) as f64;
        dx.hypot(dy)
    }

    /// Vertices placed along every polyline no further than `step` apart.
    pub fn densified(&self, step: f64) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for line in &self.polylines {
            out.extend(densify(line, step));
        }
        out
    }

    /// Writes `component,vertex_index,y1,y2` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["component", "vertex_index", "y1", "y2"])?;
        for (c, line) in self.polylines.iter().enumerate() {
            for (i, v) in line.iter().enumerate() {
                wr.write_record([
                    c.to_string(),
                    i.to_string(),
                    v[0].to_string(),
                    v[1].to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Parses the CSV written by [`FrontierEstimate::write_csv`]. Grid metadata
    /// is not part of the CSV, so the box is the vertex bounding box and the
    /// grid resolution is `(0, 0)`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let h = rd.headers()?.clone();
        if h.iter().map(str::trim).collect::<Vec<_>>() != ["component", "vertex_index", "y1", "y2"]
        {
            return Err(Error::Parse(format!("unexpected frontier header {h:?}")));
        }
        let mut lines: BTreeMap<usize, Vec<(usize, [f64; 2])>> = BTreeMap::new();
        for rec in rd.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).map(str::trim).unwrap_or_default();
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            };
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            };
            let c = parse_usize(field(0))?;
            let i = parse_usize(field(1))?;
            lines
                .entry(c)
                .or_default()
                .push((i, [parse_f(field(2))?, parse_f(field(3))?]));
        }
        let mut polylines = Vec::new();
        let mut closed = Vec::new();
        for (_, mut v) in lines {
            v.sort_by_key(|(i, _)| *i);
            let line: Vec<[f64; 2]> = v.into_iter().map(|(_, p)| p).collect();
            closed.push(line.len() > 2 && line.first() == line.last());
            polylines.push(line);
        }
        let all: Vec<Vec<f64>> = polylines.iter().flatten().map(|p| p.to_vec()).collect();
        let bounding_box = if all.is_empty() {
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])?
        } else {
            AxisBox::around(&all, 0.0)?
        };
        Ok(Self {
            component_count: polylines.len(),
            polylines,
            closed,
            bounding_box,
            grid_resolution: (0, 0),
            refine_tol: DEFAULT_REFINE_TOL,
            diagnostics: ExtractionDiagnostics::default(),
        })
    }
}

fn densify(line: &[[f64; 2]], step: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(line.len());
    if let Some(first) = line.first() {
        out.push(*first);
    }
    for w in line.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let pieces = if step > 0.0 {
            (len / step).ceil().max(1.0) as usize
        } else {
            1
        };
        for k in 1..=pieces {
            let t = k as f64 / pieces as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Refines a sign change between `a` and `b` by bisection.
fn refine<F: ScoreModel + ?Sized>(
    f: &F,
    a: [f64; 2],
    fa: f64,
    b: [f64; 2],
    fb: f64,
    tol: f64,
) -> Result<([f64; 2], f64)> {
    if fa == 0.0 {
        return Ok((a, 0.0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0));
    }
    let (mut lo, mut hi) = (a, b);
    let lo_pos = fa >= 0.0;
    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let fm = finite_value(f, &mid)?;
        if fm.abs() < best.1.abs() || fm.abs() <= tol {
            best = (mid, fm);
        }
        if fm.abs() <= tol {
            break;
        }
        if (fm >= 0.0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Extracts the zero set of `f` over `bbox` on an `nx` by `ny` grid of sample
/// points. Crossings are refined to `|f| <= refine_tol` and stitched into
/// polylines; open chains come first, then closed loops, each in grid order.
pub fn extract_zero_set<F: ScoreModel + ?Sized>(
    f: &F,
    bbox: &AxisBox,
    nx: usize,
    ny: usize,
    refine_tol: f64,
) -> Result<FrontierEstimate> {
    check_dim(2, f.dim())?;
    check_dim(2, bbox.dim())?;
    if nx < 8 || ny < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid must be at least 8x8, got {nx}x{ny}"
        )));
    }
    let xs = bbox.axis(0, nx);
    let ys = bbox.axis(1, ny);
    let mut vals = vec![0.0; nx * ny];
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            vals[j * nx + i] = finite_value(f, &[x, y])?;
        }
    }
    let at = |i: usize, j: usize| vals[j * nx + i];
    let pos = |i: usize, j: usize| at(i, j) >= 0.0;
    let mut diagnostics = ExtractionDiagnostics::default();

    let n_h = (nx - 1) * ny;
    let h_id = |i: usize, j: usize| j * (nx - 1) + i;
    let v_id = |i: usize, j: usize| n_h + j * nx + i;

    let mut crossing: BTreeMap<usize, [f64; 2]> = BTreeMap::new();
    let mut cross = |id: usize, a: (usize, usize), b: (usize, usize)| -> Result<()> {
        if crossing.contains_key(&id) {
            return Ok(());
        }
        let (pa, pb) = ([xs[a.0], ys[a.1]], [xs[b.0], ys[b.1]]);
        let (p, fp) = refine(f, pa, at(a.0, a.1), pb, at(b.0, b.1), refine_tol)?;
        if fp.abs() > refine_tol {
            diagnostics.unrefined_vertices += 1;
        }
        crossing.insert(id, p);
        Ok(())
    };

    let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut link = |a: usize, b: usize| {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    };
    let mut saddles = 0;
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let s = [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)];
            // Edges: bottom, right, top, left.
            let edges = [
                (h_id(i, j), (i, j), (i + 1, j), s[0] != s[1]),
                (v_id(i + 1, j), (i + 1, j), (i + 1, j + 1), s[1] != s[2]),
                (h_id(i, j + 1), (i, j + 1), (i + 1, j + 1), s[3] != s[2]),
                (v_id(i, j), (i, j), (i, j + 1), s[0] != s[3]),
            ];
            let crossed: Vec<usize> = (0..4).filter(|&e| edges[e].3).collect();
            for &e in &crossed {
                cross(edges[e].0, edges[e].1, edges[e].2)?;
            }
            match crossed.len() {
                2 => link(edges[crossed[0]].0, edges[crossed[1]].0),
                4 => {
                    saddles += 1;
                    let centre = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
                    let c_pos = finite_value(f, &centre)? >= 0.0;
                    if c_pos == s[0] {
                        // Corners 0 and 2 join through the centre; cut off corners 1 and 3.
                        link(edges[0].0, edges[1].0);
                        link(edges[2].0, edges[3].0);
                    } else {
                        link(edges[3].0, edges[0].0);
                        link(edges[1].0, edges[2].0);
                    }
                }
                _ => {}
            }
        }
    }
    diagnostics.saddle_cells = saddles;

    let mut polylines = Vec::new();
    let mut closed = Vec::new();
    let mut visited: BTreeMap<usize, bool> = adjacency.keys().map(|k| (*k, false)).collect();
    let walk = |start: usize, visited: &mut BTreeMap<usize, bool>| -> Vec<usize> {
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut cur = start;
        loop {
            let next = adjacency[&cur].iter().copied().find(|n| !visited[n]);
            match next {
                Some(n) => {
                    visited.insert(n, true);
                    chain.push(n);
                    cur = n;
                }
                None => break,
            }
        }
        chain
    };
    let ends: Vec<usize> = adjacency
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    for s in ends {
        if !visited[&s] {
            let chain = walk(s, &mut visited);
            polylines.push(chain.iter().map(|id| crossing[id]).collect::<Vec<_>>());
            closed.push(false);
        }
    }
    let rest: Vec<usize> = adjacency.keys().copied().collect();
    for s in rest {
        if !visited[&s] {
            let chain = walk(s, &mut visited);
            let mut line: Vec<[f64; 2]> = chain.iter().map(|id| crossing[id]).collect();
            line.push(line[0]);
            polylines.push(line);
            closed.push(true);
        }
    }
    if polylines.is_empty() {
        let sign = if vals[0] >= 0.0 {
            "non-negative"
        } else {
            "negative"
        };
        diagnostics.message = Some(format!(
            "score is {sign} over the whole grid; no zero crossing"
        ));
    }
    Ok(FrontierEstimate {
        component_count: polylines.len(),
        polylines,
        closed,
        bounding_box: bbox.clone(),
        grid_resolution: (nx, ny),
        refine_tol,
        diagnostics,
    })
}

/// True iff the estimate has exactly one component.
pub fn connectivity(e: &FrontierEstimate) -> bool {
    e.component_count == 1
}

/// A geometric set as chains of points; isolated points are one-element chains.
#[derive(Debug, Clone, PartialEq)]
pub struct Chains(pub Vec<Vec<Vec<f64>>>);

impl From<&FrontierEstimate> for Chains {
    fn from(e: &FrontierEstimate) -> Self {
        Chains(
            e.polylines
                .iter()
                .map(|l| l.iter().map(|p| p.to_vec()).collect())
                .collect(),
        )
    }
}

impl From<&PointSet> for Chains {
    fn from(s: &PointSet) -> Self {
        Chains(s.iter().map(|p| vec![p.to_vec()]).collect())
    }
}

impl Chains {
    fn dim(&self) -> Option<usize> {
        self.0.iter().flatten().next().map(Vec::len)
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(Vec::is_empty)
    }

    fn densified(&self, step: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for c in &self.0 {
            if let Some(first) = c.first() {
                out.push(first.clone());
            }
            for w in c.windows(2) {
                let len = dist(&w[0], &w[1]);
                let pieces = if step > 0.0 {
                    (len / step).ceil().max(1.0) as usize
                } else {
                    1
                };
                for k in 1..=pieces {
                    let t = k as f64 / pieces as f64;
                    out.push(
                        w[0].iter()
                            .zip(&w[1])
                            .map(|(a, b)| a + t * (b - a))
                            .collect(),
                    );
                }
            }
        }
        out
    }

    fn distance_to(&self, p: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.0 {
            if c.len() == 1 {
                best = best.min(dist(p, &c[0]));
            }
            for w in c.windows(2) {
                best = best.min(point_segment(p, &w[0], &w[1]));
            }
        }
        best
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn point_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (p
        .iter()
        .zip(a)
        .zip(&ab)
        .map(|((pi, ai), d)| (pi - ai) * d)
        .sum::<f64>()
        / len2)
        .clamp(0.0, 1.0);
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(ai, d)| ai + t * d).collect();
    dist(p, &proj)
}

fn check_pair(a: &Chains, b: &Chains) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("hausdorff distance of an empty set"));
    }
    check_dim(a.dim().unwrap_or(0), b.dim().unwrap_or(0))
}

/// `sup_{p in from} dist(p, to)`, with `from` densified to spacing `step` and
/// distances measured to the segments of `to`.
pub fn directed_hausdorff(from: &Chains, to: &Chains, step: f64) -> Result<f64> {
    check_pair(from, to)?;
    Ok(from
        .densified(step)
        .iter()
        .map(|p| to.distance_to(p))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two chain sets.
pub fn hausdorff(a: &Chains, b: &Chains, step: f64) -> Result<f64> {
    Ok(directed_hausdorff(a, b, step)?.max(directed_hausdorff(b, a, step)?))
}

/// Witness of the worst strong-dominance violation between frontier vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub dominating: [f64; 2],
    pub dominated: [f64; 2],
}

/// Largest `min_i (q_i - p_i)` over vertex pairs where `p` strongly dominates
/// `q`; zero (and no witness) when no vertex strongly dominates another.
pub fn dominance_violation_depth(e: &FrontierEstimate) -> (f64, Option<ViolationWitness>) {
    let verts: Vec<[f64; 2]> = e.vertices().copied().collect();
    let mut depth = 0.0;
    let mut witness = None;
    for p in &verts {
        for q in &verts {
            let slack = (q[0] - p[0]).min(q[1] - p[1]);
            if slack > depth {
                depth = slack;
                witness = Some(ViolationWitness {
                    dominating: *p,
                    dominated: *q,
                });
            }
        }
    }
    (depth, witness)
}
