//! Uniform midpoint grids on bounded domains of ℝ¹ and ℝ².
//!
//! Every grid lives on a tensor lattice of cells. Intervals and rectangles
//! use the whole lattice; a disk keeps the cells whose centers lie inside it.
//! Distances between nodes are measured in lattice units (`Δcol·hx`,
//! `Δrow·hy`), so ball membership is exactly reproducible no matter how a
//! ball is enumerated.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

static NEXT_GRID_ID: AtomicU64 = AtomicU64::new(1);

const MISSING: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Interval,
    Rectangle,
    Disk,
}

/// Domain description as it appears in case files.
///
/// `bounds` is `[lo, hi]` for an interval, `[x_lo, x_hi, y_lo, y_hi]` for a
/// rectangle and `[cx, cy, radius]` for a disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub shape: ShapeKind,
    pub bounds: Vec<f64>,
    pub resolution: usize,
}

impl DomainSpec {
    pub fn interval(lo: f64, hi: f64, resolution: usize) -> Self {
        DomainSpec {
            shape: ShapeKind::Interval,
            bounds: vec![lo, hi],
            resolution,
        }
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64), resolution: usize) -> Self {
        DomainSpec {
            shape: ShapeKind::Rectangle,
            bounds: vec![x.0, x.1, y.0, y.1],
            resolution,
        }
    }

    pub fn unit_square(resolution: usize) -> Self {
        Self::rectangle((0.0, 1.0), (0.0, 1.0), resolution)
    }

    pub fn disk(center: Point, radius: f64, resolution: usize) -> Self {
        DomainSpec {
            shape: ShapeKind::Disk,
            bounds: vec![center.x, center.y, radius],
            resolution,
        }
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        DomainSpec {
            resolution,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Interval { lo: f64, hi: f64 },
    Rectangle { x: (f64, f64), y: (f64, f64) },
    Disk { center: Point, radius: f64 },
}

impl Shape {
    fn from_spec(spec: &DomainSpec) -> Result<Shape> {
        let b = &spec.bounds;
        let shape = match (spec.shape, b.len()) {
            (ShapeKind::Interval, 2) => Shape::Interval { lo: b[0], hi: b[1] },
            (ShapeKind::Rectangle, 4) => Shape::Rectangle {
                x: (b[0], b[1]),
                y: (b[2], b[3]),
            },
            (ShapeKind::Disk, 3) => Shape::Disk {
                center: Point::new(b[0], b[1]),
                radius: b[2],
            },
            (kind, len) => {
                return Err(Error::config(format!(
                    "unsupported domain: {kind:?} with {len} bounds (only dimensions 1 and 2 are supported)"
                )))
            }
        };
        let positive = match shape {
            Shape::Interval { lo, hi } => hi > lo,
            Shape::Rectangle { x, y } => x.1 > x.0 && y.1 > y.0,
            Shape::Disk { radius, .. } => radius > 0.0,
        };
        if !positive || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("domain must have positive, finite measure"));
        }
        Ok(shape)
    }

    pub fn dimension(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Shape::Interval { lo, hi } => p.x > lo && p.x < hi && p.y == 0.0,
            Shape::Rectangle { x, y } => p.x > x.0 && p.x < x.1 && p.y > y.0 && p.y < y.1,
            Shape::Disk { center, radius } => p.distance(&center) < radius,
        }
    }

    /// Membership in the closure of the domain.
    pub fn contains_closure(&self, p: &Point) -> bool {
        match *self {
            Shape::Interval { lo, hi } => p.x >= lo && p.x <= hi && p.y == 0.0,
            Shape::Rectangle { x, y } => p.x >= x.0 && p.x <= x.1 && p.y >= y.0 && p.y <= y.1,
            Shape::Disk { center, radius } => p.distance(&center) <= radius,
        }
    }

    /// Distance from `p` to the boundary, positive inside and negative
    /// outside (for 1-D shapes a point off the line is outside).
    pub fn inset(&self, p: &Point) -> f64 {
        match *self {
            Shape::Interval { lo, hi } => {
                let d = (p.x - lo).min(hi - p.x);
                if p.y == 0.0 {
                    d
                } else {
                    -p.y.abs().max(-d)
                }
            }
            Shape::Rectangle { x, y } => (p.x - x.0).min(x.1 - p.x).min(p.y - y.0).min(y.1 - p.y),
            Shape::Disk { center, radius } => radius - p.distance(&center),
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Shape::Interval { lo, hi } => hi - lo,
            Shape::Rectangle { x, y } => (x.1 - x.0).hypot(y.1 - y.0),
            Shape::Disk { radius, .. } => 2.0 * radius,
        }
    }

    /// Lebesgue measure of the continuous domain.
    pub fn exact_measure(&self) -> f64 {
        match *self {
            Shape::Interval { lo, hi } => hi - lo,
            Shape::Rectangle { x, y } => (x.1 - x.0) * (y.1 - y.0),
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn centroid(&self) -> Point {
        match *self {
            Shape::Interval { lo, hi } => Point::on_line(0.5 * (lo + hi)),
            Shape::Rectangle { x, y } => Point::new(0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1)),
            Shape::Disk { center, .. } => center,
        }
    }

    /// Bounding box `(x_lo, x_hi, y_lo, y_hi)`; 1-D shapes report `y = (0, 0)`.
    pub(crate) fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Interval { lo, hi } => (lo, hi, 0.0, 0.0),
            Shape::Rectangle { x, y } => (x.0, x.1, y.0, y.1),
            Shape::Disk { center, radius } => (
                center.x - radius,
                center.x + radius,
                center.y - radius,
                center.y + radius,
            ),
        }
    }

    /// All shapes supported here are convex.
    pub fn is_convex(&self) -> bool {
        true
    }
}

/// A discretized bounded open set with uniform midpoint cells.
pub struct DomainGrid {
    id: u64,
    spec: DomainSpec,
    shape: Shape,
    nx: usize,
    ny: usize,
    origin: (f64, f64),
    spacing: (f64, f64),
    cell_measure: f64,
    nodes: Vec<Point>,
    cells: Vec<(u32, u32)>,
    node_of_cell: Vec<u32>,
    radii: Vec<f64>,
    half_widths: Vec<Vec<i64>>,
}

impl fmt::Debug for DomainGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainGrid")
            .field("id", &self.id)
            .field("shape", &self.shape)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

/// Build the midpoint grid for `spec`.
pub fn build_grid(spec: &DomainSpec) -> Result<Arc<DomainGrid>> {
    DomainGrid::new(spec).map(Arc::new)
}

impl DomainGrid {
    pub fn new(spec: &DomainSpec) -> Result<DomainGrid> {
        let shape = Shape::from_spec(spec)?;
        let n = spec.resolution;
        if n < 4 {
            return Err(Error::config(format!(
                "resolution must be at least 4, got {n}"
            )));
        }
        let dim = shape.dimension();
        let (x_lo, x_hi, y_lo, y_hi) = shape.bounding_box();
        let hx = (x_hi - x_lo) / n as f64;
        let (ny, hy) = if dim == 1 {
            (1, 0.0)
        } else {
            (n, (y_hi - y_lo) / n as f64)
        };
        let cell_measure = if dim == 1 { hx } else { hx * hy };

        let mut nodes = Vec::new();
        let mut cells = Vec::new();
        let mut node_of_cell = vec![MISSING; n * ny];
        for row in 0..ny {
            for col in 0..n {
                let x = x_lo + (col as f64 + 0.5) * hx;
                let y = if dim == 1 {
                    0.0
                } else {
                    y_lo + (row as f64 + 0.5) * hy
                };
                let p = Point::new(x, y);
                if shape.contains(&p) {
                    node_of_cell[row * n + col] = nodes.len() as u32;
                    nodes.push(p);
                    cells.push((col as u32, row as u32));
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::config("grid has no nodes inside the domain"));
        }

        let h = if dim == 1 { hx } else { hx.min(hy) };
        let radii = geometric_radii(h, shape.diameter());
        let half_widths = radii
            .iter()
            .map(|&r| ball_half_widths(r, hx, hy, dim, n, ny))
            .collect();

        Ok(DomainGrid {
            id: NEXT_GRID_ID.fetch_add(1, Ordering::Relaxed),
            spec: spec.clone(),
            shape,
            nx: n,
            ny,
            origin: (x_lo, y_lo),
            spacing: (hx, hy),
            cell_measure,
            nodes,
            cells,
            node_of_cell,
            radii,
            half_widths,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        self.shape.dimension()
    }

    pub fn resolution(&self) -> usize {
        self.nx
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// Grid spacing along each axis; `hy = 0` in one dimension.
    pub fn spacing(&self) -> (f64, f64) {
        self.spacing
    }

    /// The smallest grid spacing.
    pub fn h(&self) -> f64 {
        if self.dimension() == 1 {
            self.spacing.0
        } else {
            self.spacing.0.min(self.spacing.1)
        }
    }

    /// Total quadrature measure, `Σ cell_measure`.
    pub fn measure(&self) -> f64 {
        self.cell_measure * self.nodes.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        self.shape.diameter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.shape.contains(p)
    }

    pub fn lattice_dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Lattice `(col, row)` of node `i`.
    pub fn cell_of(&self, i: usize) -> (usize, usize) {
        let (c, r) = self.cells[i];
        (c as usize, r as usize)
    }

    /// Node occupying lattice cell `(col, row)`, if that cell lies in the domain.
    pub fn node_at_cell(&self, col: i64, row: i64) -> Option<usize> {
        if col < 0 || row < 0 || col >= self.nx as i64 || row >= self.ny as i64 {
            return None;
        }
        let v = self.node_of_cell[row as usize * self.nx + col as usize];
        (v != MISSING).then_some(v as usize)
    }

    /// Index of the node whose coordinates equal `p` exactly.
    pub fn node_exactly_at(&self, p: &Point) -> Option<usize> {
        let (hx, hy) = self.spacing;
        let col = ((p.x - self.origin.0) / hx - 0.5).round() as i64;
        let row = if self.dimension() == 1 {
            0
        } else {
            ((p.y - self.origin.1) / hy - 0.5).round() as i64
        };
        self.node_at_cell(col, row).filter(|&i| self.nodes[i] == *p)
    }

    /// Node nearest to `p` (ties go to the lower index).
    pub fn nearest_node(&self, p: &Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.nodes.iter().enumerate() {
            let d = q.distance(p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Distance between nodes measured through their lattice offsets.
    pub fn node_distance(&self, i: usize, j: usize) -> f64 {
        let (ci, ri) = self.cells[i];
        let (cj, rj) = self.cells[j];
        lattice_distance(
            ci as i64 - cj as i64,
            ri as i64 - rj as i64,
            self.spacing.0,
            self.spacing.1,
        )
    }

    /// Radii standing in for `sup over r > 0`: `h·√2^m` below `diam(Ω)`,
    /// followed by `diam(Ω)` itself.
    pub fn radii_schedule(&self) -> &[f64] {
        &self.radii
    }

    /// Nodes of the scheduled ball `radii_schedule()[radius_index]` around
    /// node `center`, in lattice order.
    pub fn scheduled_ball(&self, center: usize, radius_index: usize) -> Vec<usize> {
        let (c, r) = self.cells[center];
        let (c, r) = (c as i64, r as i64);
        let widths = &self.half_widths[radius_index];
        let reach = widths.len() as i64 - 1;
        let mut out = Vec::new();
        for row in (r - reach)..=(r + reach) {
            let k = widths[(row - r).unsigned_abs() as usize];
            for col in (c - k)..=(c + k) {
                if let Some(j) = self.node_at_cell(col, row) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// `B̃(center, radius) = B(center, radius) ∩ Ω` as a set of nodes.
    ///
    /// When `center` is exactly a node, distances are measured in lattice
    /// units so the result agrees with the node-centred ball sums.
    pub fn ball_subset(&self, center: &Point, radius: f64) -> Result<BallSubset> {
        if !self.contains(center) {
            return Err(Error::OutsideDomain { point: *center });
        }
        if !(radius > 0.0) {
            return Err(Error::config(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        let node_indices = match self.node_exactly_at(center) {
            Some(c) => self.ball_around_node(c, radius),
            None => (0..self.len())
                .filter(|&j| self.nodes[j].distance(center) < radius)
                .collect(),
        };
        Ok(BallSubset {
            grid_id: self.id,
            center: *center,
            radius,
            node_indices,
        })
    }

    /// Nodes within lattice distance `< radius` of node `center`.
    pub fn ball_around_node(&self, center: usize, radius: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.node_distance(center, j) < radius)
            .collect()
    }

    /// `Σ_{i ∈ subset} f(node_i)·cell_measure`, or the whole-domain sum.
    pub fn integrate(&self, f: &GridFunction, subset: Option<&BallSubset>) -> Result<f64> {
        self.check_owns(f)?;
        let s: f64 = match subset {
            Some(b) => {
                if b.grid_id != self.id {
                    return Err(Error::GridMismatch);
                }
                b.node_indices.iter().map(|&i| f.samples[i]).sum()
            }
            None => f.samples.iter().sum(),
        };
        Ok(s * self.cell_measure)
    }

    pub(crate) fn check_owns(&self, f: &GridFunction) -> Result<()> {
        if f.grid.id == self.id {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

fn lattice_distance(dcol: i64, drow: i64, hx: f64, hy: f64) -> f64 {
    (dcol as f64 * hx).hypot(drow as f64 * hy)
}

/// Geometric sequence `h·√2^m` strictly below `diam`, then `diam`.
/// Even powers are formed exactly as `h·2^k`.
pub fn geometric_radii(h: f64, diam: f64) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut m: i32 = 0;
    loop {
        let r = if m % 2 == 0 {
            h * 2f64.powi(m / 2)
        } else {
            h * 2f64.powi(m / 2) * std::f64::consts::SQRT_2
        };
        if r >= diam * (1.0 - 1e-12) {
            break;
        }
        radii.push(r);
        m += 1;
    }
    radii.push(diam);
    radii.dedup();
    radii
}

fn ball_half_widths(r: f64, hx: f64, hy: f64, dim: usize, nx: usize, ny: usize) -> Vec<i64> {
    let max_rows = if dim == 1 { 0 } else { ny as i64 - 1 };
    let mut widths = Vec::new();
    for drow in 0..=max_rows {
        if lattice_distance(0, drow, hx, hy) >= r {
            break;
        }
        let rem = (r * r - (drow as f64 * hy).powi(2)).max(0.0).sqrt();
        let mut k = ((rem / hx).floor() as i64).min(nx as i64);
        while k >= 0 && lattice_distance(k, drow, hx, hy) >= r {
            k -= 1;
        }
        while k + 1 <= nx as i64 && lattice_distance(k + 1, drow, hx, hy) < r {
            k += 1;
        }
        widths.push(k);
    }
    widths
}

/// A ball intersected with the domain, as an explicit node set.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSubset {
    grid_id: u64,
    pub center: Point,
    pub radius: f64,
    pub node_indices: Vec<usize>,
}

impl BallSubset {
    pub fn len(&self) -> usize {
        self.node_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_indices.is_empty()
    }
}

/// Samples of a real function at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<DomainGrid>,
    samples: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.grid.id == other.grid.id && self.samples == other.samples
    }
}

impl GridFunction {
    pub fn from_samples(grid: &Arc<DomainGrid>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::config(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!("sample {i} is not finite")));
        }
        Ok(GridFunction {
            grid: Arc::clone(grid),
            samples,
        })
    }

    pub fn from_fn(grid: &Arc<DomainGrid>, f: impl Fn(&Point) -> f64) -> Self {
        let samples = grid.nodes().iter().map(f).collect();
        GridFunction {
            grid: Arc::clone(grid),
            samples,
        }
    }

    pub fn constant(grid: &Arc<DomainGrid>, c: f64) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            samples: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: &Arc<DomainGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    /// `χ` of a node set.
    pub fn indicator(grid: &Arc<DomainGrid>, nodes: &[usize]) -> Self {
        let mut f = Self::zeros(grid);
        for &i in nodes {
            f.samples[i] = 1.0;
        }
        f
    }

    pub(crate) fn from_raw(grid: &Arc<DomainGrid>, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        GridFunction {
            grid: Arc::clone(grid),
            samples,
        }
    }

    pub fn grid(&self) -> &Arc<DomainGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            grid: Arc::clone(&self.grid),
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid.id != other.grid.id {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `f·χ_subset`.
    pub fn restrict(&self, subset: &BallSubset) -> Self {
        let mut out = vec![0.0; self.samples.len()];
        for &i in &subset.node_indices {
            out[i] = self.samples[i];
        }
        GridFunction {
            grid: Arc::clone(&self.grid),
            samples: out,
        }
    }
}

/// Row-wise prefix sums of a node field laid out on the lattice; answers
/// node-centred ball sums in `O(rows)` time.
pub(crate) struct BallSums<'g> {
    grid: &'g DomainGrid,
    prefix: Vec<f64>,
}

impl<'g> BallSums<'g> {
    pub(crate) fn new(grid: &'g DomainGrid, values: &[f64]) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut prefix = vec![0.0; ny * (nx + 1)];
        for row in 0..ny {
            let base = row * (nx + 1);
            let mut acc = 0.0;
            for col in 0..nx {
                let v = grid.node_of_cell[row * nx + col];
                if v != MISSING {
                    acc += values[v as usize];
                }
                prefix[base + col + 1] = acc;
            }
        }
        BallSums { grid, prefix }
    }

    /// `Σ values` over the ball of radius `radii_schedule()[radius_index]`
    /// centred at node `center`.
    pub(crate) fn ball_sum(&self, center: usize, radius_index: usize) -> f64 {
        let g = self.grid;
        let (nx, ny) = (g.nx as i64, g.ny as i64);
        let (c, r) = g.cells[center];
        let (c, r) = (c as i64, r as i64);
        let widths = &g.half_widths[radius_index];
        let mut total = 0.0;
        for (drow, &k) in widths.iter().enumerate() {
            if k < 0 {
                continue;
            }
            let lo = (c - k).max(0) as usize;
            let hi = (c + k).min(nx - 1) as usize;
            let drow = drow as i64;
            for row in [r - drow, r + drow] {
                if row < 0 || row >= ny {
                    continue;
                }
                let base = row as usize * (g.nx + 1);
                total += self.prefix[base + hi + 1] - self.prefix[base + lo];
                if drow == 0 {
                    break;
                }
            }
        }
        total.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(n: usize) -> Arc<DomainGrid> {
        build_grid(&DomainSpec::interval(-1.0, 1.0, n)).unwrap()
    }

    #[test]
    fn interval_midpoint_nodes() {
        let g = interval(4);
        let xs: Vec<f64> = g.nodes().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(g.cell_measure(), 0.5);
    }

    #[test]
    fn unit_square_measure() {
        let g = build_grid(&DomainSpec::unit_square(10)).unwrap();
        assert_eq!(g.len(), 100);
        assert!((g.measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disk_measure_close_to_pi() {
        let g = build_grid(&DomainSpec::disk(Point::ORIGIN, 1.0, 50)).unwrap();
        let rel = (g.measure() - std::f64::consts::PI).abs() / std::f64::consts::PI;
        assert!(rel < 0.05, "relative measure error {rel}");
        assert!(g.nodes().iter().all(|p| g.contains(p)));
    }

    #[test]
    fn rejects_bad_domains() {
        let bad = DomainSpec {
            shape: ShapeKind::Interval,
            bounds: vec![0.0, 1.0, 2.0],
            resolution: 10,
        };
        assert!(matches!(DomainGrid::new(&bad), Err(Error::Config(_))));
        assert!(DomainGrid::new(&DomainSpec::interval(0.0, 1.0, 3)).is_err());
        assert!(DomainGrid::new(&DomainSpec::interval(1.0, 1.0, 10)).is_err());
    }

    #[test]
    fn ball_subset_examples() {
        let g = interval(4);
        let all = g.ball_subset(&Point::on_line(0.0), 10.0).unwrap();
        assert_eq!(all.node_indices, vec![0, 1, 2, 3]);
        let small = g.ball_subset(&Point::on_line(0.0), 0.3).unwrap();
        assert_eq!(small.node_indices, vec![1, 2]);
        assert!(matches!(
            g.ball_subset(&Point::on_line(1.5), 0.3),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn radii_schedule_examples() {
        let g = interval(4);
        let r = g.radii_schedule();
        let want = [
            0.5,
            0.5 * std::f64::consts::SQRT_2,
            1.0,
            std::f64::consts::SQRT_2,
            2.0,
        ];
        assert_eq!(r.len(), want.len());
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }

        let g = interval(100);
        let r = g.radii_schedule();
        assert!((r[0] - 0.02).abs() < 1e-15);
        assert!((r[1] - 0.0282842712).abs() < 1e-9);
        assert!((r[2] - 0.04).abs() < 1e-15);
        assert_eq!(*r.last().unwrap(), 2.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integrate_examples() {
        let g = interval(1000);
        let one = GridFunction::constant(&g, 1.0);
        assert!((g.integrate(&one, None).unwrap() - 2.0).abs() < 1e-12);
        let sq = GridFunction::from_fn(&g, |p| p.x * p.x);
        assert!((g.integrate(&sq, None).unwrap() - 2.0 / 3.0).abs() < 1e-5);
        let ball = g.ball_subset(&Point::on_line(0.0005), 0.01).unwrap();
        let v = g.integrate(&one, Some(&ball)).unwrap();
        assert!((v - ball.len() as f64 * g.cell_measure()).abs() < 1e-15);

        let other = interval(1000);
        assert!(matches!(
            other.integrate(&one, None),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn ball_sums_match_explicit_balls() {
        for spec in [
            DomainSpec::interval(-1.0, 1.0, 37),
            DomainSpec::rectangle((0.0, 2.0), (0.0, 1.0), 13),
            DomainSpec::disk(Point::new(0.2, -0.1), 1.0, 15),
        ] {
            let g = build_grid(&spec).unwrap();
            let values: Vec<f64> = (0..g.len()).map(|i| 1.0 + (i % 7) as f64).collect();
            let sums = BallSums::new(&g, &values);
            for c in (0..g.len()).step_by(5) {
                for (k, &r) in g.radii_schedule().iter().enumerate() {
                    let brute: f64 = g.ball_around_node(c, r).iter().map(|&j| values[j]).sum();
                    let fast = sums.ball_sum(c, k);
                    let mut listed = g.scheduled_ball(c, k);
                    listed.sort_unstable();
                    assert_eq!(listed, g.ball_around_node(c, r));
                    assert!(
                        (brute - fast).abs() < 1e-9 * brute.max(1.0),
                        "{spec:?} c={c} r={r}"
                    );
                }
            }
        }
    }
}
