//! Exponent functions `p(·)`, `q(·)`, `λ(·)` on a domain.
//!
//! Base fields are constant, affine, sinusoidal or tabulated. Derived fields
//! (conjugates, quotients, exponents fixed by a reciprocal identity) are kept
//! as expression trees so they stay exact, pure and serializable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::grid::DomainGrid;

/// Node counts above this switch `lh0_modulus` to random pair sampling.
pub const LH0_ALL_PAIRS_MAX_NODES: usize = 2000;
pub const LH0_SAMPLED_PAIRS: usize = 1_000_000;
const LH0_SEED: u64 = 0x4c48_3000;
/// Estimates above this are reported as "not log-Hölder at this resolution".
pub const LH0_DEFAULT_CAP: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldExpr {
    Constant {
        value: f64,
    },
    /// `offset + slope·x`.
    Affine {
        offset: f64,
        slope: Vec<f64>,
    },
    /// `mean + amplitude·sin(frequency·x + phase)`.
    Sine {
        mean: f64,
        amplitude: f64,
        frequency: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// Value of the nearest tabulated point.
    Table {
        points: Vec<Point>,
        values: Vec<f64>,
    },
    /// `p/(p − 1)`.
    Conjugate {
        of: Box<FieldExpr>,
    },
    Quotient {
        numerator: Box<FieldExpr>,
        denominator: Box<FieldExpr>,
    },
    /// `1/q = 1/p − shift/(dim − λ)`.
    ReciprocalGap {
        p: Box<FieldExpr>,
        lambda: Box<FieldExpr>,
        shift: f64,
        dim: f64,
    },
    /// `1/r = offset + Σ coef/field`.
    Harmonic {
        offset: f64,
        terms: Vec<HarmonicTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicTerm {
    pub coef: f64,
    pub field: FieldExpr,
}

impl FieldExpr {
    fn value(&self, x: &Point) -> f64 {
        match self {
            FieldExpr::Constant { value } => *value,
            FieldExpr::Affine { offset, slope } => offset + dot(slope, x),
            FieldExpr::Sine {
                mean,
                amplitude,
                frequency,
                phase,
            } => mean + amplitude * (dot(frequency, x) + phase).sin(),
            FieldExpr::Table { points, values } => {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, q) in points.iter().enumerate() {
                    let d = q.distance(x);
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                values.get(best).copied().unwrap_or(f64::NAN)
            }
            FieldExpr::Conjugate { of } => {
                let p = of.value(x);
                p / (p - 1.0)
            }
            FieldExpr::Quotient {
                numerator,
                denominator,
            } => numerator.value(x) / denominator.value(x),
            FieldExpr::ReciprocalGap {
                p,
                lambda,
                shift,
                dim,
            } => 1.0 / (1.0 / p.value(x) - shift / (dim - lambda.value(x))),
            FieldExpr::Harmonic { offset, terms } => {
                let recip = terms
                    .iter()
                    .fold(*offset, |acc, t| acc + t.coef / t.field.value(x));
                1.0 / recip
            }
        }
    }

    fn range(&self) -> Interval {
        match self {
            FieldExpr::Constant { value } => Interval::point(*value),
            FieldExpr::Affine { .. } => Interval::UNBOUNDED,
            FieldExpr::Sine {
                mean, amplitude, ..
            } => Interval::new(mean - amplitude.abs(), mean + amplitude.abs()),
            FieldExpr::Table { values, .. } => values
                .iter()
                .fold(Interval::EMPTY, |i, &v| i.hull(Interval::point(v))),
            FieldExpr::Conjugate { of } => {
                let p = of.range();
                // p ↦ p/(p−1) = 1 + 1/(p−1), decreasing on (1, ∞)
                (p - Interval::point(1.0)).recip() + Interval::point(1.0)
            }
            FieldExpr::Quotient {
                numerator,
                denominator,
            } => numerator.range() * denominator.range().recip(),
            FieldExpr::ReciprocalGap {
                p,
                lambda,
                shift,
                dim,
            } => {
                let gap = (Interval::point(*dim) - lambda.range())
                    .recip()
                    .scale(*shift);
                (p.range().recip() - gap).recip()
            }
            FieldExpr::Harmonic { offset, terms } => terms
                .iter()
                .fold(Interval::point(*offset), |acc, t| {
                    acc + t.field.range().recip().scale(t.coef)
                })
                .recip(),
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            FieldExpr::Constant { .. } => true,
            FieldExpr::Affine { slope, .. } => slope.iter().all(|&s| s == 0.0),
            FieldExpr::Sine { amplitude, .. } => *amplitude == 0.0,
            FieldExpr::Table { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
            FieldExpr::Conjugate { of } => of.is_constant(),
            FieldExpr::Quotient {
                numerator,
                denominator,
            } => numerator.is_constant() && denominator.is_constant(),
            FieldExpr::ReciprocalGap { p, lambda, .. } => p.is_constant() && lambda.is_constant(),
            FieldExpr::Harmonic { terms, .. } => terms.iter().all(|t| t.field.is_constant()),
        }
    }
}

fn dot(coeffs: &[f64], x: &Point) -> f64 {
    coeffs
        .iter()
        .take(2)
        .enumerate()
        .map(|(axis, c)| c * x.coord(axis))
        .sum()
}

/// An exponent function together with the interval it is declared to take
/// values in. Evaluation clamps to that interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentField {
    expr: FieldExpr,
}

impl From<FieldExpr> for ExponentField {
    fn from(expr: FieldExpr) -> Self {
        ExponentField { expr }
    }
}

impl ExponentField {
    pub fn constant(value: f64) -> Self {
        FieldExpr::Constant { value }.into()
    }

    /// `offset + slope·x` in one dimension.
    pub fn affine(offset: f64, slope: f64) -> Self {
        FieldExpr::Affine {
            offset,
            slope: vec![slope],
        }
        .into()
    }

    pub fn affine_2d(offset: f64, slope: [f64; 2]) -> Self {
        FieldExpr::Affine {
            offset,
            slope: slope.to_vec(),
        }
        .into()
    }

    pub fn sine(mean: f64, amplitude: f64, frequency: &[f64], phase: f64) -> Self {
        FieldExpr::Sine {
            mean,
            amplitude,
            frequency: frequency.to_vec(),
            phase,
        }
        .into()
    }

    pub fn table(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(Error::config(format!(
                "table needs matching, nonempty points and values ({} vs {})",
                points.len(),
                values.len()
            )));
        }
        Ok(FieldExpr::Table { points, values }.into())
    }

    /// Samples `self` on the grid into a table field.
    pub fn tabulate(&self, grid: &DomainGrid) -> Self {
        FieldExpr::Table {
            points: grid.nodes().to_vec(),
            values: self.sample(grid),
        }
        .into()
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn kind(&self) -> &'static str {
        match self.expr {
            FieldExpr::Constant { .. } => "constant",
            FieldExpr::Affine { .. } => "affine",
            FieldExpr::Sine { .. } => "sine",
            FieldExpr::Table { .. } => "table",
            _ => "derived",
        }
    }

    /// Declared range `[lo, hi]`; may be unbounded for affine fields.
    pub fn declared_range(&self) -> (f64, f64) {
        let r = self.expr.range();
        (r.lo, r.hi)
    }

    pub fn is_constant(&self) -> bool {
        self.expr.is_constant()
    }

    /// The constant value, if the field is constant.
    pub fn constant_value(&self) -> Option<f64> {
        self.is_constant().then(|| self.value_at(&Point::ORIGIN))
    }

    /// Evaluates at `x` without checking domain membership.
    pub fn value_at(&self, x: &Point) -> f64 {
        let (lo, hi) = self.declared_range();
        let v = self.expr.value(x);
        if lo <= hi {
            v.clamp(lo, hi)
        } else {
            v
        }
    }

    /// Evaluates at a point of the domain.
    pub fn eval(&self, grid: &DomainGrid, x: &Point) -> Result<f64> {
        if !grid.contains(x) {
            return Err(Error::OutsideDomain { point: *x });
        }
        Ok(self.value_at(x))
    }

    /// Values at every grid node.
    pub fn sample(&self, grid: &DomainGrid) -> Vec<f64> {
        grid.nodes().iter().map(|x| self.value_at(x)).collect()
    }

    /// `(min, max)` over the grid nodes, standing in for ess inf / ess sup.
    pub fn bounds(&self, grid: &DomainGrid) -> (f64, f64) {
        min_max(&self.sample(grid))
    }

    /// Pointwise conjugate exponent `p/(p − 1)`. Values must exceed 1 at
    /// every node.
    pub fn conjugate(&self, grid: &DomainGrid) -> Result<Self> {
        for x in grid.nodes() {
            let v = self.value_at(x);
            if !(v > 1.0 + 1e-9) || !v.is_finite() {
                return Err(Error::DegenerateExponent {
                    value: v,
                    point: *x,
                });
            }
        }
        Ok(FieldExpr::Conjugate {
            of: Box::new(self.expr.clone()),
        }
        .into())
    }

    /// Pointwise quotient `λ(x)/p(x)`.
    pub fn lambda_over_p(lam: &ExponentField, p: &ExponentField) -> Self {
        Self::quotient(lam, p)
    }

    /// Pointwise quotient of two fields.
    pub fn quotient(numerator: &ExponentField, denominator: &ExponentField) -> Self {
        FieldExpr::Quotient {
            numerator: Box::new(numerator.expr.clone()),
            denominator: Box::new(denominator.expr.clone()),
        }
        .into()
    }

    /// The exponent `q` with `1/q = 1/p − shift/(dim − λ)`.
    pub fn reciprocal_gap(p: &ExponentField, lam: &ExponentField, shift: f64, dim: f64) -> Self {
        FieldExpr::ReciprocalGap {
            p: Box::new(p.expr.clone()),
            lambda: Box::new(lam.expr.clone()),
            shift,
            dim,
        }
        .into()
    }

    /// The exponent `r` with `1/r = offset + Σ coef/field`.
    pub fn harmonic(offset: f64, terms: &[(f64, &ExponentField)]) -> Self {
        FieldExpr::Harmonic {
            offset,
            terms: terms
                .iter()
                .map(|(coef, f)| HarmonicTerm {
                    coef: *coef,
                    field: f.expr.clone(),
                })
                .collect(),
        }
        .into()
    }

    /// Empirical log-Hölder constant, see [`lh0_modulus_capped`].
    pub fn lh0_modulus(&self, grid: &DomainGrid) -> LogHolderReport {
        lh0_modulus_capped(self, grid, LH0_DEFAULT_CAP)
    }
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Result of the log-Hölder (LH₀) diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHolderReport {
    /// `max |r(x) − r(y)|·(−log|x − y|)` over sampled pairs with `|x − y| < 1/2`.
    pub c0_estimate: f64,
    pub worst_pair: (Point, Point),
    pub is_finite: bool,
    pub pairs_examined: usize,
}

/// Estimates the LH₀ constant `C₀` of `field` on the grid.
///
/// All node pairs are examined up to [`LH0_ALL_PAIRS_MAX_NODES`] nodes;
/// larger grids use [`LH0_SAMPLED_PAIRS`] random pairs from a fixed seed.
/// `is_finite` is false once the estimate exceeds `cap`.
pub fn lh0_modulus_capped(field: &ExponentField, grid: &DomainGrid, cap: f64) -> LogHolderReport {
    let values = field.sample(grid);
    let n = grid.len();
    let score = |i: usize, j: usize| -> Option<f64> {
        let d = grid.node_distance(i, j);
        (d > 0.0 && d < 0.5).then(|| (values[i] - values[j]).abs() * -d.ln())
    };

    // (score, i, j, pairs)
    let best = if n <= LH0_ALL_PAIRS_MAX_NODES {
        let rows: Vec<(f64, usize, usize, usize)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = (0.0, i, i, 0);
                for j in i + 1..n {
                    if let Some(s) = score(i, j) {
                        best.3 += 1;
                        if s > best.0 {
                            best = (s, i, j, best.3);
                        }
                    }
                }
                best
            })
            .collect();
        rows.into_iter().fold((0.0, 0, 0, 0), |acc, r| {
            let pairs = acc.3 + r.3;
            if r.0 > acc.0 {
                (r.0, r.1, r.2, pairs)
            } else {
                (acc.0, acc.1, acc.2, pairs)
            }
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(LH0_SEED);
        let mut best = (0.0, 0, 0, 0);
        for _ in 0..LH0_SAMPLED_PAIRS {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if let Some(s) = score(i, j) {
                best.3 += 1;
                if s > best.0 {
                    best = (s, i, j, best.3);
                }
            }
        }
        best
    };

    LogHolderReport {
        c0_estimate: best.0,
        worst_pair: (grid.node(best.1), grid.node(best.2)),
        is_finite: best.0 <= cap,
        pairs_examined: best.3,
    }
}

/// Closed interval arithmetic for declared ranges. Operations that would
/// divide through zero widen to the whole line.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn hull(self, o: Interval) -> Self {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    fn recip(self) -> Self {
        if self.lo > 0.0 || self.hi < 0.0 {
            Interval::new(1.0 / self.hi, 1.0 / self.lo)
        } else {
            Interval::UNBOUNDED
        }
    }

    fn scale(self, c: f64) -> Self {
        if !self.is_bounded() {
            return if c == 0.0 {
                Interval::point(0.0)
            } else {
                Interval::UNBOUNDED
            };
        }
        let (a, b) = (self.lo * c, self.hi * c);
        Interval::new(a.min(b), a.max(b))
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        if !self.is_bounded() || !o.is_bounded() {
            return Interval::UNBOUNDED;
        }
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + Interval::new(-o.hi, -o.lo)
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        if !self.is_bounded() || !o.is_bounded() {
            return Interval::UNBOUNDED;
        }
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Interval::new(
            c.iter().copied().fold(f64::INFINITY, f64::min),
            c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}
