//! The fractional integral `I_γ`, its three-region split, the fractional
//! maximal operator `M_σ`, means, power weights and the discrete gradient.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::grid::{BallSums, DomainGrid, GridFunction};
use crate::quadrature::singular_cell_integral;

/// Order of the fractional integral, validated against the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub gamma: f64,
}

impl KernelSpec {
    pub fn new(gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < dim as f64) {
            return Err(Error::config(format!(
                "fractional order γ = {gamma} must lie in (0, {dim})"
            )));
        }
        Ok(KernelSpec { gamma })
    }
}

/// Quadrature weights `w(Δcol, Δrow)` of the kernel `|x − y|^{γ−n}`,
/// indexed by absolute lattice offset. Off-diagonal cells use the midpoint
/// value times the cell measure; the diagonal cell carries the exact
/// integral of the kernel over the cell.
struct KernelTable {
    nx: usize,
    weights: Vec<f64>,
}

impl KernelTable {
    fn new(grid: &DomainGrid, gamma: f64) -> Self {
        let (nx, ny) = grid.lattice_dims();
        let (hx, hy) = grid.spacing();
        let dim = grid.dimension();
        let e = gamma - dim as f64;
        let cell = grid.cell_measure();
        let mut weights = vec![0.0; nx * ny];
        for dr in 0..ny {
            for dc in 0..nx {
                weights[dr * nx + dc] = if dr == 0 && dc == 0 {
                    singular_cell_integral(dim, (hx, hy), e, f64::INFINITY)
                } else {
                    (dc as f64 * hx).hypot(dr as f64 * hy).powf(e) * cell
                };
            }
        }
        KernelTable { nx, weights }
    }

    #[inline]
    fn weight(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        let dc = a.0.abs_diff(b.0);
        let dr = a.1.abs_diff(b.1);
        self.weights[dr * self.nx + dc]
    }
}

/// `I_γ f(x) = ∫_Ω f(y) |x − y|^{γ−n} dy` at every node.
pub fn fractional_integral(f: &GridFunction, gamma: f64) -> Result<GridFunction> {
    let grid = f.grid();
    KernelSpec::new(gamma, grid.dimension())?;
    let table = KernelTable::new(grid, gamma);
    let samples = f.samples();
    let cells: Vec<(usize, usize)> = (0..grid.len()).map(|i| grid.cell_of(i)).collect();
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let ci = cells[i];
            samples
                .iter()
                .zip(&cells)
                .map(|(&v, &cj)| {
                    if v == 0.0 {
                        0.0
                    } else {
                        v * table.weight(ci, cj)
                    }
                })
                .sum()
        })
        .collect();
    Ok(GridFunction::from_raw(grid, out))
}

/// `I_γ f = J₁ + J₂ + J₃`, splitting the `y` integral at every `x` into
/// `|y − x₀| < |x − x₀|/2`, the annulus up to `2|x − x₀|`, and the rest.
pub fn fractional_integral_split(
    f: &GridFunction,
    gamma: f64,
    x0: &Point,
) -> Result<(GridFunction, GridFunction, GridFunction)> {
    let grid = f.grid();
    KernelSpec::new(gamma, grid.dimension())?;
    if !grid.contains(x0) {
        return Err(Error::OutsideDomain { point: *x0 });
    }
    let table = KernelTable::new(grid, gamma);
    let samples = f.samples();
    let cells: Vec<(usize, usize)> = (0..grid.len()).map(|i| grid.cell_of(i)).collect();
    let to_x0: Vec<f64> = grid.nodes().iter().map(|y| y.distance(x0)).collect();
    let parts: Vec<[f64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let d = to_x0[i];
            let mut acc = [0.0; 3];
            for j in 0..samples.len() {
                if samples[j] == 0.0 {
                    continue;
                }
                let region = if to_x0[j] < 0.5 * d {
                    0
                } else if to_x0[j] < 2.0 * d {
                    1
                } else {
                    2
                };
                acc[region] += samples[j] * table.weight(cells[i], cells[j]);
            }
            acc
        })
        .collect();
    let pick = |k: usize| GridFunction::from_raw(grid, parts.iter().map(|a| a[k]).collect());
    Ok((pick(0), pick(1), pick(2)))
}

/// Volume of the full Euclidean ball `B(z, r)`.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    if dim == 1 {
        2.0 * r
    } else {
        PI * r * r
    }
}

/// `|B(z, r)|` as seen by the node quadrature: the number of points of the
/// infinite lattice `(i·hx, j·hy)` at distance `< r` from the origin, times
/// the cell measure. Tends to `ball_volume` as `h → 0`.
pub fn lattice_ball_measure(grid: &DomainGrid, r: f64) -> f64 {
    let (hx, hy) = grid.spacing();
    let cols = |rem: f64| {
        let mut k = (rem / hx).floor() as i64;
        while k >= 0 && (k as f64 * hx) >= rem {
            k -= 1;
        }
        while ((k + 1) as f64 * hx) < rem {
            k += 1;
        }
        2 * k + 1
    };
    let count = if grid.dimension() == 1 {
        cols(r)
    } else {
        let mut total = 0;
        let mut j = 0i64;
        while (j as f64 * hy) < r {
            let c = (0..)
                .map(|k: i64| k)
                .take_while(|&k| (k as f64 * hx).hypot(j as f64 * hy) < r)
                .count() as i64;
            let row = 2 * c - 1;
            total += if j == 0 { row } else { 2 * row };
            j += 1;
        }
        total
    };
    count.max(0) as f64 * grid.cell_measure()
}

/// `M_σ f(x) = max |B(z,r)|^{σ/n − 1} ∫_{B̃(z,r)} |f|` over node centres `z`
/// and scheduled radii with `x ∈ B(z, r)`. `|B(z,r)|` is the lattice
/// measure of the whole ball, so a constant averages to itself on balls
/// inside `Ω`.
pub fn fractional_maximal(f: &GridFunction, sigma: f64) -> Result<GridFunction> {
    let grid = f.grid();
    let dim = grid.dimension();
    if !(sigma >= 0.0 && sigma < dim as f64) {
        return Err(Error::config(format!("σ = {sigma} must lie in [0, {dim})")));
    }
    let radii = grid.radii_schedule();
    let cell = grid.cell_measure();
    let density: Vec<f64> = f.samples().iter().map(|v| v.abs() * cell).collect();
    let sums = BallSums::new(grid, &density);
    let power = sigma / dim as f64 - 1.0;
    // averages[k][z]
    let averages: Vec<Vec<f64>> = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let norm = lattice_ball_measure(grid, r).powf(power);
            (0..grid.len())
                .map(|z| norm * sums.ball_sum(z, k))
                .collect()
        })
        .collect();
    // the lattice metric is symmetric: x ∈ B(z, r) ⇔ z ∈ B(x, r)
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let mut best = 0.0f64;
            for (k, avg) in averages.iter().enumerate() {
                for z in grid.scheduled_ball(x, k) {
                    best = best.max(avg[z]);
                }
            }
            best
        })
        .collect();
    Ok(GridFunction::from_raw(grid, out))
}

/// `f_Ω = (1/|Ω|) ∫_Ω f`.
pub fn mean_value(f: &GridFunction) -> f64 {
    let grid = f.grid();
    f.samples().iter().sum::<f64>() / grid.len() as f64
}

/// `|∇f|` by central differences, with second-order one-sided differences
/// where a neighbour is missing.
pub fn gradient_magnitude(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let s = f.samples();
    let (hx, hy) = grid.spacing();
    let axes: &[(i64, i64, f64)] = if grid.dimension() == 1 {
        &[(1, 0, 0.0)]
    } else {
        &[(1, 0, 0.0), (0, 1, 0.0)]
    };
    let out = (0..grid.len())
        .map(|i| {
            let (c, r) = grid.cell_of(i);
            let (c, r) = (c as i64, r as i64);
            let mut sq = 0.0;
            for &(dc, dr, _) in axes {
                let h = if dc == 1 { hx } else { hy };
                let at = |k: i64| grid.node_at_cell(c + k * dc, r + k * dr).map(|j| s[j]);
                let d = match (at(-2), at(-1), at(1), at(2)) {
                    (_, Some(m), Some(p), _) => (p - m) / (2.0 * h),
                    (_, None, Some(p1), Some(p2)) => (-3.0 * s[i] + 4.0 * p1 - p2) / (2.0 * h),
                    (Some(m2), Some(m1), None, _) => (3.0 * s[i] - 4.0 * m1 + m2) / (2.0 * h),
                    (_, None, Some(p), None) => (p - s[i]) / h,
                    (None, Some(m), None, _) => (s[i] - m) / h,
                    _ => 0.0,
                };
                sq += d * d;
            }
            sq.sqrt()
        })
        .collect();
    GridFunction::from_raw(grid, out)
}

/// `|x − x₀|^e` at every node. If `x₀` is a node and `e < 0`, that node
/// carries the cell average of the power instead of `∞`.
pub fn weight_power(grid: &Arc<DomainGrid>, x0: &Point, exponent: f64) -> GridFunction {
    weight_field(grid, x0, &vec![exponent; grid.len()])
}

/// `|x − x₀|^{e(x)}` with a per-node exponent.
pub fn weight_field(grid: &Arc<DomainGrid>, x0: &Point, exponents: &[f64]) -> GridFunction {
    let at = grid.node_exactly_at(x0);
    let out = grid
        .nodes()
        .iter()
        .zip(exponents)
        .enumerate()
        .map(|(i, (x, &e))| {
            if Some(i) == at && e < 0.0 {
                singular_cell_average(grid, e)
            } else {
                x.distance(x0).powf(e)
            }
        })
        .collect();
    GridFunction::from_raw(grid, out)
}

/// `(1/|cell|) ∫_cell |y|^e dy` for the cell centred at the singularity.
pub fn singular_cell_average(grid: &DomainGrid, e: f64) -> f64 {
    singular_cell_integral(grid.dimension(), grid.spacing(), e, f64::INFINITY) / grid.cell_measure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};

    fn interval(n: usize) -> Arc<DomainGrid> {
        build_grid(&DomainSpec::interval(-1.0, 1.0, n)).unwrap()
    }

    fn closed_form(x: f64, gamma: f64) -> f64 {
        ((1.0 + x).powf(gamma) + (1.0 - x).powf(gamma)) / gamma
    }

    #[test]
    fn constant_density_against_antiderivative() {
        let g = interval(2000);
        let one = GridFunction::constant(&g, 1.0);
        let i = fractional_integral(&one, 0.5).unwrap();
        let worst = g
            .nodes()
            .iter()
            .zip(i.samples())
            .map(|(x, v)| (v - closed_form(x.x, 0.5)).abs() / closed_form(x.x, 0.5))
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
        let mid = i.samples()[1000];
        assert!((mid - 4.0).abs() < 1e-2);
    }

    #[test]
    fn zero_positivity_and_gamma_range() {
        let g = interval(100);
        let z = fractional_integral(&GridFunction::zeros(&g), 0.3).unwrap();
        assert!(z.is_zero());
        let f = GridFunction::from_fn(&g, |x| x.x.abs());
        assert!(fractional_integral(&f, 0.3)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v >= 0.0));
        assert!(fractional_integral(&f, 1.0).is_err());
        assert!(fractional_integral(&f, 0.0).is_err());
    }

    #[test]
    fn kernel_symmetry_single_cell() {
        for spec in [
            DomainSpec::interval(-1.0, 1.0, 50),
            DomainSpec::unit_square(12),
        ] {
            let g = build_grid(&spec).unwrap();
            let y0 = 7;
            let f = GridFunction::indicator(&g, &[y0]);
            let gamma = 0.6;
            let i = fractional_integral(&f, gamma).unwrap();
            let n = g.dimension() as f64;
            for x in 0..g.len() {
                if x == y0 {
                    continue;
                }
                let want = g.node_distance(x, y0).powf(gamma - n);
                let got = i.samples()[x] / g.cell_measure();
                assert!((got - want).abs() < 1e-12 * want);
            }
        }
    }

    #[test]
    fn split_regions() {
        let g = interval(200);
        let x0 = Point::on_line(-0.205);
        let f = GridFunction::from_fn(&g, |y| if y.distance(&x0) < 0.1 { 1.0 } else { 0.0 });
        let (j1, j2, j3) = fractional_integral_split(&f, 0.5, &x0).unwrap();
        let i = fractional_integral(&f, 0.5).unwrap();
        // node at distance 0.5 from x₀
        let x = g.nearest_node(&Point::on_line(0.295));
        assert!((g.node(x).distance(&x0) - 0.5).abs() < 1e-9);
        assert_eq!(j2.samples()[x], 0.0);
        assert_eq!(j3.samples()[x], 0.0);
        assert_eq!(j1.samples()[x], i.samples()[x]);
        assert!(fractional_integral_split(&f, 0.5, &Point::on_line(2.0)).is_err());
    }

    #[test]
    fn maximal_of_constant() {
        let g = interval(64);
        let c = GridFunction::constant(&g, 2.5);
        let m = fractional_maximal(&c, 0.0).unwrap();
        // the smallest scheduled ball is a single cell inside Ω
        assert!(m.samples().iter().all(|&v| (v - 2.5).abs() < 1e-12));
        assert!(fractional_maximal(&GridFunction::zeros(&g), 0.5)
            .unwrap()
            .is_zero());
        assert!(fractional_maximal(&c, 1.0).is_err());
    }

    #[test]
    fn maximal_dominates_every_ball_average() {
        for spec in [
            DomainSpec::interval(-1.0, 1.0, 24),
            DomainSpec::disk(Point::ORIGIN, 1.0, 10),
        ] {
            let g = build_grid(&spec).unwrap();
            let f = GridFunction::from_fn(&g, |x| (4.0 * x.x).sin() + x.y);
            let sigma = 0.3;
            let m = fractional_maximal(&f, sigma).unwrap();
            let dim = g.dimension();
            // brute-force oracle: enumerate every (z, r) and scatter to members
            let mut brute = vec![0.0f64; g.len()];
            for z in 0..g.len() {
                for &r in g.radii_schedule() {
                    let ball = g.ball_around_node(z, r);
                    let s: f64 =
                        ball.iter().map(|&j| f.samples()[j].abs()).sum::<f64>() * g.cell_measure();
                    let v = lattice_ball_measure(&g, r).powf(sigma / dim as f64 - 1.0) * s;
                    for &x in &ball {
                        brute[x] = brute[x].max(v);
                    }
                }
            }
            for (a, b) in m.samples().iter().zip(&brute) {
                assert!((a - b).abs() < 1e-12 * b.max(1.0));
            }
        }
    }

    #[test]
    fn lattice_measure_tends_to_ball_volume() {
        let g = interval(64);
        assert_eq!(lattice_ball_measure(&g, g.h()), g.h());
        assert_eq!(lattice_ball_measure(&g, 1.01 * g.h()), 3.0 * g.h());
        let sq = build_grid(&DomainSpec::unit_square(400)).unwrap();
        let r = 0.3;
        let rel = lattice_ball_measure(&sq, r) / ball_volume(2, r) - 1.0;
        assert!(rel.abs() < 1e-2, "{rel}");
        // brute count on a small lattice
        let sq = build_grid(&DomainSpec::unit_square(10)).unwrap();
        let h = sq.h();
        let r = 2.3 * h;
        let mut n = 0;
        for i in -5i64..=5 {
            for j in -5i64..=5 {
                if ((i as f64 * h).hypot(j as f64 * h)) < r {
                    n += 1;
                }
            }
        }
        assert!((lattice_ball_measure(&sq, r) - n as f64 * h * h).abs() < 1e-15);
    }

    #[test]
    fn mean_value_examples() {
        let g = interval(1000);
        assert!((mean_value(&GridFunction::constant(&g, 3.0)) - 3.0).abs() < 1e-12);
        assert!(mean_value(&GridFunction::from_fn(&g, |x| x.x)).abs() < 1e-12);
        assert!((mean_value(&GridFunction::from_fn(&g, |x| x.x * x.x)) - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn gradient_examples() {
        let g = interval(100);
        let lin = gradient_magnitude(&GridFunction::from_fn(&g, |x| x.x));
        assert!(lin.samples().iter().all(|&v| (v - 1.0).abs() < 1e-10));
        let sq = gradient_magnitude(&GridFunction::from_fn(&g, |x| x.x * x.x));
        for (x, v) in g.nodes().iter().zip(sq.samples()) {
            assert!((v - 2.0 * x.x.abs()).abs() < 1e-10);
        }
        assert!(gradient_magnitude(&GridFunction::constant(&g, 4.0)).is_zero());

        let sq2 = build_grid(&DomainSpec::unit_square(20)).unwrap();
        let f = GridFunction::from_fn(&sq2, |p| 3.0 * p.x - 4.0 * p.y);
        assert!(gradient_magnitude(&f)
            .samples()
            .iter()
            .all(|&v| (v - 5.0).abs() < 1e-10));
    }

    #[test]
    fn weight_examples() {
        let g = interval(4);
        let w0 = weight_power(&g, &Point::on_line(0.0), 0.0);
        assert!(w0.samples().iter().all(|&v| v == 1.0));
        let w1 = weight_power(&g, &Point::on_line(0.0), 1.0);
        assert_eq!(w1.samples()[2], 0.25);
    }

    /// Adaptive Simpson on [a, b].
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
            let right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, left, tol / 2.0, depth - 1) + rec(f, m, b, right, tol / 2.0, depth - 1)
        }
        rec(f, a, b, whole, tol, depth)
    }

    #[test]
    fn singular_cell_average_1d_against_adaptive_quadrature() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 41)).unwrap();
        let x0 = g.node(20);
        let h = g.h();
        for e in [-0.5, -0.25, -0.8] {
            let w = weight_power(&g, &x0, e);
            // ∫_{-h/2}^{h/2} |t|^e dt = 2 ∫_0^{(h/2)^{1/5}} 5u^{5e+4} du via t = u⁵
            let oracle =
                2.0 * adaptive_simpson(
                    &|u: f64| 5.0 * u.powf(5.0 * e + 4.0),
                    0.0,
                    (h / 2.0).powf(0.2),
                    1e-14,
                    50,
                ) / h;
            assert!((w.samples()[20] - oracle).abs() < 1e-8 * oracle, "e={e}");
            assert!((w.samples()[0] - g.node(0).distance(&x0).powf(e)).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_cell_average_2d_against_duffy_rule() {
        let g = build_grid(&DomainSpec::rectangle((-1.0, 1.0), (-1.0, 1.0), 21)).unwrap();
        let x0 = g.node(g.len() / 2);
        let a = 0.5 * g.h();
        for e in [-1.5, -0.7, -0.2] {
            // Duffy: 8 ∫_0^a ∫_0^1 u^{e+1} (1+v²)^{e/2} dv du
            let inner =
                adaptive_simpson(&|v: f64| (1.0 + v * v).powf(e / 2.0), 0.0, 1.0, 1e-14, 50);
            let oracle = 8.0 * a.powf(e + 2.0) / (e + 2.0) * inner / g.cell_measure();
            let w = weight_power(&g, &x0, e);
            let got = w.samples()[g.len() / 2];
            assert!(
                (got - oracle).abs() < 1e-9 * oracle,
                "e={e}: {got} vs {oracle}"
            );
        }
    }
}
