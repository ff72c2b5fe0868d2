//! Empirical checks of the auxiliary estimates the weighted bound rests on:
//! modular/norm comparison, ball characteristic functions, radius powers
//! under a log-Hölder exponent, the weighted power integral and `‖χ_Ω‖`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{min_max, ExponentField, LH0_ALL_PAIRS_MAX_NODES, LH0_SAMPLED_PAIRS};
use crate::geometry::Point;
use crate::grid::{DomainGrid, GridFunction};
use crate::norms::{lebesgue_norm, morrey_modular, morrey_norm};
use crate::operators::lattice_ball_measure;
use crate::quadrature::{power_integral_1d, power_integral_cell_2d};
use crate::root::solve_unit_level;

/// Relative slack allowed on the bounds that hold exactly in exact arithmetic.
const SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularNormCheck {
    pub modular: f64,
    pub norm: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    /// `C₂^{1/p₋}` with `C₂ = max(modular, 1)`.
    pub norm_bound: f64,
    /// `C₁^{p₊}` with `C₁ = max(norm, 1)`.
    pub modular_bound: f64,
    pub holds: bool,
}

/// Morrey modular ≤ `C₂` ⇒ norm ≤ `C₂^{1/p₋}`, and norm ≤ `C₁` ⇒ modular ≤ `C₁^{p₊}`.
pub fn modular_to_norm_check(
    f: &GridFunction,
    p: &ExponentField,
    lam: &ExponentField,
) -> Result<ModularNormCheck> {
    let grid = f.grid();
    let modular = morrey_modular(f, p, lam)?;
    let norm = morrey_norm(f, p, lam)?.value;
    let (p_minus, p_plus) = p.bounds(grid);
    let norm_bound = modular.max(1.0).powf(1.0 / p_minus);
    let modular_bound = norm.max(1.0).powf(p_plus);
    Ok(ModularNormCheck {
        modular,
        norm,
        p_minus,
        p_plus,
        norm_bound,
        modular_bound,
        holds: norm <= norm_bound * (1.0 + SLACK) && modular <= modular_bound * (1.0 + SLACK),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallRatio {
    pub center: Point,
    pub radius: f64,
    pub ratio: f64,
}

/// `max ‖χ_{B̃(x,r)}‖_{p(·)} / |B(x,r)|^{1/p(x)}` over node centres and
/// scheduled radii, with `|B|` measured by the node quadrature.
pub fn ball_characteristic_ratio(grid: &DomainGrid, p: &ExponentField) -> Result<BallRatio> {
    let ps = p.sample(grid);
    let cell = grid.cell_measure();
    let radii = grid.radii_schedule();
    let volumes: Vec<f64> = radii
        .iter()
        .map(|&r| lattice_ball_measure(grid, r))
        .collect();
    let per_center: Vec<Result<BallRatio>> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let mut best = BallRatio {
                center: grid.node(x),
                radius: radii[0],
                ratio: 0.0,
            };
            for (k, &r) in radii.iter().enumerate() {
                let ball: Vec<f64> = grid.scheduled_ball(x, k).iter().map(|&j| ps[j]).collect();
                let hi = (1.0 + ball.len() as f64 * cell).max(1.0);
                let norm = solve_unit_level(
                    |eta| cell * ball.iter().map(|&e| eta.powf(-e)).sum::<f64>(),
                    hi,
                )?
                .value;
                let ratio = norm / volumes[k].powf(1.0 / ps[x]);
                if ratio > best.ratio {
                    best = BallRatio {
                        center: grid.node(x),
                        radius: r,
                        ratio,
                    };
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<BallRatio> = None;
    for b in per_center {
        let b = b?;
        if best.map_or(true, |cur| b.ratio > cur.ratio) {
            best = Some(b);
        }
    }
    Ok(best.expect("grids have at least one node"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusPowerCheck {
    /// `max |λ(x) − λ(y)|·(−log|x − y|)` over the examined pairs closer than 1/2.
    pub c0: f64,
    /// Bound `C = exp(max(c0, osc(λ)·max(log 2, |log diam Ω|)))`.
    pub constant: f64,
    /// `max r^{λ(y) − λ(x)}` over examined pairs and scheduled `r ≥ |x − y|`.
    pub max_ratio: f64,
    pub pairs_examined: usize,
    pub holds: bool,
}

/// `r^{−λ(x)} / r^{−λ(y)} ∈ [1/C, C]` whenever `|x − y| ≤ r`.
///
/// For `r < 1/2` the exponent is bounded by the log-Hölder constant; for
/// `1/2 ≤ r ≤ diam Ω` by the oscillation of `λ` times `max |log r|`. All
/// node pairs are examined on small grids, seeded random pairs otherwise.
pub fn radius_power_check(grid: &DomainGrid, lam: &ExponentField, seed: u64) -> RadiusPowerCheck {
    let ls = lam.sample(grid);
    let (lo, hi) = min_max(&ls);
    let radii = grid.radii_schedule();
    let diam = grid.diameter();
    // log of the worst ratio for one pair: the largest |log r| over scheduled r ≥ d
    let pair = |i: usize, j: usize| -> (f64, f64) {
        let d = grid.node_distance(i, j);
        let dl = (ls[i] - ls[j]).abs();
        let first = radii.iter().copied().find(|&r| r >= d).unwrap_or(diam);
        let log_r = first.ln().abs().max(radii[radii.len() - 1].ln().abs());
        let lh = if d > 0.0 && d < 0.5 {
            dl * -d.ln()
        } else {
            0.0
        };
        (dl * log_r, lh)
    };
    let n = grid.len();
    let (worst, c0, examined) = if n <= LH0_ALL_PAIRS_MAX_NODES {
        let rows: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| pair(i, j))
                    .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)))
            })
            .collect();
        let (w, c) = rows
            .into_iter()
            .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        (w, c, n * (n - 1) / 2)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = 0.0f64;
        let mut c = 0.0f64;
        for _ in 0..LH0_SAMPLED_PAIRS {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (a, b) = pair(i, j);
            w = w.max(a);
            c = c.max(b);
        }
        (w, c, LH0_SAMPLED_PAIRS)
    };
    let spread = (hi - lo) * 2f64.ln().max(diam.ln().abs());
    let bound = c0.max(spread);
    RadiusPowerCheck {
        c0,
        constant: bound.exp(),
        max_ratio: worst.exp(),
        pairs_examined: examined,
        holds: worst <= bound * (1.0 + SLACK) + SLACK,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralBoundRow {
    pub radius: f64,
    pub integral: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralBoundReport {
    pub x0: Point,
    pub rows: Vec<IntegralBoundRow>,
    pub max_ratio: f64,
}

/// `∫_{B̃(x₀,r)} |x − x₀|^{λ(x)−n} dx / r^{λ(x₀)}` over the radii schedule.
///
/// `λ` is frozen at its node value on each cell and the power is
/// integrated over the part of the cell inside the ball: exactly in 1-D; in
/// 2-D by the polar rule on the cell centred at `x₀` and 4×4 sub-cell
/// midpoints elsewhere.
pub fn integral_bound_check(
    grid: &DomainGrid,
    lam: &ExponentField,
    x0: &Point,
) -> Result<IntegralBoundReport> {
    if !grid.contains(x0) {
        return Err(Error::OutsideDomain { point: *x0 });
    }
    let n = grid.dimension() as f64;
    let ls = lam.sample(grid);
    let lam0 = lam.value_at(x0);
    if ls.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::config("the power |x − x₀|^{λ − n} needs λ > 0"));
    }
    let (hx, hy) = grid.spacing();
    let centre_node = grid.node_exactly_at(x0);
    let rows: Vec<IntegralBoundRow> = grid
        .radii_schedule()
        .par_iter()
        .map(|&r| {
            let integral: f64 = grid
                .nodes()
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let e = ls[j] - n;
                    if grid.dimension() == 1 {
                        let u = (c.x - 0.5 * hx).max(x0.x - r) - x0.x;
                        let v = (c.x + 0.5 * hx).min(x0.x + r) - x0.x;
                        if v > u {
                            power_integral_1d(u, v, e)
                        } else {
                            0.0
                        }
                    } else if Some(j) == centre_node {
                        power_integral_cell_2d(hx, hy, e, r)
                    } else {
                        let reach = 0.5 * hx.hypot(hy);
                        let d = c.distance(x0);
                        if d - reach >= r {
                            return 0.0;
                        }
                        let mut s = 0.0;
                        for a in 0..4 {
                            for b in 0..4 {
                                let pt = Point::new(
                                    c.x + (a as f64 - 1.5) * hx / 4.0,
                                    c.y + (b as f64 - 1.5) * hy / 4.0,
                                );
                                let dd = pt.distance(x0);
                                if dd < r && dd > 0.0 {
                                    s += dd.powf(e);
                                }
                            }
                        }
                        s * hx * hy / 16.0
                    }
                })
                .sum();
            IntegralBoundRow {
                radius: r,
                integral,
                ratio: integral / r.powf(lam0),
            }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(IntegralBoundReport {
        x0: *x0,
        rows,
        max_ratio,
    })
}

/// `(‖χ_Ω‖_{s(·)}, 1 + |Ω|)`.
pub fn char_estimate(grid: &std::sync::Arc<DomainGrid>, s: &ExponentField) -> Result<(f64, f64)> {
    let chi = GridFunction::constant(grid, 1.0);
    let norm = lebesgue_norm(&chi, s, None)?.value;
    Ok((norm, 1.0 + grid.measure()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};

    #[test]
    fn modular_norm_relations() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 200)).unwrap();
        let p = ExponentField::affine(2.0, 0.5);
        let lam = ExponentField::constant(0.3);
        for scale in [0.1, 1.0, 7.0] {
            let f = GridFunction::from_fn(&g, |x| scale * (3.0 * x.x).cos().abs());
            let c = modular_to_norm_check(&f, &p, &lam).unwrap();
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn ball_ratio_of_constant_exponent_is_at_most_one() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 64)).unwrap();
        let r = ball_characteristic_ratio(&g, &ExponentField::constant(2.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
        let v = ball_characteristic_ratio(&g, &ExponentField::affine(2.0, 0.5)).unwrap();
        assert!(v.ratio.is_finite() && v.ratio > 0.0);
    }

    #[test]
    fn radius_powers() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 300)).unwrap();
        let c = radius_power_check(&g, &ExponentField::constant(0.4), 0);
        assert_eq!(c.max_ratio, 1.0);
        let c = radius_power_check(&g, &ExponentField::sine(0.4, 0.1, &[2.0], 0.0), 0);
        assert!(c.holds && c.max_ratio > 1.0, "{c:?}");
    }

    #[test]
    fn integral_bound_exact_in_one_dimension() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 500)).unwrap();
        let rep = integral_bound_check(&g, &ExponentField::constant(0.5), &Point::ORIGIN).unwrap();
        for row in rep.rows.iter().filter(|r| r.radius <= 1.0) {
            assert!((row.ratio - 4.0).abs() < 1e-6, "{row:?}");
        }
        // the cell integrals are exact for any centre
        let rep =
            integral_bound_check(&g, &ExponentField::constant(0.5), &Point::on_line(0.25)).unwrap();
        assert!((rep.rows[0].ratio - 4.0).abs() < 1e-6);
    }

    #[test]
    fn integral_bound_in_the_plane() {
        let g = build_grid(&DomainSpec::rectangle((-1.0, 1.0), (-1.0, 1.0), 41)).unwrap();
        let x0 = g.node(g.len() / 2);
        let rep = integral_bound_check(&g, &ExponentField::constant(1.0), &x0).unwrap();
        // ∫_{|y|<r} |y|^{-1} dy = 2πr
        for row in rep.rows.iter().filter(|r| r.radius <= 1.0) {
            let rel = row.ratio / (2.0 * std::f64::consts::PI) - 1.0;
            assert!(rel.abs() < 0.05, "{row:?}");
        }
    }

    #[test]
    fn characteristic_function_bound() {
        let g = build_grid(&DomainSpec::interval(-1.0, 1.0, 200)).unwrap();
        for s in [
            ExponentField::constant(1.0),
            ExponentField::affine(2.0, 0.9),
            ExponentField::constant(40.0),
        ] {
            let (norm, bound) = char_estimate(&g, &s).unwrap();
            assert!(norm <= bound);
        }
    }
}
