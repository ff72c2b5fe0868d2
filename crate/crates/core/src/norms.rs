//! Variable-exponent modulars and Luxemburg norms, Lebesgue and Morrey.
//!
//! The Lebesgue modular is `ρ(f) = Σ |f(x_i)|^{p(x_i)}·|cell|` over a node set.
//! The Morrey modular replaces the integral over `Ω` by
//! `max r^{-λ(x)} ∫_{B̃(x,r)} |f|^{p}` over every node `x` and every radius in
//! the grid's schedule. Both norms are the unit level of their modular.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::grid::{BallSubset, BallSums, DomainGrid, GridFunction};
use crate::root::{solve_unit_level, NormResult};

/// Constant in the variable-exponent Hölder inequality.
pub const HOLDER_CONSTANT: f64 = 4.0;

/// Lebesgue modular of `f` with nodes `indices` (all nodes when `None`),
/// with `log|f|` precomputed so each `η` costs one `exp` per node.
pub(crate) struct LebesgueProblem {
    log_abs: Vec<f64>,
    exps: Vec<f64>,
    cell: f64,
    max_abs: f64,
}

impl LebesgueProblem {
    pub(crate) fn new(samples: &[f64], exps: &[f64], cell: f64, indices: Option<&[usize]>) -> Self {
        let mut log_abs = Vec::new();
        let mut ps = Vec::new();
        let mut max_abs = 0.0f64;
        let mut push = |i: usize| {
            let v = samples[i].abs();
            if v > 0.0 {
                log_abs.push(v.ln());
                ps.push(exps[i]);
                max_abs = max_abs.max(v);
            }
        };
        match indices {
            Some(ix) => ix.iter().for_each(|&i| push(i)),
            None => (0..samples.len()).for_each(&mut push),
        }
        LebesgueProblem {
            log_abs,
            exps: ps,
            cell,
            max_abs,
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.log_abs.is_empty()
    }

    pub(crate) fn modular(&self, eta: f64) -> f64 {
        let le = eta.ln();
        self.log_abs
            .iter()
            .zip(&self.exps)
            .map(|(l, p)| (p * (l - le)).exp())
            .sum::<f64>()
            * self.cell
    }

    pub(crate) fn norm(&self, measure: f64) -> Result<NormResult> {
        if self.is_zero() {
            return Ok(NormResult::zero());
        }
        solve_unit_level(|eta| self.modular(eta), self.max_abs * (1.0 + measure))
    }
}

/// `ρ_{p(·)}(f)` over `subset` (the whole domain when `None`).
pub fn lebesgue_modular(
    f: &GridFunction,
    p: &ExponentField,
    subset: Option<&BallSubset>,
) -> Result<f64> {
    let grid = f.grid();
    let exps = p.sample(grid);
    if let Some(b) = subset {
        // validates that the subset came from this grid
        grid.integrate(&GridFunction::zeros(grid), Some(b))?;
    }
    let problem = LebesgueProblem::new(
        f.samples(),
        &exps,
        grid.cell_measure(),
        subset.map(|b| b.node_indices.as_slice()),
    );
    Ok(problem.modular(1.0))
}

/// Luxemburg norm `inf{η > 0 : ρ(f/η) ≤ 1}` over `subset`.
pub fn lebesgue_norm(
    f: &GridFunction,
    p: &ExponentField,
    subset: Option<&BallSubset>,
) -> Result<NormResult> {
    let grid = f.grid();
    let exps = p.sample(grid);
    lebesgue_norm_sampled(
        grid,
        f.samples(),
        &exps,
        subset.map(|b| b.node_indices.as_slice()),
    )
}

pub(crate) fn lebesgue_norm_sampled(
    grid: &DomainGrid,
    samples: &[f64],
    exps: &[f64],
    indices: Option<&[usize]>,
) -> Result<NormResult> {
    LebesgueProblem::new(samples, exps, grid.cell_measure(), indices).norm(grid.measure())
}

/// Morrey modular with precomputed `r^{-λ(x)}` for every (node, radius).
pub(crate) struct MorreyProblem<'g> {
    grid: &'g DomainGrid,
    log_abs: Vec<f64>,
    exps: Vec<f64>,
    radius_weights: Vec<f64>,
    radii: usize,
    max_abs: f64,
}

impl<'g> MorreyProblem<'g> {
    pub(crate) fn new(
        grid: &'g DomainGrid,
        samples: &[f64],
        exps: &[f64],
        lambdas: &[f64],
    ) -> Self {
        let radii = grid.radii_schedule();
        let mut radius_weights = Vec::with_capacity(grid.len() * radii.len());
        for &lam in lambdas {
            radius_weights.extend(radii.iter().map(|r| r.powf(-lam)));
        }
        MorreyProblem {
            grid,
            log_abs: samples
                .iter()
                .map(|v| {
                    if *v == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        v.abs().ln()
                    }
                })
                .collect(),
            exps: exps.to_vec(),
            radius_weights,
            radii: radii.len(),
            max_abs: samples.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.max_abs == 0.0
    }

    pub(crate) fn modular(&self, eta: f64) -> f64 {
        let le = eta.ln();
        let cell = self.grid.cell_measure();
        let density: Vec<f64> = self
            .log_abs
            .iter()
            .zip(&self.exps)
            .map(|(l, p)| {
                if l.is_finite() {
                    (p * (l - le)).exp() * cell
                } else {
                    0.0
                }
            })
            .collect();
        let sums = BallSums::new(self.grid, &density);
        (0..self.grid.len())
            .into_par_iter()
            .map(|c| {
                let w = &self.radius_weights[c * self.radii..(c + 1) * self.radii];
                (0..self.radii).fold(0.0f64, |m, k| m.max(w[k] * sums.ball_sum(c, k)))
            })
            .reduce(|| 0.0, f64::max)
    }

    pub(crate) fn norm(&self) -> Result<NormResult> {
        if self.is_zero() {
            return Ok(NormResult::zero());
        }
        solve_unit_level(
            |eta| self.modular(eta),
            self.max_abs * (1.0 + self.grid.measure()),
        )
    }
}

/// `sup_{x, r} r^{-λ(x)} ∫_{B̃(x,r)} |f|^{p}` over grid nodes and scheduled radii.
pub fn morrey_modular(f: &GridFunction, p: &ExponentField, lam: &ExponentField) -> Result<f64> {
    let grid = f.grid();
    let problem = MorreyProblem::new(grid, f.samples(), &p.sample(grid), &lam.sample(grid));
    Ok(problem.modular(1.0))
}

/// Variable-exponent Morrey norm `inf{η > 0 : I(f/η) ≤ 1}`.
pub fn morrey_norm(f: &GridFunction, p: &ExponentField, lam: &ExponentField) -> Result<NormResult> {
    let grid = f.grid();
    morrey_norm_sampled(grid, f.samples(), &p.sample(grid), &lam.sample(grid))
}

pub(crate) fn morrey_norm_sampled(
    grid: &DomainGrid,
    samples: &[f64],
    exps: &[f64],
    lambdas: &[f64],
) -> Result<NormResult> {
    MorreyProblem::new(grid, samples, exps, lambdas).norm()
}

/// The equivalent supremum form
/// `sup_{x, r} r^{-λ(x)/p(x)} ‖f χ_{B̃(x,r)}‖_{p(·)}`.
pub fn morrey_norm_equiv(f: &GridFunction, p: &ExponentField, lam: &ExponentField) -> Result<f64> {
    let grid = f.grid();
    let exps = p.sample(grid);
    let lambdas = lam.sample(grid);
    morrey_norm_equiv_sampled(grid, f.samples(), &exps, &lambdas)
}

pub(crate) fn morrey_norm_equiv_sampled(
    grid: &DomainGrid,
    samples: &[f64],
    exps: &[f64],
    lambdas: &[f64],
) -> Result<f64> {
    if samples.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let radii = grid.radii_schedule();
    let cell = grid.cell_measure();
    let per_center: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let mut best = 0.0f64;
            // largest balls first so the running max prunes most small ones
            for k in (0..radii.len()).rev() {
                let scale = radii[k].powf(-lambdas[c] / exps[c]);
                let nodes = grid.scheduled_ball(c, k);
                let problem = LebesgueProblem::new(samples, exps, cell, Some(&nodes));
                if problem.is_zero() {
                    continue;
                }
                // value > best  ⇔  ρ_B(f/(best/scale)) > 1
                if best > 0.0 && problem.modular(best / scale) <= 1.0 {
                    continue;
                }
                let v = scale * problem.norm(grid.measure())?.value;
                best = best.max(v);
            }
            Ok(best)
        })
        .collect();
    Ok(per_center?.into_iter().fold(0.0, f64::max))
}

/// Both sides of `∫|fg| ≤ 4 ‖f‖_{p(·)} ‖g‖_{p'(·)}`.
pub fn holder_check(f: &GridFunction, g: &GridFunction, p: &ExponentField) -> Result<(f64, f64)> {
    let grid = f.grid();
    let lhs = grid.integrate(&f.mul(g)?.abs(), None)?;
    let pc = p.conjugate(grid)?;
    let nf = lebesgue_norm(f, p, None)?.value;
    let ng = lebesgue_norm(g, &pc, None)?.value;
    Ok((lhs, HOLDER_CONSTANT * nf * ng))
}

/// Both sides of `‖fg‖_{r(·)} ≤ K ‖f‖_{p(·)} ‖g‖_{q(·)}` with
/// `1/r = 1/p + 1/q` and `K = 4`.
pub fn generalized_holder_check(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
    q: &ExponentField,
) -> Result<(f64, f64)> {
    let r = ExponentField::harmonic(0.0, &[(1.0, p), (1.0, q)]);
    let lhs = lebesgue_norm(&f.mul(g)?, &r, None)?.value;
    let rhs = HOLDER_CONSTANT * lebesgue_norm(f, p, None)?.value * lebesgue_norm(g, q, None)?.value;
    Ok((lhs, rhs))
}

/// Ensures every node value of `p` lies in `[1, ∞)`.
pub fn require_lebesgue_exponent(p: &ExponentField, grid: &Arc<DomainGrid>) -> Result<()> {
    let (lo, hi) = p.bounds(grid);
    if lo < 1.0 || !hi.is_finite() {
        return Err(Error::config(format!(
            "Lebesgue exponent must take values in [1, ∞), found [{lo}, {hi}]"
        )));
    }
    Ok(())
}
