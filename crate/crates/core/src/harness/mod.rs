//! Both sides of each inequality over a test-function family, sweeps,
//! refinement studies and report export.
//!
//! The supremum of `lhs/rhs` over a finite family is a lower estimate of
//! the best constant, nothing more.

mod family;
mod report;

use std::sync::Arc;

use rayon::prelude::*;

pub use family::{
    generate_family, FamilyContext, FamilyMember, FamilySpec, FunctionFamily, MemberKind,
};
pub use report::{
    export_report, render_report, ExportFormat, MemberRatio, RatioReport, RefinementRow,
    ReportMetadata,
};

use crate::admissibility::{
    check, resolve, solve_q_from_cond_d, InequalityCase, NormKind, ResolvedCase, Theorem,
};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::Point;
use crate::grid::{build_grid, DomainGrid, DomainSpec, GridFunction};
use crate::norms::{lebesgue_norm, morrey_norm};
use crate::operators::{fractional_integral, fractional_maximal, mean_value, weight_field};

/// Below this an lhs counts as zero when the rhs vanishes.
pub const VIOLATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HarnessOptions {
    pub seed: u64,
    pub allow_inadmissible: bool,
}

/// `‖|· − x₀|^{w(·)} f‖` in the Lebesgue or Morrey norm.
pub fn weighted_norm(
    f: &GridFunction,
    x0: &Point,
    weight: &ExponentField,
    p: &ExponentField,
    lam: &ExponentField,
    kind: NormKind,
) -> Result<f64> {
    let grid = f.grid();
    let wf = if weight.constant_value() == Some(0.0) {
        f.clone()
    } else {
        f.mul(&weight_field(grid, x0, &weight.sample(grid)))?
    };
    let r = match kind {
        NormKind::Lebesgue => lebesgue_norm(&wf, p, None)?,
        NormKind::Morrey => morrey_norm(&wf, p, lam)?,
    };
    Ok(r.value)
}

fn sides_with_potential(
    rc: &ResolvedCase,
    f: &GridFunction,
    potential: &GridFunction,
) -> Result<(f64, f64)> {
    let lhs = weighted_norm(
        potential,
        &rc.x0,
        &rc.weight_lhs,
        &rc.q,
        &rc.lam_lhs,
        rc.norm,
    )?;
    let rhs = weighted_norm(f, &rc.x0, &rc.weight_rhs, &rc.p, &rc.lam_rhs, rc.norm)?;
    Ok((lhs, rhs))
}

/// `(‖|·−x₀|^a I_γ f‖, ‖|·−x₀|^b f‖)` in the norms of the case's theorem.
pub fn stein_weiss_ratio(rc: &ResolvedCase, f: &GridFunction) -> Result<(f64, f64)> {
    if rc.theorem.is_application() {
        return Err(Error::config(format!(
            "{} is evaluated with application_ratio",
            rc.theorem
        )));
    }
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let potential = fractional_integral(f, rc.gamma)?;
    sides_with_potential(rc, f, &potential)
}

/// Both sides of Poincaré, Hardy–Sobolev, Gagliardo–Nirenberg or the
/// fractional Hardy–Sobolev inequality for one family member.
pub fn application_ratio(rc: &ResolvedCase, member: &FamilyMember) -> Result<(f64, f64)> {
    let gradient = || {
        member.gradient.as_ref().ok_or_else(|| {
            Error::config(format!(
                "{} needs gradient-pair members, got {:?} member {}",
                rc.theorem, member.kind, member.id
            ))
        })
    };
    let side = |f: &GridFunction, w: &ExponentField, p: &ExponentField, lam: &ExponentField| {
        weighted_norm(f, &rc.x0, w, p, lam, rc.norm)
    };
    match rc.theorem {
        Theorem::Poincare => {
            let g = gradient()?;
            let mean = mean_value(&member.f);
            let centered = member.f.map(|v| v - mean);
            let lhs = side(&centered, &rc.weight_lhs, &rc.q, &rc.lam_lhs)?;
            let rhs = side(g, &rc.weight_rhs, &rc.p, &rc.lam_rhs)?;
            Ok((lhs, rhs))
        }
        Theorem::HardySobolev => {
            let g = gradient()?;
            let lhs = side(&member.f, &rc.weight_lhs, &rc.q, &rc.lam_lhs)?;
            let rhs = side(g, &rc.weight_rhs, &rc.p, &rc.lam_rhs)?;
            Ok((lhs, rhs))
        }
        Theorem::GagliardoNirenberg => {
            let g = gradient()?;
            let ip = rc.interpolation.as_ref().ok_or_else(|| {
                Error::config("GagliardoNirenberg case without interpolation data")
            })?;
            let lhs = side(&member.f, &rc.weight_lhs, &rc.q, &rc.lam_lhs)?;
            let grad_part = if ip.theta == 0.0 {
                1.0
            } else {
                side(g, &rc.weight_rhs, &rc.p, &rc.lam_rhs)?.powf(ip.theta)
            };
            let f_part = if ip.theta == 1.0 {
                1.0
            } else {
                side(&member.f, &rc.weight_rhs, &ip.q, &rc.lam_rhs)?.powf(1.0 - ip.theta)
            };
            Ok((lhs, grad_part * f_part))
        }
        Theorem::FractionalHs => {
            let g = member.source.as_ref().ok_or_else(|| {
                Error::config(format!(
                    "FractionalHS needs potential-pair members, got {:?} member {}",
                    member.kind, member.id
                ))
            })?;
            if g.is_zero() {
                return Ok((0.0, 0.0));
            }
            sides_with_potential(rc, g, &member.f)
        }
        other => Err(Error::config(format!(
            "{other} is evaluated with stein_weiss_ratio"
        ))),
    }
}

/// Dispatches to `stein_weiss_ratio` or `application_ratio`.
pub fn member_sides(rc: &ResolvedCase, member: &FamilyMember) -> Result<(f64, f64)> {
    if rc.theorem.is_application() {
        application_ratio(rc, member)
    } else {
        stein_weiss_ratio(rc, &member.f)
    }
}

/// Family context for a resolved case: its weight centre and `p₊`.
pub fn family_context(rc: &ResolvedCase, grid: &DomainGrid) -> FamilyContext {
    FamilyContext {
        x0: rc.x0,
        p_plus: rc.p.bounds(grid).1,
    }
}

fn evaluate_members(
    rc: &ResolvedCase,
    family: &FunctionFamily,
) -> (Vec<MemberRatio>, Option<String>) {
    let results: Vec<(String, Result<(f64, f64)>)> = family
        .members
        .par_iter()
        .map(|m| (m.id.clone(), member_sides(rc, m)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (id, r) in results {
        match r {
            Ok((lhs, rhs)) => rows.push(MemberRatio::new(id, lhs, rhs)),
            Err(e) => {
                first_error.get_or_insert_with(|| format!("member {id}: {e}"));
            }
        }
    }
    (rows, first_error)
}

/// Checks, resolves and evaluates one case on one grid. Failures are
/// recorded in the report, not returned.
pub fn evaluate_case(
    case_id: &str,
    case: &InequalityCase,
    family: &FamilySpec,
    grid_spec: &DomainSpec,
    options: &HarnessOptions,
) -> RatioReport {
    let mut report = RatioReport::empty(case_id, case, family, grid_spec, options.seed);
    let outcome = (|| -> Result<()> {
        let grid = build_grid(grid_spec)?;
        let verdict = check(case, &grid)?;
        report.admissible = verdict.overall;
        report.verdict = Some(verdict);
        if !report.admissible && !options.allow_inadmissible {
            return Ok(());
        }
        let rc = resolve(case, &grid)?;
        let fam = generate_family(family, &grid, options.seed, &family_context(&rc, &grid))?;
        let (rows, err) = evaluate_members(&rc, &fam);
        report.evaluated = true;
        report.set_members(rows);
        report.refinement = vec![RefinementRow {
            resolution: grid_spec.resolution,
            sup_ratio: report.sup_ratio,
        }];
        if let Some(e) = err {
            report.error = Some(e);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        report.error = Some(format!("{case_id}: {e}"));
    }
    report
}

/// One report per case, evaluated concurrently and returned in input order.
pub fn sweep(
    cases: &[InequalityCase],
    family: &FamilySpec,
    grid_spec: &DomainSpec,
    options: &HarnessOptions,
) -> Vec<RatioReport> {
    sweep_with_progress(cases, family, grid_spec, options, &|_, _| {})
}

/// `sweep` that calls `progress` as each case finishes (in completion order).
pub fn sweep_with_progress(
    cases: &[InequalityCase],
    family: &FamilySpec,
    grid_spec: &DomainSpec,
    options: &HarnessOptions,
    progress: &(dyn Fn(usize, &RatioReport) + Sync),
) -> Vec<RatioReport> {
    cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let r = evaluate_case(&format!("case-{i:03}"), c, family, grid_spec, options);
            progress(i, &r);
            r
        })
        .collect()
}

/// Evaluates the case at each resolution. The returned report holds the
/// finest resolution's members plus the per-resolution sup ratios and the
/// stability `|last − previous| / previous`.
pub fn refinement_study(
    case_id: &str,
    case: &InequalityCase,
    family: &FamilySpec,
    grid_spec: &DomainSpec,
    resolutions: &[usize],
    options: &HarnessOptions,
) -> Result<RatioReport> {
    if resolutions.len() < 3 {
        return Err(Error::Precondition(format!(
            "a refinement study needs at least 3 resolutions, got {}",
            resolutions.len()
        )));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(format!(
            "resolutions must be strictly increasing: {resolutions:?}"
        )));
    }
    let mut rows = Vec::new();
    let mut last = None;
    for &r in resolutions {
        let rep = evaluate_case(
            case_id,
            case,
            family,
            &grid_spec.with_resolution(r),
            options,
        );
        rows.push(RefinementRow {
            resolution: r,
            sup_ratio: rep.sup_ratio,
        });
        let stop = rep.error.is_some() || !rep.evaluated;
        last = Some(rep);
        if stop {
            break;
        }
    }
    let mut report = last.expect("at least one resolution");
    if report.evaluated && report.error.is_none() {
        let n = rows.len();
        let (prev, fin) = (rows[n - 2].sup_ratio, rows[n - 1].sup_ratio);
        report.stability = Some(relative_change(prev, fin));
    }
    report.refinement = rows;
    Ok(report)
}

/// `|new − old| / old`, zero when both vanish.
pub fn relative_change(old: f64, new: f64) -> f64 {
    if old == 0.0 && new == 0.0 {
        0.0
    } else {
        (new - old).abs() / old.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Maximal,
    Integral,
}

/// `sup ‖T f‖_{M^λ_q} / ‖f‖_{M^λ_p}` over the family, for `T = M_σ` or
/// `I_σ` and `1/q = 1/p − σ/(n − λ)`.
pub fn operator_bound_sup(
    op: Operator,
    sigma: f64,
    p: &ExponentField,
    lam: &ExponentField,
    family: &FunctionFamily,
    grid: &Arc<DomainGrid>,
) -> Result<f64> {
    let q = solve_q_from_cond_d(p, lam, sigma, 0.0, 0.0, grid)?;
    let ratios: Vec<f64> = family
        .members
        .par_iter()
        .map(|m| -> Result<f64> {
            if m.f.is_zero() {
                return Ok(0.0);
            }
            let t = match op {
                Operator::Maximal => fractional_maximal(&m.f, sigma)?,
                Operator::Integral => fractional_integral(&m.f, sigma)?,
            };
            let lhs = morrey_norm(&t, &q, lam)?.value;
            let rhs = morrey_norm(&m.f, p, lam)?.value;
            Ok(lhs / rhs)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `max_x |f(x) − f_Ω| / I₁(|∇f|)(x)` over the nodes, for a gradient pair.
/// Needs `n = 2` so that `I₁` is defined.
pub fn pointwise_poincare_ratio(member: &FamilyMember) -> Result<f64> {
    let g = member.gradient.as_ref().ok_or_else(|| {
        Error::config(format!(
            "pointwise Poincaré check needs a gradient pair, got {}",
            member.id
        ))
    })?;
    let potential = fractional_integral(g, 1.0)?;
    let mean = mean_value(&member.f);
    let mut worst = 0.0f64;
    for (v, i1) in member.f.samples().iter().zip(potential.samples()) {
        let d = (v - mean).abs();
        if *i1 > 0.0 {
            worst = worst.max(d / i1);
        } else if d > VIOLATION_TOLERANCE {
            return Err(Error::Precondition(format!(
                "I_1(|grad f|) vanishes where |f - f_Omega| = {d} for {}",
                member.id
            )));
        }
    }
    Ok(worst)
}
