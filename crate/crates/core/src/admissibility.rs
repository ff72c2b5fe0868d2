//! Hypotheses of the weighted fractional-integral inequalities as checkable
//! predicates with signed margins, and the exponent identities they impose.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentField, LogHolderReport};
use crate::geometry::Point;
use crate::grid::DomainGrid;

/// Strict inequalities need `margin > TOLERANCE`, non-strict ones
/// `margin ≥ −TOLERANCE`, identities `residual ≤ TOLERANCE`.
pub const TOLERANCE: f64 = 1e-12;

/// Reciprocals `1/q` at or below this are treated as `q = ∞`.
const RECIPROCAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    /// Power-weighted Hardy–Littlewood–Sobolev on `L^p`, constant exponents.
    SteinWeiss1958,
    /// `I_γ : M^λ_p → M^μ_q`, constant exponents.
    Spanne,
    /// `I_γ : M^λ_p → M^λ_q` with `1/p − 1/q = γ/(n − λ)`.
    Adams,
    /// Power-weighted bound on classical Morrey spaces.
    #[serde(rename = "KRRS")]
    Krrs,
    /// Variable-exponent Lebesgue bound with weights `|x − x₀|^{μ/q(x)}`, `|x − x₀|^{ν/p(x)}`.
    Samko,
    /// Power-weighted bound on variable Lebesgue spaces.
    VarSteinWeiss,
    /// Power-weighted bound on variable-exponent Morrey spaces.
    MainMorrey,
    Poincare,
    HardySobolev,
    GagliardoNirenberg,
    #[serde(rename = "FractionalHS")]
    FractionalHs,
}

impl Theorem {
    pub const ALL: [Theorem; 11] = [
        Theorem::SteinWeiss1958,
        Theorem::Spanne,
        Theorem::Adams,
        Theorem::Krrs,
        Theorem::Samko,
        Theorem::VarSteinWeiss,
        Theorem::MainMorrey,
        Theorem::Poincare,
        Theorem::HardySobolev,
        Theorem::GagliardoNirenberg,
        Theorem::FractionalHs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::SteinWeiss1958 => "SteinWeiss1958",
            Theorem::Spanne => "Spanne",
            Theorem::Adams => "Adams",
            Theorem::Krrs => "KRRS",
            Theorem::Samko => "Samko",
            Theorem::VarSteinWeiss => "VarSteinWeiss",
            Theorem::MainMorrey => "MainMorrey",
            Theorem::Poincare => "Poincare",
            Theorem::HardySobolev => "HardySobolev",
            Theorem::GagliardoNirenberg => "GagliardoNirenberg",
            Theorem::FractionalHs => "FractionalHS",
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(
            self,
            Theorem::SteinWeiss1958
                | Theorem::Spanne
                | Theorem::Adams
                | Theorem::Krrs
                | Theorem::Samko
                | Theorem::VarSteinWeiss
        )
    }

    /// Consequences stated with weights centred at the origin.
    pub fn is_application(self) -> bool {
        matches!(
            self,
            Theorem::Poincare
                | Theorem::HardySobolev
                | Theorem::GagliardoNirenberg
                | Theorem::FractionalHs
        )
    }

    /// Whether both sides are Morrey norms (otherwise Lebesgue norms).
    pub fn uses_morrey(self) -> bool {
        !matches!(
            self,
            Theorem::SteinWeiss1958 | Theorem::Samko | Theorem::VarSteinWeiss
        )
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Theorem-specific parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxParams {
    /// Spanne: target Morrey index. Samko: weight exponent on the left (derived if absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Samko: weight exponent on the right.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Gagliardo–Nirenberg interpolation parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Gagliardo–Nirenberg: the exponent standing in for `q` in the Sobolev step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_star: Option<ExponentField>,
    /// Poincaré: the upper exponent `r ≥ q` (solved from the index identity if absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<ExponentField>,
    /// Fractional Hardy–Sobolev: order of the fractional Laplacian, `γ = 2s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

/// One inequality instance: theorem, parameters and exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityCase {
    pub theorem: Theorem,
    pub gamma: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Point>,
    pub p: ExponentField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ExponentField>,
    #[serde(
        default,
        rename = "lambda",
        alias = "lam",
        skip_serializing_if = "Option::is_none"
    )]
    pub lam: Option<ExponentField>,
    #[serde(default)]
    pub aux: AuxParams,
}

impl InequalityCase {
    pub fn new(theorem: Theorem, gamma: f64, a: f64, b: f64, p: ExponentField) -> Self {
        InequalityCase {
            theorem,
            gamma,
            a,
            b,
            x0: None,
            p,
            q: None,
            lam: None,
            aux: AuxParams::default(),
        }
    }

    /// A `MainMorrey` case with `q` left to the index identity.
    pub fn main(gamma: f64, a: f64, b: f64, p: ExponentField, lam: ExponentField) -> Self {
        Self::new(Theorem::MainMorrey, gamma, a, b, p).with_lambda(lam)
    }

    pub fn with_q(mut self, q: ExponentField) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_lambda(mut self, lam: ExponentField) -> Self {
        self.lam = Some(lam);
        self
    }

    pub fn with_x0(mut self, x0: Point) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_aux(mut self, aux: AuxParams) -> Self {
        self.aux = aux;
        self
    }

    fn lambda(&self) -> Result<&ExponentField> {
        self.lam
            .as_ref()
            .ok_or_else(|| Error::config(format!("{} needs \"lambda\"", self.theorem)))
    }

    fn aux_value(&self, value: Option<f64>, key: &str) -> Result<f64> {
        value.ok_or_else(|| Error::config(format!("{} needs aux.{key}", self.theorem)))
    }

    /// The weight centre: the origin for the applications, otherwise the
    /// given point or the node nearest the centroid.
    pub fn resolved_x0(&self, grid: &DomainGrid) -> Point {
        match self.x0 {
            Some(p) => p,
            None if self.theorem.is_application() => Point::ORIGIN,
            None => grid.node(grid.nearest_node(&grid.shape().centroid())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub satisfied: bool,
    /// Signed distance to the constraint boundary; `−residual` for identities.
    pub margin: f64,
}

impl Condition {
    fn strict(name: &str, margin: f64) -> Self {
        Self::build(name, margin > TOLERANCE, margin)
    }

    fn closed(name: &str, margin: f64) -> Self {
        Self::build(name, margin >= -TOLERANCE, margin)
    }

    fn identity(name: &str, residual: f64) -> Self {
        Self::build(name, residual <= TOLERANCE, -residual)
    }

    fn build(name: &str, satisfied: bool, margin: f64) -> Self {
        // keep reports JSON-representable
        let margin = if margin.is_nan() {
            f64::MIN
        } else {
            margin.clamp(f64::MIN, f64::MAX)
        };
        Condition {
            name: name.to_string(),
            satisfied: satisfied && margin != f64::MIN,
            margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub theorem: Theorem,
    pub conditions: Vec<Condition>,
    pub overall: bool,
    /// LH₀ estimates of the exponents involved; reported, never gating.
    pub diagnostics: BTreeMap<String, LogHolderReport>,
    pub notes: Vec<String>,
}

impl AdmissibilityVerdict {
    fn new(theorem: Theorem, conditions: Vec<Condition>) -> Self {
        let overall = conditions.iter().all(|c| c.satisfied);
        AdmissibilityVerdict {
            theorem,
            conditions,
            overall,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| c.name.as_str())
            .collect()
    }

    fn diagnose(&mut self, label: &str, field: &ExponentField, grid: &DomainGrid) {
        self.diagnostics
            .insert(label.to_string(), field.lh0_modulus(grid));
    }
}

/// `q` with `(γ + a − b)/(n − λ(x)) = 1/p(x) − 1/q(x)` at every node.
pub fn solve_q_from_cond_d(
    p: &ExponentField,
    lam: &ExponentField,
    gamma: f64,
    a: f64,
    b: f64,
    grid: &DomainGrid,
) -> Result<ExponentField> {
    let n = grid.dimension() as f64;
    let shift = gamma + a - b;
    let ps = p.sample(grid);
    let ls = lam.sample(grid);
    let mut worst = (0, f64::INFINITY);
    for (i, (pv, lv)) in ps.iter().zip(&ls).enumerate() {
        let gap = n - lv;
        let recip = if gap > 0.0 {
            1.0 / pv - shift / gap
        } else {
            f64::NEG_INFINITY
        };
        if !(recip >= worst.1) {
            worst = (i, recip);
        }
    }
    if !(worst.1 > RECIPROCAL_FLOOR) {
        return Err(Error::InadmissibleExponent {
            node: worst.0,
            point: grid.node(worst.0),
            reciprocal: worst.1,
        });
    }
    Ok(ExponentField::reciprocal_gap(p, lam, shift, n))
}

/// `r` with `1/r = θ/p* + (1 − θ)/q`.
pub fn gn_interpolation_exponent(
    p_star: &ExponentField,
    q: &ExponentField,
    theta: f64,
) -> Result<ExponentField> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::config(format!("θ = {theta} must lie in [0, 1]")));
    }
    Ok(if theta == 1.0 {
        p_star.clone()
    } else if theta == 0.0 {
        q.clone()
    } else {
        ExponentField::harmonic(0.0, &[(theta, p_star), (1.0 - theta, q)])
    })
}

/// `σ = γ − (b − a)`, the order left for the fractional maximal step.
pub fn derive_sigma(gamma: f64, a: f64, b: f64) -> Result<f64> {
    let sigma = gamma - (b - a);
    if sigma < -TOLERANCE {
        return Err(Error::Precondition(format!(
            "σ = γ − (b − a) = {sigma} is negative; need b − a ≤ γ"
        )));
    }
    Ok(sigma.max(0.0))
}

fn max_by(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn min_by(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn bounds(values: &[f64]) -> (f64, f64) {
    (
        min_by(values.iter().copied()),
        max_by(values.iter().copied()),
    )
}

/// The four conditions of the main theorem plus the exponent ranges, with
/// `target` (normally `q`) on the left-hand side.
#[allow(clippy::too_many_arguments)]
fn stein_weiss_conditions(
    grid: &DomainGrid,
    gamma: f64,
    a: f64,
    b: f64,
    p: &ExponentField,
    target: std::result::Result<&ExponentField, &Error>,
    target_label: &str,
    lam: &ExponentField,
    out: &mut Vec<Condition>,
    notes: &mut Vec<String>,
) {
    let n = grid.dimension() as f64;
    let ps = p.sample(grid);
    let ls = lam.sample(grid);
    let (p_lo, p_hi) = bounds(&ps);
    let (l_lo, l_hi) = bounds(&ls);
    out.push(Condition::strict("gamma_range", gamma.min(n - gamma)));
    out.push(Condition::strict("p_lower", p_lo - 1.0));
    out.push(Condition::strict(
        "p_upper_finite",
        if p_hi.is_finite() { 1.0 } else { -1.0 },
    ));
    out.push(Condition::strict("lambda_range", l_lo.min(n - l_hi)));
    out.push(Condition::closed("condA", (b - a).min(gamma - (b - a))));
    let shift = gamma - b + a;
    let c = min_by(ps.iter().zip(&ls).map(|(pv, lv)| n - shift * pv - lv));
    out.push(Condition::strict("condC", l_lo.min(c)));
    let upper_b = n * (1.0 - 1.0 / p_lo);
    match target {
        Ok(q) => {
            let qs = q.sample(grid);
            let (q_lo, q_hi) = bounds(&qs);
            out.push(Condition::strict(
                &format!("{target_label}_lower"),
                q_lo - 1.0,
            ));
            out.push(Condition::closed(
                &format!("p_le_{target_label}"),
                min_by(ps.iter().zip(&qs).map(|(pv, qv)| qv - pv)),
            ));
            out.push(Condition::strict(
                "condB",
                (a - (l_hi - n) / q_hi).min(upper_b - b),
            ));
            let residual =
                max_by(ps.iter().zip(&qs).zip(&ls).map(|((pv, qv), lv)| {
                    ((gamma + a - b) / (n - lv) - (1.0 / pv - 1.0 / qv)).abs()
                }));
            out.push(Condition::identity("condD", residual));
        }
        Err(e) => {
            let margin = match e {
                Error::InadmissibleExponent { reciprocal, .. } => *reciprocal,
                _ => f64::MIN,
            };
            out.push(Condition::build("condD", false, margin));
            notes.push(format!("{target_label} cannot be solved from condD: {e}"));
        }
    }
}

fn inside(grid: &DomainGrid, x0: &Point, name: &str) -> Condition {
    Condition::strict(name, grid.shape().inset(x0))
}

/// The hypotheses of the variable-exponent Morrey theorem.
pub fn check_main(case: &InequalityCase, grid: &DomainGrid) -> Result<AdmissibilityVerdict> {
    let lam = case.lambda()?;
    let x0 = case.resolved_x0(grid);
    let q = match &case.q {
        Some(q) => Ok(q.clone()),
        None => solve_q_from_cond_d(&case.p, lam, case.gamma, case.a, case.b, grid),
    };
    let mut conditions = vec![inside(grid, &x0, "x0_in_domain")];
    let mut notes = Vec::new();
    stein_weiss_conditions(
        grid,
        case.gamma,
        case.a,
        case.b,
        &case.p,
        q.as_ref(),
        "q",
        lam,
        &mut conditions,
        &mut notes,
    );
    let mut verdict = AdmissibilityVerdict::new(case.theorem, conditions);
    verdict.notes = notes;
    verdict.diagnose("p", &case.p, grid);
    if let Ok(q) = &q {
        verdict.diagnose("q", q, grid);
    }
    verdict.diagnose("lambda", lam, grid);
    Ok(verdict)
}

/// Hypotheses of the consequences: Poincaré, Hardy–Sobolev,
/// Gagliardo–Nirenberg and the fractional Hardy–Sobolev inequality.
pub fn check_application(case: &InequalityCase, grid: &DomainGrid) -> Result<AdmissibilityVerdict> {
    let lam = case.lambda()?;
    let mut conditions = vec![Condition::strict(
        "origin_in_domain",
        grid.shape().inset(&Point::ORIGIN),
    )];
    if let Some(x0) = case.x0 {
        conditions.push(Condition::identity("weights_at_origin", x0.norm()));
    }
    let mut notes = Vec::new();
    let solve = |gamma: f64, b: f64| solve_q_from_cond_d(&case.p, lam, gamma, case.a, b, grid);
    let mut extra: Vec<(&str, ExponentField)> = Vec::new();
    match case.theorem {
        Theorem::HardySobolev => {
            conditions.push(Condition::identity(
                "gamma_is_one",
                (case.gamma - 1.0).abs(),
            ));
            let q = case.q.clone().map_or_else(|| solve(case.gamma, case.b), Ok);
            stein_weiss_conditions(
                grid,
                case.gamma,
                case.a,
                case.b,
                &case.p,
                q.as_ref(),
                "q",
                lam,
                &mut conditions,
                &mut notes,
            );
            if let Ok(q) = q {
                extra.push(("q", q));
            }
        }
        Theorem::FractionalHs => {
            let s = case.aux_value(case.aux.s, "s")?;
            conditions.push(Condition::closed("s_range", s.min(1.0 - s)));
            conditions.push(Condition::identity(
                "gamma_is_2s",
                (case.gamma - 2.0 * s).abs(),
            ));
            let q = case.q.clone().map_or_else(|| solve(case.gamma, case.b), Ok);
            stein_weiss_conditions(
                grid,
                case.gamma,
                case.a,
                case.b,
                &case.p,
                q.as_ref(),
                "q",
                lam,
                &mut conditions,
                &mut notes,
            );
            if let Ok(q) = q {
                extra.push(("q", q));
            }
        }
        Theorem::GagliardoNirenberg => {
            let theta = case.aux_value(case.aux.theta, "theta")?;
            let p_star = case
                .aux
                .p_star
                .clone()
                .ok_or_else(|| Error::config("GagliardoNirenberg needs aux.p_star"))?;
            let q = case
                .q
                .clone()
                .ok_or_else(|| Error::config("GagliardoNirenberg needs \"q\""))?;
            conditions.push(Condition::identity(
                "gamma_is_one",
                (case.gamma - 1.0).abs(),
            ));
            conditions.push(Condition::identity("b_equals_a", (case.b - case.a).abs()));
            conditions.push(Condition::closed("theta_range", theta.min(1.0 - theta)));
            let (q_lo, _) = q.bounds(grid);
            conditions.push(Condition::closed("interpolated_q_lower", q_lo - 1.0));
            stein_weiss_conditions(
                grid,
                case.gamma,
                case.a,
                case.a,
                &case.p,
                Ok(&p_star),
                "p_star",
                lam,
                &mut conditions,
                &mut notes,
            );
            notes.push("conditions A-D are evaluated with b = a and q replaced by p_star".into());
            extra.push(("p_star", p_star));
            extra.push(("q", q));
        }
        Theorem::Poincare => {
            conditions.push(Condition::identity(
                "gamma_is_one",
                (case.gamma - 1.0).abs(),
            ));
            conditions.push(Condition::closed(
                "convex_domain",
                if grid.shape().is_convex() { 0.0 } else { -1.0 },
            ));
            let r = case
                .aux
                .r
                .clone()
                .map_or_else(|| solve(case.gamma, case.b), Ok);
            stein_weiss_conditions(
                grid,
                case.gamma,
                case.a,
                case.b,
                &case.p,
                r.as_ref(),
                "r",
                lam,
                &mut conditions,
                &mut notes,
            );
            notes.push("conditions B and D are evaluated for the pair (p, r)".into());
            if let Ok(r) = r {
                let q = case.q.clone().unwrap_or_else(|| r.clone());
                let ps = case.p.sample(grid);
                let qs = q.sample(grid);
                let rs = r.sample(grid);
                conditions.push(Condition::closed(
                    "p_le_q",
                    min_by(ps.iter().zip(&qs).map(|(p, q)| q - p)),
                ));
                conditions.push(Condition::closed(
                    "q_le_r",
                    min_by(qs.iter().zip(&rs).map(|(q, r)| r - q)),
                ));
                extra.push(("q", q));
                extra.push(("r", r));
            }
        }
        other => {
            return Err(Error::config(format!(
                "{other} is not one of the applications"
            )))
        }
    }
    let mut verdict = AdmissibilityVerdict::new(case.theorem, conditions);
    verdict.notes = notes;
    verdict.diagnose("p", &case.p, grid);
    verdict.diagnose("lambda", lam, grid);
    for (label, field) in &extra {
        verdict.diagnose(label, field, grid);
    }
    Ok(verdict)
}

fn constant_of(
    field: &ExponentField,
    grid: &DomainGrid,
    what: &str,
    theorem: Theorem,
) -> Result<f64> {
    let (lo, hi) = field.bounds(grid);
    if hi - lo > TOLERANCE {
        return Err(Error::config(format!(
            "{theorem} needs a constant {what}, got range [{lo}, {hi}]"
        )));
    }
    Ok(lo)
}

/// `q` for the constant-exponent theorems: given, or solved from
/// `1/q = 1/p − gap`.
fn constant_q(
    case: &InequalityCase,
    grid: &DomainGrid,
    p: f64,
    gap: f64,
    out: &mut Vec<Condition>,
) -> Result<Option<f64>> {
    if let Some(q) = &case.q {
        return Ok(Some(constant_of(q, grid, "q", case.theorem)?));
    }
    let recip = 1.0 / p - gap;
    out.push(Condition::strict("q_finite", recip));
    Ok((recip > RECIPROCAL_FLOOR).then(|| 1.0 / recip))
}

/// The hypotheses of the classical theorems that the main theorem extends.
pub fn check_classical(case: &InequalityCase, grid: &DomainGrid) -> Result<AdmissibilityVerdict> {
    let theorem = case.theorem;
    let n = grid.dimension() as f64;
    let (gamma, a, b) = (case.gamma, case.a, case.b);
    let mut c = vec![Condition::strict("gamma_range", gamma.min(n - gamma))];
    let mut notes = Vec::new();
    let mut fields: Vec<(&str, ExponentField)> = Vec::new();
    match theorem {
        Theorem::SteinWeiss1958 => {
            let p = constant_of(&case.p, grid, "p", theorem)?;
            c.push(Condition::strict("p_lower", p - 1.0));
            if let Some(q) = constant_q(case, grid, p, (gamma + a - b) / n, &mut c)? {
                c.push(Condition::closed("p_le_q", q - p));
                c.push(Condition::strict("lower_a", a + n / q));
                c.push(Condition::closed("a_le_b", b - a));
                c.push(Condition::strict("upper_b", n * (1.0 - 1.0 / p) - b));
                c.push(Condition::identity(
                    "index_identity",
                    (1.0 / p - 1.0 / q - gamma / n - (a - b) / n).abs(),
                ));
            }
        }
        Theorem::Spanne => {
            let p = constant_of(&case.p, grid, "p", theorem)?;
            let lam = constant_of(case.lambda()?, grid, "lambda", theorem)?;
            c.push(Condition::strict("p_range", (p - 1.0).min(n / gamma - p)));
            if let Some(q) = constant_q(case, grid, p, gamma / n, &mut c)? {
                c.push(Condition::identity(
                    "index_identity",
                    (1.0 / p - 1.0 / q - gamma / n).abs(),
                ));
                let mu = match case.aux.mu {
                    Some(mu) => mu,
                    None => {
                        let mu = lam * q / p;
                        notes.push(format!("mu derived from lambda/p = mu/q: {mu}"));
                        mu
                    }
                };
                c.push(Condition::strict(
                    "lambda_mu_order",
                    lam.min(mu - lam).min(n - mu),
                ));
                c.push(Condition::identity(
                    "morrey_identity",
                    (lam / p - mu / q).abs(),
                ));
            }
        }
        Theorem::Adams => {
            let p = constant_of(&case.p, grid, "p", theorem)?;
            let lam = constant_of(case.lambda()?, grid, "lambda", theorem)?;
            c.push(Condition::closed("lambda_range", lam.min(n - lam)));
            if n - lam <= 0.0 {
                c.push(Condition::build("p_range", false, f64::MIN));
            } else {
                c.push(Condition::strict(
                    "p_range",
                    (p - 1.0).min((n - lam) / gamma - p),
                ));
                if let Some(q) = constant_q(case, grid, p, gamma / (n - lam), &mut c)? {
                    c.push(Condition::identity(
                        "index_identity",
                        (1.0 / p - 1.0 / q - gamma / (n - lam)).abs(),
                    ));
                }
            }
        }
        Theorem::Krrs => {
            let p = constant_of(&case.p, grid, "p", theorem)?;
            let lam = constant_of(case.lambda()?, grid, "lambda", theorem)?;
            let sigma = gamma - (b - a);
            c.push(Condition::closed("condA", (b - a).min(sigma)));
            let p_margin = if sigma > 0.0 {
                (p - 1.0).min(n / sigma - p)
            } else {
                p - 1.0
            };
            c.push(Condition::strict("p_range", p_margin));
            c.push(Condition::strict("condC", lam.min(n - sigma * p - lam)));
            if n - lam > 0.0 {
                if let Some(q) = constant_q(case, grid, p, sigma / (n - lam), &mut c)? {
                    c.push(Condition::strict(
                        "condB",
                        (a + (n - lam) / q).min(n * (1.0 - 1.0 / p) - b),
                    ));
                    c.push(Condition::identity(
                        "condD",
                        (1.0 / p - 1.0 / q - sigma / (n - lam)).abs(),
                    ));
                }
            } else {
                c.push(Condition::build("condD", false, f64::MIN));
            }
        }
        Theorem::Samko => {
            let x0 = case.resolved_x0(grid);
            let inset = grid.shape().inset(&x0);
            c.push(Condition::closed("x0_in_closure", inset));
            notes.push(
                "x0 may lie on the boundary for this theorem only; Morrey-space cases require x0 inside the domain".into(),
            );
            if inset.abs() <= TOLERANCE {
                notes.push(format!("x0 = {x0} lies on the boundary"));
            }
            let (p_lo, p_hi) = case.p.bounds(grid);
            c.push(Condition::strict(
                "p_range",
                (p_lo - 1.0).min(n / gamma - p_hi),
            ));
            let zero = ExponentField::constant(0.0);
            let derived = ExponentField::reciprocal_gap(&case.p, &zero, gamma, n);
            let q = match &case.q {
                Some(q) => {
                    let residual = max_by(
                        case.p
                            .sample(grid)
                            .iter()
                            .zip(q.sample(grid))
                            .map(|(pv, qv)| (1.0 / qv - (1.0 / pv - gamma / n)).abs()),
                    );
                    c.push(Condition::identity("index_identity", residual));
                    q.clone()
                }
                None => derived,
            };
            let nu = case.aux_value(case.aux.nu, "nu")?;
            let p0 = case.p.value_at(&x0);
            let q0 = 1.0 / (1.0 / p0 - gamma / n);
            c.push(Condition::strict(
                "nu_range",
                (nu - (gamma * p0 - n)).min(n * (p0 - 1.0) - nu),
            ));
            let mu = q0 * nu / p0;
            match case.aux.mu {
                Some(given) => c.push(Condition::identity("mu_identity", (given - mu).abs())),
                None => notes.push(format!("mu derived as q(x0)·nu/p(x0) = {mu}")),
            }
            fields.push(("p", case.p.clone()));
            fields.push(("q", q));
        }
        Theorem::VarSteinWeiss => {
            let (p_lo, _) = case.p.bounds(grid);
            c.push(Condition::strict("p_lower", p_lo - 1.0));
            let shift = gamma + a - b;
            let q = match &case.q {
                Some(q) => Some(q.clone()),
                None => {
                    let recip = min_by(case.p.sample(grid).iter().map(|pv| 1.0 / pv - shift / n));
                    c.push(Condition::strict("q_finite", recip));
                    (recip > RECIPROCAL_FLOOR).then(|| {
                        ExponentField::reciprocal_gap(
                            &case.p,
                            &ExponentField::constant(0.0),
                            shift,
                            n,
                        )
                    })
                }
            };
            if let Some(q) = q {
                let ps = case.p.sample(grid);
                let qs = q.sample(grid);
                let (q_lo, q_hi) = bounds(&qs);
                c.push(Condition::strict("q_lower", q_lo - 1.0));
                c.push(Condition::closed(
                    "p_le_q",
                    min_by(ps.iter().zip(&qs).map(|(p, q)| q - p)),
                ));
                c.push(Condition::strict("lower_a", a + n / q_hi));
                c.push(Condition::closed("a_le_b", b - a));
                c.push(Condition::strict("upper_b", n * (1.0 - 1.0 / p_lo) - b));
                let residual = max_by(
                    ps.iter()
                        .zip(&qs)
                        .map(|(pv, qv)| (1.0 / pv - 1.0 / qv - shift / n).abs()),
                );
                c.push(Condition::identity("index_identity", residual));
                fields.push(("q", q));
            }
            fields.push(("p", case.p.clone()));
        }
        other => return Err(Error::config(format!("{other} is not a classical theorem"))),
    }
    let mut verdict = AdmissibilityVerdict::new(theorem, c);
    verdict.notes = notes;
    for (label, field) in &fields {
        verdict.diagnose(label, field, grid);
    }
    Ok(verdict)
}

/// Dispatches to the checker matching `case.theorem`.
pub fn check(case: &InequalityCase, grid: &DomainGrid) -> Result<AdmissibilityVerdict> {
    match case.theorem {
        Theorem::MainMorrey => check_main(case, grid),
        t if t.is_application() => check_application(case, grid),
        _ => check_classical(case, grid),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Lebesgue,
    Morrey,
}

/// Gagliardo–Nirenberg's second factor `‖|·|^a f‖_{M^λ_q}^{1−θ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub q: ExponentField,
    pub theta: f64,
}

/// Everything needed to evaluate both sides of a case: exponents,
/// weight exponents and the kind of norm, with derived exponents filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCase {
    pub theorem: Theorem,
    pub gamma: f64,
    pub x0: Point,
    /// Exponent of the right-hand side.
    pub p: ExponentField,
    /// Exponent of the left-hand side.
    pub q: ExponentField,
    pub lam_rhs: ExponentField,
    pub lam_lhs: ExponentField,
    pub weight_lhs: ExponentField,
    pub weight_rhs: ExponentField,
    pub norm: NormKind,
    pub interpolation: Option<Interpolation>,
}

pub fn resolve(case: &InequalityCase, grid: &DomainGrid) -> Result<ResolvedCase> {
    let n = grid.dimension() as f64;
    let (gamma, a, b) = (case.gamma, case.a, case.b);
    let x0 = case.resolved_x0(grid);
    let zero = ExponentField::constant(0.0);
    let given_or = |solve: &dyn Fn() -> Result<ExponentField>| match &case.q {
        Some(q) => Ok(q.clone()),
        None => solve(),
    };
    let constant_gap = |gap: f64| -> Result<ExponentField> {
        let p = constant_of(&case.p, grid, "p", case.theorem)?;
        let recip = 1.0 / p - gap;
        if !(recip > RECIPROCAL_FLOOR) {
            return Err(Error::InadmissibleExponent {
                node: 0,
                point: grid.node(0),
                reciprocal: recip,
            });
        }
        Ok(ExponentField::constant(1.0 / recip))
    };
    let plain = |q: ExponentField, lam: ExponentField, norm: NormKind| ResolvedCase {
        theorem: case.theorem,
        gamma,
        x0,
        p: case.p.clone(),
        q,
        lam_rhs: lam.clone(),
        lam_lhs: lam,
        weight_lhs: ExponentField::constant(a),
        weight_rhs: ExponentField::constant(b),
        norm,
        interpolation: None,
    };
    Ok(match case.theorem {
        Theorem::MainMorrey | Theorem::HardySobolev | Theorem::FractionalHs => {
            let lam = case.lambda()?.clone();
            let q = given_or(&|| solve_q_from_cond_d(&case.p, &lam, gamma, a, b, grid))?;
            plain(q, lam, NormKind::Morrey)
        }
        Theorem::Poincare => {
            let lam = case.lambda()?.clone();
            let q = match (&case.q, &case.aux.r) {
                (Some(q), _) => q.clone(),
                (None, Some(r)) => r.clone(),
                (None, None) => solve_q_from_cond_d(&case.p, &lam, gamma, a, b, grid)?,
            };
            plain(q, lam, NormKind::Morrey)
        }
        Theorem::GagliardoNirenberg => {
            let lam = case.lambda()?.clone();
            let theta = case.aux_value(case.aux.theta, "theta")?;
            let p_star = case
                .aux
                .p_star
                .as_ref()
                .ok_or_else(|| Error::config("GagliardoNirenberg needs aux.p_star"))?;
            let q = case
                .q
                .clone()
                .ok_or_else(|| Error::config("GagliardoNirenberg needs \"q\""))?;
            let r = gn_interpolation_exponent(p_star, &q, theta)?;
            let mut resolved = plain(r, lam, NormKind::Morrey);
            resolved.weight_rhs = ExponentField::constant(a);
            resolved.interpolation = Some(Interpolation { q, theta });
            resolved
        }
        Theorem::SteinWeiss1958 => {
            let q = given_or(&|| constant_gap((gamma + a - b) / n))?;
            plain(q, zero, NormKind::Lebesgue)
        }
        Theorem::VarSteinWeiss => {
            let q = given_or(&|| solve_q_from_cond_d(&case.p, &zero, gamma, a, b, grid))?;
            plain(q, zero.clone(), NormKind::Lebesgue)
        }
        Theorem::Spanne => {
            let lam = case.lambda()?.clone();
            let q = given_or(&|| constant_gap(gamma / n))?;
            let p = constant_of(&case.p, grid, "p", case.theorem)?;
            let l = constant_of(&lam, grid, "lambda", case.theorem)?;
            let mu = case.aux.mu.unwrap_or(l * q.bounds(grid).0 / p);
            let mut resolved = plain(q, lam, NormKind::Morrey);
            resolved.lam_lhs = ExponentField::constant(mu);
            resolved.weight_lhs = zero.clone();
            resolved.weight_rhs = zero;
            resolved
        }
        Theorem::Adams | Theorem::Krrs => {
            let lam = case.lambda()?.clone();
            let l = constant_of(&lam, grid, "lambda", case.theorem)?;
            let shift = if case.theorem == Theorem::Adams {
                gamma
            } else {
                gamma - (b - a)
            };
            let q = given_or(&|| constant_gap(shift / (n - l)))?;
            let mut resolved = plain(q, lam, NormKind::Morrey);
            if case.theorem == Theorem::Adams {
                resolved.weight_lhs = zero.clone();
                resolved.weight_rhs = zero;
            }
            resolved
        }
        Theorem::Samko => {
            let q = given_or(&|| solve_q_from_cond_d(&case.p, &zero, gamma, 0.0, 0.0, grid))?;
            let nu = case.aux_value(case.aux.nu, "nu")?;
            let p0 = case.p.value_at(&x0);
            let mu = case.aux.mu.unwrap_or(nu / (1.0 / p0 - gamma / n) / p0);
            let mut resolved = plain(q.clone(), zero, NormKind::Lebesgue);
            resolved.weight_lhs = ExponentField::quotient(&ExponentField::constant(mu), &q);
            resolved.weight_rhs = ExponentField::quotient(&ExponentField::constant(nu), &case.p);
            resolved
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use std::sync::Arc;

    fn interval(n: usize) -> Arc<DomainGrid> {
        build_grid(&DomainSpec::interval(-1.0, 1.0, n)).unwrap()
    }

    fn pinned() -> InequalityCase {
        InequalityCase::main(
            0.5,
            0.0,
            0.0,
            ExponentField::constant(1.25),
            ExponentField::constant(0.2),
        )
    }

    #[test]
    fn solve_q_pinned_and_identity() {
        let g = interval(100);
        let q = solve_q_from_cond_d(
            &ExponentField::constant(1.25),
            &ExponentField::constant(0.2),
            0.5,
            0.0,
            0.0,
            &g,
        )
        .unwrap();
        for v in q.sample(&g) {
            assert!((v - 40.0 / 7.0).abs() < 1e-12);
        }
        let p = ExponentField::affine(2.0, 0.3);
        let q = solve_q_from_cond_d(&p, &ExponentField::constant(0.4), 0.3, -0.1, 0.2, &g).unwrap();
        for (qv, pv) in q.sample(&g).iter().zip(p.sample(&g)) {
            assert!((qv - pv).abs() < 1e-12 * pv);
        }
    }

    #[test]
    fn solve_q_names_worst_node() {
        let g = interval(100);
        // 1/p − γ/(n − λ) with p = 1.6 + 0.4x, λ = 0.2, γ = 0.5 turns negative near x = 1
        let p = ExponentField::affine(1.6, 0.4);
        let err =
            solve_q_from_cond_d(&p, &ExponentField::constant(0.2), 0.5, 0.0, 0.0, &g).unwrap_err();
        match err {
            Error::InadmissibleExponent {
                node, reciprocal, ..
            } => {
                assert_eq!(node, 99);
                assert!(reciprocal < 0.0);
            }
            e => panic!("{e}"),
        }
        // λ at the condC boundary: n − γ p = 1 − 0.5·1.25
        let boundary = ExponentField::constant(1.0 - 0.5 * 1.25);
        assert!(
            solve_q_from_cond_d(&ExponentField::constant(1.25), &boundary, 0.5, 0.0, 0.0, &g)
                .is_err()
        );
    }

    #[test]
    fn pinned_main_case_is_admissible() {
        let g = interval(100);
        let v = check_main(&pinned(), &g).unwrap();
        assert!(v.overall, "{:?}", v.failing());
        assert_eq!(v.condition("condA").unwrap().margin, 0.0);
        assert!((v.condition("condC").unwrap().margin - 0.175).abs() < 1e-12);
        assert!(v.condition("condD").unwrap().margin >= -1e-12);
        assert!(v.diagnostics["p"].c0_estimate == 0.0);
    }

    #[test]
    fn boundary_probes() {
        let g = interval(100);
        let mut c = pinned();
        c.a = 0.1;
        c.b = 0.0;
        let v = check_main(&c, &g).unwrap();
        assert!(!v.overall);
        assert!(!v.condition("condA").unwrap().satisfied);

        // b = n/(p')₊ = 1·(1 − 1/1.25) = 0.2
        let mut c = pinned();
        c.b = 0.2;
        c.a = 0.0;
        c.gamma = 0.5;
        let v = check_main(&c, &g).unwrap();
        let cond_b = v.condition("condB").unwrap();
        assert!(!cond_b.satisfied);
        assert!(cond_b.margin.abs() < 1e-12);
        assert!(!v.overall);
    }

    #[test]
    fn missing_lambda_is_config_error() {
        let g = interval(50);
        let c = InequalityCase::new(
            Theorem::MainMorrey,
            0.5,
            0.0,
            0.0,
            ExponentField::constant(2.0),
        );
        assert!(matches!(check_main(&c, &g), Err(Error::Config(_))));
    }

    #[test]
    fn classical_examples() {
        let g = interval(50);
        let sw = InequalityCase::new(
            Theorem::SteinWeiss1958,
            0.5,
            -0.25,
            -0.25,
            ExponentField::constant(2.0),
        )
        .with_q(ExponentField::constant(2.0));
        let v = check_classical(&sw, &g).unwrap();
        assert!(!v.overall);
        assert!(!v.condition("index_identity").unwrap().satisfied);

        let adams =
            InequalityCase::new(Theorem::Adams, 0.25, 0.0, 0.0, ExponentField::constant(2.0))
                .with_lambda(ExponentField::constant(0.2));
        let v = check_classical(&adams, &g).unwrap();
        assert!(v.overall, "{:?}", v.failing());
        let r = resolve(&adams, &g).unwrap();
        assert!((r.q.constant_value().unwrap() - 16.0 / 3.0).abs() < 1e-12);

        let spanne = InequalityCase::new(
            Theorem::Spanne,
            0.25,
            0.0,
            0.0,
            ExponentField::constant(2.0),
        )
        .with_lambda(ExponentField::constant(0.3))
        .with_q(ExponentField::constant(2.0))
        .with_aux(AuxParams {
            mu: Some(0.3),
            ..Default::default()
        });
        let v = check_classical(&spanne, &g).unwrap();
        assert!(v.condition("morrey_identity").unwrap().satisfied);

        let varying = InequalityCase::new(
            Theorem::Adams,
            0.25,
            0.0,
            0.0,
            ExponentField::affine(2.0, 0.1),
        )
        .with_lambda(ExponentField::constant(0.2));
        assert!(matches!(
            check_classical(&varying, &g),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn samko_mu_and_boundary_point() {
        let g = interval(50);
        let p = ExponentField::affine(1.5, 0.1);
        let x0 = Point::on_line(1.0);
        let case = InequalityCase::new(Theorem::Samko, 0.5, 0.0, 0.0, p.clone())
            .with_x0(x0)
            .with_aux(AuxParams {
                nu: Some(0.2),
                ..Default::default()
            });
        let v = check_classical(&case, &g).unwrap();
        assert!(v.overall, "{:?}", v.failing());
        assert!(v.notes.iter().any(|n| n.contains("boundary")));
        let r = resolve(&case, &g).unwrap();
        // μ/q(x₀) = ν/p(x₀)
        let p0 = p.value_at(&x0);
        let q0 = 1.0 / (1.0 / p0 - 0.5);
        let mu = r.weight_lhs.value_at(&x0) * r.q.value_at(&x0);
        assert!((mu / q0 - 0.2 / p0).abs() < 1e-12);
        assert!(check_classical(&case.clone().with_aux(AuxParams::default()), &g).is_err());
    }

    #[test]
    fn krrs_agrees_with_main_on_constant_exponents() {
        let g = interval(40);
        for (gamma, a, b, p, lam) in [
            (0.5, 0.0, 0.0, 1.25, 0.2),
            (0.5, -0.1, 0.1, 1.5, 0.3),
            (0.6, 0.2, 0.1, 1.5, 0.3),
            (0.3, -0.2, -0.1, 2.0, 0.5),
        ] {
            let main = InequalityCase::main(
                gamma,
                a,
                b,
                ExponentField::constant(p),
                ExponentField::constant(lam),
            );
            let mut krrs = main.clone();
            krrs.theorem = Theorem::Krrs;
            let vm = check_main(&main, &g).unwrap();
            let vk = check_classical(&krrs, &g).unwrap();
            for name in ["condA", "condC"] {
                assert_eq!(
                    vm.condition(name).unwrap().satisfied,
                    vk.condition(name).unwrap().satisfied,
                    "{name}"
                );
            }
        }
    }

    #[test]
    fn gn_exponent_and_sigma() {
        let g = interval(20);
        let p4 = ExponentField::constant(4.0);
        let q2 = ExponentField::constant(2.0);
        let r = gn_interpolation_exponent(&p4, &q2, 0.5).unwrap();
        assert!((r.value_at(&Point::ORIGIN) - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(gn_interpolation_exponent(&p4, &q2, 1.0).unwrap(), p4);
        assert_eq!(gn_interpolation_exponent(&p4, &q2, 0.0).unwrap(), q2);
        assert!(gn_interpolation_exponent(&p4, &q2, 1.5).is_err());
        assert_eq!(r.sample(&g).len(), 20);

        assert_eq!(derive_sigma(0.5, 0.0, 0.0).unwrap(), 0.5);
        assert_eq!(derive_sigma(0.5, 0.0, 0.5).unwrap(), 0.0);
        assert!((derive_sigma(0.7, 0.0, 0.2).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            derive_sigma(0.5, 0.0, 0.6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn application_checks() {
        let g = build_grid(&DomainSpec::disk(Point::ORIGIN, 1.0, 20)).unwrap();
        let hs = InequalityCase::new(
            Theorem::HardySobolev,
            1.0,
            0.0,
            0.0,
            ExponentField::constant(1.5),
        )
        .with_lambda(ExponentField::constant(0.2));
        let v = check(&hs, &g).unwrap();
        assert!(v.overall, "{:?}", v.failing());

        let mut bad = hs.clone();
        bad.gamma = 0.8;
        assert!(
            !check(&bad, &g)
                .unwrap()
                .condition("gamma_is_one")
                .unwrap()
                .satisfied
        );

        let fhs = InequalityCase::new(
            Theorem::FractionalHs,
            0.5,
            0.0,
            0.0,
            ExponentField::constant(1.5),
        )
        .with_lambda(ExponentField::constant(0.2))
        .with_aux(AuxParams {
            s: Some(0.25),
            ..Default::default()
        });
        assert!(check(&fhs, &g).unwrap().overall);

        let p = ExponentField::constant(1.5);
        let lam = ExponentField::constant(0.2);
        let p_star = solve_q_from_cond_d(&p, &lam, 1.0, 0.0, 0.0, &g).unwrap();
        let gn = InequalityCase::new(Theorem::GagliardoNirenberg, 1.0, 0.0, 0.0, p.clone())
            .with_lambda(lam.clone())
            .with_q(ExponentField::constant(2.0))
            .with_aux(AuxParams {
                theta: Some(0.5),
                p_star: Some(p_star),
                ..Default::default()
            });
        assert!(
            check(&gn, &g).unwrap().overall,
            "{:?}",
            check(&gn, &g).unwrap().failing()
        );

        let poincare = InequalityCase::new(Theorem::Poincare, 1.0, 0.0, 0.0, p)
            .with_lambda(lam)
            .with_q(ExponentField::constant(2.0));
        let v = check(&poincare, &g).unwrap();
        assert!(v.overall, "{:?}", v.failing());
        assert!(v.condition("q_le_r").unwrap().satisfied);
    }

    #[test]
    fn verdict_json_round_trip() {
        let g = interval(30);
        let v = check_main(&pinned(), &g).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        let back: AdmissibilityVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let c = serde_json::to_string(&pinned()).unwrap();
        assert!(c.contains("\"lambda\""));
        let back: InequalityCase = serde_json::from_str(&c).unwrap();
        assert_eq!(back, pinned());
    }
}
