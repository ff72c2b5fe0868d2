//! JSON case files.
//!
//! ```json
//! {
//!   "domain": { "shape": "interval", "bounds": [-1, 1], "resolution": 500 },
//!   "theorem": "MainMorrey",
//!   "gamma": 0.5,
//!   "p": { "kind": "constant", "value": 1.25 },
//!   "lambda": { "kind": "constant", "value": 0.2 },
//!   "family": { "kind": "mixed" },
//!   "output": { "path": "report.csv", "format": "csv" }
//! }
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::admissibility::{AuxParams, InequalityCase, Theorem};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::Point;
use crate::grid::{DomainGrid, DomainSpec, GridFunction};
use crate::harness::{ExportFormat, FamilySpec};
use crate::operators::weight_power;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub domain: DomainSpec,
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
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Lattice>,
    /// Further cases for `sweep`, evaluated after the lattice.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suite: Vec<InequalityCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<usize>>,
    /// Test function for the `norm` command, in `FunctionSpec` syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: ExportFormat,
}

fn default_format() -> ExportFormat {
    ExportFormat::Json
}

/// Parameter lattice for `sweep`: the Cartesian product of the listed
/// values, with absent axes fixed at the case's own value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    /// Ignore `b` and set `b = a` at every lattice point.
    #[serde(default)]
    pub b_equals_a: bool,
}

impl CaseFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn case(&self) -> InequalityCase {
        InequalityCase {
            theorem: self.theorem,
            gamma: self.gamma,
            a: self.a,
            b: self.b,
            x0: self.x0,
            p: self.p.clone(),
            q: self.q.clone(),
            lam: self.lam.clone(),
            aux: self.aux.clone(),
        }
    }

    /// The lattice cases in `gamma`, `a`, `b` order; the case itself when
    /// there is no lattice.
    pub fn lattice_cases(&self) -> Vec<InequalityCase> {
        let base = self.case();
        let Some(l) = &self.lattice else {
            return vec![base];
        };
        let gammas = l.gamma.clone().unwrap_or_else(|| vec![self.gamma]);
        let as_ = l.a.clone().unwrap_or_else(|| vec![self.a]);
        let bs = if l.b_equals_a {
            vec![f64::NAN]
        } else {
            l.b.clone().unwrap_or_else(|| vec![self.b])
        };
        let mut out = Vec::new();
        for &g in &gammas {
            for &a in &as_ {
                for &b in &bs {
                    let mut c = base.clone();
                    c.gamma = g;
                    c.a = a;
                    c.b = if l.b_equals_a { a } else { b };
                    out.push(c);
                }
            }
        }
        out
    }

    /// Everything `sweep` evaluates: the lattice cases, then the suite.
    pub fn sweep_cases(&self) -> Vec<InequalityCase> {
        let mut cases = self.lattice_cases();
        cases.extend(self.suite.iter().cloned());
        cases
    }
}

/// Test functions for `norm`: `one`, `zero`, `const:C`, `power:ALPHA`
/// (`|x − x₀|^α` about the case's `x₀`, or the origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionSpec {
    One,
    Zero,
    Constant(f64),
    Power(f64),
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(format!(
                "unknown function {s:?}; expected one, zero, const:C or power:ALPHA"
            ))
        };
        let number = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        match s.trim().split_once(':') {
            None if s.trim() == "one" => Ok(FunctionSpec::One),
            None if s.trim() == "zero" => Ok(FunctionSpec::Zero),
            Some(("const", v)) => Ok(FunctionSpec::Constant(number(v)?)),
            Some(("power", v)) => Ok(FunctionSpec::Power(number(v)?)),
            _ => Err(bad()),
        }
    }
}

impl FunctionSpec {
    pub fn sample(&self, grid: &Arc<DomainGrid>, x0: &Point) -> GridFunction {
        match *self {
            FunctionSpec::One => GridFunction::constant(grid, 1.0),
            FunctionSpec::Zero => GridFunction::zeros(grid),
            FunctionSpec::Constant(c) => GridFunction::constant(grid, c),
            FunctionSpec::Power(alpha) => weight_power(grid, x0, alpha),
        }
    }
}
