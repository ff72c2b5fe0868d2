use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{FamilySpec, VIOLATION_TOLERANCE};
use crate::admissibility::{AdmissibilityVerdict, InequalityCase};
use crate::error::{Error, Result};
use crate::grid::DomainSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRatio {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent when `rhs = 0`.
    pub ratio: Option<f64>,
    /// `rhs = 0` while `lhs` is not.
    pub violation: bool,
}

impl MemberRatio {
    pub fn new(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let (ratio, violation) = if rhs > 0.0 {
            (Some(lhs / rhs), false)
        } else {
            (None, lhs > VIOLATION_TOLERANCE)
        };
        MemberRatio {
            id: id.into(),
            lhs,
            rhs,
            ratio,
            violation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub resolution: usize,
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub seed: u64,
    pub grid: DomainSpec,
    pub family: FamilySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub case_id: String,
    pub case: InequalityCase,
    pub verdict: Option<AdmissibilityVerdict>,
    pub admissible: bool,
    /// False when the family was never evaluated (inadmissible without the
    /// override, or an earlier failure).
    pub evaluated: bool,
    pub members: Vec<MemberRatio>,
    pub sup_ratio: f64,
    pub refinement: Vec<RefinementRow>,
    pub stability: Option<f64>,
    pub violation: bool,
    pub error: Option<String>,
    pub metadata: ReportMetadata,
}

impl RatioReport {
    pub(crate) fn empty(
        case_id: &str,
        case: &InequalityCase,
        family: &FamilySpec,
        grid: &DomainSpec,
        seed: u64,
    ) -> Self {
        RatioReport {
            case_id: case_id.to_string(),
            case: case.clone(),
            verdict: None,
            admissible: false,
            evaluated: false,
            members: Vec::new(),
            sup_ratio: 0.0,
            refinement: Vec::new(),
            stability: None,
            violation: false,
            error: None,
            metadata: ReportMetadata {
                seed,
                grid: grid.clone(),
                family: family.clone(),
            },
        }
    }

    pub fn set_members(&mut self, members: Vec<MemberRatio>) {
        self.sup_ratio = members.iter().filter_map(|m| m.ratio).fold(0.0, f64::max);
        self.violation = members.iter().any(|m| m.violation);
        self.members = members;
    }

    /// Inadmissible cases that were evaluated anyway.
    pub fn is_flagged(&self) -> bool {
        self.evaluated && !self.admissible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::config(format!(
                "unknown format {other:?}, expected csv or json"
            ))),
        }
    }
}

const CSV_HEADER: [&str; 9] = [
    "case_id",
    "theorem",
    "gamma",
    "a",
    "b",
    "lhs",
    "rhs",
    "ratio",
    "admissible",
];

pub fn render_report(reports: &[RatioReport], format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(reports)?;
            out.push(b'\n');
            Ok(out)
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in reports {
                for m in &r.members {
                    w.write_record([
                        r.case_id.clone(),
                        r.case.theorem.name().to_string(),
                        r.case.gamma.to_string(),
                        r.case.a.to_string(),
                        r.case.b.to_string(),
                        m.lhs.to_string(),
                        m.rhs.to_string(),
                        m.ratio.map(|x| x.to_string()).unwrap_or_default(),
                        r.admissible.to_string(),
                    ])?;
                }
            }
            w.into_inner()
                .map_err(|e| Error::Csv(e.into_error().into()))
        }
    }
}

/// Writes to a temporary file next to `path` and renames it into place, so
/// an interrupted run never leaves a partial file.
pub fn export_report(reports: &[RatioReport], path: &Path, format: ExportFormat) -> Result<()> {
    let bytes = render_report(reports, format)?;
    write_atomic(path, &bytes)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentField;

    fn report(n: usize) -> RatioReport {
        let case = InequalityCase::main(
            0.5,
            0.0,
            0.0,
            ExponentField::constant(1.25),
            ExponentField::constant(0.2),
        );
        let mut r = RatioReport::empty(
            "case-000",
            &case,
            &FamilySpec::default(),
            &DomainSpec::interval(-1.0, 1.0, 10),
            0,
        );
        r.admissible = true;
        r.evaluated = true;
        r.set_members(
            (0..n)
                .map(|i| MemberRatio::new(format!("m{i}"), 0.1 * (i as f64 + 1.0), 0.3))
                .collect(),
        );
        r
    }

    #[test]
    fn member_ratio_flags() {
        assert_eq!(MemberRatio::new("a", 0.0, 0.0).ratio, None);
        assert!(!MemberRatio::new("a", 0.0, 0.0).violation);
        assert!(MemberRatio::new("a", 1.0, 0.0).violation);
        assert_eq!(MemberRatio::new("a", 1.0, 2.0).ratio, Some(0.5));
    }

    #[test]
    fn sup_is_max_of_ratios() {
        let r = report(3);
        assert_eq!(
            r.sup_ratio,
            r.members.iter().filter_map(|m| m.ratio).fold(0.0, f64::max)
        );
        assert!(!r.violation);
    }

    #[test]
    fn csv_shapes() {
        let empty = String::from_utf8(render_report(&[], ExportFormat::Csv).unwrap()).unwrap();
        assert_eq!(
            empty,
            "case_id,theorem,gamma,a,b,lhs,rhs,ratio,admissible\n"
        );
        let three =
            String::from_utf8(render_report(&[report(3)], ExportFormat::Csv).unwrap()).unwrap();
        assert_eq!(three.lines().count(), 4);
        assert!(three
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("case-000,MainMorrey,0.5,0,0,"));
    }

    #[test]
    fn json_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let reports = vec![report(3), report(1)];
        export_report(&reports, &path, ExportFormat::Json).unwrap();
        let back: Vec<RatioReport> =
            serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        assert_eq!(back, reports);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_path_names_it() {
        let err =
            export_report(&[], Path::new("/nonexistent-dir/x.csv"), ExportFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
