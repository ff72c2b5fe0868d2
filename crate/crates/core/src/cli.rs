//! The `varmorrey` command line.
//!
//! Exit codes: 0 when the case is admissible (or a sweep finished), 2 when
//! it is not, 1 on any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::admissibility::{check, AdmissibilityVerdict};
use crate::casefile::{CaseFile, FunctionSpec};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::grid::build_grid;
use crate::harness::{
    evaluate_case, export_report, refinement_study, sweep_with_progress, ExportFormat,
    HarnessOptions, RatioReport,
};
use crate::norms::{lebesgue_norm, morrey_norm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "varmorrey",
    version,
    about = "Weighted variable-exponent Morrey inequalities on grids"
)]
struct Cli {
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the admissibility conditions of a case.
    Check { case: PathBuf },
    /// Lebesgue and Morrey norms of a test function.
    Norm {
        case: PathBuf,
        /// one | zero | const:C | power:ALPHA
        #[arg(long)]
        function: Option<String>,
    },
    /// Empirical constant of a case over its function family.
    Ratio {
        case: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One report per lattice point and suite case of the case file.
    Sweep {
        case: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical constant across increasing resolutions.
    Refine {
        case: PathBuf,
        /// Comma-separated, increasing; overrides the case file.
        #[arg(long, value_delimiter = ',')]
        resolutions: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Evaluate inadmissible cases anyway; their reports are flagged.
    #[arg(long)]
    allow_inadmissible: bool,
}

struct Io<'a> {
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
    json: bool,
}

/// Runs the command line with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let target: &mut (dyn Write + Send) = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return EXIT_ERROR;
        }
    };
    let mut io = Io {
        out,
        err,
        json: cli.json,
    };
    let result = pool.install(|| dispatch(&cli.command, &mut io));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: &Command, io: &mut Io) -> Result<i32> {
    match cmd {
        Command::Check { case } => cmd_check(case, io),
        Command::Norm { case, function } => cmd_norm(case, function.as_deref(), io),
        Command::Ratio { case, output } => cmd_ratio(case, output, io),
        Command::Sweep { case, output } => cmd_sweep(case, output, io),
        Command::Refine {
            case,
            resolutions,
            output,
        } => cmd_refine(case, resolutions, output, io),
    }
}

fn load(path: &Path) -> Result<CaseFile> {
    CaseFile::load(path).map_err(|e| match e {
        Error::Json(j) => Error::config(format!("{}: {j}", path.display())),
        other => other,
    })
}

fn emit(io: &mut Io, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(io.out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn line(w: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    writeln!(w, "{}", text.as_ref()).map_err(|e| Error::io("<output>", e))
}

fn verdict_table(io: &mut Io, v: &AdmissibilityVerdict) -> Result<()> {
    line(io.out, format!("theorem {}", v.theorem))?;
    line(
        io.out,
        format!("{:<24} {:<4} {:>14}", "condition", "ok", "margin"),
    )?;
    for c in &v.conditions {
        let ok = if c.satisfied { "yes" } else { "NO" };
        line(
            io.out,
            format!("{:<24} {:<4} {:>14.6e}", c.name, ok, c.margin),
        )?;
    }
    for n in &v.notes {
        line(io.out, format!("note: {n}"))?;
    }
    line(
        io.out,
        format!(
            "overall: {}",
            if v.overall {
                "admissible"
            } else {
                "inadmissible"
            }
        ),
    )
}

fn exit_for(admissible: bool) -> i32 {
    if admissible {
        EXIT_OK
    } else {
        EXIT_INADMISSIBLE
    }
}

fn cmd_check(path: &Path, io: &mut Io) -> Result<i32> {
    let cf = load(path)?;
    let grid = build_grid(&cf.domain)?;
    let v = check(&cf.case(), &grid)?;
    if io.json {
        emit(io, &serde_json::to_value(&v)?)?;
    } else {
        verdict_table(io, &v)?;
    }
    Ok(exit_for(v.overall))
}

fn cmd_norm(path: &Path, function: Option<&str>, io: &mut Io) -> Result<i32> {
    let cf = load(path)?;
    let grid = build_grid(&cf.domain)?;
    let spec: FunctionSpec = function
        .or(cf.function.as_deref())
        .unwrap_or("one")
        .parse()?;
    let x0 = cf.case().resolved_x0(&grid);
    let f = spec.sample(&grid, &x0);
    let lam = cf
        .lam
        .clone()
        .unwrap_or_else(|| ExponentField::constant(0.0));
    let leb = lebesgue_norm(&f, &cf.p, None)?;
    let mor = morrey_norm(&f, &cf.p, &lam)?;
    if io.json {
        emit(io, &json!({ "lebesgue": leb, "morrey": mor }))?;
    } else {
        for (name, r) in [("lebesgue", leb), ("morrey", mor)] {
            line(
                io.out,
                format!(
                    "{name:<9} {:.6}  (modular {:.9}, {} evaluations, bracket [{:.6e}, {:.6e}])",
                    r.value, r.modular_at_value, r.bisection_iterations, r.bracket.0, r.bracket.1
                ),
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn output_target(cf: &CaseFile, args: &OutputArgs) -> Result<(PathBuf, ExportFormat)> {
    let path = args
        .out
        .clone()
        .or_else(|| cf.output.as_ref().map(|o| o.path.clone()))
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let format = match (&args.format, &cf.output) {
        (Some(f), _) => f.parse()?,
        (None, Some(o)) if args.out.is_none() => o.format,
        _ if path.extension().is_some_and(|e| e == "csv") => ExportFormat::Csv,
        _ => ExportFormat::Json,
    };
    Ok((path, format))
}

fn options(cf: &CaseFile, args: &OutputArgs) -> HarnessOptions {
    HarnessOptions {
        seed: cf.seed,
        allow_inadmissible: args.allow_inadmissible,
    }
}

fn report_summary(r: &RatioReport) -> serde_json::Value {
    json!({
        "case_id": r.case_id,
        "theorem": r.case.theorem,
        "gamma": r.case.gamma,
        "a": r.case.a,
        "b": r.case.b,
        "admissible": r.admissible,
        "evaluated": r.evaluated,
        "members": r.members.len(),
        "sup_ratio": r.sup_ratio,
        "stability": r.stability,
        "violation": r.violation,
        "error": r.error,
    })
}

/// Refuses inadmissible cases without the override. Returns the exit code
/// to stop with, if any.
fn gate(report: &RatioReport, args: &OutputArgs, io: &mut Io) -> Result<Option<i32>> {
    if let Some(v) = &report.verdict {
        if !v.overall && !args.allow_inadmissible {
            line(
                io.err,
                format!(
                    "{}: inadmissible ({}); rerun with --allow-inadmissible to evaluate anyway",
                    report.case_id,
                    v.failing().join(", ")
                ),
            )?;
            if io.json {
                emit(io, &report_summary(report))?;
            }
            return Ok(Some(EXIT_INADMISSIBLE));
        }
    }
    if !report.evaluated {
        return Err(Error::config(
            report
                .error
                .clone()
                .unwrap_or_else(|| "case was not evaluated".into()),
        ));
    }
    Ok(None)
}

fn cmd_ratio(path: &Path, args: &OutputArgs, io: &mut Io) -> Result<i32> {
    let cf = load(path)?;
    let (out, format) = output_target(&cf, args)?;
    let report = evaluate_case(
        "case-000",
        &cf.case(),
        &cf.family,
        &cf.domain,
        &options(&cf, args),
    );
    if let Some(code) = gate(&report, args, io)? {
        return Ok(code);
    }
    export_report(std::slice::from_ref(&report), &out, format)?;
    if io.json {
        let mut s = report_summary(&report);
        s["output"] = json!(out);
        emit(io, &s)?;
    } else {
        if report.is_flagged() {
            line(
                io.out,
                "warning: case is inadmissible; evaluated on request",
            )?;
        }
        line(io.out, format!("members   {}", report.members.len()))?;
        line(io.out, format!("sup_ratio {:.6}", report.sup_ratio))?;
        if report.violation {
            line(io.out, "violation: rhs vanished with nonzero lhs")?;
        }
        line(io.out, format!("report    {}", out.display()))?;
    }
    if let Some(e) = &report.error {
        line(io.err, format!("error: {e}"))?;
        return Ok(EXIT_ERROR);
    }
    Ok(exit_for(report.admissible))
}

fn cmd_sweep(path: &Path, args: &OutputArgs, io: &mut Io) -> Result<i32> {
    let cf = load(path)?;
    let (out, format) = output_target(&cf, args)?;
    let cases = cf.sweep_cases();
    line(io.err, format!("sweeping {} cases", cases.len()))?;
    let progress = std::sync::Mutex::new(&mut *io.err);
    let reports = sweep_with_progress(
        &cases,
        &cf.family,
        &cf.domain,
        &options(&cf, args),
        &|i, r| {
            if let Ok(mut w) = progress.lock() {
                let _ = writeln!(
                    w,
                    "case-{i:03} done: admissible={} sup_ratio={:.6}{}",
                    r.admissible,
                    r.sup_ratio,
                    r.error
                        .as_ref()
                        .map(|e| format!(" error: {e}"))
                        .unwrap_or_default()
                );
            }
        },
    );
    export_report(&reports, &out, format)?;
    if io.json {
        emit(
            io,
            &json!({
                "output": out,
                "reports": reports.iter().map(report_summary).collect::<Vec<_>>(),
            }),
        )?;
    } else {
        line(
            io.out,
            format!(
                "{:<10} {:>8} {:>8} {:>8} {:<11} {:>12}",
                "case", "gamma", "a", "b", "admissible", "sup_ratio"
            ),
        )?;
        for r in &reports {
            line(
                io.out,
                format!(
                    "{:<10} {:>8} {:>8} {:>8} {:<11} {:>12.6}",
                    r.case_id, r.case.gamma, r.case.a, r.case.b, r.admissible, r.sup_ratio
                ),
            )?;
        }
        line(io.out, format!("report {}", out.display()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_refine(path: &Path, resolutions: &[usize], args: &OutputArgs, io: &mut Io) -> Result<i32> {
    let cf = load(path)?;
    let (out, format) = output_target(&cf, args)?;
    let res = if resolutions.is_empty() {
        cf.resolutions.clone().ok_or_else(|| {
            Error::config("refine needs --resolutions or \"resolutions\" in the case file")
        })?
    } else {
        resolutions.to_vec()
    };
    let report = refinement_study(
        "case-000",
        &cf.case(),
        &cf.family,
        &cf.domain,
        &res,
        &options(&cf, args),
    )?;
    if let Some(code) = gate(&report, args, io)? {
        return Ok(code);
    }
    export_report(std::slice::from_ref(&report), &out, format)?;
    if io.json {
        let mut s = report_summary(&report);
        s["refinement"] = serde_json::to_value(&report.refinement)?;
        s["output"] = json!(out);
        emit(io, &s)?;
    } else {
        line(io.out, format!("{:>10} {:>12}", "resolution", "sup_ratio"))?;
        for row in &report.refinement {
            line(
                io.out,
                format!("{:>10} {:>12.6}", row.resolution, row.sup_ratio),
            )?;
        }
        if let Some(s) = report.stability {
            line(io.out, format!("stability {s:.4}"))?;
        }
        line(io.out, format!("report {}", out.display()))?;
    }
    if let Some(e) = &report.error {
        line(io.err, format!("error: {e}"))?;
        return Ok(EXIT_ERROR);
    }
    Ok(exit_for(report.admissible))
}
