//! A parameter sweep exported as CSV and JSON.

use varmorrey::admissibility::InequalityCase;
use varmorrey::harness::{
    export_report, render_report, sweep, ExportFormat, FamilySpec, HarnessOptions,
};
use varmorrey::{DomainSpec, ExponentField};

fn main() -> varmorrey::Result<()> {
    let p = ExponentField::affine(1.15, 0.05);
    let lam = ExponentField::constant(0.1);
    let cases: Vec<_> = [-0.2, -0.1, 0.0]
        .into_iter()
        .map(|a| InequalityCase::main(0.5, a, a, p.clone(), lam.clone()))
        .collect();
    let family = FamilySpec::Power {
        alphas: vec![-0.3, 0.0, 0.5, 1.0],
        count: 4,
    };
    let spec = DomainSpec::interval(-1.0, 1.0, 200);
    let reports = sweep(
        &cases,
        &family,
        &spec,
        &HarnessOptions {
            seed: 7,
            allow_inadmissible: false,
        },
    );

    for r in &reports {
        println!(
            "{}  a={:+.1}  admissible={}  sup={:.5}",
            r.case_id, r.case.a, r.admissible, r.sup_ratio
        );
    }
    print!(
        "{}",
        String::from_utf8_lossy(&render_report(&reports, ExportFormat::Csv)?)
    );

    let path = std::env::temp_dir().join("varmorrey-sweep.json");
    export_report(&reports, &path, ExportFormat::Json)?;
    println!("wrote {}", path.display());
    Ok(())
}
