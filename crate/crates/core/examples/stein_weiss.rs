//! Ratios `‖|x|^{-b} I_γ f‖ / ‖|x|^{a} f‖` over a seeded family, then a
//! refinement study of the supremum.

use varmorrey::admissibility::InequalityCase;
use varmorrey::harness::{evaluate_case, refinement_study, FamilySpec, HarnessOptions};
use varmorrey::{DomainSpec, ExponentField};

fn main() -> varmorrey::Result<()> {
    let case = InequalityCase::main(
        0.4,
        -0.1,
        0.0,
        ExponentField::affine(1.5, 0.1),
        ExponentField::constant(0.3),
    );
    let spec = DomainSpec::interval(-1.0, 1.0, 300);
    let options = HarnessOptions::default();

    let report = evaluate_case("demo", &case, &FamilySpec::default(), &spec, &options);
    if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    let mut members = report.members.clone();
    members.sort_by(|x, y| y.ratio.partial_cmp(&x.ratio).unwrap());
    for m in members.iter().take(5) {
        println!(
            "{:<10} lhs {:.5}  rhs {:.5}  ratio {:.5}",
            m.id,
            m.lhs,
            m.rhs,
            m.ratio.unwrap_or(f64::NAN)
        );
    }
    println!(
        "sup over {} members: {:.5}",
        report.members.len(),
        report.sup_ratio
    );

    let study = refinement_study(
        "demo",
        &case,
        &FamilySpec::default(),
        &spec,
        &[150, 300, 600],
        &options,
    )?;
    for row in &study.refinement {
        println!("N={:<5} sup {:.5}", row.resolution, row.sup_ratio);
    }
    println!(
        "relative change on last refinement: {:.3}%",
        100.0 * study.stability.unwrap_or(f64::NAN)
    );
    Ok(())
}
