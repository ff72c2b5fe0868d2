//! Poincaré-, Hardy–Sobolev-, Gagliardo–Nirenberg- and fractional
//! Hardy–Sobolev-type ratios, plus the pointwise Poincaré bound.

use varmorrey::admissibility::{resolve, AuxParams, InequalityCase, Theorem};
use varmorrey::harness::{
    application_ratio, evaluate_case, generate_family, pointwise_poincare_ratio, FamilyContext,
    FamilySpec, HarnessOptions,
};
use varmorrey::{build_grid, DomainSpec, ExponentField, Point};

fn main() -> varmorrey::Result<()> {
    let spec = DomainSpec::disk(Point::ORIGIN, 1.0, 32);
    let grid = build_grid(&spec)?;
    let ctx = FamilyContext {
        x0: Point::ORIGIN,
        p_plus: 2.0,
    };
    let pairs = generate_family(&FamilySpec::GradientPair { count: 6 }, &grid, 0, &ctx)?;

    let wpi = pairs
        .members
        .iter()
        .map(pointwise_poincare_ratio)
        .collect::<varmorrey::Result<Vec<_>>>()?;
    println!("pointwise Poincaré ratios: {wpi:.4?}");

    let p = ExponentField::constant(1.5);
    let lam = ExponentField::constant(0.5);
    let cases = [
        (
            "Poincaré",
            InequalityCase::new(
                Theorem::Poincare,
                1.0,
                0.0,
                0.0,
                ExponentField::constant(1.2),
            ),
        ),
        (
            "Hardy–Sobolev",
            InequalityCase::new(Theorem::HardySobolev, 1.0, -0.1, 0.0, p.clone()),
        ),
        (
            "Gagliardo–Nirenberg",
            InequalityCase::new(Theorem::GagliardoNirenberg, 1.0, -0.1, -0.1, p.clone())
                .with_q(ExponentField::constant(2.0))
                .with_aux(AuxParams {
                    theta: Some(0.5),
                    p_star: Some(ExponentField::constant(3.0)),
                    ..AuxParams::default()
                }),
        ),
    ];
    for (name, case) in cases {
        let case = case.with_lambda(lam.clone());
        match resolve(&case, &grid) {
            Ok(rc) => {
                let mut sup: f64 = 0.0;
                for m in &pairs.members {
                    let (l, r) = application_ratio(&rc, m)?;
                    sup = sup.max(l / r);
                }
                println!("{name}: sup ratio {sup:.4}");
            }
            Err(e) => println!("{name}: {e}"),
        }
    }

    let s = 0.25;
    let fhs = InequalityCase::new(
        Theorem::FractionalHs,
        2.0 * s,
        0.0,
        0.0,
        ExponentField::constant(1.25),
    )
    .with_lambda(ExponentField::constant(0.2))
    .with_aux(AuxParams {
        s: Some(s),
        ..AuxParams::default()
    });
    let family = FamilySpec::PotentialPair {
        s,
        base: Box::new(FamilySpec::default()),
    };
    let line = DomainSpec::interval(-1.0, 1.0, 400);
    let report = evaluate_case("fhs", &fhs, &family, &line, &HarnessOptions::default());
    println!(
        "fractional Hardy–Sobolev, s = {s}: sup ratio {:.4}",
        report.sup_ratio
    );
    Ok(())
}
