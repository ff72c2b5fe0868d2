//! Seeded test-function families.

use varmorrey::harness::{generate_family, FamilyContext, FamilySpec};
use varmorrey::{build_grid, DomainSpec, Point};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::unit_square(32))?;
    let ctx = FamilyContext {
        x0: Point::new(0.5, 0.5),
        p_plus: 2.0,
    };
    for spec in [
        FamilySpec::default(),
        FamilySpec::Trig { count: 3, terms: 2 },
        FamilySpec::Indicator {
            center: Point::new(0.3, 0.6),
            radius: 0.2,
        },
        FamilySpec::GradientPair { count: 2 },
    ] {
        let fam = generate_family(&spec, &grid, 42, &ctx)?;
        let ids: Vec<_> = fam.members.iter().map(|m| m.id.as_str()).collect();
        println!(
            "{}: {} members {:?}",
            serde_json::to_string(&spec).unwrap(),
            fam.len(),
            ids
        );
    }
    Ok(())
}
