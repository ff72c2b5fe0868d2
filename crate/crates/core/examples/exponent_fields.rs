//! Building exponent fields, their bounds, conjugates and log-Hölder constants.

use varmorrey::{build_grid, DomainSpec, ExponentField, Point};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 400))?;
    let fields = [
        ("constant", ExponentField::constant(2.0)),
        ("affine", ExponentField::affine(1.6, 0.3)),
        ("sine", ExponentField::sine(2.0, 0.4, &[3.0], 0.0)),
        (
            "table",
            ExponentField::table(
                vec![
                    Point::on_line(-1.0),
                    Point::on_line(0.0),
                    Point::on_line(1.0),
                ],
                vec![1.5, 3.0, 2.0],
            )?,
        ),
    ];
    println!(
        "{:<9} {:>7} {:>7} {:>9} {:>10}",
        "field", "p-", "p+", "p'(0)", "C0"
    );
    for (name, p) in &fields {
        let (lo, hi) = p.bounds(&grid);
        let conj = p.conjugate(&grid)?;
        let lh = p.lh0_modulus(&grid);
        println!(
            "{name:<9} {lo:>7.3} {hi:>7.3} {:>9.4} {:>10.4}",
            conj.value_at(&Point::ORIGIN),
            lh.c0_estimate
        );
    }

    let p = &fields[1].1;
    let lam = ExponentField::constant(0.3);
    let ratio = ExponentField::lambda_over_p(&lam, p);
    println!(
        "λ/p at x = 0.5: {:.6}",
        ratio.value_at(&Point::on_line(0.5))
    );
    println!("serialized: {}", serde_json::to_string(p).unwrap());
    Ok(())
}
