//! Variable-exponent Morrey norms in one and two dimensions.

use varmorrey::norms::{lebesgue_norm, morrey_norm, morrey_norm_equiv};
use varmorrey::{build_grid, DomainSpec, ExponentField, GridFunction, Point};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 800))?;
    let f = GridFunction::from_fn(&grid, |x| x.norm().powf(-0.3));
    let p = ExponentField::affine(1.5, 0.2);

    println!("{:>6}  {:>12}  {:>12}", "λ", "Morrey", "equivalent");
    for lam in [0.0, 0.2, 0.4, 0.6] {
        let l = ExponentField::constant(lam);
        println!(
            "{lam:>6.2}  {:>12.6}  {:>12.6}",
            morrey_norm(&f, &p, &l)?.value,
            morrey_norm_equiv(&f, &p, &l)?
        );
    }
    println!("Lebesgue      {:>12.6}", lebesgue_norm(&f, &p, None)?.value);

    let disk = build_grid(&DomainSpec::disk(Point::ORIGIN, 1.0, 40))?;
    let g = GridFunction::from_fn(&disk, |x| (1.0 - x.norm()).max(0.0));
    let p = ExponentField::affine_2d(2.0, [0.3, -0.1]);
    let lam = ExponentField::affine_2d(0.8, [0.0, 0.2]);
    println!(
        "disk, {} nodes: ‖1 − |x|‖ = {:.6}",
        disk.len(),
        morrey_norm(&g, &p, &lam)?.value
    );
    Ok(())
}
