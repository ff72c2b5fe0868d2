//! Numerical checks of the auxiliary estimates: modular/norm comparison,
//! ball characteristic functions, radius powers, the weighted power
//! integral and `‖χ_Ω‖`.

use varmorrey::lemmas::{
    ball_characteristic_ratio, char_estimate, integral_bound_check, modular_to_norm_check,
    radius_power_check,
};
use varmorrey::{build_grid, DomainSpec, ExponentField, GridFunction, Point};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 400))?;
    let p = ExponentField::affine(2.0, 0.5);
    let lam = ExponentField::sine(0.4, 0.1, &[2.0], 0.0);

    let f = GridFunction::from_fn(&grid, |x| 3.0 * (1.0 - x.x * x.x));
    let c = modular_to_norm_check(&f, &p, &lam)?;
    println!(
        "modular {:.4} norm {:.4}  bounds {:.4} / {:.4}  holds {}",
        c.modular, c.norm, c.norm_bound, c.modular_bound, c.holds
    );

    let b = ball_characteristic_ratio(&grid, &p)?;
    println!(
        "‖χ_B‖ ratio at {:?}, r = {:.4}: {:.4}",
        b.center, b.radius, b.ratio
    );

    let r = radius_power_check(&grid, &lam, 0);
    println!(
        "radius powers: C0 {:.4}, constant {:.4}, worst ratio {:.4}, holds {}",
        r.c0, r.constant, r.max_ratio, r.holds
    );

    let ib = integral_bound_check(&grid, &lam, &Point::ORIGIN)?;
    println!(
        "weighted power integral / r^λ(x0): max {:.4} over {} radii",
        ib.max_ratio,
        ib.rows.len()
    );

    let (norm, bound) = char_estimate(&grid, &ExponentField::constant(1.5))?;
    println!("‖χ_Ω‖ = {norm:.4} ≤ 1 + |Ω| = {bound:.4}");
    Ok(())
}
