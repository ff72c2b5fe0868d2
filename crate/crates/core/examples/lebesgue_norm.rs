//! Luxemburg norms of `χ_Ω` and `|x|^α` against their closed forms.

use varmorrey::norms::{lebesgue_modular, lebesgue_norm};
use varmorrey::{build_grid, DomainSpec, ExponentField, GridFunction};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 2000))?;

    let one = GridFunction::constant(&grid, 1.0);
    for p in [1.0, 1.5, 2.0, 4.0] {
        let r = lebesgue_norm(&one, &ExponentField::constant(p), None)?;
        println!(
            "‖χ‖_{p:<4} = {:.8}   exact {:.8}   ({} iterations)",
            r.value,
            2f64.powf(1.0 / p),
            r.bisection_iterations
        );
    }

    // ∫_{-1}^{1} |x|^{αp} dx = 2/(αp + 1)
    let alpha = 0.5;
    let f = GridFunction::from_fn(&grid, |x| x.norm().powf(alpha));
    let p = 2.0;
    let r = lebesgue_norm(&f, &ExponentField::constant(p), None)?;
    println!(
        "‖|x|^{alpha}‖_{p} = {:.8}   exact {:.8}",
        r.value,
        (2.0 / (alpha * p + 1.0)).powf(1.0 / p)
    );

    // variable exponent: no closed form, but ρ(f/‖f‖) = 1
    let p = ExponentField::affine(1.8, 0.6);
    let r = lebesgue_norm(&f, &p, None)?;
    let m = lebesgue_modular(&f.scale(1.0 / r.value), &p, None)?;
    println!(
        "p(x) = 1.8 + 0.6x: norm {:.8}, modular at norm {m:.12}",
        r.value
    );
    Ok(())
}
