//! `I_γ χ_{[-1,1]}` against its closed form under refinement, and the
//! near/annulus/far splitting around a point.

use varmorrey::operators::{fractional_integral, fractional_integral_split};
use varmorrey::{build_grid, DomainSpec, GridFunction, Point};

fn exact(x: f64, gamma: f64) -> f64 {
    ((1.0 + x).powf(gamma) + (1.0 - x).powf(gamma)) / gamma
}

fn main() -> varmorrey::Result<()> {
    let gamma = 0.5;
    println!("{:>6}  {:>12}", "N", "max error");
    let mut prev: Option<f64> = None;
    for n in [250, 500, 1000, 2000] {
        let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, n))?;
        let u = fractional_integral(&GridFunction::constant(&grid, 1.0), gamma)?;
        let err = grid
            .nodes()
            .iter()
            .zip(u.samples())
            .map(|(x, v)| (v - exact(x.x, gamma)).abs())
            .fold(0.0, f64::max);
        match prev {
            Some(e) => println!("{n:>6}  {err:>12.3e}  order {:.3}", (e / err).log2()),
            None => println!("{n:>6}  {err:>12.3e}"),
        }
        prev = Some(err);
    }

    let grid = build_grid(&DomainSpec::unit_square(24))?;
    let f = GridFunction::from_fn(&grid, |x| x.x * x.y);
    let (near, mid, far) = fractional_integral_split(&f, 1.2, &Point::new(0.5, 0.5))?;
    let whole = fractional_integral(&f, 1.2)?;
    let k = grid.nearest_node(&Point::new(0.25, 0.75));
    println!(
        "split at (0.25, 0.75): {:.6} + {:.6} + {:.6} = {:.6} (whole {:.6})",
        near.samples()[k],
        mid.samples()[k],
        far.samples()[k],
        near.samples()[k] + mid.samples()[k] + far.samples()[k],
        whole.samples()[k]
    );
    Ok(())
}
