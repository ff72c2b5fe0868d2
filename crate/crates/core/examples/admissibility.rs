//! Checking parameter sets before evaluating anything.

use varmorrey::admissibility::{check, derive_sigma, solve_q_from_cond_d, InequalityCase, Theorem};
use varmorrey::{build_grid, DomainSpec, ExponentField};

fn show(label: &str, case: &InequalityCase, grid: &varmorrey::DomainGrid) -> varmorrey::Result<()> {
    let v = check(case, grid)?;
    println!(
        "{label}: {}",
        if v.overall {
            "admissible"
        } else {
            "inadmissible"
        }
    );
    for c in &v.conditions {
        println!("  {:<8} {:<5} {:+.4e}", c.name, c.satisfied, c.margin);
    }
    for n in &v.notes {
        println!("  note: {n}");
    }
    Ok(())
}

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 200))?;
    let p = ExponentField::constant(1.25);
    let lam = ExponentField::constant(0.2);

    show(
        "γ=0.5, a=b=0",
        &InequalityCase::main(0.5, 0.0, 0.0, p.clone(), lam.clone()),
        &grid,
    )?;
    show(
        "a > b",
        &InequalityCase::main(0.5, 0.1, 0.0, p.clone(), lam.clone()),
        &grid,
    )?;
    // b at the endpoint n(1 − 1/p₋) is excluded
    show(
        "b = 0.2",
        &InequalityCase::main(0.5, 0.0, 0.2, p.clone(), lam.clone()),
        &grid,
    )?;

    let q = solve_q_from_cond_d(&p, &lam, 0.5, 0.0, 0.0, &grid)?;
    println!("solved q = {:.6}", q.bounds(&grid).0);
    println!(
        "σ for γ=0.5, a=-0.1, b=0.1: {}",
        derive_sigma(0.5, -0.1, 0.1)?
    );

    let classical = InequalityCase::new(Theorem::Adams, 0.5, 0.0, 0.0, p).with_lambda(lam);
    show("Adams", &classical, &grid)?;
    Ok(())
}
