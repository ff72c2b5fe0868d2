//! The fractional maximal function and empirical `M^λ_p → M^λ_q` bounds for
//! `M_σ` and `I_σ`.

use varmorrey::harness::{
    generate_family, operator_bound_sup, FamilyContext, FamilySpec, Operator,
};
use varmorrey::operators::fractional_maximal;
use varmorrey::{build_grid, DomainSpec, ExponentField, GridFunction, Point};

fn main() -> varmorrey::Result<()> {
    let grid = build_grid(&DomainSpec::interval(-1.0, 1.0, 400))?;
    let f = GridFunction::from_fn(&grid, |x| if x.x.abs() < 0.1 { 1.0 } else { 0.0 });
    for sigma in [0.0, 0.3, 0.6] {
        let m = fractional_maximal(&f, sigma)?;
        let at = |x: f64| m.samples()[grid.nearest_node(&Point::on_line(x))];
        println!(
            "M_{sigma} χ: x=0 {:.4}  x=0.5 {:.4}  x=0.9 {:.4}",
            at(0.0),
            at(0.5),
            at(0.9)
        );
    }

    let p = ExponentField::affine(1.5, 0.1);
    let lam = ExponentField::constant(0.2);
    let ctx = FamilyContext {
        x0: Point::ORIGIN,
        p_plus: p.bounds(&grid).1,
    };
    let family = generate_family(&FamilySpec::default(), &grid, 0, &ctx)?;
    for op in [Operator::Maximal, Operator::Integral] {
        let sup = operator_bound_sup(op, 0.3, &p, &lam, &family, &grid)?;
        println!(
            "{op:?}: sup ‖T f‖ / ‖f‖ over {} members = {sup:.4}",
            family.len()
        );
    }
    Ok(())
}
