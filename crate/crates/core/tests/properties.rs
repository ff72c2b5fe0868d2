use std::sync::Arc;

use proptest::prelude::*;

use varmorrey::admissibility::{check, resolve, solve_q_from_cond_d, InequalityCase};
use varmorrey::harness::{
    generate_family, render_report, stein_weiss_ratio, sweep, ExportFormat, FamilyContext,
    FamilySpec, HarnessOptions,
};
use varmorrey::norms::{lebesgue_modular, lebesgue_norm, morrey_modular, morrey_norm};
use varmorrey::operators::{fractional_integral, fractional_integral_split, weight_power};
use varmorrey::{build_grid, DomainGrid, DomainSpec, ExponentField, GridFunction, Point};

fn line(n: usize) -> Arc<DomainGrid> {
    build_grid(&DomainSpec::interval(-1.0, 1.0, n)).unwrap()
}

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn exponent() -> impl Strategy<Value = ExponentField> {
    prop_oneof![
        (1.1f64..4.0).prop_map(ExponentField::constant),
        (1.5f64..3.0, -0.4f64..0.4).prop_map(|(m, s)| ExponentField::affine(m, s)),
        (1.5f64..3.0, 0.0f64..0.4, 0.5f64..4.0).prop_map(|(m, a, f)| ExponentField::sine(
            m,
            a,
            &[f],
            0.0
        )),
    ]
}

fn morrey_index() -> impl Strategy<Value = ExponentField> {
    prop_oneof![
        (0.0f64..0.9).prop_map(ExponentField::constant),
        (0.2f64..0.7, -0.15f64..0.15).prop_map(|(m, s)| ExponentField::affine(m, s)),
    ]
}

const N: usize = 64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous(s in samples(N), p in exponent(), lam in morrey_index(), c in 0.01f64..100.0) {
        let g = line(N);
        let f = GridFunction::from_samples(&g, s).unwrap();
        prop_assume!(!f.is_zero());
        let a = lebesgue_norm(&f, &p, None).unwrap().value;
        let b = lebesgue_norm(&f.scale(-c), &p, None).unwrap().value;
        prop_assert!((b - c * a).abs() <= 1e-8 * c * a);
        let a = morrey_norm(&f, &p, &lam).unwrap().value;
        let b = morrey_norm(&f.scale(c), &p, &lam).unwrap().value;
        prop_assert!((b - c * a).abs() <= 1e-8 * c * a);
    }

    #[test]
    fn norms_are_monotone(s in samples(N), t in prop::collection::vec(0.0f64..1.0, N), p in exponent(), lam in morrey_index()) {
        let g = line(N);
        let big = GridFunction::from_samples(&g, s).unwrap();
        let small = big.zip_with(&GridFunction::from_samples(&g, t).unwrap(), |a, b| a * b).unwrap();
        prop_assume!(!small.is_zero());
        prop_assert!(lebesgue_norm(&small, &p, None).unwrap().value <= lebesgue_norm(&big, &p, None).unwrap().value * (1.0 + 1e-9));
        prop_assert!(morrey_norm(&small, &p, &lam).unwrap().value <= morrey_norm(&big, &p, &lam).unwrap().value * (1.0 + 1e-9));
    }

    #[test]
    fn unit_modular(s in samples(N), p in exponent(), lam in morrey_index()) {
        let g = line(N);
        let f = GridFunction::from_samples(&g, s).unwrap();
        prop_assume!(!f.is_zero());
        let n = lebesgue_norm(&f, &p, None).unwrap().value;
        prop_assert!((lebesgue_modular(&f.scale(1.0 / n), &p, None).unwrap() - 1.0).abs() <= 1e-8);
        let n = morrey_norm(&f, &p, &lam).unwrap().value;
        prop_assert!((morrey_modular(&f.scale(1.0 / n), &p, &lam).unwrap() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn morrey_dominates_lebesgue_and_agrees_at_zero(s in samples(N), p in exponent(), lam in morrey_index()) {
        // r^{-λ} ≥ diam^{-λ} and the largest scheduled ball covers Ω
        let g = line(N);
        let f = GridFunction::from_samples(&g, s).unwrap();
        prop_assume!(!f.is_zero());
        let l = lebesgue_norm(&f, &p, None).unwrap().value;
        let m0 = morrey_norm(&f, &p, &ExponentField::constant(0.0)).unwrap().value;
        prop_assert!((l - m0).abs() <= 1e-6 * l);
        let m = morrey_norm(&f.scale(2f64.powf(0.9)), &p, &lam).unwrap().value;
        prop_assert!(m >= l * (1.0 - 1e-9));
    }

    #[test]
    fn fractional_integral_is_linear(s in samples(N), t in samples(N), a in -3.0f64..3.0, b in -3.0f64..3.0, gamma in 0.05f64..0.95) {
        let g = line(N);
        let f = GridFunction::from_samples(&g, s).unwrap();
        let h = GridFunction::from_samples(&g, t).unwrap();
        let combo = f.scale(a).add(&h.scale(b)).unwrap();
        let lhs = fractional_integral(&combo, gamma).unwrap();
        let rhs = fractional_integral(&f, gamma).unwrap().scale(a).add(&fractional_integral(&h, gamma).unwrap().scale(b)).unwrap();
        let scale = rhs.max_abs().max(1.0);
        for (x, y) in lhs.samples().iter().zip(rhs.samples()) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn split_is_additive(s in prop::collection::vec(-1.0f64..1.0, 144), gamma in 0.1f64..1.9, k in 0usize..144) {
        let g = build_grid(&DomainSpec::unit_square(12)).unwrap();
        let f = GridFunction::from_samples(&g, s).unwrap();
        let whole = fractional_integral(&f, gamma).unwrap();
        let (a, b, c) = fractional_integral_split(&f, gamma, &g.node(k)).unwrap();
        let sum = a.add(&b).unwrap().add(&c).unwrap();
        let scale = whole.max_abs().max(1.0);
        for (x, y) in sum.samples().iter().zip(whole.samples()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn kernel_symmetry(j in 0usize..N, gamma in 0.05f64..0.95) {
        let g = line(N);
        let f = GridFunction::indicator(&g, &[j]);
        let u = fractional_integral(&f, gamma).unwrap();
        let y0 = g.node(j);
        for (i, x) in g.nodes().iter().enumerate() {
            if i != j {
                let expect = x.distance(&y0).powf(gamma - 1.0);
                prop_assert!((u.samples()[i] / g.cell_measure() - expect).abs() <= 1e-12 * expect);
            }
        }
    }

    #[test]
    fn solved_q_satisfies_identity(p in exponent(), lam in morrey_index(), gamma in 0.05f64..0.5, a in -0.1f64..0.1, d in 0.0f64..0.1) {
        let g = line(N);
        let b = a + d.min(gamma);
        if let Ok(q) = solve_q_from_cond_d(&p, &lam, gamma, a, b, &g) {
            for x in g.nodes() {
                let r = 1.0 / q.value_at(x) - 1.0 / p.value_at(x) + (gamma + a - b) / (1.0 - lam.value_at(x));
                prop_assert!(r.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ratio_is_scale_invariant(s in samples(48), c in prop::sample::select(vec![0.01, 1.0, 100.0])) {
        let g = line(48);
        let case = InequalityCase::main(0.5, 0.0, 0.0, ExponentField::constant(1.25), ExponentField::constant(0.2));
        let rc = resolve(&case, &g).unwrap();
        let f = GridFunction::from_samples(&g, s).unwrap();
        prop_assume!(!f.is_zero());
        let (l, r) = stein_weiss_ratio(&rc, &f).unwrap();
        let (lc, rc2) = stein_weiss_ratio(&rc, &f.scale(c)).unwrap();
        prop_assert!((lc / rc2 - l / r).abs() <= 1e-8 * (l / r));
    }

    #[test]
    fn verdict_json_round_trip(gamma in 0.05f64..0.95, a in -0.3f64..0.3, b in -0.3f64..0.3, p in exponent(), lam in morrey_index()) {
        let g = line(32);
        let v = check(&InequalityCase::main(gamma, a, b, p, lam), &g).unwrap();
        let back = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(v, back);
    }

    #[test]
    fn zero_weight_is_one(x in -0.99f64..0.99) {
        let g = line(40);
        let w = weight_power(&g, &Point::on_line(x), 0.0);
        prop_assert!(w.samples().iter().all(|&v| v == 1.0));
    }
}

#[test]
fn families_are_seed_deterministic() {
    let g = build_grid(&DomainSpec::unit_square(16)).unwrap();
    let ctx = FamilyContext {
        x0: g.node(g.nearest_node(&Point::new(0.5, 0.5))),
        p_plus: 2.0,
    };
    let a = generate_family(&FamilySpec::default(), &g, 11, &ctx).unwrap();
    let b = generate_family(&FamilySpec::default(), &g, 11, &ctx).unwrap();
    for (x, y) in a.members.iter().zip(&b.members) {
        assert_eq!(x.id, y.id);
        assert_eq!(x.f.samples(), y.f.samples());
    }
}

#[test]
fn csv_export_is_byte_deterministic() {
    let spec = DomainSpec::interval(-1.0, 1.0, 120);
    let cases = vec![
        InequalityCase::main(
            0.5,
            0.0,
            0.0,
            ExponentField::constant(1.25),
            ExponentField::constant(0.2),
        ),
        InequalityCase::main(
            0.4,
            -0.1,
            0.0,
            ExponentField::affine(1.5, 0.1),
            ExponentField::constant(0.3),
        ),
    ];
    let opts = HarnessOptions {
        seed: 5,
        allow_inadmissible: false,
    };
    let one = render_report(
        &sweep(&cases, &FamilySpec::default(), &spec, &opts),
        ExportFormat::Csv,
    )
    .unwrap();
    let two = render_report(
        &sweep(&cases, &FamilySpec::default(), &spec, &opts),
        ExportFormat::Csv,
    )
    .unwrap();
    assert_eq!(one, two);
    assert_eq!(one.iter().filter(|&&c| c == b'\n').count(), 61);
}
