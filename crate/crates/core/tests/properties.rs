use std::sync::Arc;

use proptest::prelude::*;

use smlab_core::chart::{Chart, ChartKind, Poly2};
use smlab_core::expr::{BinOp, Expr, Func};
use smlab_core::jet::Jet2;
use smlab_core::metric::{Domain, MetricField};

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.1f64..2.0).prop_map(Expr::Const),
        Just(Expr::U),
        Just(Expr::V),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        let b = |x: Expr| Box::new(x);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp)], inner.clone())
                .prop_map(move |(f, a)| Expr::Func(f, b(a))),
            (
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)],
                inner.clone(),
                inner.clone()
            )
                .prop_map(move |(op, x, y)| Expr::Bin(op, b(x), b(y))),
            // denominators stay in [1, 3]
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| {
                let den = Expr::Bin(BinOp::Add, b(Expr::Const(2.0)), b(Expr::Func(Func::Sin, b(y))));
                Expr::Bin(BinOp::Div, b(x), b(den))
            }),
            (inner, 1i32..=3).prop_map(move |(x, k)| Expr::Pow(b(x), 2 * k)),
        ]
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expressions_survive_printing(e in expr_strategy(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        let (a, b) = (e.eval(u, v).unwrap(), back.eval(u, v).unwrap());
        prop_assert!(a == b || (a.is_nan() && b.is_nan()));
    }

    #[test]
    fn jets_match_finite_differences(e in expr_strategy(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let j = e.eval_jet(u, v, 4).unwrap();
        let f = |x: f64, y: f64| e.eval(x, y).unwrap();
        prop_assert!(close(j.value(), f(u, v), 1e-12));
        let h = 1e-5;
        let fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
        let fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
        let scale = 1.0 + j.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        prop_assert!((j.derivative(1, 0) - fu).abs() <= 1e-6 * scale, "{} vs {}", j.derivative(1, 0), fu);
        prop_assert!((j.derivative(0, 1) - fv).abs() <= 1e-6 * scale);
        // order-4 Taylor polynomial is accurate to fifth order
        let (du, dv) = (3e-3, -2e-3);
        prop_assert!((j.eval_offset(du, dv) - f(u + du, v + dv)).abs() <= 1e-9 * scale);
    }
}

fn jet_strategy() -> impl Strategy<Value = Jet2> {
    (proptest::collection::vec(-1.0f64..1.0, 15), 0.5f64..2.0).prop_map(|(mut c, c0)| {
        c[0] = c0;
        Jet2::from_coeffs(4, [0.3, -0.2], &c).unwrap()
    })
}

fn jets_close(a: &Jet2, b: &Jet2, tol: f64) -> bool {
    a.order() == b.order() && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| close(*x, *y, tol))
}

proptest! {
    #[test]
    fn product_is_commutative_and_associative(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
        prop_assert!(jets_close(&(a * b), &(b * a), 1e-14));
        prop_assert!(jets_close(&((a * b) * c), &(a * (b * c)), 1e-12));
    }

    #[test]
    fn leibniz_rule(a in jet_strategy(), b in jet_strategy()) {
        let lhs = (a * b).d_du();
        let rhs = a.d_du() * b.truncate(3) + a.truncate(3) * b.d_du();
        prop_assert!(jets_close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn reciprocal_and_square_root_invert(a in jet_strategy()) {
        let one = Jet2::constant(4, a.base(), 1.0);
        prop_assert!(jets_close(&(a * a.recip().unwrap()), &one, 1e-10));
        let r = a.sqrt().unwrap();
        prop_assert!(jets_close(&(r * r), &a, 1e-10));
    }

    #[test]
    fn composing_with_the_identity_is_trivial(a in jet_strategy()) {
        let x = Jet2::var_u(4, a.base());
        let y = Jet2::var_v(4, a.base());
        prop_assert!(jets_close(&Jet2::compose(&a, &x, &y).unwrap(), &a, 1e-14));
    }
}

fn chart_strategy() -> impl Strategy<Value = Chart> {
    (proptest::collection::vec(-0.3f64..0.3, 6), 0.5f64..1.5, 0.5f64..1.5, -0.4f64..0.4, -0.4f64..0.4).prop_map(
        |(q, a, d, b, c)| {
            let u = Poly2::from_terms(&[(1, 0, a), (0, 1, b), (2, 0, q[0]), (1, 1, q[1]), (0, 2, q[2])]);
            let v = Poly2::from_terms(&[(1, 0, c), (0, 1, d), (2, 0, q[3]), (1, 1, q[4]), (0, 2, q[5])]);
            Chart::new(u, v, ChartKind::Polynomial)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_curvature_is_chart_independent(ch in chart_strategy(), xi in -0.1f64..0.1, eta in -0.1f64..0.1) {
        prop_assume!(ch.jacobian_at(xi, eta) > 0.1);
        // unit sphere in latitude-longitude form
        let dom = Domain::rect([-1.0, 1.0], [-1.0, 1.0]);
        let sphere = Arc::new(MetricField::from_strs("1", "0", "cos(u)^2", None, dom).unwrap());
        let pulled = MetricField::pullback(&sphere, ch, Domain::rect([-0.1, 0.1], [-0.1, 0.1]));
        let k = pulled.gaussian_curvature(xi, eta).unwrap();
        prop_assert!((k - 1.0).abs() <= 1e-9, "{}", k);
    }
}
