use smlab_core::config::{AnalysisConfig, MapConfig};
use smlab_core::gallery;
use smlab_core::integrate::{gb_report, GbKind};

/// Parallel front of a torus whose profile is an ellipse perturbed by a
/// `cos 2v` term, so the curves do not pair off by symmetry.
fn lopsided_front() -> AnalysisConfig {
    let mut c = gallery::get("parallel-torus-front").unwrap();
    let w = "sqrt(0.36*cos(v)^2 + (sin(v) + 0.3*sin(2*v))^2)";
    let x = format!("(3 + cos(v) + 0.15*cos(2*v) - 0.48*cos(v)/{w})");
    let z = format!("0.6*sin(v) - 0.8*(sin(v) + 0.3*sin(2*v))/{w}");
    let nx = format!("(0.6*cos(v)/{w})");
    let nz = format!("(sin(v) + 0.3*sin(2*v))/{w}");
    c.name = Some("lopsided-front".into());
    c.map = Some(MapConfig {
        x: format!("{x}*cos(u)"),
        y: format!("{x}*sin(u)"),
        z,
        nu: Some([format!("{nx}*cos(u)"), format!("{nx}*sin(u)"), nz]),
    });
    c
}

#[test]
fn gb1_balances_nonzero_terms() {
    let r = gb_report(&lopsided_front(), GbKind::Gb1).unwrap();
    let k = r.int_k_da.unwrap().value;
    let ks = r.int_kappa_s.unwrap().value;
    assert!(k.abs() > 0.1 && ks.abs() > 0.05, "K dA {k}, kappa_s {ks}");
    assert!((k + 2.0 * ks).abs() <= 5e-3, "K dA {k}, kappa_s {ks}");
    assert!(r.pass);
}

#[test]
fn flipping_lambda_negates_signed_area_only() {
    let mut c = lopsided_front();
    let gb_plus = gb_report(&c, GbKind::Gb1).unwrap();
    let hat_plus = gb_report(&c, GbKind::Euler).unwrap();
    c.co_orientation_sign = -1.0;
    let gb_minus = gb_report(&c, GbKind::Gb1).unwrap();
    let hat_minus = gb_report(&c, GbKind::Euler).unwrap();
    let (a, b) = (gb_plus.int_k_da.unwrap().value, gb_minus.int_k_da.unwrap().value);
    assert!((a - b).abs() <= 1e-9, "{a} {b}");
    assert!((hat_plus.lhs + hat_minus.lhs).abs() <= 1e-9);
}

#[test]
fn deeper_quadrature_shrinks_the_error_until_converged() {
    let mut errors = Vec::new();
    for depth in [1, 2, 4] {
        let mut c = gallery::get("bump-torus").unwrap();
        c.options.depth = depth;
        errors.push(gb_report(&c, GbKind::Whitney).unwrap().error_estimate);
    }
    assert!(errors[0] >= 4.0 * errors[1], "{errors:?}");
    assert!(errors[1] >= 4.0 * errors[2], "{errors:?}");
}

#[test]
fn scaling_the_metric_leaves_total_curvature_zero() {
    let mut c = gallery::get("bump-torus").unwrap();
    let m = c.metric.as_mut().unwrap();
    m.e = format!("4*({})", m.e);
    m.f = format!("4*({})", m.f);
    m.g = format!("4*({})", m.g);
    let r = gb_report(&c, GbKind::Whitney).unwrap();
    assert_eq!(r.cross_caps, 1);
    assert!(r.lhs.abs() <= 1e-3 * 2.0 * std::f64::consts::PI);
}
