use std::sync::Arc;

use proptest::prelude::*;

use smlab_core::analysis;
use smlab_core::chart::Chart;
use smlab_core::gallery;
use smlab_core::metric::{Domain, MetricField};
use smlab_core::whitney::{Whitney, WhitneyOptions};

fn standard() -> Arc<MetricField> {
    gallery::get("cross-cap-standard").unwrap().metric_arc().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hessian_scales_with_sixth_power_of_jacobian(
        m in proptest::collection::vec(-1.5f64..1.5, 4),
    ) {
        let j = m[0] * m[3] - m[1] * m[2];
        prop_assume!(j.abs() > 0.2);
        let chart = Chart::affine([0.0, 0.0], [[m[0], m[1]], [m[2], m[3]]]);
        let pulled = MetricField::pullback(&standard(), chart, Domain::rect([-0.2, 0.2], [-0.2, 0.2]));
        let w = Whitney::new(Arc::new(pulled), WhitneyOptions { grid: 8, ..WhitneyOptions::default() });
        let r = w.invariants([0.0, 0.0]).unwrap();
        let expected = 16.0 * j.powi(6);
        prop_assert!((r.hess - expected).abs() <= 1e-9 * expected, "{} vs {}", r.hess, expected);
        prop_assert!((r.alpha02 - 2.0).abs() <= 1e-8);
        prop_assert!(r.residual_hess <= 1e-9 * expected);
    }
}

#[test]
fn crosscap_report_lists_every_ray() {
    let cfg = gallery::get("west-synthetic").unwrap();
    let o = analysis::crosscap(&cfg).unwrap();
    assert!(o.pass);
    let caps = o.value["cross_caps"].as_array().unwrap();
    assert_eq!(caps.len(), 1);
    assert_eq!(caps[0]["ray_limits"].as_array().unwrap().len(), 16);
    for key in ["alpha20", "alpha11", "alpha02"] {
        assert!(caps[0][key].is_number(), "{key}");
    }
}
