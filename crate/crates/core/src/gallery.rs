//! Built-in example metrics with their topology metadata.

use crate::config::{
    AnalysisConfig, DomainConfig, InputKind, MapConfig, MetricConfig, Options, Tolerances, Topology,
};

pub const NAMES: [&str; 8] = [
    "cuspidal-edge",
    "swallowtail",
    "cuspidal-cross-cap",
    "cross-cap-standard",
    "normal-form",
    "west-synthetic",
    "bump-torus",
    "parallel-torus-front",
];

/// What a gallery case is meant to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Focus {
    /// Singular curves of a frontal metric.
    Curves,
    /// Intrinsic cross caps.
    CrossCaps,
    /// Whitney Gauss-Bonnet on a closed surface.
    WhitneyTorus,
    /// Kossowski Gauss-Bonnet on a closed surface.
    KossowskiTorus,
}

pub fn focus(name: &str) -> Option<Focus> {
    Some(match name {
        "cuspidal-edge" | "swallowtail" | "cuspidal-cross-cap" | "normal-form" => Focus::Curves,
        "cross-cap-standard" | "west-synthetic" => Focus::CrossCaps,
        "bump-torus" => Focus::WhitneyTorus,
        "parallel-torus-front" => Focus::KossowskiTorus,
        _ => return None,
    })
}

fn s(x: &str) -> String {
    x.to_string()
}

fn base(name: &str, input: InputKind, u: [f64; 2], v: [f64; 2], periodic: bool) -> AnalysisConfig {
    AnalysisConfig {
        name: Some(name.to_string()),
        input,
        map: None,
        metric: None,
        domain: DomainConfig {
            u,
            v,
            periodic_u: periodic,
            periodic_v: periodic,
        },
        oriented: true,
        co_oriented: None,
        co_orientation_sign: 1.0,
        topology: Topology::default(),
        tolerances: Tolerances::default(),
        jet_order: 4,
        options: Options::default(),
    }
}

fn map(name: &str, f: [&str; 3], nu: Option<[&str; 3]>, u: [f64; 2], v: [f64; 2]) -> AnalysisConfig {
    let mut c = base(name, InputKind::Map, u, v, false);
    c.map = Some(MapConfig {
        x: s(f[0]),
        y: s(f[1]),
        z: s(f[2]),
        nu: nu.map(|n| [s(n[0]), s(n[1]), s(n[2])]),
    });
    c
}

fn metric(name: &str, efg: [&str; 3], lambda: Option<&str>, u: [f64; 2], v: [f64; 2]) -> AnalysisConfig {
    let mut c = base(name, InputKind::Metric, u, v, false);
    c.metric = Some(MetricConfig {
        e: s(efg[0]),
        f: s(efg[1]),
        g: s(efg[2]),
        lambda: lambda.map(s),
    });
    c
}

/// `dσ^2 = (1 + v^2 alpha) du^2 + v^2 (1 + v beta) dv^2`, a normalized chart
/// along the u-axis.
pub fn normal_form(alpha: &str, beta: &str) -> AnalysisConfig {
    let e = format!("1 + v^2*({alpha})");
    let g = format!("v^2*(1 + v*({beta}))");
    let l = format!("v*sqrt((1 + v^2*({alpha}))*(1 + v*({beta})))");
    let mut c = metric("normal-form", [&e, "0", &g], Some(&l), [0.0, 1.0], [-0.2, 0.2]);
    c.options.seeds = vec![[0.5, 0.0]];
    c
}

/// Quadratic metric whose second-order jet at the origin is the West type
/// expansion with the given invariants.
pub fn west_synthetic(a20: f64, a11: f64, a02: f64) -> AnalysisConfig {
    let e = format!(
        "1 + {}*u^2 + {}*u*v + {}*v^2",
        a20 * a20,
        2.0 * a11 * a20,
        1.0 + a11 * a11
    );
    let f = format!(
        "{}*u^2 + {}*u*v + {}*v^2",
        a11 * a20,
        1.0 + a11 * a11 + a02 * a20,
        a02 * a11
    );
    let g = format!(
        "{}*u^2 + {}*u*v + {}*v^2",
        1.0 + a11 * a11,
        2.0 * a02 * a11,
        a02 * a02
    );
    metric("west-synthetic", [&e, &f, &g], None, [-0.25, 0.25], [-0.25, 0.25])
}

const BUMP: &str = "bump(2*sqrt(u^2 + v^2))";

pub fn get(name: &str) -> Option<AnalysisConfig> {
    Some(match name {
        "cuspidal-edge" => {
            let mut c = map(
                name,
                ["u^2", "u^3", "v"],
                Some(["3*u/sqrt(9*u^2 + 4)", "-2/sqrt(9*u^2 + 4)", "0"]),
                [-0.5, 0.5],
                [-1.0, 1.0],
            );
            c.options.seeds = vec![[0.1, 0.0]];
            c
        }
        "swallowtail" => {
            let mut c = map(
                name,
                ["3*u^4 + u^2*v", "4*u^3 + 2*u*v", "v"],
                Some([
                    "1/sqrt(1 + u^2 + u^4)",
                    "-u/sqrt(1 + u^2 + u^4)",
                    "u^2/sqrt(1 + u^2 + u^4)",
                ]),
                [-0.4, 0.4],
                [-1.0, 0.5],
            );
            c.options.seeds = vec![[0.05, 0.0]];
            c
        }
        "cuspidal-cross-cap" => {
            let mut c = map(
                name,
                ["u", "v^2", "u*v^3"],
                Some([
                    "-2*v^3/sqrt(4 + 9*u^2*v^2 + 4*v^6)",
                    "-3*u*v/sqrt(4 + 9*u^2*v^2 + 4*v^6)",
                    "2/sqrt(4 + 9*u^2*v^2 + 4*v^6)",
                ]),
                [-1.0, 1.0],
                [-0.5, 0.5],
            );
            c.options.seeds = vec![[0.0, 0.1]];
            c
        }
        "cross-cap-standard" => map(name, ["u", "u*v", "v^2"], None, [-1.0, 1.0], [-1.0, 1.0]),
        "normal-form" => normal_form("-1 + v", "2"),
        "west-synthetic" => west_synthetic(1.0, 0.5, 2.0),
        "bump-torus" => {
            let e = format!("{BUMP}*(1 + v^2) + 1 - {BUMP}");
            let f = format!("{BUMP}*u*v");
            let g = format!("{BUMP}*(u^2 + 4*v^2) + 1 - {BUMP}");
            let mut c = base(name, InputKind::Metric, [-1.0, 1.0], [-1.0, 1.0], true);
            c.metric = Some(MetricConfig {
                e,
                f,
                g,
                lambda: None,
            });
            c.topology.euler = Some(0);
            c
        }
        "parallel-torus-front" => {
            // Torus of revolution with elliptic profile (a, b) = (1, 0.6)
            // around an axis at distance 3, offset inward by d = 0.8.
            let w = "sqrt(0.36*cos(v)^2 + sin(v)^2)";
            let x = format!("(3 + cos(v) - 0.48*cos(v)/{w})");
            let z = format!("0.6*sin(v) - 0.8*sin(v)/{w}");
            let nx = format!("(-0.6*cos(v)/{w})");
            let nz = format!("-sin(v)/{w}");
            let tau = 2.0 * std::f64::consts::PI;
            let mut c = base(name, InputKind::Map, [0.0, tau], [0.0, tau], true);
            c.map = Some(MapConfig {
                x: format!("{x}*cos(u)"),
                y: format!("{x}*sin(u)"),
                z,
                nu: Some([format!("{nx}*cos(u)"), format!("{nx}*sin(u)"), nz]),
            });
            c.topology = Topology {
                euler: Some(0),
                euler_plus: Some(0),
                euler_minus: Some(0),
            };
            c
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_builds_and_validates() {
        for name in NAMES {
            let c = get(name).unwrap();
            c.validate().unwrap();
            let m = c.build_metric().unwrap();
            if name != "west-synthetic" {
                m.validate(9).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
            assert!(focus(name).is_some());
        }
        assert!(get("nope").is_none());
    }

    #[test]
    fn west_synthetic_has_west_expansion() {
        let m = west_synthetic(1.0, 0.5, 2.0).build_metric().unwrap();
        let j = m.jets(0.0, 0.0, 2).unwrap();
        assert_eq!(j.e.derivative(2, 0), 2.0);
        assert_eq!(j.f.derivative(1, 1), 1.0 + 0.25 + 2.0);
        assert_eq!(j.g.derivative(0, 2), 8.0);
        assert_eq!(j.g.derivative(1, 1), 2.0);
    }
}
