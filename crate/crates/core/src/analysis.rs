//! Command-level analyses shared by the CLI and the self test. Each returns
//! a JSON document and a verdict.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::gallery::{self, Focus};
use crate::integrate::{gb_report, GbKind};
use crate::json::{csv_row, fmt_f64};
use crate::kossowski::{Kossowski, PointClass, SingularCurve};
use crate::whitney::{ray_limit_formula, CrossCapReport, Whitney, WhitneyOptions};

/// Ray-limit agreement required by the cross-cap verdict.
pub const RAY_TOL: f64 = 1e-3;
/// Residual allowed on the cross-cap consistency equations.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Value,
    pub pass: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

pub fn tracer(cfg: &AnalysisConfig) -> Result<Kossowski> {
    Kossowski::new(cfg.metric_arc()?, cfg.trace_options())
}

pub fn whitney(cfg: &AnalysisConfig) -> Result<Whitney> {
    Ok(Whitney::new(
        cfg.metric_arc()?,
        WhitneyOptions {
            grid: cfg.options.crosscap_grid,
            ray_tol: cfg.tolerances.richardson_tol,
            ..WhitneyOptions::default()
        },
    ))
}

/// Traces from the configured seeds, or finds all curves automatically.
pub fn curves(cfg: &AnalysisConfig) -> Result<Vec<SingularCurve>> {
    let k = tracer(cfg)?;
    if cfg.options.seeds.is_empty() {
        k.find_curves()
    } else {
        cfg.options.seeds.iter().map(|s| k.trace(*s)).collect()
    }
}

fn curve_summary(c: &SingularCurve) -> Value {
    json!({
        "closed": c.closed,
        "samples": c.samples.len(),
        "a2": c.count(PointClass::A2),
        "a3": c.count(PointClass::A3),
        "other": c.count(PointClass::Other),
        "parameter_length": c.length(),
        "metric_length": c.samples.last().map(|s| s.tau).unwrap_or(0.0),
        "start": c.samples[0].point,
        "end": c.samples[c.samples.len() - 1].point,
        "a3_points": to_value(&c.a3_points),
    })
}

/// Singular-set census: traced curves with their point classes, and
/// intrinsic cross caps.
pub fn classify(cfg: &AnalysisConfig) -> Result<Outcome> {
    let metric = cfg.metric_arc()?;
    let mut doc = serde_json::Map::new();
    doc.insert("name".into(), json!(cfg.name));
    if metric.has_lambda() {
        let cs = curves(cfg)?;
        doc.insert("curves".into(), Value::Array(cs.iter().map(curve_summary).collect()));
        doc.insert(
            "a3_total".into(),
            json!(cs.iter().map(|c| c.a3_points.len()).sum::<usize>()),
        );
    }
    let caps = whitney(cfg)?.detect()?;
    doc.insert("cross_caps".into(), to_value(&caps));
    Ok(Outcome {
        value: Value::Object(doc),
        pass: true,
    })
}

pub const CURVE_CSV_HEADER: [&str; 12] = [
    "curve", "t", "u", "v", "tau", "class", "phi", "eta_u", "eta_v", "kappa_s", "kappa_pi", "unreliable",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// All samples of all curves as CSV.
pub fn curves_csv(cs: &[SingularCurve]) -> String {
    let mut out = csv_row(&CURVE_CSV_HEADER.map(String::from));
    for (i, c) in cs.iter().enumerate() {
        for s in &c.samples {
            out.push_str(&csv_row(&[
                i.to_string(),
                fmt_f64(s.t),
                fmt_f64(s.point[0]),
                fmt_f64(s.point[1]),
                fmt_f64(s.tau),
                format!("{:?}", s.class),
                fmt_f64(s.phi),
                fmt_f64(s.eta[0]),
                fmt_f64(s.eta[1]),
                opt(s.kappa_s),
                opt(s.kappa_pi),
                s.unreliable.to_string(),
            ]));
        }
    }
    out
}

/// `kappa_s` and `kappa_pi` profiles along every curve.
pub fn invariants(cfg: &AnalysisConfig) -> Result<(Outcome, Vec<SingularCurve>)> {
    let cs = curves(cfg)?;
    let profiles: Vec<Value> = cs
        .iter()
        .map(|c| {
            json!({
                "closed": c.closed,
                "kappa_pi_signed": c.kappa_pi_signed,
                "t": c.samples.iter().map(|s| s.t).collect::<Vec<_>>(),
                "tau": c.samples.iter().map(|s| s.tau).collect::<Vec<_>>(),
                "u": c.samples.iter().map(|s| s.point[0]).collect::<Vec<_>>(),
                "v": c.samples.iter().map(|s| s.point[1]).collect::<Vec<_>>(),
                "kappa_s": c.samples.iter().map(|s| s.kappa_s).collect::<Vec<_>>(),
                "kappa_pi": c.samples.iter().map(|s| s.kappa_pi).collect::<Vec<_>>(),
                "unreliable": c.samples.iter().map(|s| s.unreliable).collect::<Vec<_>>(),
            })
        })
        .collect();
    // every A2 sample outside the guard band must carry both invariants
    let pass = cs.iter().all(|c| {
        c.samples
            .iter()
            .all(|s| s.class != PointClass::A2 || s.unreliable || s.kappa_s.is_some())
    });
    Ok((
        Outcome {
            value: json!({ "name": cfg.name, "profiles": profiles }),
            pass,
        },
        cs,
    ))
}

/// Ray limits at `k pi / 16`, numeric against the closed form.
pub fn ray_table(w: &Whitney, r: &CrossCapReport) -> Result<Vec<(f64, f64, f64)>> {
    (0..16)
        .map(|k| {
            let th = k as f64 * std::f64::consts::PI / 16.0;
            let num = w.ray_limit(r, th)?;
            Ok((th, num, ray_limit_formula(r.alpha20, r.alpha11, r.alpha02, th)))
        })
        .collect()
}

pub fn crosscap_verdict(r: &CrossCapReport, rays: &[(f64, f64, f64)]) -> bool {
    r.residual_a1_2.abs() <= CONSISTENCY_TOL
        && r.residual_fe2.abs() <= CONSISTENCY_TOL
        && r.residual_hess <= CONSISTENCY_TOL * r.hess.abs()
        && rays.iter().all(|(_, a, b)| (a - b).abs() <= RAY_TOL)
}

/// Cross-cap reports with their ray-limit tables.
pub fn crosscap(cfg: &AnalysisConfig) -> Result<Outcome> {
    let w = whitney(cfg)?;
    let reports = w.analyze()?;
    let mut pass = true;
    let mut out = Vec::new();
    for r in &reports {
        let rays = ray_table(&w, r)?;
        pass &= crosscap_verdict(r, &rays);
        let mut v = to_value(r);
        v["ray_limits"] = Value::Array(
            rays.iter()
                .map(|(th, num, exact)| json!({"theta": th, "numeric": num, "formula": exact}))
                .collect(),
        );
        out.push(v);
    }
    Ok(Outcome {
        value: json!({ "name": cfg.name, "cross_caps": out }),
        pass,
    })
}

pub fn gauss_bonnet(cfg: &AnalysisConfig, kind: GbKind) -> Result<Outcome> {
    let r = gb_report(cfg, kind)?;
    Ok(Outcome {
        value: to_value(&r),
        pass: r.pass,
    })
}

/// The configuration of a built-in example.
pub fn gallery_config(name: &str) -> Result<AnalysisConfig> {
    gallery::get(name).ok_or_else(|| Error::Config {
        path: "gallery".into(),
        message: format!("unknown example {name:?}; known: {}", gallery::NAMES.join(", ")),
    })
}

/// Runs a built-in example end to end.
pub fn gallery(name: &str) -> Result<Outcome> {
    gallery_with(name, &gallery_config(name)?)
}

/// Runs example `name` with a possibly modified configuration.
pub fn gallery_with(name: &str, cfg: &AnalysisConfig) -> Result<Outcome> {
    let cfg = cfg.clone();
    let focus = gallery::focus(name).ok_or_else(|| Error::Config {
        path: "gallery".into(),
        message: format!("unknown example {name:?}"),
    })?;
    let mut doc = serde_json::Map::new();
    doc.insert("name".into(), json!(name));
    doc.insert("config".into(), to_value(&cfg));
    let mut pass = true;
    match focus {
        Focus::Curves => {
            let census = classify(&cfg)?;
            let (inv, _) = invariants(&cfg)?;
            pass &= census.pass && inv.pass;
            doc.insert("classification".into(), census.value);
            doc.insert("invariants".into(), inv.value["profiles"].clone());
        }
        Focus::CrossCaps => {
            let o = crosscap(&cfg)?;
            pass &= o.pass;
            doc.insert("cross_caps".into(), o.value["cross_caps"].clone());
            if let Some(first) = o.value["cross_caps"].get(0) {
                doc.insert("alpha02".into(), first["alpha02"].clone());
            }
        }
        Focus::WhitneyTorus => {
            let o = crosscap(&cfg)?;
            let gb = gauss_bonnet(&cfg, GbKind::Whitney)?;
            pass &= o.pass && gb.pass;
            doc.insert("cross_caps".into(), o.value["cross_caps"].clone());
            doc.insert("gauss_bonnet".into(), gb.value);
        }
        Focus::KossowskiTorus => {
            let census = classify(&cfg)?;
            let gb1 = gauss_bonnet(&cfg, GbKind::Gb1)?;
            let euler = gauss_bonnet(&cfg, GbKind::Euler)?;
            pass &= gb1.pass && euler.pass;
            doc.insert("classification".into(), census.value);
            doc.insert("gb1".into(), gb1.value);
            doc.insert("euler".into(), euler.value);
        }
    }
    doc.insert("pass".into(), json!(pass));
    Ok(Outcome {
        value: Value::Object(doc),
        pass,
    })
}
