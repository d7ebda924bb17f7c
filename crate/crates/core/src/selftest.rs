//! The acceptance suite: ten end-to-end checks with fixed tolerances.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis;
use crate::chart::{Chart, ChartKind, Poly2};
use crate::error::Result;
use crate::exec;
use crate::gallery;
use crate::integrate::{gb_report, GbKind};
use crate::json;
use crate::kossowski::{normal_form_invariants, Kossowski, PointClass, TOL_CLS};
use crate::metric::{Domain, MetricField};
use crate::whitney::{ray_limit_formula, Whitney, WhitneyOptions};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    /// `[PASS] 3 title: detail (1.2 s)`
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.1} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const TITLES: [&str; 10] = [
    "classification",
    "singular curvature",
    "chart invariance of kappa_s",
    "cross-cap identities",
    "cross-cap invariant round trip",
    "curvature ray limit",
    "Whitney Gauss-Bonnet",
    "Kossowski Gauss-Bonnet",
    "determinism",
    "admissibility",
];

/// Runs criterion `id` (1-based).
pub fn run(id: usize) -> Criterion {
    let start = Instant::now();
    let outcome = match id {
        1 => classification(),
        2 => singular_curvature(),
        3 => chart_invariance(),
        4 => cross_cap_identities(),
        5 => round_trip(),
        6 => ray_limit(),
        7 => whitney_gb(),
        8 => kossowski_gb(),
        9 => determinism(),
        10 => admissibility(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error in {}: {e}", e.module())));
    Criterion {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<Criterion> {
    (1..=10).map(run).collect()
}

type Check = Result<(bool, String)>;

fn tracer(name: &str) -> Result<(Kossowski, crate::config::AnalysisConfig)> {
    let c = gallery::get(name).expect("gallery case");
    Ok((analysis::tracer(&c)?, c))
}

fn classification() -> Check {
    let (k, c) = tracer("cuspidal-edge")?;
    let ce = k.trace(c.options.seeds[0])?;
    let ce_ok = ce.samples.iter().all(|s| s.class == PointClass::A2);

    let (k, c) = tracer("swallowtail")?;
    let st = k.trace(c.options.seeds[0])?;
    let a3 = &st.a3_points;
    let st_ok = a3.len() == 1
        && a3[0].point[0].hypot(a3[0].point[1]) <= 1e-9
        && a3[0].phi.abs() <= TOL_CLS
        && a3[0].dphi.abs() >= 0.1
        && st
            .samples
            .iter()
            .filter(|s| (s.t - a3[0].t).abs() > 1e-12)
            .all(|s| s.class == PointClass::A2);

    let (k, c) = tracer("cuspidal-cross-cap")?;
    let ccr = k.trace(c.options.seeds[0])?;
    let ccr_a2 = ccr.samples.iter().all(|s| s.class == PointClass::A2);
    let lc = k.local_curve([0.0, 0.0], 1.0, None)?;
    let kp = k.kappa_pi_local(&lc, ccr.kappa_pi_signed)?;
    let ok = ce_ok && st_ok && ccr_a2 && kp.abs() <= 1e-4;
    Ok((
        ok,
        format!(
            "cuspidal edge all A2: {ce_ok}; swallowtail A3 points: {} at {:?} (phi {:.1e}, phi' {:.3}); \
             cuspidal cross cap all A2: {ccr_a2}, |kappa_pi(0)| = {:.1e}",
            a3.len(),
            a3.first().map(|a| a.point),
            a3.first().map(|a| a.phi).unwrap_or(f64::NAN),
            a3.first().map(|a| a.dphi).unwrap_or(f64::NAN),
            kp.abs()
        ),
    ))
}

fn singular_curvature() -> Check {
    let (k, c) = tracer("cuspidal-edge")?;
    let ce = k.trace(c.options.seeds[0])?;
    let len = ce.length();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let t = len * (i as f64 + 0.5) / 50.0;
        worst = worst.max(k.singular_curvature(&ce, t)?.abs());
    }

    let (k, c) = tracer("normal-form")?;
    let nf = k.trace(c.options.seeds[0])?;
    let (ks_a, kp_a) = normal_form_invariants(&k.metric, 0.5)?;
    let mid = nf
        .samples
        .iter()
        .min_by(|a, b| (a.point[0] - 0.5).abs().total_cmp(&(b.point[0] - 0.5).abs()))
        .expect("samples");
    let lc = k.local_curve([0.5, 0.0], 1.0, Some(mid.eta))?;
    let ks_b = k.kappa_s_local(&lc)?;
    let kp_b = k.kappa_pi_local(&lc, nf.kappa_pi_signed)?;
    let ok = worst <= 1e-8
        && (ks_a - 1.0).abs() <= 1e-8
        && (ks_b - 1.0).abs() <= 1e-8
        && (kp_a + 2.5).abs() <= 1e-4
        && (kp_b + 2.5).abs() <= 1e-4
        && (kp_a - kp_b).abs() <= 1e-4
        && (ks_a - ks_b).abs() <= 1e-4;
    Ok((
        ok,
        format!(
            "max|kappa_s| on cuspidal edge {worst:.1e}; normal form kappa_s {ks_a:.10} / {ks_b:.10}, \
             kappa_pi {kp_a:.6} / {kp_b:.6}"
        ),
    ))
}

/// A random chart `(xi, eta) -> (u, v)` keeping the u-axis singular and
/// `∂_eta` null along it.
fn strongly_adapted(rng: &mut ChaCha8Rng) -> Chart {
    let mut r = |a: f64, b: f64| rng.gen_range(a..b);
    let u = Poly2::from_terms(&[
        (0, 0, r(0.3, 0.7)),
        (1, 0, r(0.5, 1.5)),
        (2, 0, r(-0.3, 0.3)),
        (0, 2, r(-0.3, 0.3)),
        (1, 2, r(-0.3, 0.3)),
    ]);
    let v = Poly2::from_terms(&[(0, 1, r(0.5, 1.5)), (1, 1, r(-0.3, 0.3)), (0, 2, r(-0.3, 0.3))]);
    Chart::new(u, v, ChartKind::Polynomial)
}

fn chart_invariance() -> Check {
    let c = gallery::get("normal-form").expect("gallery case");
    let base = c.metric_arc()?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let charts: Vec<Chart> = (0..20).map(|_| strongly_adapted(&mut rng)).collect();
    let dom = Domain::rect([-0.1, 0.1], [-0.05, 0.05]);
    let results = exec::par_map(&charts, |ch| -> Result<(f64, f64)> {
        let m = Arc::new(MetricField::pullback(&base, ch.clone(), dom));
        let k = Kossowski::new(m, c.trace_options())?;
        let lc = k.local_curve([0.0, 0.0], 1.0, None)?;
        Ok((k.kappa_s_local(&lc)?, k.kappa_pi_local(&lc, false)?))
    });
    let (mut ds, mut dp) = (0.0f64, 0.0f64);
    for r in results {
        let (ks, kp) = r?;
        ds = ds.max((ks - 1.0).abs());
        dp = dp.max((kp - 2.5).abs());
    }
    Ok((
        ds <= 1e-6 && dp <= 1e-4,
        format!("20 charts: max change of kappa_s {ds:.1e}, of |kappa_pi| {dp:.1e}"),
    ))
}

fn cross_cap_identities() -> Check {
    let c = gallery::get("cross-cap-standard").expect("gallery case");
    let w = analysis::whitney(&c)?;
    let found = w.detect()?;
    if found.len() != 1 {
        return Ok((false, format!("expected one cross cap, found {}", found.len())));
    }
    let r = w.invariants(found[0].point)?;
    let ok = (r.hess - 16.0).abs() <= 1e-9
        && (r.delta - 4.0).abs() <= 1e-9
        && r.residual_hess <= 1e-9
        && (r.alpha02 - 2.0).abs() <= 1e-8
        && r.alpha11.abs() <= 1e-8
        && r.alpha20.abs() <= 1e-8;
    Ok((
        ok,
        format!(
            "Hess {:.12}, Delta {:.12}, |Hess - 4E Delta| {:.1e}, alpha02 {:.12}, alpha11 {:.1e}, alpha20 {:.1e}",
            r.hess, r.delta, r.residual_hess, r.alpha02, r.alpha11, r.alpha20
        ),
    ))
}

fn random_chart(rng: &mut ChaCha8Rng) -> Chart {
    loop {
        let m: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if m[0] * m[3] - m[1] * m[2] < 0.3 {
            continue;
        }
        let mut q = |lin: [f64; 2]| {
            Poly2::from_terms(&[
                (1, 0, lin[0]),
                (0, 1, lin[1]),
                (2, 0, rng.gen_range(-0.3..0.3)),
                (1, 1, rng.gen_range(-0.3..0.3)),
                (0, 2, rng.gen_range(-0.3..0.3)),
            ])
        };
        let u = q([m[0], m[1]]);
        let v = q([m[2], m[3]]);
        return Chart::new(u, v, ChartKind::Polynomial);
    }
}

fn round_trip() -> Check {
    let base = gallery::west_synthetic(1.0, 0.5, 2.0).metric_arc()?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let charts: Vec<Chart> = (0..20).map(|_| random_chart(&mut rng)).collect();
    let dom = Domain::rect([-0.1, 0.1], [-0.1, 0.1]);
    let results = exec::par_map(&charts, |ch| -> Result<(f64, f64, f64, f64)> {
        let m = Arc::new(MetricField::pullback(&base, ch.clone(), dom));
        let w = Whitney::new(m, WhitneyOptions { grid: 16, ..WhitneyOptions::default() });
        let found = w.detect()?;
        let p = found.first().map(|d| d.point).unwrap_or([f64::NAN; 2]);
        let r = w.invariants(p)?;
        let dev = (r.alpha20 - 1.0).abs().max((r.alpha11 - 0.5).abs()).max((r.alpha02 - 2.0).abs());
        let res = r.residual_a1_2.abs().max(r.residual_fe2.abs());
        Ok((dev, res, found.len() as f64, p[0].hypot(p[1])))
    });
    let (mut dev, mut res, mut bad) = (0.0f64, 0.0f64, 0);
    for r in results {
        let (d, e, n, off) = r?;
        dev = dev.max(d);
        res = res.max(e);
        if n != 1.0 || off > 1e-9 {
            bad += 1;
        }
    }
    Ok((
        dev <= 1e-6 && res <= 1e-8 && bad == 0,
        format!("20 charts: max deviation of the triple {dev:.1e}, max consistency residual {res:.1e}, failed detections {bad}"),
    ))
}

fn ray_limit() -> Check {
    let c = gallery::get("cross-cap-standard").expect("gallery case");
    let w = analysis::whitney(&c)?;
    let r = w.invariants([0.0, 0.0])?;
    let rays = analysis::ray_table(&w, &r)?;
    let worst = rays.iter().fold(0.0f64, |m, (_, a, b)| m.max((a - b).abs()));
    let vertical = w.ray_limit(&r, PI / 2.0)?;
    let ok = worst <= 1e-3 && (vertical - ray_limit_formula(0.0, 0.0, 2.0, PI / 2.0)).abs() <= 1e-3;
    Ok((
        ok,
        format!("16 directions: max |numeric - formula| {worst:.1e}; theta = pi/2 gives {vertical:.6}"),
    ))
}

fn whitney_gb() -> Check {
    let c = gallery::get("bump-torus").expect("gallery case");
    let start = Instant::now();
    let r = gb_report(&c, GbKind::Whitney)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = r.cross_caps == 1 && r.lhs.abs() <= 1e-3 * 2.0 * PI && r.error_estimate <= 1e-3 && secs <= 300.0;
    Ok((
        ok,
        format!(
            "{} cross cap, integral of K dA = {:.3e} (error estimate {:.1e})",
            r.cross_caps, r.lhs, r.error_estimate
        ),
    ))
}

fn kossowski_gb() -> Check {
    let c = gallery::get("parallel-torus-front").expect("gallery case");
    let gb1 = gb_report(&c, GbKind::Gb1)?;
    let euler = gb_report(&c, GbKind::Euler)?;
    let ok = gb1.residual <= 5e-3
        && euler.lhs.abs() <= 5e-3
        && euler.rhs == 0.0
        && euler.s_plus == Some(0)
        && euler.s_minus == Some(0);
    Ok((
        ok,
        format!(
            "{} curves; K dA + 2 kappa_s dtau = {:.3e}; K dA-hat = {:.3e}; A3 points +{} -{}",
            gb1.curves,
            gb1.lhs,
            euler.lhs,
            euler.s_plus.unwrap_or(0),
            euler.s_minus.unwrap_or(0)
        ),
    ))
}

fn run_gallery_json(name: &str) -> Result<String> {
    Ok(json::to_string(&analysis::gallery(name)?.value))
}

fn determinism() -> Check {
    let mut differing = Vec::new();
    for name in gallery::NAMES {
        let a = exec::with_threads(None, || run_gallery_json(name))?;
        let b = exec::with_threads(None, || run_gallery_json(name))?;
        let one = exec::with_threads(Some(1), || run_gallery_json(name))?;
        let many = exec::with_threads(Some(4), || run_gallery_json(name))?;
        if a != b || a != one || a != many {
            differing.push(name);
        }
    }
    Ok((
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} gallery runs identical across repeats and 1/4 workers", gallery::NAMES.len())
        } else {
            format!("output differs for {differing:?}")
        },
    ))
}

fn admissibility() -> Check {
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    let mut all = true;
    for name in gallery::NAMES {
        let c = gallery::get(name).expect("gallery case");
        if c.input != crate::config::InputKind::Map {
            continue;
        }
        let m = c.build_metric()?;
        let samples: Vec<[f64; 2]> = if m.has_lambda() {
            analysis::curves(&c)?
                .iter()
                .flat_map(|cv| cv.samples.iter().map(|s| s.point))
                .collect()
        } else {
            analysis::whitney(&c)?.detect()?.iter().map(|d| d.point).collect()
        };
        if samples.is_empty() {
            all = false;
        }
        let r = m.admissibility_check(&samples)?;
        worst = worst.max(r.max_gamma);
        all &= r.admissible && r.max_gamma <= 1e-8;
        checked.push(format!("{name} ({})", samples.len()));
    }
    Ok((
        all,
        format!("max |Gamma| {worst:.1e} over {}", checked.join(", ")),
    ))
}
