//! Intrinsic cross caps: detection, the adapted chart pipeline, and the
//! invariants `alpha02`, `alpha11`, `alpha20`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chart::{Chart, ChartKind, Poly2};
use crate::error::{Error, Result};
use crate::exec;
use crate::jet::Jet2;
use crate::metric::{fix_sign, transform_jets, Domain, MetricField, MetricJets};
use crate::numeric::richardson;

/// Residual allowed on every chart-stage condition.
pub const STAGE_TOL: f64 = 1e-10;
/// Two detections closer than this (times the domain scale) are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyOptions {
    /// Seeds per axis for the Newton search on `grad delta`.
    pub grid: usize,
    /// First radius of the ray-limit ladder, in adapted coordinates.
    pub ray_h0: f64,
    pub ray_levels: usize,
    pub ray_tol: f64,
}

impl Default for WhitneyOptions {
    fn default() -> Self {
        WhitneyOptions {
            grid: 64,
            ray_h0: 0.04,
            ray_levels: 6,
            ray_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detection {
    pub point: [f64; 2],
    /// `delta_uu delta_vv - delta_uv^2` in the input coordinates.
    pub hess: f64,
}

/// One stage of the chart stack: its kind, the constants solved for, and
/// the largest residual of the conditions it is meant to enforce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub stage: &'static str,
    pub constants: Vec<(String, f64)>,
    pub residual: f64,
    pub jacobian: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCapReport {
    pub location: [f64; 2],
    pub hess: f64,
    pub delta: f64,
    /// `E G_vv / 2 - F_v^2` in the adjusted chart.
    pub alpha: f64,
    pub alpha02: f64,
    pub alpha11: f64,
    /// False when `alpha11` is reported as an absolute value.
    pub alpha11_signed: bool,
    pub alpha20: f64,
    /// `G_uu - 2 (1 + alpha11^2)` in the second-level chart.
    pub residual_a1_2: f64,
    /// `F_uu - E_uv / 2 - alpha11 alpha20` in the second-level chart.
    pub residual_fe2: f64,
    /// `|Hess - 4 E Delta|` in the adjusted chart.
    pub residual_hess: f64,
    pub chart_stack: Vec<Stage>,
    /// Coefficient convention used when matching the West expansion.
    pub convention: &'static str,
    #[serde(skip)]
    pub level2_chart: Chart,
    #[serde(skip)]
    pub west_chart: Option<Chart>,
}

pub const WEST_CONVENTION: &str = "second derivatives at the cross cap: E_uu = 2 a20^2, E_uv = 2 a11 a20, \
E_vv = 2 (1 + a11^2), F_uu = 2 a11 a20, F_uv = 1 + a11^2 + a02 a20, F_vv = 2 a02 a11, \
G_uu = 2 (1 + a11^2), G_uv = 2 a02 a11, G_vv = 2 a02^2";

/// The closed-form ray limit `lim r^2 K` along the direction `theta`.
pub fn ray_limit_formula(a20: f64, a11: f64, a02: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let q = c * c + (a11 * c + a02 * s).powi(2);
    a02 * (a20 * c * c - a02 * s * s) / (q * q)
}

fn d(j: &Jet2, i: usize, k: usize) -> f64 {
    j.derivative(i, k)
}

fn det2(a: f64, b: f64, c: f64, e: f64) -> f64 {
    a * e - b * c
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(Hess, Delta, alpha)` from jets in a chart adjusted at the origin.
fn adjusted_quantities(j: &MetricJets) -> (f64, f64, f64) {
    let dl = j.delta();
    let hess = det2(d(&dl, 2, 0), d(&dl, 1, 1), d(&dl, 1, 1), d(&dl, 0, 2));
    let e = j.e.value();
    let (fu, fv) = (d(&j.f, 1, 0), d(&j.f, 0, 1));
    let delta = det3([
        [e, fu, fv],
        [fu, d(&j.g, 2, 0) / 2.0, d(&j.g, 1, 1) / 2.0],
        [fv, d(&j.g, 1, 1) / 2.0, d(&j.g, 0, 2) / 2.0],
    ]);
    let alpha = e * d(&j.g, 0, 2) / 2.0 - fv * fv;
    (hess, delta, alpha)
}

/// Solves `r(c) = 0` for a residual that is affine in `c`, by least squares
/// on the columns `r(e_i) - r(0)`.
fn solve_affine<F>(n: usize, what: &str, residual: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let zero = vec![0.0; n];
    let r0 = residual(&zero)?;
    let m = r0.len();
    let mut jac = DMatrix::<f64>::zeros(m, n);
    for i in 0..n {
        let mut c = zero.clone();
        c[i] = 1.0;
        let ri = residual(&c)?;
        for k in 0..m {
            jac[(k, i)] = ri[k] - r0[k];
        }
    }
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax.max(1e-300)) {
        return Err(Error::SolveFailed(format!(
            "{what}: singular system (singular values {smin:e} .. {smax:e})"
        )));
    }
    let rhs = DVector::from_iterator(m, r0.iter().map(|x| -x));
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::SolveFailed(format!("{what}: {e}")))?;
    Ok(sol.iter().copied().collect())
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Detector and chart pipeline bound to one metric.
#[derive(Debug, Clone)]
pub struct Whitney {
    pub metric: Arc<MetricField>,
    pub opts: WhitneyOptions,
}

impl Whitney {
    pub fn new(metric: Arc<MetricField>, opts: WhitneyOptions) -> Self {
        Whitney { metric, opts }
    }

    fn scale(&self) -> f64 {
        self.metric.domain.scale()
    }

    /// Newton iteration on `grad delta` from one seed. Returns the limit
    /// only if it passes the cross-cap acceptance tests.
    pub fn newton(&self, seed: [f64; 2]) -> Result<Option<Detection>> {
        let dom = self.metric.domain;
        let sc = self.scale();
        let mut p = seed;
        for _ in 0..60 {
            let dl = self.metric.jets(p[0], p[1], 2)?.delta();
            let (gu, gv) = (d(&dl, 1, 0), d(&dl, 0, 1));
            let (huu, huv, hvv) = (d(&dl, 2, 0), d(&dl, 1, 1), d(&dl, 0, 2));
            let det = huu * hvv - huv * huv;
            if !(det > 0.0 && huu > 0.0) {
                return Ok(None);
            }
            let step = [(hvv * gu - huv * gv) / det, (huu * gv - huv * gu) / det];
            if step[0].hypot(step[1]) > 0.25 * sc {
                return Ok(None);
            }
            let q = [p[0] - step[0], p[1] - step[1]];
            if !dom.contains(q) {
                return Ok(None);
            }
            p = dom.wrap(q);
            if step[0].hypot(step[1]) <= 1e-14 * sc {
                break;
            }
        }
        self.accept(p)
    }

    fn accept(&self, p: [f64; 2]) -> Result<Option<Detection>> {
        let sc = self.scale();
        let j = self.metric.jets(p[0], p[1], 2)?;
        let dl = j.delta();
        let hess = det2(d(&dl, 2, 0), d(&dl, 1, 1), d(&dl, 1, 1), d(&dl, 0, 2));
        let ok = dl.value() <= 1e-12 * sc * sc
            && d(&dl, 2, 0) > 0.0
            && hess > 1e-8 * sc.powi(4)
            && self.metric.null_space(p[0], p[1])?.rank == 1;
        Ok(ok.then_some(Detection { point: p, hess }))
    }

    /// Cross caps found from a uniform seed grid, sorted and deduplicated.
    pub fn detect(&self) -> Result<Vec<Detection>> {
        let dom = self.metric.domain;
        let n = self.opts.grid.max(1);
        let mut seeds = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                seeds.push([
                    dom.u[0] + dom.width() * (a as f64 + 0.5) / n as f64,
                    dom.v[0] + dom.height() * (b as f64 + 0.5) / n as f64,
                ]);
            }
        }
        let found = exec::par_map(&seeds, |s| self.newton(*s));
        let radius = DEDUP_RADIUS * self.scale();
        let mut out: Vec<Detection> = Vec::new();
        for r in found {
            if let Some(det) = r? {
                let dup = out.iter().any(|o| {
                    let dd = dom.delta(o.point, det.point);
                    dd[0].hypot(dd[1]) < radius
                });
                if !dup {
                    out.push(det);
                }
            }
        }
        out.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap_or(std::cmp::Ordering::Equal));
        Ok(out)
    }

    /// Affine chart centred at `p` whose `eta` axis is the null direction.
    pub fn adjusted_chart(&self, p: [f64; 2]) -> Result<Chart> {
        let ns = self.metric.null_space(p[0], p[1])?;
        if ns.rank != 1 {
            return Err(Error::NotCrossCap {
                u: p[0],
                v: p[1],
                reason: format!("metric has rank {}", ns.rank),
            });
        }
        let n = fix_sign(ns.null_dirs[0]);
        Ok(Chart::affine(p, [[n[1], n[0]], [-n[0], n[1]]]))
    }

    fn base_jets(&self, p: [f64; 2]) -> Result<MetricJets> {
        self.metric.jets(p[0], p[1], 2)
    }

    fn pulled(base: &MetricJets, chart: &Chart) -> Result<MetricJets> {
        transform_jets(base, &chart.jets(0.0, 0.0, 2))
    }

    /// `(alpha02, Delta, alpha)` at `p`, computed in an adjusted chart.
    pub fn alpha02(&self, p: [f64; 2]) -> Result<(f64, f64, f64)> {
        let base = self.base_jets(p)?;
        let j = Self::pulled(&base, &self.adjusted_chart(p)?)?;
        let (hess, delta, alpha) = adjusted_quantities(&j);
        if !(hess > 0.0 && delta > 0.0 && alpha > 0.0) {
            return Err(Error::NotCrossCap {
                u: p[0],
                v: p[1],
                reason: format!("Hess = {hess:e}, Delta = {delta:e}, alpha = {alpha:e}"),
            });
        }
        Ok((j.e.value().sqrt() * alpha.powf(1.5) / delta, delta, alpha))
    }

    /// Composes the adjusted chart with
    /// `u = c1 xi + c11 xi^2 + c12 xi eta + c22 eta^2, v = eta`.
    pub fn adapted_chart(&self, p: [f64; 2]) -> Result<(Chart, Stage)> {
        let base = self.base_jets(p)?;
        let adj = self.adjusted_chart(p)?;
        let j0 = Self::pulled(&base, &adj)?;
        let c1 = 1.0 / j0.e.value().sqrt();
        let make = |c: &[f64]| {
            let u = Poly2::from_terms(&[(1, 0, c1), (2, 0, c[0]), (1, 1, c[1]), (0, 2, c[2])]);
            adj.after(&Chart::new(u, Poly2::linear(0.0, 0.0, 1.0), ChartKind::Polynomial))
        };
        let conditions = |j: &MetricJets| {
            vec![
                d(&j.e, 1, 0),
                d(&j.e, 0, 1),
                d(&j.f, 1, 0),
                d(&j.f, 0, 1),
                d(&j.g, 1, 0),
                d(&j.g, 0, 1),
            ]
        };
        let c = solve_affine(3, "adapted chart", |c| {
            Ok(conditions(&Self::pulled(&base, &make(c))?))
        })?;
        let chart = make(&c);
        let j = Self::pulled(&base, &chart)?;
        let mut res = conditions(&j);
        res.push(j.e.value() - 1.0);
        res.push(j.f.value());
        res.push(j.g.value());
        let residual = max_abs(&res);
        if residual > STAGE_TOL * (1.0 + max_abs(&[d(&j.e, 0, 2), d(&j.g, 0, 2)])) {
            return Err(Error::SolveFailed(format!(
                "adapted chart leaves residual {residual:e}"
            )));
        }
        let stage = Stage {
            stage: "adapted",
            constants: vec![
                ("c1".into(), c1),
                ("c11".into(), c[0]),
                ("c12".into(), c[1]),
                ("c22".into(), c[2]),
            ],
            residual,
            jacobian: chart.jacobian_at(0.0, 0.0),
        };
        Ok((chart, stage))
    }

    /// First level: `v -> s eta` with `G_vv = 2 alpha02^2` afterwards.
    pub fn level1(&self, base: &MetricJets, adapted: &Chart, alpha02: f64) -> Result<(Chart, Stage)> {
        let j = Self::pulled(base, adapted)?;
        let gvv = d(&j.g, 0, 2);
        let s = 2f64.powf(0.25) * alpha02.sqrt() / gvv.powf(0.25);
        let chart = adapted.after(&Chart::affine([0.0, 0.0], [[1.0, 0.0], [0.0, s]]));
        let j = Self::pulled(base, &chart)?;
        let target = 2.0 * alpha02 * alpha02;
        let residual = (d(&j.g, 0, 2) - target).abs();
        if !(residual <= STAGE_TOL * (1.0 + target)) {
            return Err(Error::SolveFailed(format!(
                "first-level adjustment leaves residual {residual:e}"
            )));
        }
        let stage = Stage {
            stage: "level-1",
            constants: vec![("s".into(), s)],
            residual,
            jacobian: chart.jacobian_at(0.0, 0.0),
        };
        Ok((chart, stage))
    }

    /// Second level: the shear `v = eta + c xi`.
    pub fn level2(&self, base: &MetricJets, level1: &Chart) -> Result<(Chart, Stage)> {
        let j = Self::pulled(base, level1)?;
        let ghess = det2(d(&j.g, 2, 0), d(&j.g, 1, 1), d(&j.g, 1, 1), d(&j.g, 0, 2));
        let gscale = d(&j.g, 2, 0).abs() + d(&j.g, 0, 2).abs();
        if ghess.abs() <= 1e-12 * gscale * gscale {
            return Err(Error::DegenerateGHessian(ghess));
        }
        let make = |c: f64| level1.after(&Chart::affine([0.0, 0.0], [[1.0, 0.0], [c, 1.0]]));
        let condition = |j: &MetricJets| {
            det2(
                d(&j.f, 2, 0) - d(&j.e, 1, 1) / 2.0,
                d(&j.g, 1, 1),
                d(&j.f, 1, 1) - d(&j.e, 0, 2) / 2.0,
                d(&j.g, 0, 2),
            )
        };
        let c = solve_affine(1, "second-level shear", |c| {
            Ok(vec![condition(&Self::pulled(base, &make(c[0]))?)])
        })?[0];
        let chart = make(c);
        let residual = condition(&Self::pulled(base, &chart)?).abs();
        if !(residual <= STAGE_TOL * (1.0 + gscale * gscale)) {
            return Err(Error::SolveFailed(format!(
                "second-level adjustment leaves residual {residual:e}"
            )));
        }
        let stage = Stage {
            stage: "level-2",
            constants: vec![("c".into(), c)],
            residual,
            jacobian: chart.jacobian_at(0.0, 0.0),
        };
        Ok((chart, stage))
    }

    /// The cubic change `u = xi + c30 xi^3 + c21 xi^2 eta + c12 xi eta^2 +
    /// c03 eta^3` matching the West expansion to second order.
    pub fn west(
        &self,
        base: &MetricJets,
        level2: &Chart,
        (a20, a11, a02): (f64, f64, f64),
    ) -> Result<(Chart, Stage)> {
        let make = |c: &[f64]| {
            let u = Poly2::from_terms(&[(1, 0, 1.0), (3, 0, c[0]), (2, 1, c[1]), (1, 2, c[2]), (0, 3, c[3])]);
            level2.after(&Chart::new(u, Poly2::linear(0.0, 0.0, 1.0), ChartKind::Polynomial))
        };
        let c = solve_affine(4, "West chart", |c| {
            let j = Self::pulled(base, &make(c))?;
            Ok(vec![
                d(&j.e, 2, 0) - 2.0 * a20 * a20,
                d(&j.f, 2, 0) - 2.0 * a11 * a20,
                d(&j.f, 1, 1) - (1.0 + a11 * a11 + a02 * a20),
                d(&j.f, 0, 2) - 2.0 * a02 * a11,
            ])
        })?;
        let chart = make(&c);
        let j = Self::pulled(base, &chart)?;
        let residual = max_abs(&west_residuals(&j, a20, a11, a02));
        let size = 1.0 + a20 * a20 + a11 * a11 + a02 * a02;
        if !(residual <= 1e-9 * size) {
            return Err(Error::SolveFailed(format!(
                "West chart leaves residual {residual:e}"
            )));
        }
        let stage = Stage {
            stage: "west",
            constants: vec![
                ("c30".into(), c[0]),
                ("c21".into(), c[1]),
                ("c12".into(), c[2]),
                ("c03".into(), c[3]),
            ],
            residual,
            jacobian: chart.jacobian_at(0.0, 0.0),
        };
        Ok((chart, stage))
    }

    /// Runs the whole chart stack at a detected cross cap.
    pub fn invariants(&self, p: [f64; 2]) -> Result<CrossCapReport> {
        let base = self.base_jets(p)?;
        let adj = self.adjusted_chart(p)?;
        let ja = Self::pulled(&base, &adj)?;
        let (hess, delta, alpha) = adjusted_quantities(&ja);
        let (alpha02, _, _) = self.alpha02(p)?;
        let residual_hess = (hess - 4.0 * ja.e.value() * delta).abs();
        let mut stack = vec![Stage {
            stage: "adjusted",
            constants: vec![
                ("n_u".into(), adj.u.coeff(0, 1)),
                ("n_v".into(), adj.v.coeff(0, 1)),
            ],
            residual: ja.f.value().abs().max(ja.g.value().abs()),
            jacobian: adj.jacobian_at(0.0, 0.0),
        }];

        let (adapted, st) = self.adapted_chart(p)?;
        stack.push(st);
        let (l1, st) = self.level1(&base, &adapted, alpha02)?;
        stack.push(st);
        let (l2, st) = self.level2(&base, &l1)?;
        stack.push(st);

        let j = Self::pulled(&base, &l2)?;
        let a11 = d(&j.g, 1, 1) / (2.0 * alpha02);
        let a20 = (d(&j.f, 1, 1) - d(&j.e, 0, 2) / 2.0) / alpha02;
        let residual_a1_2 = d(&j.g, 2, 0) - 2.0 * (1.0 + a11 * a11);
        let residual_fe2 = d(&j.f, 2, 0) - d(&j.e, 1, 1) / 2.0 - a11 * a20;

        let (west, st) = self.west(&base, &l2, (a20, a11, alpha02))?;
        stack.push(st);

        let preserving = stack.iter().all(|s| s.jacobian > 0.0);
        let signed = self.metric.oriented && preserving;
        Ok(CrossCapReport {
            location: p,
            hess,
            delta,
            alpha,
            alpha02,
            alpha11: if signed { a11 } else { a11.abs() },
            alpha11_signed: signed,
            alpha20: a20,
            residual_a1_2,
            residual_fe2,
            residual_hess,
            chart_stack: stack,
            convention: WEST_CONVENTION,
            level2_chart: l2,
            west_chart: Some(west),
        })
    }

    /// Detects every cross cap and runs the pipeline on each.
    pub fn analyze(&self) -> Result<Vec<CrossCapReport>> {
        let found = self.detect()?;
        exec::par_map(&found, |det| self.invariants(det.point))
            .into_iter()
            .collect()
    }

    /// `lim_{r -> 0} r^2 K(r cos theta, r sin theta)` in the second-level
    /// chart of `report`.
    pub fn ray_limit(&self, report: &CrossCapReport, theta: f64) -> Result<f64> {
        let r0 = self.opts.ray_h0;
        let local = Domain {
            u: [-2.0 * r0, 2.0 * r0],
            v: [-2.0 * r0, 2.0 * r0],
            periodic_u: false,
            periodic_v: false,
        };
        let m = MetricField::pullback(&self.metric, report.level2_chart.clone(), local);
        let (s, c) = theta.sin_cos();
        let lim = richardson(
            |r| Ok(r * r * m.gaussian_curvature(r * c, r * s)?),
            r0,
            self.opts.ray_levels,
            1,
            self.opts.ray_tol,
        )?;
        Ok(lim.value)
    }
}

/// Differences between the nine second derivatives at the origin and the
/// West expansion.
pub fn west_residuals(j: &MetricJets, a20: f64, a11: f64, a02: f64) -> [f64; 9] {
    [
        d(&j.e, 2, 0) - 2.0 * a20 * a20,
        d(&j.e, 1, 1) - 2.0 * a11 * a20,
        d(&j.e, 0, 2) - 2.0 * (1.0 + a11 * a11),
        d(&j.f, 2, 0) - 2.0 * a11 * a20,
        d(&j.f, 1, 1) - (1.0 + a11 * a11 + a02 * a20),
        d(&j.f, 0, 2) - 2.0 * a02 * a11,
        d(&j.g, 2, 0) - 2.0 * (1.0 + a11 * a11),
        d(&j.g, 1, 1) - 2.0 * a02 * a11,
        d(&j.g, 0, 2) - 2.0 * a02 * a02,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn whitney(name: &str) -> Whitney {
        let m = gallery::get(name).unwrap().metric_arc().unwrap();
        Whitney::new(m, WhitneyOptions::default())
    }

    #[test]
    fn standard_cross_cap_identities() {
        let w = whitney("cross-cap-standard");
        let found = w.detect().unwrap();
        assert_eq!(found.len(), 1);
        let p = found[0].point;
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
        // delta = u^2 + 4 v^2 + 4 v^4
        assert!((found[0].hess - 16.0).abs() < 1e-9);
        let r = w.invariants(p).unwrap();
        assert!((r.delta - 4.0).abs() < 1e-9);
        assert!((r.alpha - 4.0).abs() < 1e-9);
        assert!((r.alpha02 - 2.0).abs() < 1e-9);
        assert!(r.alpha11.abs() < 1e-9 && r.alpha20.abs() < 1e-9);
        assert!(r.residual_hess < 1e-9);
        assert!(r.residual_a1_2.abs() < 1e-9 && r.residual_fe2.abs() < 1e-9);
        // already West type: every stage is the identity
        for s in &r.chart_stack[1..] {
            for (name, c) in &s.constants {
                let id = if name == "c1" || name == "s" { 1.0 } else { 0.0 };
                assert!((c - id).abs() < 1e-9, "{} {name} = {c}", s.stage);
            }
        }
    }

    #[test]
    fn west_synthetic_recovers_its_triple() {
        let w = whitney("west-synthetic");
        let found = w.detect().unwrap();
        assert_eq!(found.len(), 1);
        let r = w.invariants(found[0].point).unwrap();
        assert!((r.alpha02 - 2.0).abs() < 1e-9);
        assert!((r.alpha11 - 0.5).abs() < 1e-8);
        assert!((r.alpha20 - 1.0).abs() < 1e-8);
        assert!(r.alpha11_signed);
    }

    #[test]
    fn flat_metric_has_no_cross_caps() {
        let m = MetricField::from_strs("1", "0", "1", None, Domain::rect([0.0, 1.0], [0.0, 1.0])).unwrap();
        let w = Whitney::new(Arc::new(m), WhitneyOptions { grid: 8, ..Default::default() });
        assert!(w.detect().unwrap().is_empty());
        assert!(matches!(w.alpha02([0.5, 0.5]), Err(Error::NotCrossCap { .. })));
    }

    #[test]
    fn bump_torus_has_one_cross_cap_at_origin() {
        let w = whitney("bump-torus");
        let found = w.detect().unwrap();
        assert_eq!(found.len(), 1);
        assert!(found[0].point[0].abs() < 1e-12 && found[0].point[1].abs() < 1e-12);
    }

    #[test]
    fn sheared_copy_recovers_the_shear() {
        let base = gallery::west_synthetic(1.0, 0.5, 2.0).metric_arc().unwrap();
        let shear = Chart::affine([0.0, 0.0], [[1.0, 0.0], [0.3, 1.0]]);
        let dom = Domain::rect([-0.2, 0.2], [-0.2, 0.2]);
        let w = Whitney::new(Arc::new(MetricField::pullback(&base, shear, dom)), WhitneyOptions::default());
        let r = w.invariants([0.0, 0.0]).unwrap();
        let c = r.chart_stack.iter().find(|s| s.stage == "level-2").unwrap().constants[0].1;
        assert!((c + 0.3).abs() < 1e-8, "{c}");
        assert!((r.alpha20 - 1.0).abs() < 1e-8 && (r.alpha11 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn scaling_the_metric_scales_alpha02() {
        let base = gallery::get("cross-cap-standard").unwrap().metric_arc().unwrap();
        let w = Whitney::new(Arc::new(MetricField::scaled(&base, 2.0)), WhitneyOptions::default());
        let (a02, _, _) = w.alpha02([0.0, 0.0]).unwrap();
        assert!((a02 - 4.0).abs() < 1e-8);
    }

    #[test]
    fn ray_limit_matches_formula() {
        for name in ["cross-cap-standard", "west-synthetic"] {
            let w = whitney(name);
            let r = w.invariants([0.0, 0.0]).unwrap();
            for k in 0..16 {
                let th = k as f64 * std::f64::consts::PI / 16.0;
                let num = w.ray_limit(&r, th).unwrap();
                let exact = ray_limit_formula(r.alpha20, r.alpha11, r.alpha02, th);
                assert!((num - exact).abs() < 1e-3, "{name} {th}: {num} vs {exact}");
            }
        }
        assert!((ray_limit_formula(0.0, 0.0, 2.0, std::f64::consts::FRAC_PI_2) + 0.25).abs() < 1e-15);
        assert!((ray_limit_formula(1.0, 0.5, 2.0, 0.0) - 1.28).abs() < 1e-12);
    }
}
