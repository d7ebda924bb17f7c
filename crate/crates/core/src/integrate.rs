//! Quadrature of curvature forms and the Gauss-Bonnet checks.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::exec;
use crate::kossowski::{Kossowski, PointClass, SingularCurve, GUARD_FACTOR, TOL_CLS};
use crate::metric::{brioschi_numerator, MetricField};
use crate::numeric::{gauss_rule, richardson};
use crate::whitney::{Whitney, WhitneyOptions, DEDUP_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub gauss_order: usize,
    pub base_tiles: usize,
    /// Maximum number of dyadic refinements of a base tile.
    pub depth: usize,
    /// Absolute error target for a whole-domain integral.
    pub tol: f64,
    pub richardson_h0: f64,
    pub richardson_levels: usize,
    pub richardson_tol: f64,
    /// Below `|lambda| / |grad lambda|` of this fraction of the domain scale
    /// `K lambda` is obtained by extrapolation instead of directly.
    pub near_curve: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            gauss_order: 8,
            base_tiles: 8,
            depth: 8,
            tol: 1e-6,
            richardson_h0: 2e-2,
            richardson_levels: 5,
            richardson_tol: 1e-4,
            near_curve: 1e-4,
        }
    }
}

impl QuadOptions {
    pub fn from_config(c: &AnalysisConfig) -> Self {
        QuadOptions {
            gauss_order: c.options.gauss_order,
            base_tiles: c.options.base_tiles,
            depth: c.options.depth,
            tol: c.tolerances.quad_tol,
            richardson_h0: c.options.richardson_h0,
            richardson_levels: c.options.richardson_levels,
            richardson_tol: c.tolerances.richardson_tol,
            ..QuadOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// Number of leaf cells (tiles or curve segments) used.
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    /// `K dA` with the unsigned area element.
    KdA,
    /// `K dÂ = K lambda du dv`.
    KdHatA,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rect {
    u: [f64; 2],
    v: [f64; 2],
}

impl Rect {
    fn area(&self) -> f64 {
        (self.u[1] - self.u[0]) * (self.v[1] - self.v[0])
    }

    fn diag(&self) -> f64 {
        (self.u[1] - self.u[0]).hypot(self.v[1] - self.v[0])
    }

    fn children(&self) -> [Rect; 4] {
        let um = 0.5 * (self.u[0] + self.u[1]);
        let vm = 0.5 * (self.v[0] + self.v[1]);
        [
            Rect { u: [self.u[0], um], v: [self.v[0], vm] },
            Rect { u: [um, self.u[1]], v: [self.v[0], vm] },
            Rect { u: [self.u[0], um], v: [vm, self.v[1]] },
            Rect { u: [um, self.u[1]], v: [vm, self.v[1]] },
        ]
    }

    fn near(&self, p: [f64; 2], pad: f64) -> bool {
        p[0] >= self.u[0] - pad && p[0] <= self.u[1] + pad && p[1] >= self.v[0] - pad && p[1] <= self.v[1] + pad
    }
}

/// Adaptive tiled quadrature of one curvature form over the whole domain.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub metric: Arc<MetricField>,
    pub opts: QuadOptions,
    /// Points where `K dA` has an integrable `1/r` singularity.
    pub cross_caps: Vec<[f64; 2]>,
}

impl Integrator {
    pub fn new(metric: Arc<MetricField>, opts: QuadOptions, cross_caps: Vec<[f64; 2]>) -> Self {
        Integrator {
            metric,
            opts,
            cross_caps,
        }
    }

    fn scale(&self) -> f64 {
        self.metric.domain.scale()
    }

    /// `K lambda`, which extends smoothly across the singular curve.
    pub fn k_lambda(&self, p: [f64; 2]) -> Result<f64> {
        let j = self.metric.jets(p[0], p[1], 2)?;
        let l = j.lambda()?;
        let lam = l.value();
        let grad = l.derivative(1, 0).hypot(l.derivative(0, 1));
        if lam.abs() > self.opts.near_curve * self.scale() * grad {
            return Ok(brioschi_numerator(&j) / (lam * lam * lam));
        }
        let n = [l.derivative(1, 0) / grad, l.derivative(0, 1) / grad];
        let dom = self.metric.domain;
        let at = |h: f64| -> Result<f64> {
            let q = dom.wrap([p[0] + h * n[0], p[1] + h * n[1]]);
            let j = self.metric.jets(q[0], q[1], 2)?;
            let l = j.lambda()?.value();
            Ok(brioschi_numerator(&j) / (l * l * l))
        };
        let r = richardson(
            |h| Ok(0.5 * (at(h)? + at(-h)?)),
            self.opts.richardson_h0 * self.scale(),
            self.opts.richardson_levels,
            2,
            self.opts.richardson_tol,
        )?;
        Ok(r.value)
    }

    fn density(&self, form: Form, p: [f64; 2]) -> Result<f64> {
        if self.metric.has_lambda() {
            let kl = self.k_lambda(p)?;
            return Ok(match form {
                Form::KdHatA => kl,
                Form::KdA => {
                    let l = self.metric.jets(p[0], p[1], 0)?.lambda()?.value();
                    if l < 0.0 {
                        -kl
                    } else {
                        kl
                    }
                }
            });
        }
        if form == Form::KdHatA {
            return Err(Error::MissingLambda);
        }
        let j = self.metric.jets(p[0], p[1], 2)?;
        let delta = j.delta().value();
        if delta <= 0.0 {
            return Ok(0.0);
        }
        Ok(brioschi_numerator(&j) / delta.powf(1.5))
    }

    fn tensor(&self, form: Form, r: &Rect) -> Result<f64> {
        let (x, w) = gauss_rule(self.opts.gauss_order);
        let hu = 0.5 * (r.u[1] - r.u[0]);
        let hv = 0.5 * (r.v[1] - r.v[0]);
        let mu = 0.5 * (r.u[0] + r.u[1]);
        let mv = 0.5 * (r.v[0] + r.v[1]);
        let mut sum = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            let mut row = 0.0;
            for (xj, wj) in x.iter().zip(w) {
                row += wj * self.density(form, [mu + hu * xi, mv + hv * xj])?;
            }
            sum += wi * row;
        }
        Ok(sum * hu * hv)
    }

    /// Four Duffy triangles with their apex at `apex`; the Jacobian of the
    /// collapse cancels a `1/r` singularity there.
    fn duffy(&self, form: Form, r: &Rect, apex: [f64; 2]) -> Result<f64> {
        let (x, w) = gauss_rule(self.opts.gauss_order);
        let corners = [
            [r.u[0], r.v[0]],
            [r.u[1], r.v[0]],
            [r.u[1], r.v[1]],
            [r.u[0], r.v[1]],
        ];
        let mut total = 0.0;
        for k in 0..4 {
            let a = corners[k];
            let b = corners[(k + 1) % 4];
            let ea = [a[0] - apex[0], a[1] - apex[1]];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let jac = (ea[0] * ab[1] - ea[1] * ab[0]).abs();
            if jac <= 1e-14 * r.area() {
                continue;
            }
            let mut tri = 0.0;
            for (xs, ws) in x.iter().zip(w) {
                let s = 0.5 * (xs + 1.0);
                for (xt, wt) in x.iter().zip(w) {
                    let t = 0.5 * (xt + 1.0);
                    let p = [
                        apex[0] + s * (ea[0] + t * ab[0]),
                        apex[1] + s * (ea[1] + t * ab[1]),
                    ];
                    tri += ws * wt * s * self.density(form, p)?;
                }
            }
            total += 0.25 * jac * tri;
        }
        Ok(total)
    }

    /// Zeros of `lambda` on the segment `a + s (b - a)`, `s` in `[0, 1]`.
    fn roots_on(&self, a: [f64; 2], b: [f64; 2]) -> Result<Vec<f64>> {
        let lam = |s: f64| -> Result<f64> {
            let p = self.metric.domain.wrap([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            Ok(self.metric.jets(p[0], p[1], 0)?.lambda()?.value())
        };
        let m = 16;
        let mut roots = Vec::new();
        let mut s0 = 0.0;
        let mut f0 = lam(0.0)?;
        for k in 1..=m {
            let s1 = k as f64 / m as f64;
            let f1 = lam(s1)?;
            if f0 * f1 < 0.0 {
                let (mut lo, mut hi, mut flo) = (s0, s1, f0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let fm = lam(mid)?;
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            s0 = s1;
            f0 = f1;
        }
        Ok(roots)
    }

    /// Iterated rule: Gauss in the outer variable, and on each inner line
    /// Gauss on the pieces between zeros of `lambda`.
    fn split(&self, form: Form, r: &Rect, inner_v: bool) -> Result<f64> {
        let (x, w) = gauss_rule(self.opts.gauss_order);
        let (outer, inner) = if inner_v { (r.u, r.v) } else { (r.v, r.u) };
        let ho = 0.5 * (outer[1] - outer[0]);
        let mo = 0.5 * (outer[0] + outer[1]);
        let pt = |o: f64, i: f64| if inner_v { [o, i] } else { [i, o] };
        let mut sum = 0.0;
        for (xo, wo) in x.iter().zip(w) {
            let o = mo + ho * xo;
            let roots = self.roots_on(pt(o, inner[0]), pt(o, inner[1]))?;
            let mut cuts = vec![inner[0]];
            cuts.extend(roots.iter().map(|s| inner[0] + s * (inner[1] - inner[0])));
            cuts.push(inner[1]);
            let mut line = 0.0;
            for piece in cuts.windows(2) {
                let hi = 0.5 * (piece[1] - piece[0]);
                let mi = 0.5 * (piece[0] + piece[1]);
                if hi <= 0.0 {
                    continue;
                }
                let mut acc = 0.0;
                for (xi, wi) in x.iter().zip(w) {
                    acc += wi * self.density(form, pt(o, mi + hi * xi))?;
                }
                line += acc * hi;
            }
            sum += wo * line;
        }
        Ok(sum * ho)
    }

    /// If the singular curve may pass through `r`, the axis along which to
    /// cut it (true for lines of constant u).
    fn crossing(&self, r: &Rect) -> Result<Option<bool>> {
        let m = 5;
        let mut best: Option<(f64, bool)> = None;
        for a in 0..m {
            for b in 0..m {
                let p = [
                    r.u[0] + (r.u[1] - r.u[0]) * a as f64 / (m - 1) as f64,
                    r.v[0] + (r.v[1] - r.v[0]) * b as f64 / (m - 1) as f64,
                ];
                let q = self.metric.domain.wrap(p);
                let l = self.metric.jets(q[0], q[1], 1)?.lambda()?;
                let g = l.derivative(1, 0).hypot(l.derivative(0, 1));
                let dist = l.value().abs() / g.max(1e-300);
                if best.is_none_or(|(d, _)| dist < d) {
                    best = Some((dist, l.derivative(0, 1).abs() >= l.derivative(1, 0).abs()));
                }
            }
        }
        Ok(best.and_then(|(d, inner_v)| (d <= r.diag()).then_some(inner_v)))
    }

    fn rule(&self, form: Form, r: &Rect) -> Result<f64> {
        let pad = 10.0 * DEDUP_RADIUS * self.scale();
        if let Some(c) = self.cross_caps.iter().find(|c| r.near(**c, pad)) {
            let apex = [c[0].clamp(r.u[0], r.u[1]), c[1].clamp(r.v[0], r.v[1])];
            return self.duffy(form, r, apex);
        }
        if form == Form::KdA && self.metric.has_lambda() {
            if let Some(inner_v) = self.crossing(r)? {
                return self.split(form, r, inner_v);
            }
        }
        self.tensor(form, r)
    }

    fn adapt(&self, form: Form, r: &Rect, coarse: f64, depth: usize, tol: f64) -> Result<(f64, f64, usize)> {
        let kids = r.children();
        let mut fine = [0.0; 4];
        for (k, c) in kids.iter().enumerate() {
            fine[k] = self.rule(form, c)?;
        }
        let sum = exec::pairwise_sum(&fine);
        let err = (sum - coarse).abs();
        if err <= tol || depth == 0 {
            return Ok((sum, err, 4));
        }
        let mut value = [0.0; 4];
        let mut error = 0.0;
        let mut cells = 0;
        for (k, c) in kids.iter().enumerate() {
            let (v, e, n) = self.adapt(form, c, fine[k], depth - 1, tol / 4.0)?;
            value[k] = v;
            error += e;
            cells += n;
        }
        Ok((exec::pairwise_sum(&value), error, cells))
    }

    /// Integrates `form` over the whole parameter domain.
    pub fn integrate(&self, form: Form) -> Result<Integral> {
        let d = self.metric.domain;
        let n = self.opts.base_tiles;
        let mut tiles = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                tiles.push(Rect {
                    u: [
                        d.u[0] + d.width() * a as f64 / n as f64,
                        d.u[0] + d.width() * (a + 1) as f64 / n as f64,
                    ],
                    v: [
                        d.v[0] + d.height() * b as f64 / n as f64,
                        d.v[0] + d.height() * (b + 1) as f64 / n as f64,
                    ],
                });
            }
        }
        let tol = self.opts.tol / (n * n) as f64;
        let parts = exec::par_map(&tiles, |r| {
            let coarse = self.rule(form, r)?;
            self.adapt(form, r, coarse, self.opts.depth, tol)
        });
        let mut values = Vec::with_capacity(parts.len());
        let mut errors = Vec::with_capacity(parts.len());
        let mut cells = 0;
        for p in parts {
            let (v, e, c) = p?;
            values.push(v);
            errors.push(e);
            cells += c;
        }
        Ok(Integral {
            value: exec::pairwise_sum(&values),
            error: exec::pairwise_sum(&errors),
            cells,
        })
    }
}

/// `∫ kappa_s dτ` along a traced curve.
pub fn integrate_kappa_s(k: &Kossowski, curve: &SingularCurve, order: usize) -> Result<Integral> {
    let n = curve.samples.len();
    let segs = if curve.closed { n } else { n.saturating_sub(1) };
    let a3: Vec<f64> = curve.a3_points.iter().map(|a| a.t).collect();
    let idx: Vec<usize> = (0..segs).collect();
    let parts = exec::par_map(&idx, |&i| {
        let s = &curve.samples[i];
        let h = if i + 1 < n {
            curve.samples[i + 1].t - s.t
        } else {
            curve.closing
        };
        let f = |ds: f64| k.kappa_s_density(&s.local, s.eta, ds);
        let near_a3 = |t: f64| a3.iter().any(|x| (x - t).abs() <= 1e-12 * (1.0 + h))
            || curve.samples.get(i).is_some_and(|x| x.class == PointClass::A3);
        let guarded = |x: &crate::kossowski::CurveSample| x.phi.abs() <= GUARD_FACTOR * TOL_CLS;
        let end = &curve.samples[(i + 1) % n];
        if near_a3(s.t) || guarded(s) {
            graded(&f, h, true)
        } else if near_a3(s.t + h) || guarded(end) {
            graded(&f, h, false)
        } else {
            segment(&f, 0.0, h, order)
        }
    });
    let mut values = Vec::with_capacity(parts.len());
    let mut errors = Vec::with_capacity(parts.len());
    for p in parts {
        let (v, e) = p?;
        values.push(v);
        errors.push(e);
    }
    Ok(Integral {
        value: exec::pairwise_sum(&values),
        error: exec::pairwise_sum(&errors),
        cells: values.len(),
    })
}

fn segment<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, order: usize) -> Result<(f64, f64)> {
    let rule = |n: usize| -> Result<f64> {
        let (x, w) = gauss_rule(n);
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(m + h * xi)?;
        }
        Ok(s * h)
    };
    let hi = rule(order)?;
    let lo = rule(order.saturating_sub(2).max(1))?;
    Ok((hi, (hi - lo).abs()))
}

/// Integral over `[0, h]` graded geometrically toward the end carrying an
/// A3 point (`at_start` for `0`).
fn graded<F: Fn(f64) -> Result<f64>>(f: &F, h: f64, at_start: bool) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut width = h;
    for _ in 0..60 {
        let half = 0.5 * width;
        let (a, b) = if at_start { (half, width) } else { (h - width, h - half) };
        match segment(f, a, b, 6) {
            Ok((v, e)) => {
                total += v;
                err += e;
                if v.abs() <= 1e-12 && half < 1e-6 * h {
                    return Ok((total, err));
                }
            }
            Err(Error::NotA2 { .. }) => {
                // inside the guard band: the remaining piece is bounded by
                // the last contribution
                let last = segment(f, if at_start { width } else { h - 2.0 * width }, if at_start { 2.0 * width } else { h - width }, 6)
                    .map(|x| x.0.abs())
                    .unwrap_or(f64::INFINITY);
                if last > 1e-6 {
                    return Err(Error::NonConvergentNearA3(last));
                }
                return Ok((total, err + last));
            }
            Err(e) => return Err(e),
        }
        width = half;
    }
    Ok((total, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GbKind {
    Gb1,
    Euler,
    Whitney,
}

impl std::str::FromStr for GbKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gb1" => Ok(GbKind::Gb1),
            "euler" => Ok(GbKind::Euler),
            "whitney" => Ok(GbKind::Whitney),
            _ => Err(Error::Config {
                path: "kind".into(),
                message: format!("unknown Gauss-Bonnet kind {s:?}"),
            }),
        }
    }
}

/// Sign of an A3 point: `+1` when `M_+` has interior angle `2 pi` there.
/// Uses `sign(phi' det(eta, grad lambda))`, which is independent of the
/// orientation of the curve, of the sign of `eta` and of the chart, and
/// flips with `lambda`. `None` when `phi'` is too small to decide.
pub fn a3_sign(dphi: f64, eta: [f64; 2], grad: [f64; 2]) -> Option<i32> {
    if dphi.abs() <= TOL_CLS {
        return None;
    }
    let d = eta[0] * grad[1] - eta[1] * grad[0];
    if d == 0.0 {
        return None;
    }
    Some(if dphi * d > 0.0 { 1 } else { -1 })
}

#[derive(Debug, Clone, Serialize)]
pub struct GbReport {
    pub kind: GbKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_k_da: Option<Integral>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_kappa_s: Option<Integral>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int_k_dhat_a: Option<Integral>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub error_estimate: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_plus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_minus: Option<usize>,
    /// A3 points whose sign could not be decided.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_ambiguous: Option<usize>,
    pub curves: usize,
    pub cross_caps: usize,
    pub pass: bool,
}

fn need(v: Option<i64>, path: &str) -> Result<i64> {
    v.ok_or_else(|| Error::Config {
        path: path.into(),
        message: "required for this Gauss-Bonnet check".into(),
    })
}

fn closed_curves(cfg: &AnalysisConfig, k: &Kossowski) -> Result<Vec<SingularCurve>> {
    let curves = if cfg.options.seeds.is_empty() {
        k.find_curves()?
    } else {
        cfg.options.seeds.iter().map(|s| k.trace(*s)).collect::<Result<Vec<_>>>()?
    };
    if let Some(c) = curves.iter().find(|c| !c.closed) {
        let p = c.samples[0].point;
        return Err(Error::SingularSetUnresolved(format!(
            "curve through ({}, {}) does not close up",
            p[0], p[1]
        )));
    }
    Ok(curves)
}

/// Assembles one Gauss-Bonnet identity for the configured metric.
pub fn gb_report(cfg: &AnalysisConfig, kind: GbKind) -> Result<GbReport> {
    let metric = cfg.metric_arc()?;
    if !metric.domain.is_compact() {
        return Err(Error::Config {
            path: "domain".into(),
            message: "Gauss-Bonnet checks need both directions periodic".into(),
        });
    }
    let q = QuadOptions::from_config(cfg);
    let tol = cfg.tolerances.abs_tol;
    let mut report = GbReport {
        kind,
        int_k_da: None,
        int_kappa_s: None,
        int_k_dhat_a: None,
        lhs: 0.0,
        rhs: 0.0,
        residual: 0.0,
        error_estimate: 0.0,
        tolerance: tol,
        s_plus: None,
        s_minus: None,
        s_ambiguous: None,
        curves: 0,
        cross_caps: 0,
        pass: false,
    };
    match kind {
        GbKind::Whitney => {
            let chi = need(cfg.topology.euler, "topology.euler")?;
            let w = Whitney::new(
                metric.clone(),
                WhitneyOptions {
                    grid: cfg.options.crosscap_grid,
                    ..WhitneyOptions::default()
                },
            );
            let caps: Vec<[f64; 2]> = w.detect()?.into_iter().map(|d| d.point).collect();
            report.cross_caps = caps.len();
            let i = Integrator::new(metric, q, caps).integrate(Form::KdA)?;
            report.lhs = i.value;
            report.rhs = 2.0 * PI * chi as f64;
            report.error_estimate = i.error;
            report.int_k_da = Some(i);
        }
        GbKind::Gb1 => {
            let chi = need(cfg.topology.euler, "topology.euler")?;
            let k = Kossowski::new(metric.clone(), cfg.trace_options())?;
            let curves = closed_curves(cfg, &k)?;
            report.curves = curves.len();
            let ka = Integrator::new(metric, q, Vec::new()).integrate(Form::KdA)?;
            let mut ks_vals = Vec::new();
            let mut ks_err = Vec::new();
            let mut cells = 0;
            for c in &curves {
                let i = integrate_kappa_s(&k, c, 6)?;
                ks_vals.push(i.value);
                ks_err.push(i.error);
                cells += i.cells;
            }
            let ks = Integral {
                value: exec::pairwise_sum(&ks_vals),
                error: exec::pairwise_sum(&ks_err),
                cells,
            };
            report.lhs = ka.value + 2.0 * ks.value;
            report.rhs = 2.0 * PI * chi as f64;
            report.error_estimate = ka.error + 2.0 * ks.error;
            report.int_k_da = Some(ka);
            report.int_kappa_s = Some(ks);
        }
        GbKind::Euler => {
            let plus = need(cfg.topology.euler_plus, "topology.euler_plus")?;
            let minus = need(cfg.topology.euler_minus, "topology.euler_minus")?;
            let k = Kossowski::new(metric.clone(), cfg.trace_options())?;
            let curves = closed_curves(cfg, &k)?;
            report.curves = curves.len();
            let (mut sp, mut sm, mut amb) = (0, 0, 0);
            for c in &curves {
                for a in &c.a3_points {
                    let lc = k.local_at(c, a.t)?;
                    match a3_sign(a.dphi, lc.null_dir(), lc.grad) {
                        Some(1) => sp += 1,
                        Some(_) => sm += 1,
                        None => amb += 1,
                    }
                }
            }
            let i = Integrator::new(metric, q, Vec::new()).integrate(Form::KdHatA)?;
            report.lhs = i.value;
            report.rhs = 2.0 * PI * (plus - minus + sp as i64 - sm as i64) as f64;
            report.error_estimate = i.error;
            report.int_k_dhat_a = Some(i);
            report.s_plus = Some(sp);
            report.s_minus = Some(sm);
            report.s_ambiguous = Some(amb);
        }
    }
    report.residual = (report.lhs - report.rhs).abs();
    let undecided = report.s_ambiguous.unwrap_or(0) > 0;
    report.pass = !undecided && report.residual <= tol.max(10.0 * report.error_estimate) && report.error_estimate <= tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::metric::Domain;

    fn torus(e: &str, g: &str) -> Arc<MetricField> {
        let tau = 2.0 * PI;
        let mut d = Domain::rect([0.0, tau], [0.0, tau]);
        d.periodic_u = true;
        d.periodic_v = true;
        Arc::new(MetricField::from_strs(e, "0", g, None, d).unwrap())
    }

    #[test]
    fn flat_torus_integrates_to_zero() {
        let i = Integrator::new(torus("1", "1"), QuadOptions::default(), vec![]);
        let r = i.integrate(Form::KdA).unwrap();
        assert!(r.value.abs() < 1e-12 && r.error < 1e-12);
    }

    #[test]
    fn torus_of_revolution_total_curvature_vanishes() {
        // (2 + cos v)^2 du^2 + dv^2: K dA = -cos v du dv / ... integrates to 0
        let m = torus("(2 + cos(v))^2", "1");
        let r = Integrator::new(m, QuadOptions::default(), vec![]).integrate(Form::KdA).unwrap();
        assert!(r.value.abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn spherical_zone_matches_closed_form() {
        // du^2 + sin^2(u) dv^2 on u in [0.3, 1.2]: K = 1, so the integral is
        // the area 2 pi (cos 0.3 - cos 1.2)
        let mut d = Domain::rect([0.3, 1.2], [0.0, 2.0 * PI]);
        d.periodic_v = true;
        let m = Arc::new(MetricField::from_strs("1", "0", "sin(u)^2", None, d).unwrap());
        let r = Integrator::new(m, QuadOptions::default(), vec![]).integrate(Form::KdA).unwrap();
        let exact = 2.0 * PI * (0.3f64.cos() - 1.2f64.cos());
        assert!((r.value - exact).abs() < 1e-10, "{} vs {exact}", r.value);
    }

    #[test]
    fn normal_form_kappa_s_integral() {
        let c = gallery::get("normal-form").unwrap();
        let k = Kossowski::new(c.metric_arc().unwrap(), c.trace_options()).unwrap();
        let curve = k.trace(c.options.seeds[0]).unwrap();
        let i = integrate_kappa_s(&k, &curve, 6).unwrap();
        // kappa_s = 1 and E(u, 0) = 1 on u in [0, 1]
        assert!((i.value - 1.0).abs() < 1e-9, "{i:?}");
    }

    #[test]
    fn cuspidal_edge_kappa_s_integral_vanishes() {
        let c = gallery::get("cuspidal-edge").unwrap();
        let k = Kossowski::new(c.metric_arc().unwrap(), c.trace_options()).unwrap();
        let curve = k.trace(c.options.seeds[0]).unwrap();
        assert!(integrate_kappa_s(&k, &curve, 6).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn swallowtail_a3_is_positive() {
        // the side v > -6u^2 has lambda > 0 and carries the 2 pi angle
        let c = gallery::get("swallowtail").unwrap();
        let m = c.metric_arc().unwrap();
        let k = Kossowski::new(m.clone(), c.trace_options()).unwrap();
        let curve = k.trace(c.options.seeds[0]).unwrap();
        let a = &curve.a3_points[0];
        let lc = k.local_at(&curve, a.t).unwrap();
        assert_eq!(a3_sign(a.dphi, lc.null_dir(), lc.grad), Some(1));
        assert!(m.jets(0.0, 0.5, 0).unwrap().lambda().unwrap().value() > 0.0);
        let k2 = Kossowski::new(Arc::new(m.flipped()), c.trace_options()).unwrap();
        let curve = k2.trace(c.options.seeds[0]).unwrap();
        let a = &curve.a3_points[0];
        let lc = k2.local_at(&curve, a.t).unwrap();
        assert_eq!(a3_sign(a.dphi, lc.null_dir(), lc.grad), Some(-1));
    }

    #[test]
    fn missing_topology_is_a_config_error() {
        let mut c = gallery::get("bump-torus").unwrap();
        c.topology.euler = None;
        match gb_report(&c, GbKind::Whitney) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "topology.euler"),
            other => panic!("{other:?}"),
        }
    }
}
