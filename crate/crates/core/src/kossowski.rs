//! Singular curves of frontal metrics: tracing, A2/A3 classification and
//! the invariants `kappa_s` (singular curvature) and `kappa_pi` (product
//! curvature).
//!
//! Curves are traced as level sets of `lambda` with unit Euclidean speed,
//! `gamma' = J grad(lambda) / |grad(lambda)|` where `J(a, b) = (-b, a)`.
//! At every sample the solution of that ODE is expanded as a Taylor series
//! (coefficient by coefficient, by composing the jet of `lambda` with the
//! partial series), and so is the null direction along it. These series
//! serve as predictor while tracing and as the source of the curve-based
//! chart in which the invariants are evaluated.

use std::sync::Arc;

use serde::Serialize;

use crate::chart::{Chart, ChartKind, Poly2};
use crate::error::{Error, Result};
use crate::exec;
use crate::jet::Jet2;
use crate::metric::{fix_sign, transform_jets, MetricField, MetricJets};
use crate::numeric::{gauss_rule, richardson};

/// Classification threshold on `|det(gamma', eta)|` (unit vectors).
pub const TOL_CLS: f64 = 1e-7;
/// Samples with `|det(gamma', eta)|` below this multiple of [`TOL_CLS`]
/// carry no singular curvature.
pub const GUARD_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub jet_order: usize,
    /// Largest predictor step, as a fraction of the domain scale.
    pub max_step: f64,
    pub max_samples: usize,
    /// First Richardson step for `kappa_pi`, as a fraction of the domain scale.
    pub richardson_h0: f64,
    pub richardson_levels: usize,
    pub richardson_tol: f64,
    /// Grid resolution used to seed curves automatically.
    pub seed_grid: usize,
    pub product_curvature: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            jet_order: 4,
            max_step: 1.0 / 128.0,
            max_samples: 50_000,
            richardson_h0: 2e-2,
            richardson_levels: 5,
            richardson_tol: 1e-4,
            seed_grid: 32,
            product_curvature: true,
        }
    }
}

impl TraceOptions {
    /// Order of the local curve series.
    fn series_order(&self) -> usize {
        self.jet_order.clamp(3, 5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    A2,
    A3,
    Other,
}

/// Taylor expansion of the traced curve and of the null direction around
/// one point, in the curve parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCurve {
    pub gamma: [Vec<f64>; 2],
    pub eta: [Vec<f64>; 2],
    pub grad: [f64; 2],
}

fn series_at(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * s + x)
}

fn series_deriv(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, x)| acc * s + k as f64 * x)
}

impl LocalCurve {
    pub fn point(&self) -> [f64; 2] {
        [self.gamma[0][0], self.gamma[1][0]]
    }

    pub fn tangent(&self) -> [f64; 2] {
        [self.gamma[0][1], self.gamma[1][1]]
    }

    pub fn null_dir(&self) -> [f64; 2] {
        [self.eta[0][0], self.eta[1][0]]
    }

    pub fn position(&self, s: f64) -> [f64; 2] {
        [series_at(&self.gamma[0], s), series_at(&self.gamma[1], s)]
    }

    pub fn velocity(&self, s: f64) -> [f64; 2] {
        [series_deriv(&self.gamma[0], s), series_deriv(&self.gamma[1], s)]
    }

    /// `det(gamma', eta)`.
    pub fn phi(&self) -> f64 {
        det(self.tangent(), self.null_dir())
    }

    /// Derivative of `det(gamma', eta)` along the curve.
    pub fn dphi(&self) -> f64 {
        let g2 = [2.0 * self.gamma[0][2], 2.0 * self.gamma[1][2]];
        let e1 = [self.eta[0][1], self.eta[1][1]];
        det(g2, self.null_dir()) + det(self.tangent(), e1)
    }

    /// Same expansion with the parameter reversed.
    fn reversed(&self) -> LocalCurve {
        let flip = |c: &Vec<f64>| {
            c.iter()
                .enumerate()
                .map(|(k, x)| if k % 2 == 0 { *x } else { -x })
                .collect::<Vec<_>>()
        };
        LocalCurve {
            gamma: [flip(&self.gamma[0]), flip(&self.gamma[1])],
            eta: [flip(&self.eta[0]), flip(&self.eta[1])],
            grad: self.grad,
        }
    }

    /// The curve-based chart `(s, w) -> gamma(s) + w eta(s)`.
    pub fn chart(&self) -> Chart {
        let comp = |k: usize| {
            let mut terms: Vec<(usize, usize, f64)> = Vec::new();
            for (i, c) in self.gamma[k].iter().enumerate() {
                terms.push((i, 0, *c));
            }
            for (i, c) in self.eta[k].iter().enumerate() {
                terms.push((i, 1, *c));
            }
            Poly2::from_terms(&terms)
        };
        Chart::new(comp(0), comp(1), ChartKind::CurveBased)
    }
}

fn det(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub t: f64,
    pub point: [f64; 2],
    pub tangent: [f64; 2],
    pub eta: [f64; 2],
    pub grad_norm: f64,
    pub phi: f64,
    pub class: PointClass,
    pub kappa_s: Option<f64>,
    pub kappa_pi: Option<f64>,
    /// Set inside the A3 guard band or where an invariant failed to
    /// converge.
    pub unreliable: bool,
    /// Cumulative arclength with respect to the metric.
    pub tau: f64,
    #[serde(skip)]
    pub local: LocalCurve,
}

#[derive(Debug, Clone, Serialize)]
pub struct A3Point {
    pub t: f64,
    pub point: [f64; 2],
    pub phi: f64,
    pub dphi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularCurve {
    pub samples: Vec<CurveSample>,
    pub closed: bool,
    pub a3_points: Vec<A3Point>,
    /// Whether the reported `kappa_pi` values carry a sign.
    pub kappa_pi_signed: bool,
    /// Parameter length of the segment from the last sample back to the
    /// first on a closed curve.
    pub closing: f64,
}

impl SingularCurve {
    pub fn count(&self, class: PointClass) -> usize {
        self.samples.iter().filter(|s| s.class == class).count()
    }

    /// Parameter length of the curve (the closing segment included).
    pub fn length(&self) -> f64 {
        let last = self.samples.last().map(|s| s.t).unwrap_or(0.0);
        last - self.samples[0].t + self.closing_gap()
    }

    fn closing_gap(&self) -> f64 {
        if self.closed {
            self.closing
        } else {
            0.0
        }
    }

    /// Index of the sample whose series covers parameter `t`.
    fn segment(&self, t: f64) -> usize {
        match self
            .samples
            .binary_search_by(|s| s.t.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }
}

/// Tracer and invariant evaluator bound to one metric.
#[derive(Debug, Clone)]
pub struct Kossowski {
    pub metric: Arc<MetricField>,
    pub opts: TraceOptions,
}

impl Kossowski {
    pub fn new(metric: Arc<MetricField>, opts: TraceOptions) -> Result<Self> {
        if !metric.has_lambda() {
            return Err(Error::MissingLambda);
        }
        Ok(Kossowski { metric, opts })
    }

    fn scale(&self) -> f64 {
        self.metric.domain.scale()
    }

    /// Newton projection onto `lambda = 0` along the gradient.
    pub fn correct(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let d = self.metric.domain;
        let mut q = d.wrap(p);
        let tol = 1e-15 * self.scale();
        for _ in 0..50 {
            let j = self.metric.jets(q[0], q[1], 1)?.lambda()?;
            let g = [j.derivative(1, 0), j.derivative(0, 1)];
            let g2 = dot(g, g);
            if g2 == 0.0 {
                return Err(Error::DegenerateStart(0.0));
            }
            let k = j.value() / g2;
            let step = [k * g[0], k * g[1]];
            q = d.wrap([q[0] - step[0], q[1] - step[1]]);
            if step[0].hypot(step[1]) <= tol {
                return Ok(q);
            }
        }
        let l = self.metric.jets(q[0], q[1], 0)?.lambda()?.value();
        if l.abs() <= 1e-10 {
            Ok(q)
        } else {
            Err(Error::NoConvergence(format!(
                "corrector near ({}, {}) left |lambda| = {l:e}",
                q[0], q[1]
            )))
        }
    }

    /// Series expansion of the singular curve through `p` (assumed on the
    /// curve). `dir = -1` runs against `J grad(lambda)`. The null direction
    /// is oriented to agree with `eta_ref` when given, else by the
    /// canonical sign rule.
    pub fn local_curve(&self, p: [f64; 2], dir: f64, eta_ref: Option<[f64; 2]>) -> Result<LocalCurve> {
        let n = self.opts.series_order();
        let jets = self.metric.jets(p[0], p[1], n + 1)?;
        let lambda = jets.lambda()?;
        let lu = lambda.d_du();
        let lv = lambda.d_dv();
        let grad = [lu.value(), lv.value()];
        let gn = grad[0].hypot(grad[1]);
        if gn < 1e-8 {
            return Err(Error::DegenerateStart(gn));
        }
        let e = jets.e.truncate(n);
        let f = jets.f.truncate(n);
        let g = jets.g.truncate(n);
        if e.value() + g.value() <= 1e-12 * (1.0 + gn) {
            return Err(Error::RankZeroEncountered { u: p[0], v: p[1] });
        }

        let origin = [0.0, 0.0];
        let mut x = Jet2::constant(n, origin, p[0]);
        let mut y = Jet2::constant(n, origin, p[1]);
        for i in 1..=n {
            let gx = Jet2::compose(&lu, &x, &y)?;
            let gy = Jet2::compose(&lv, &x, &y)?;
            let norm = (gx * gx + gy * gy).sqrt()?;
            let tx = (-gy).div(&norm)?.scale(dir);
            let ty = gx.div(&norm)?.scale(dir);
            x.set_coeff(i, 0, tx.coeff(i - 1, 0) / i as f64);
            y.set_coeff(i, 0, ty.coeff(i - 1, 0) / i as f64);
        }

        let ec = Jet2::compose(&e, &x, &y)?;
        let fc = Jet2::compose(&f, &x, &y)?;
        let gc = Jet2::compose(&g, &x, &y)?;
        let (a, b) = if gc.value() >= ec.value() {
            (gc, -fc)
        } else {
            (-fc, ec)
        };
        let norm = (a * a + b * b).sqrt()?;
        let mut ea = a.div(&norm)?;
        let mut eb = b.div(&norm)?;
        let e0 = [ea.value(), eb.value()];
        let flip = match eta_ref {
            Some(r) => dot(e0, r) < 0.0,
            None => fix_sign(e0) != e0,
        };
        if flip {
            ea = -ea;
            eb = -eb;
        }
        let univariate = |j: &Jet2| (0..=n).map(|k| j.coeff(k, 0)).collect::<Vec<_>>();
        Ok(LocalCurve {
            gamma: [univariate(&x), univariate(&y)],
            eta: [univariate(&ea), univariate(&eb)],
            grad,
        })
    }

    fn step_size(&self, lc: &LocalCurve) -> f64 {
        let scale = self.scale();
        let n = lc.gamma[0].len() - 1;
        let mut h = self.opts.max_step * scale;
        let curv = 2.0 * lc.gamma[0][2].hypot(lc.gamma[1][2]);
        if curv > 0.0 {
            h = h.min(0.1 / curv);
        }
        let turn = lc.eta[0][1].hypot(lc.eta[1][1]);
        if turn > 0.0 {
            h = h.min(0.1 / turn);
        }
        let top = lc.gamma[0][n].hypot(lc.gamma[1][n]);
        if top > 0.0 {
            h = h.min((1e-9 * scale / top).powf(1.0 / n as f64));
        }
        h
    }

    /// Traces one branch from `start` in direction `dir`. Returns the
    /// samples after `start`, and whether the branch closed up on `start`.
    fn trace_branch(&self, start: &LocalCurve, dir: f64) -> Result<(Vec<(f64, LocalCurve)>, bool, f64)> {
        let domain = self.metric.domain;
        let mut out: Vec<(f64, LocalCurve)> = Vec::new();
        let mut cur = start.clone();
        let mut t = 0.0;
        let t0 = start.tangent();
        let p0 = start.point();
        loop {
            if out.len() >= self.opts.max_samples {
                return Err(Error::NoConvergence(format!(
                    "curve tracing exceeded {} samples",
                    self.opts.max_samples
                )));
            }
            let mut h = self.step_size(&cur);
            let tc = cur.tangent();
            if out.len() >= 3 {
                let d = domain.delta(cur.point(), p0);
                let s = dot(d, tc);
                let perp = (d[0] - s * tc[0]).hypot(d[1] - s * tc[1]);
                if s > 0.0 && s <= 1.5 * h && perp <= 0.1 * h.max(s) && dot(tc, t0) > 0.5 {
                    return Ok((out, true, s));
                }
            }
            let mut tries = 0;
            let next = loop {
                tries += 1;
                if tries > 40 {
                    return Err(Error::NoConvergence(format!(
                        "step size collapsed near ({}, {})",
                        cur.point()[0],
                        cur.point()[1]
                    )));
                }
                let pred = cur.position(h);
                if !domain.contains(pred) {
                    // bisect for the boundary crossing of the predictor
                    let (mut lo, mut hi) = (0.0, h);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if domain.contains(cur.position(mid)) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    if lo <= 1e-12 * self.scale() {
                        return Ok((out, false, 0.0));
                    }
                    let q = cur.position(lo);
                    let q = match self.correct(q) {
                        Ok(c) if domain.contains(c) => c,
                        _ => q,
                    };
                    let lc = self.local_curve(q, dir, Some(cur.null_dir()))?;
                    out.push((t + lo, lc));
                    return Ok((out, false, 0.0));
                }
                let q = match self.correct(pred) {
                    Ok(q) => q,
                    Err(Error::NoConvergence(_)) => {
                        h *= 0.5;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let moved = domain.delta(pred, q);
                if moved[0].hypot(moved[1]) > 0.05 * h {
                    h *= 0.5;
                    continue;
                }
                let lc = self.local_curve(q, dir, Some(cur.null_dir()))?;
                if dot(lc.tangent(), tc) < 0.95 {
                    h *= 0.5;
                    continue;
                }
                break lc;
            };
            t += h;
            out.push((t, next.clone()));
            cur = next;
        }
    }

    /// Traces the singular curve through (a Newton basin of) `seed`.
    pub fn trace(&self, seed: [f64; 2]) -> Result<SingularCurve> {
        let j = self.metric.jets(seed[0], seed[1], 1)?.lambda()?;
        let gn = j.derivative(1, 0).hypot(j.derivative(0, 1));
        if gn < 1e-8 {
            return Err(Error::DegenerateStart(gn));
        }
        let p = self.correct(seed)?;
        let start = self.local_curve(p, 1.0, None)?;
        let (fwd, closed, gap) = self.trace_branch(&start, 1.0)?;
        let mut pts: Vec<(f64, LocalCurve)> = Vec::new();
        if !closed {
            let (bwd, _, _) = self.trace_branch(&start.reversed(), -1.0)?;
            for (t, lc) in bwd.into_iter().rev() {
                pts.push((-t, lc.reversed()));
            }
        }
        pts.push((0.0, start));
        pts.extend(fwd);
        let t_first = pts[0].0;
        let mut samples: Vec<CurveSample> = pts
            .into_iter()
            .map(|(t, lc)| self.bare_sample(t - t_first, lc))
            .collect();

        let mut a3 = Vec::new();
        self.insert_a3_points(&mut samples, closed, gap, &mut a3)?;
        self.fill_tau(&mut samples);
        let mut curve = SingularCurve {
            samples,
            closed,
            a3_points: a3,
            kappa_pi_signed: self.metric.oriented && self.metric.co_oriented,
            closing: gap,
        };
        self.fill_invariants(&mut curve);
        Ok(curve)
    }

    fn bare_sample(&self, t: f64, lc: LocalCurve) -> CurveSample {
        let phi = lc.phi();
        let class = classify(phi, lc.dphi());
        CurveSample {
            t,
            point: lc.point(),
            tangent: lc.tangent(),
            eta: lc.null_dir(),
            grad_norm: lc.grad[0].hypot(lc.grad[1]),
            phi,
            class,
            kappa_s: None,
            kappa_pi: None,
            unreliable: false,
            tau: 0.0,
            local: lc,
        }
    }

    fn insert_a3_points(
        &self,
        samples: &mut Vec<CurveSample>,
        closed: bool,
        gap: f64,
        a3: &mut Vec<A3Point>,
    ) -> Result<()> {
        let mut i = 0;
        let n = samples.len();
        let mut inserted = Vec::new();
        let segs = if closed { n } else { n.saturating_sub(1) };
        while i < segs {
            let a = &samples[i];
            let b = &samples[(i + 1) % n];
            let h = if i + 1 < n { b.t - a.t } else { gap };
            if a.class == PointClass::A3 {
                a3.push(A3Point {
                    t: a.t,
                    point: a.point,
                    phi: a.phi,
                    dphi: a.local.dphi(),
                });
            } else if a.phi * b.phi < 0.0 && b.class != PointClass::A3 {
                let lc = self.locate_a3(&a.local, h)?;
                let (s, lc) = lc;
                let sample = self.bare_sample(a.t + s, lc);
                if sample.class == PointClass::A3 {
                    a3.push(A3Point {
                        t: sample.t,
                        point: sample.point,
                        phi: sample.phi,
                        dphi: sample.local.dphi(),
                    });
                }
                inserted.push((i + 1, sample));
            }
            i += 1;
        }
        for (k, (pos, s)) in inserted.into_iter().enumerate() {
            samples.insert(pos + k, s);
        }
        Ok(())
    }

    /// Root of `det(gamma', eta)` within one step of `from`.
    fn locate_a3(&self, from: &LocalCurve, h: f64) -> Result<(f64, LocalCurve)> {
        let eval = |s: f64| -> Result<(f64, LocalCurve)> {
            let q = self.correct(from.position(s))?;
            let lc = self.local_curve(q, 1.0, Some(from.null_dir()))?;
            Ok((lc.phi(), lc))
        };
        let (mut lo, mut hi) = (0.0, h);
        let (mut flo, _) = eval(lo)?;
        let (fhi, mut best) = eval(hi)?;
        let mut best_s = hi;
        let mut best_f = fhi.abs();
        if flo * fhi > 0.0 {
            return Ok((best_s, best));
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let (fm, lc) = eval(mid)?;
            if fm.abs() < best_f {
                best_f = fm.abs();
                best_s = mid;
                best = lc;
            }
            if fm == 0.0 || hi - lo < 1e-15 * self.scale() {
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Ok((best_s, best))
    }

    /// Metric length of the velocity along the local series.
    fn speed(&self, lc: &LocalCurve, s: f64) -> Result<f64> {
        let p = self.metric.domain.wrap(lc.position(s));
        let v = lc.velocity(s);
        let j = self.metric.jets(p[0], p[1], 0)?;
        let q = j.e.value() * v[0] * v[0]
            + 2.0 * j.f.value() * v[0] * v[1]
            + j.g.value() * v[1] * v[1];
        Ok(q.max(0.0).sqrt())
    }

    fn fill_tau(&self, samples: &mut [CurveSample]) {
        let (x, w) = gauss_rule(4);
        let mut tau = 0.0;
        for i in 0..samples.len() {
            samples[i].tau = tau;
            if i + 1 < samples.len() {
                let h = samples[i + 1].t - samples[i].t;
                let lc = &samples[i].local;
                let seg: f64 = x
                    .iter()
                    .zip(w)
                    .map(|(x, w)| w * self.speed(lc, 0.5 * h * (x + 1.0)).unwrap_or(0.0))
                    .sum();
                tau += 0.5 * h * seg;
            }
        }
    }

    fn fill_invariants(&self, curve: &mut SingularCurve) {
        let signed = curve.kappa_pi_signed;
        let results = exec::par_map(&curve.samples, |s| {
            if s.class != PointClass::A2 || s.phi.abs() <= GUARD_FACTOR * TOL_CLS {
                return (None, None, true);
            }
            let ks = self.kappa_s_local(&s.local).ok();
            let kp = if self.opts.product_curvature {
                self.kappa_pi_local(&s.local, signed).ok()
            } else {
                None
            };
            let bad = ks.is_none() || (self.opts.product_curvature && kp.is_none());
            (ks, kp, bad)
        });
        for (s, (ks, kp, bad)) in curve.samples.iter_mut().zip(results) {
            s.kappa_s = ks;
            s.kappa_pi = kp;
            s.unreliable = bad;
        }
    }

    /// Expansion at parameter `t`, corrected back onto the curve.
    pub fn local_at(&self, curve: &SingularCurve, t: f64) -> Result<LocalCurve> {
        let i = curve.segment(t);
        let s = &curve.samples[i];
        let ds = t - s.t;
        if ds == 0.0 {
            return Ok(s.local.clone());
        }
        let q = self.correct(s.local.position(ds))?;
        self.local_curve(q, 1.0, Some(s.eta))
    }

    pub fn classify_point(&self, curve: &SingularCurve, t: f64) -> Result<PointClass> {
        let lc = self.local_at(curve, t)?;
        Ok(classify(lc.phi(), lc.dphi()))
    }

    /// Metric jets at the curve point in the curve-based chart.
    pub fn adapted_jets(&self, lc: &LocalCurve, order: usize) -> Result<MetricJets> {
        let p = lc.point();
        let base = self.metric.jets(p[0], p[1], order)?;
        let cj = lc.chart().jets(0.0, 0.0, order);
        transform_jets(&base, &cj)
    }

    pub fn kappa_s_local(&self, lc: &LocalCurve) -> Result<f64> {
        let margin = lc.phi().abs();
        if margin <= GUARD_FACTOR * TOL_CLS {
            return Err(Error::NotA2 { margin });
        }
        kappa_s_from_jets(&self.adapted_jets(lc, 2)?)
    }

    /// `kappa_s` times the metric speed at parameter offset `ds` along the
    /// series of `from`, whose null direction is `eta`.
    pub fn kappa_s_density(&self, from: &LocalCurve, eta: [f64; 2], ds: f64) -> Result<f64> {
        let q = self.correct(from.position(ds))?;
        let lc = self.local_curve(q, 1.0, Some(eta))?;
        Ok(self.kappa_s_local(&lc)? * self.speed(from, ds)?)
    }

    pub fn singular_curvature(&self, curve: &SingularCurve, t: f64) -> Result<f64> {
        self.kappa_s_local(&self.local_at(curve, t)?)
    }

    pub fn product_curvature(&self, curve: &SingularCurve, t: f64) -> Result<f64> {
        self.kappa_pi_local(&self.local_at(curve, t)?, curve.kappa_pi_signed)
    }

    /// `kappa_pi = |J| lim(K lambda) / (E^(1/4) |lambda_v|^(1/2))` in the
    /// curve-based chart, with the limit taken by Richardson extrapolation
    /// of the average of both sides of the curve.
    pub fn kappa_pi_local(&self, lc: &LocalCurve, signed: bool) -> Result<f64> {
        let margin = lc.phi().abs();
        if margin <= GUARD_FACTOR * TOL_CLS {
            return Err(Error::NotA2 { margin });
        }
        let jets = self.adapted_jets(lc, 1)?;
        let e = jets.e.value();
        let lv = jets.lambda()?.derivative(0, 1).abs();
        let jac = lc.phi().abs();
        let p = lc.point();
        let n = lc.null_dir();
        let m = &self.metric;
        let k_lambda = |h: f64| -> Result<f64> {
            let q = m.domain.wrap([p[0] + h * n[0], p[1] + h * n[1]]);
            let k = m.gaussian_curvature(q[0], q[1])?;
            let l = m.jets(q[0], q[1], 0)?.lambda()?.value();
            Ok(k * l)
        };
        let lim = richardson(
            |h| Ok(0.5 * (k_lambda(h)? + k_lambda(-h)?)),
            self.opts.richardson_h0 * self.scale(),
            self.opts.richardson_levels,
            2,
            self.opts.richardson_tol,
        )?;
        let value = jac * lim.value / (e.powf(0.25) * lv.sqrt());
        Ok(if signed { value } else { value.abs() })
    }

    /// Finds all singular curves by scanning `lambda` for sign changes on a
    /// grid and tracing from every crossing not already covered.
    pub fn find_curves(&self) -> Result<Vec<SingularCurve>> {
        let seeds = self.grid_seeds()?;
        let d = self.metric.domain;
        let n = self.opts.seed_grid.max(2);
        let cell = d.width().max(d.height()) / n as f64;
        let mut curves: Vec<SingularCurve> = Vec::new();
        for seed in seeds {
            let covered = curves.iter().any(|c| distance_to_curve(c, seed, &d) < cell);
            if covered {
                continue;
            }
            match self.trace(seed) {
                Ok(c) => curves.push(c),
                Err(Error::DegenerateStart(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(curves)
    }

    fn grid_seeds(&self) -> Result<Vec<[f64; 2]>> {
        let d = self.metric.domain;
        let n = self.opts.seed_grid.max(2);
        // Offsetting the grid keeps its lines off symmetry axes, where the
        // singular set often lies.
        let off = 0.1234567;
        let nu = if d.periodic_u { n } else { n + 1 };
        let nv = if d.periodic_v { n } else { n + 1 };
        let coord = |k: usize, r: [f64; 2], periodic: bool| {
            let frac = if periodic {
                (k as f64 + off) / n as f64
            } else {
                k as f64 / n as f64
            };
            r[0] + (r[1] - r[0]) * frac
        };
        let mut grid = vec![vec![0.0; nv]; nu];
        for (a, row) in grid.iter_mut().enumerate() {
            for (b, val) in row.iter_mut().enumerate() {
                let u = coord(a, d.u, d.periodic_u);
                let v = coord(b, d.v, d.periodic_v);
                *val = self.metric.jets(u, v, 0)?.lambda()?.value();
            }
        }
        let lam = |p: [f64; 2]| -> Result<f64> { Ok(self.metric.jets(p[0], p[1], 0)?.lambda()?.value()) };
        let mut seeds = Vec::new();
        let mut edge = |pa: [f64; 2], pb: [f64; 2], la: f64, lb: f64| -> Result<()> {
            if la == 0.0 {
                seeds.push(pa);
            } else if la * lb < 0.0 {
                let (mut a, mut b, mut fa) = (pa, pb, la);
                for _ in 0..40 {
                    let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                    let fm = lam(d.wrap(m))?;
                    if (fm < 0.0) == (fa < 0.0) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                seeds.push(d.wrap(a));
            }
            Ok(())
        };
        let last_u = if d.periodic_u { nu } else { nu - 1 };
        let last_v = if d.periodic_v { nv } else { nv - 1 };
        for a in 0..nu {
            for b in 0..nv {
                let pa = [coord(a, d.u, d.periodic_u), coord(b, d.v, d.periodic_v)];
                if a < last_u {
                    let pb = [coord(a + 1, d.u, d.periodic_u), pa[1]];
                    edge(pa, pb, grid[a][b], grid[(a + 1) % nu][b])?;
                }
                if b < last_v {
                    let pb = [pa[0], coord(b + 1, d.v, d.periodic_v)];
                    edge(pa, pb, grid[a][b], grid[a][(b + 1) % nv])?;
                }
            }
        }
        Ok(seeds)
    }
}

fn distance_to_curve(c: &SingularCurve, p: [f64; 2], d: &crate::metric::Domain) -> f64 {
    let mut best = f64::INFINITY;
    let n = c.samples.len();
    for i in 0..n {
        let a = c.samples[i].point;
        let b = if i + 1 < n {
            c.samples[i + 1].point
        } else if c.closed {
            c.samples[0].point
        } else {
            a
        };
        let ab = d.delta(a, b);
        let ap = d.delta(a, p);
        let len2 = dot(ab, ab);
        let s = if len2 > 0.0 { (dot(ap, ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let r = [ap[0] - s * ab[0], ap[1] - s * ab[1]];
        best = best.min(r[0].hypot(r[1]));
    }
    best
}

fn classify(phi: f64, dphi: f64) -> PointClass {
    if phi.abs() > TOL_CLS {
        PointClass::A2
    } else if dphi.abs() > TOL_CLS {
        PointClass::A3
    } else {
        PointClass::Other
    }
}

/// Singular curvature from jets in a strongly adapted chart (u-axis
/// singular, `∂_v` null along it). The sign of `lambda` is normalized so
/// that `lambda_v > 0`.
pub fn kappa_s_from_jets(j: &MetricJets) -> Result<f64> {
    let l = j.lambda()?;
    let lv = l.derivative(0, 1).abs();
    let e = j.e.value();
    let e_u = j.e.derivative(1, 0);
    let e_vv = j.e.derivative(0, 2);
    let f_v = j.f.derivative(0, 1);
    let f_uv = j.f.derivative(1, 1);
    Ok((-f_v * e_u + 2.0 * e * f_uv - e * e_vv) / (2.0 * e.powf(1.5) * lv))
}

/// Residuals of the normalized-chart conditions on the u-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedCheck {
    pub e_residual: f64,
    pub g_vv_residual: f64,
    pub f_max: f64,
    pub normalized: bool,
}

/// Checks `E(u,0) = 1`, `G_vv(u,0) = 2` and `F = 0` near the u-axis.
pub fn verify_normalized_chart(m: &MetricField) -> Result<NormalizedCheck> {
    let d = m.domain;
    let collar = 0.05 * d.height().min(1.0);
    let mut e_res: f64 = 0.0;
    let mut g_res: f64 = 0.0;
    let mut f_max: f64 = 0.0;
    let k = 17;
    for i in 0..k {
        let u = d.u[0] + d.width() * i as f64 / (k - 1) as f64;
        let j = m.jets(u, 0.0, 2)?;
        e_res = e_res.max((j.e.value() - 1.0).abs());
        g_res = g_res.max((j.g.derivative(0, 2) - 2.0).abs());
        for s in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            f_max = f_max.max(m.jets(u, s * collar, 0)?.f.value().abs());
        }
    }
    let tol = 1e-8;
    Ok(NormalizedCheck {
        e_residual: e_res,
        g_vv_residual: g_res,
        f_max,
        normalized: e_res <= tol && g_res <= tol && f_max <= tol,
    })
}

/// `(kappa_s, kappa_pi)` at `(u, 0)` for a metric in a normalized chart,
/// read off the coefficients of `E = 1 + v^2 alpha`, `G = v^2 (1 + v beta)`.
pub fn normal_form_invariants(m: &MetricField, u: f64) -> Result<(f64, f64)> {
    let check = verify_normalized_chart(m)?;
    if !check.normalized {
        return Err(Error::NotNormalized(format!(
            "|E-1| = {:e}, |G_vv-2| = {:e}, max|F| = {:e}",
            check.e_residual, check.g_vv_residual, check.f_max
        )));
    }
    let j = m.jets(u, 0.0, 3)?;
    let alpha = j.e.derivative(0, 2) / 2.0;
    let alpha_v = j.e.derivative(0, 3) / 6.0;
    let beta = j.g.derivative(0, 3) / 6.0;
    Ok((-alpha, (alpha * beta - 3.0 * alpha_v) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn tracer(name: &str) -> (Kossowski, crate::config::AnalysisConfig) {
        let c = gallery::get(name).unwrap();
        let k = Kossowski::new(c.metric_arc().unwrap(), c.trace_options()).unwrap();
        (k, c)
    }

    #[test]
    fn cuspidal_edge_is_the_v_axis_with_flat_invariants() {
        let (k, c) = tracer("cuspidal-edge");
        let curve = k.trace(c.options.seeds[0]).unwrap();
        assert!(!curve.closed);
        assert!(curve.a3_points.is_empty());
        for s in &curve.samples {
            assert!(s.point[0].abs() < 1e-12, "{:?}", s.point);
            assert!((s.eta[0].abs() - 1.0).abs() < 1e-12);
            assert_eq!(s.class, PointClass::A2);
            // the surface is a cylinder over a cusp, so K vanishes
            assert!(s.kappa_s.unwrap().abs() < 1e-9);
            assert!(s.kappa_pi.unwrap().abs() < 1e-6);
        }
        let v: Vec<f64> = curve.samples.iter().map(|s| s.point[1]).collect();
        assert!((v[0] + 1.0).abs() < 1e-9 || (v[0] - 1.0).abs() < 1e-9);
        // metric length of the v-axis in [-1, 1]
        assert!((curve.samples.last().unwrap().tau - 2.0).abs() < 1e-9);
    }

    #[test]
    fn swallowtail_parabola_has_one_a3_point() {
        let (k, c) = tracer("swallowtail");
        let curve = k.trace(c.options.seeds[0]).unwrap();
        for s in &curve.samples {
            let [u, v] = s.point;
            assert!((v + 6.0 * u * u).abs() < 1e-9, "{u} {v}");
        }
        assert_eq!(curve.a3_points.len(), 1);
        let a = &curve.a3_points[0];
        assert!(a.point[0].abs() < 1e-9 && a.point[1].abs() < 1e-9, "{:?}", a.point);
        assert!(a.dphi.abs() > TOL_CLS);
        for s in &curve.samples {
            if s.point[0].abs() > 0.02 {
                assert_eq!(s.class, PointClass::A2);
                assert!(!s.unreliable);
            }
        }
    }

    #[test]
    fn cuspidal_cross_cap_curve_is_the_u_axis() {
        let (k, c) = tracer("cuspidal-cross-cap");
        let curve = k.trace(c.options.seeds[0]).unwrap();
        assert!(curve.a3_points.is_empty());
        for s in &curve.samples {
            assert!(s.point[1].abs() < 1e-12);
            assert!((s.eta[1].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_form_invariants_along_traced_curve() {
        // E = 1 + v^2 (v - 1), G = v^2 (1 + 2v): alpha = -1, alpha_v = 1,
        // beta = 2, so kappa_s = 1 and kappa_pi = (-2 - 3) / 2.
        let (k, c) = tracer("normal-form");
        let curve = k.trace(c.options.seeds[0]).unwrap();
        for s in &curve.samples {
            assert!(s.point[1].abs() < 1e-12);
            assert!((s.kappa_s.unwrap() - 1.0).abs() < 1e-9, "{:?}", s.kappa_s);
            assert!((s.kappa_pi.unwrap() + 2.5).abs() < 1e-4, "{:?}", s.kappa_pi);
        }
        let m = c.build_metric().unwrap();
        let (ks, kp) = normal_form_invariants(&m, 0.3).unwrap();
        assert!((ks - 1.0).abs() < 1e-12 && (kp + 2.5).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_chart_is_rejected() {
        let c = gallery::get("cuspidal-edge").unwrap();
        let m = c.build_metric().unwrap();
        assert!(matches!(normal_form_invariants(&m, 0.0), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn torus_front_has_four_closed_curves() {
        let (k, _) = tracer("parallel-torus-front");
        let curves = k.find_curves().unwrap();
        assert_eq!(curves.len(), 4);
        // 1 - d kappa(v) = 0 with kappa = a b / w^3 gives sin^2 v = s2
        let w = (0.48f64).cbrt();
        let s2 = (w * w - 0.36) / 0.64;
        for c in &curves {
            assert!(c.closed);
            assert!(c.a3_points.is_empty());
            assert!((c.length() - 2.0 * std::f64::consts::PI).abs() < 1e-6, "{}", c.length());
            for s in &c.samples {
                assert!((s.point[1].sin().powi(2) - s2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn metric_without_lambda_is_rejected() {
        let c = gallery::get("bump-torus").unwrap();
        assert!(matches!(
            Kossowski::new(c.metric_arc().unwrap(), TraceOptions::default()),
            Err(Error::MissingLambda)
        ));
    }
}
