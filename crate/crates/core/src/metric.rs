//! Positive semi-definite metrics `E du^2 + 2F du dv + G dv^2` and the
//! pointwise quantities built from their jets.

use std::sync::Arc;

use serde::Serialize;

use crate::chart::{Chart, ChartJets};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet2, MAX_ORDER};

/// Rectangular parameter domain with optional periodic identifications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Domain {
    pub fn rect(u: [f64; 2], v: [f64; 2]) -> Self {
        Domain {
            u,
            v,
            periodic_u: false,
            periodic_v: false,
        }
    }

    pub fn periodic(u: [f64; 2], v: [f64; 2]) -> Self {
        Domain {
            u,
            v,
            periodic_u: true,
            periodic_v: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.u[1] - self.u[0]
    }

    pub fn height(&self) -> f64 {
        self.v[1] - self.v[0]
    }

    /// Characteristic length used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn is_compact(&self) -> bool {
        self.periodic_u && self.periodic_v
    }

    /// Maps a point into the fundamental rectangle along periodic axes.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let w = |x: f64, r: [f64; 2], periodic: bool| {
            if periodic {
                let len = r[1] - r[0];
                r[0] + (x - r[0]).rem_euclid(len)
            } else {
                x
            }
        };
        [
            w(p[0], self.u, self.periodic_u),
            w(p[1], self.v, self.periodic_v),
        ]
    }

    /// Shortest displacement from `a` to `b` respecting identifications.
    pub fn delta(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let d = |x: f64, len: f64, periodic: bool| {
            if periodic {
                x - len * (x / len).round()
            } else {
                x
            }
        };
        [
            d(b[0] - a[0], self.width(), self.periodic_u),
            d(b[1] - a[1], self.height(), self.periodic_v),
        ]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let q = self.wrap(p);
        let slack = 1e-12 * self.scale();
        (self.periodic_u || (q[0] >= self.u[0] - slack && q[0] <= self.u[1] + slack))
            && (self.periodic_v || (q[1] >= self.v[0] - slack && q[1] <= self.v[1] + slack))
    }
}

/// A parametrized surface `f: U -> R^3` with optional unit normal.
#[derive(Debug, Clone)]
pub struct SurfaceMap {
    pub f: [Expr; 3],
    pub nu: Option<[Expr; 3]>,
}

#[derive(Debug, Clone)]
enum Source {
    Direct {
        e: Expr,
        f: Expr,
        g: Expr,
        lambda: Option<Expr>,
    },
    Induced(SurfaceMap),
    Pullback {
        base: Arc<MetricField>,
        chart: Chart,
    },
    Scaled {
        base: Arc<MetricField>,
        factor: f64,
    },
}

/// Jets of the metric coefficients (and of `lambda` when available) at one
/// point, all of the same order.
#[derive(Debug, Clone, Copy)]
pub struct MetricJets {
    pub e: Jet2,
    pub f: Jet2,
    pub g: Jet2,
    pub lambda: Option<Jet2>,
}

impl MetricJets {
    pub fn delta(&self) -> Jet2 {
        self.e * self.g - self.f * self.f
    }

    pub fn lambda(&self) -> Result<Jet2> {
        self.lambda.ok_or(Error::MissingLambda)
    }

    /// The metric coefficient `g_ij` as a jet, indices 0 = u, 1 = v.
    pub fn g(&self, i: usize, j: usize) -> Jet2 {
        match (i, j) {
            (0, 0) => self.e,
            (1, 1) => self.g,
            _ => self.f,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MetricField {
    source: Source,
    pub domain: Domain,
    /// Whether the parameter domain carries a declared orientation.
    pub oriented: bool,
    /// Whether `lambda` comes with a declared co-orientation.
    pub co_oriented: bool,
    /// Multiplies `lambda`; flipping it flips the co-orientation.
    pub co_orientation_sign: f64,
}

/// Result of the null-space computation at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSpace {
    pub rank: usize,
    pub null_dirs: Vec<[f64; 2]>,
    /// Smaller eigenvalue of the metric matrix.
    pub min_eigen: f64,
    pub trace: f64,
}

/// Tolerance factor deciding when an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub samples: Vec<AdmissibilitySample>,
    pub max_gamma: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilitySample {
    pub point: [f64; 2],
    pub null_dir: [f64; 2],
    /// `Γ(∂u,∂u,N)`, `Γ(∂u,N,N)`, `Γ(N,N,N)` in the aligned chart.
    pub gamma: [f64; 3],
    pub scale: f64,
}

impl MetricField {
    fn with_source(source: Source, domain: Domain) -> Self {
        MetricField {
            source,
            domain,
            oriented: true,
            co_oriented: true,
            co_orientation_sign: 1.0,
        }
    }

    pub fn direct(e: Expr, f: Expr, g: Expr, lambda: Option<Expr>, domain: Domain) -> Self {
        let co = lambda.is_some();
        let mut m = Self::with_source(Source::Direct { e, f, g, lambda }, domain);
        m.co_oriented = co;
        m
    }

    /// Parses the coefficient expressions; convenience for tests and gallery.
    pub fn from_strs(e: &str, f: &str, g: &str, lambda: Option<&str>, domain: Domain) -> Result<Self> {
        Ok(Self::direct(
            Expr::parse(e)?,
            Expr::parse(f)?,
            Expr::parse(g)?,
            lambda.map(Expr::parse).transpose()?,
            domain,
        ))
    }

    pub fn induced(map: SurfaceMap, domain: Domain) -> Self {
        let co = map.nu.is_some();
        let mut m = Self::with_source(Source::Induced(map), domain);
        m.co_oriented = co;
        m
    }

    /// The metric `c^2 dσ^2`.
    pub fn scaled(base: &Arc<MetricField>, c: f64) -> Self {
        let mut m = Self::with_source(
            Source::Scaled {
                base: base.clone(),
                factor: c,
            },
            base.domain,
        );
        m.copy_flags(base);
        m
    }

    /// Pulls the metric back through `chart`, whose source coordinates range
    /// over `domain`.
    pub fn pullback(base: &Arc<MetricField>, chart: Chart, domain: Domain) -> Self {
        let mut m = Self::with_source(
            Source::Pullback {
                base: base.clone(),
                chart,
            },
            domain,
        );
        m.copy_flags(base);
        m
    }

    fn copy_flags(&mut self, base: &MetricField) {
        self.oriented = base.oriented;
        self.co_oriented = base.co_oriented;
    }

    pub fn has_lambda(&self) -> bool {
        match &self.source {
            Source::Direct { lambda, .. } => lambda.is_some(),
            Source::Induced(map) => map.nu.is_some(),
            Source::Pullback { base, .. } | Source::Scaled { base, .. } => base.has_lambda(),
        }
    }

    /// Same metric with `lambda` negated.
    pub fn flipped(&self) -> Self {
        let mut m = self.clone();
        m.co_orientation_sign = -m.co_orientation_sign;
        m
    }

    pub fn jets(&self, u: f64, v: f64, order: usize) -> Result<MetricJets> {
        Jet2::check_order(order)?;
        let mut j = self.raw_jets(u, v, order)?;
        if self.co_orientation_sign < 0.0 {
            j.lambda = j.lambda.map(|l| -l);
        }
        Ok(j)
    }

    fn raw_jets(&self, u: f64, v: f64, order: usize) -> Result<MetricJets> {
        match &self.source {
            Source::Direct { e, f, g, lambda } => Ok(MetricJets {
                e: e.eval_jet(u, v, order)?,
                f: f.eval_jet(u, v, order)?,
                g: g.eval_jet(u, v, order)?,
                lambda: lambda
                    .as_ref()
                    .map(|l| l.eval_jet(u, v, order))
                    .transpose()?,
            }),
            Source::Induced(map) => induced_jets(map, u, v, order),
            Source::Scaled { base, factor } => {
                let j = base.jets(u, v, order)?;
                let c2 = factor * factor;
                Ok(MetricJets {
                    e: j.e.scale(c2),
                    f: j.f.scale(c2),
                    g: j.g.scale(c2),
                    lambda: j.lambda.map(|l| l.scale(c2)),
                })
            }
            Source::Pullback { base, chart } => pullback_jets(base, chart, u, v, order),
        }
    }

    pub fn delta(&self, u: f64, v: f64) -> Result<f64> {
        let j = self.jets(u, v, 0)?;
        Ok(j.delta().value())
    }

    pub fn gaussian_curvature(&self, u: f64, v: f64) -> Result<f64> {
        let j = self.jets(u, v, 2)?;
        let delta = j.delta().value();
        let scale = j.e.value() + j.g.value();
        if delta <= RANK_TOL * scale * scale {
            return Err(Error::DegeneratePoint { u, v, delta });
        }
        Ok(brioschi_numerator(&j) / (delta * delta))
    }

    /// `Γ(∂_i, ∂_j, ∂_k)` for coordinate fields, indices 0 = u, 1 = v.
    pub fn kossowski_gamma(&self, u: f64, v: f64, i: usize, j: usize, k: usize) -> Result<f64> {
        let jets = self.jets(u, v, 1)?;
        Ok(gamma_from_jets(&jets, i, j, k))
    }

    pub fn null_space(&self, u: f64, v: f64) -> Result<NullSpace> {
        let j = self.jets(u, v, 0)?;
        Ok(null_space_of(j.e.value(), j.f.value(), j.g.value()))
    }

    /// Samples the metric on an `n x n` grid and checks the structural
    /// invariants: semi-definiteness, `lambda^2 = EG - F^2`, and for surface
    /// maps the unit normal conditions.
    pub fn validate(&self, n: usize) -> Result<()> {
        let eps = 1e-10;
        let d = self.domain;
        for a in 0..n {
            for b in 0..n {
                let u = d.u[0] + d.width() * (a as f64 + 0.5) / n as f64;
                let v = d.v[0] + d.height() * (b as f64 + 0.5) / n as f64;
                let j = self.jets(u, v, 0)?;
                let (e, f, g) = (j.e.value(), j.f.value(), j.g.value());
                let delta = e * g - f * f;
                if e < -eps || g < -eps || delta < -eps * (1.0 + (e * g).abs()) {
                    return Err(Error::NotSemiDefinite {
                        u,
                        v,
                        detail: format!("E = {e:e}, G = {g:e}, EG-F^2 = {delta:e}"),
                    });
                }
                if let Some(l) = j.lambda {
                    let residual = (delta - l.value() * l.value()).abs();
                    if residual > 1e-9 * (1.0 + (e * g).abs()) {
                        return Err(Error::LambdaMismatch { u, v, residual });
                    }
                }
                if let Source::Induced(map) = &self.source {
                    check_normal(map, u, v)?;
                }
            }
        }
        Ok(())
    }

    /// Evaluates the Kossowski pseudo-connection on the null direction at
    /// each sample, in an affine chart where the null direction is `∂_v`.
    pub fn admissibility_check(&self, samples: &[[f64; 2]]) -> Result<AdmissibilityReport> {
        let mut out = Vec::with_capacity(samples.len());
        let mut max_gamma: f64 = 0.0;
        let mut admissible = true;
        for &p in samples {
            let ns = self.null_space(p[0], p[1])?;
            if ns.rank != 1 {
                return Err(Error::RankMismatch {
                    u: p[0],
                    v: p[1],
                    expected: 1,
                    found: ns.rank,
                });
            }
            let n = ns.null_dirs[0];
            let j = self.aligned_jets(p, n, 1)?;
            let gamma = [
                gamma_from_jets(&j, 0, 0, 1),
                gamma_from_jets(&j, 0, 1, 1),
                gamma_from_jets(&j, 1, 1, 1),
            ];
            let scale = ns.trace;
            let worst = gamma.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            max_gamma = max_gamma.max(worst);
            if worst > 1e-8 * scale.max(f64::MIN_POSITIVE) {
                admissible = false;
            }
            out.push(AdmissibilitySample {
                point: p,
                null_dir: n,
                gamma,
                scale,
            });
        }
        Ok(AdmissibilityReport {
            samples: out,
            max_gamma,
            admissible,
        })
    }

    /// Jets at `p` in the affine chart `p + xi a + eta n` with `a ⟂ n`,
    /// `det(a, n) = 1`.
    pub fn aligned_jets(&self, p: [f64; 2], n: [f64; 2], order: usize) -> Result<MetricJets> {
        let a = [n[1], -n[0]];
        let chart = Chart::affine(p, [[a[0], n[0]], [a[1], n[1]]]);
        let cj = chart.jets(0.0, 0.0, order);
        let base = self.jets(p[0], p[1], order)?;
        transform_jets(&base, &cj)
    }
}

fn induced_jets(map: &SurfaceMap, u: f64, v: f64, order: usize) -> Result<MetricJets> {
    if order + 1 > MAX_ORDER {
        return Err(Error::OrderTooLarge(order + 1));
    }
    let mut fu = Vec::with_capacity(3);
    let mut fv = Vec::with_capacity(3);
    for c in &map.f {
        let j = c.eval_jet(u, v, order + 1)?;
        fu.push(j.d_du());
        fv.push(j.d_dv());
    }
    let dot = |a: &[Jet2], b: &[Jet2]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let lambda = match &map.nu {
        Some(nu) => {
            let n = nu
                .iter()
                .map(|c| c.eval_jet(u, v, order))
                .collect::<Result<Vec<_>>>()?;
            let cross = [
                fu[1] * fv[2] - fu[2] * fv[1],
                fu[2] * fv[0] - fu[0] * fv[2],
                fu[0] * fv[1] - fu[1] * fv[0],
            ];
            Some(dot(&cross, &n))
        }
        None => None,
    };
    Ok(MetricJets {
        e: dot(&fu, &fu),
        f: dot(&fu, &fv),
        g: dot(&fv, &fv),
        lambda,
    })
}

fn check_normal(map: &SurfaceMap, u: f64, v: f64) -> Result<()> {
    let Some(nu) = &map.nu else { return Ok(()) };
    let mut fu = [0.0; 3];
    let mut fv = [0.0; 3];
    let mut n = [0.0; 3];
    for k in 0..3 {
        let j = map.f[k].eval_jet(u, v, 1)?;
        fu[k] = j.derivative(1, 0);
        fv[k] = j.derivative(0, 1);
        n[k] = nu[k].eval(u, v)?;
    }
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let residual = (dot(n, n) - 1.0)
        .abs()
        .max(dot(n, fu).abs())
        .max(dot(n, fv).abs());
    if residual > 1e-10 {
        return Err(Error::BadNormal { u, v, residual });
    }
    Ok(())
}

/// Applies the first fundamental form transformation law. The chart jets'
/// constant terms may differ from the base point of `base` by a periodic
/// shift; only the base point matters.
pub fn transform_jets(base: &MetricJets, cj: &ChartJets) -> Result<MetricJets> {
    let (e, f, g) = (base.e, base.f, base.g);
    let b = base.e.base();
    let shift = |x: Jet2, c: f64| x - x.value() + c;
    let x = shift(cj.u, b[0]);
    let y = shift(cj.v, b[1]);
    let comp = |outer: &Jet2| Jet2::compose(outer, &x, &y);
    let (e, f, g) = (comp(&e)?, comp(&f)?, comp(&g)?);
    let (ux, uy, vx, vy) = (cj.u_xi, cj.u_eta, cj.v_xi, cj.v_eta);
    let lambda = match base.lambda {
        Some(l) => Some(comp(&l)? * cj.jacobian()),
        None => None,
    };
    Ok(MetricJets {
        e: e * ux * ux + f * ux * vx * 2.0 + g * vx * vx,
        f: e * ux * uy + f * (ux * vy + uy * vx) + g * vx * vy,
        g: e * uy * uy + f * uy * vy * 2.0 + g * vy * vy,
        lambda,
    })
}

fn pullback_jets(base: &MetricField, chart: &Chart, xi: f64, eta: f64, order: usize) -> Result<MetricJets> {
    let cj = chart.jets(xi, eta, order);
    let image = [cj.u.value(), cj.v.value()];
    if !base.domain.contains(image) {
        return Err(Error::ChartRange {
            xi,
            eta,
            u: image[0],
            v: image[1],
        });
    }
    let q = base.domain.wrap(image);
    let bj = base.jets(q[0], q[1], order)?;
    transform_jets(&bj, &cj)
}

/// Numerator of the Brioschi formula; `K = numerator / (EG - F^2)^2`.
pub fn brioschi_numerator(j: &MetricJets) -> f64 {
    let e = j.e.value();
    let f = j.f.value();
    let g = j.g.value();
    let (e_u, e_v) = (j.e.derivative(1, 0), j.e.derivative(0, 1));
    let (f_u, f_v) = (j.f.derivative(1, 0), j.f.derivative(0, 1));
    let (g_u, g_v) = (j.g.derivative(1, 0), j.g.derivative(0, 1));
    let e_vv = j.e.derivative(0, 2);
    let f_uv = j.f.derivative(1, 1);
    let g_uu = j.g.derivative(2, 0);
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = det3([
        [-e_vv / 2.0 + f_uv - g_uu / 2.0, e_u / 2.0, f_u - e_v / 2.0],
        [f_v - g_u / 2.0, e, f],
        [g_v / 2.0, f, g],
    ]);
    let b = det3([
        [0.0, e_v / 2.0, g_u / 2.0],
        [e_v / 2.0, e, f],
        [g_u / 2.0, f, g],
    ]);
    a - b
}

/// `Γ(∂_i,∂_j,∂_k) = (∂_i g_jk + ∂_j g_ik - ∂_k g_ij) / 2`.
pub fn gamma_from_jets(j: &MetricJets, i: usize, jj: usize, k: usize) -> f64 {
    let d = |jet: Jet2, axis: usize| {
        if axis == 0 {
            jet.derivative(1, 0)
        } else {
            jet.derivative(0, 1)
        }
    };
    0.5 * (d(j.g(jj, k), i) + d(j.g(i, k), jj) - d(j.g(i, jj), k))
}

/// Eigen-decomposition of `[[e, f], [f, g]]`.
pub fn null_space_of(e: f64, f: f64, g: f64) -> NullSpace {
    let trace = e + g;
    let half_gap = (((e - g) / 2.0).powi(2) + f * f).sqrt();
    let mean = trace / 2.0;
    let hi = mean + half_gap;
    // det / hi avoids cancellation in the small eigenvalue.
    let lo = if hi > 0.0 { (e * g - f * f) / hi } else { mean - half_gap };
    let tol = RANK_TOL * trace.abs();
    let rank = [hi, lo].iter().filter(|&&x| x > tol).count();
    let null_dirs = match rank {
        2 => vec![],
        0 => vec![[1.0, 0.0], [0.0, 1.0]],
        _ => {
            // kernel of [[e - lo, f], [f, g - lo]]: use the row with more weight
            let (a, b) = if (e - lo).abs() + f.abs() >= (g - lo).abs() + f.abs() {
                (-f, e - lo)
            } else {
                (g - lo, -f)
            };
            let n = (a * a + b * b).sqrt();
            vec![fix_sign([a / n, b / n])]
        }
    };
    NullSpace {
        rank,
        null_dirs,
        min_eigen: lo,
        trace,
    }
}

/// Normalizes the sign of a direction: second component non-negative, and
/// first component positive when the second vanishes.
pub fn fix_sign(n: [f64; 2]) -> [f64; 2] {
    if n[1] < 0.0 || (n[1] == 0.0 && n[0] < 0.0) {
        [-n[0], -n[1]]
    } else {
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn metric(e: &str, f: &str, g: &str) -> MetricField {
        MetricField::from_strs(e, f, g, None, Domain::rect([-2.0, 2.0], [-2.0, 2.0])).unwrap()
    }

    fn cross_cap() -> MetricField {
        metric("1 + v^2", "u*v", "u^2 + 4*v^2")
    }

    #[test]
    fn sphere_and_flat_curvature() {
        let s = metric("1", "0", "sin(u)^2");
        assert_relative_eq!(s.gaussian_curvature(PI / 3.0, 0.0).unwrap(), 1.0, epsilon = 1e-13);
        let flat = metric("1", "0", "1");
        assert_eq!(flat.gaussian_curvature(0.3, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_point_is_rejected() {
        assert!(matches!(
            cross_cap().gaussian_curvature(0.0, 0.0),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn gamma_examples() {
        let m = cross_cap();
        assert_eq!(m.kossowski_gamma(0.0, 0.0, 0, 0, 1).unwrap(), 0.0);
        let m = metric("1 + v^2", "0", "1");
        assert_relative_eq!(m.kossowski_gamma(0.0, 1.0, 0, 0, 1).unwrap(), -1.0);
    }

    #[test]
    fn null_space_examples() {
        let ns = cross_cap().null_space(0.0, 0.0).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.null_dirs, vec![[0.0, 1.0]]);
        let ns = metric("1", "0", "1").null_space(0.5, 0.5).unwrap();
        assert_eq!(ns.rank, 2);
        assert!(ns.null_dirs.is_empty());
        let ns = metric("u^2+v^2", "u^2+v^2", "u^2+v^2").null_space(0.0, 0.0).unwrap();
        assert_eq!(ns.rank, 0);
        assert_eq!(ns.null_dirs.len(), 2);
    }

    #[test]
    fn null_direction_of_rank_one_matrix() {
        // [[1, 2], [2, 4]] has kernel (2, -1)/sqrt(5), sign-fixed to (-2, 1)/sqrt(5)
        let ns = null_space_of(1.0, 2.0, 4.0);
        assert_eq!(ns.rank, 1);
        let n = ns.null_dirs[0];
        assert_relative_eq!(n[0], -2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(n[1], 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(fix_sign([-1.0, 0.0]), [1.0, 0.0]);
    }

    #[test]
    fn swap_chart_relabels() {
        let base = Arc::new(metric("1", "0", "sin(u)^2"));
        let swap = Chart::new(
            crate::chart::Poly2::from_terms(&[(0, 1, 1.0)]),
            crate::chart::Poly2::from_terms(&[(1, 0, 1.0)]),
            crate::chart::ChartKind::Affine,
        );
        let m = MetricField::pullback(&base, swap, Domain::rect([-2.0, 2.0], [-2.0, 2.0]));
        let j = m.jets(0.3, 1.1, 0).unwrap();
        assert_relative_eq!(j.e.value(), 1.1f64.sin().powi(2), epsilon = 1e-15);
        assert_relative_eq!(j.g.value(), 1.0);
        assert_relative_eq!(
            m.gaussian_curvature(0.3, 1.1).unwrap(),
            base.gaussian_curvature(1.1, 0.3).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn chart_out_of_range() {
        let base = Arc::new(metric("1", "0", "1"));
        let c = Chart::affine([1.9, 0.0], [[1.0, 0.0], [0.0, 1.0]]);
        let m = MetricField::pullback(&base, c, Domain::rect([-1.0, 1.0], [-1.0, 1.0]));
        assert!(matches!(m.jets(0.5, 0.0, 1), Err(Error::ChartRange { .. })));
    }

    #[test]
    fn admissibility_examples() {
        let m = cross_cap();
        let r = m.admissibility_check(&[[0.0, 0.0]]).unwrap();
        assert!(r.admissible);
        let bad = metric("1", "u", "u^2 + v");
        let r = bad.admissibility_check(&[[0.0, 0.0]]).unwrap();
        assert!(!r.admissible);
        assert!(r.max_gamma > 0.1);
        let flat = metric("1", "0", "1");
        assert!(matches!(
            flat.admissibility_check(&[[0.0, 0.0]]),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn periodic_wrap_and_delta() {
        let d = Domain::periodic([0.0, 1.0], [-1.0, 1.0]);
        assert_relative_eq!(d.wrap([1.25, 1.5])[0], 0.25);
        assert_relative_eq!(d.wrap([1.25, 1.5])[1], -0.5);
        let dd = d.delta([0.95, 0.0], [0.05, 0.0]);
        assert_relative_eq!(dd[0], 0.1, epsilon = 1e-15);
    }
}
