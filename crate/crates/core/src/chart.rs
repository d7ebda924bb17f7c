//! Polynomial coordinate changes `(xi, eta) -> (u, v)`.
//!
//! Every chart built by the analysis (affine alignments, the quadratic and
//! cubic normal-form stages, charts along a traced curve) is polynomial, so
//! its derivatives are polynomials too and jets of any order are exact.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::jet::{self, Jet2};

/// Dense bivariate polynomial centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    degree: usize,
    /// Graded-lexicographic, same layout as [`Jet2`].
    coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 {
            degree: 0,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Poly2 {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// Builds a polynomial from `(i, j, c)` terms meaning `c xi^i eta^j`.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let degree = terms.iter().map(|(i, j, _)| i + j).max().unwrap_or(0);
        let mut p = Poly2 {
            degree,
            coeffs: vec![0.0; jet::ncoeffs(degree)],
        };
        for &(i, j, c) in terms {
            p.coeffs[jet::index(i, j)] += c;
        }
        p
    }

    /// `a + b xi + c eta`.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        Self::from_terms(&[(0, 0, a), (1, 0, b), (0, 1, c)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[jet::index(i, j)]
        }
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.degree)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(|(i, j)| (i, j, self.coeffs[jet::index(i, j)]))
            .filter(|t| t.2 != 0.0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .map(|(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn d_xi(&self) -> Poly2 {
        let terms: Vec<_> = self
            .terms()
            .filter(|t| t.0 > 0)
            .map(|(i, j, c)| (i - 1, j, c * i as f64))
            .collect();
        Self::from_terms(&terms)
    }

    pub fn d_eta(&self) -> Poly2 {
        let terms: Vec<_> = self
            .terms()
            .filter(|t| t.1 > 0)
            .map(|(i, j, c)| (i, j - 1, c * j as f64))
            .collect();
        Self::from_terms(&terms)
    }

    /// Exact jet at `(x, y)`.
    pub fn jet(&self, x: f64, y: f64, order: usize) -> Jet2 {
        let base = [x, y];
        let one = Jet2::constant(order, base, 1.0);
        let xs = Jet2::var_u(order, base);
        let ys = Jet2::var_v(order, base);
        let mut px = vec![one; self.degree + 1];
        let mut py = vec![one; self.degree + 1];
        for k in 1..=self.degree {
            px[k] = px[k - 1] * xs;
            py[k] = py[k - 1] * ys;
        }
        let mut out = Jet2::constant(order, base, 0.0);
        for (i, j, c) in self.terms() {
            out = out + (px[i] * py[j]).scale(c);
        }
        out
    }

    /// `self(a, b)` for polynomial arguments.
    pub fn substitute(&self, a: &Poly2, b: &Poly2) -> Poly2 {
        let mut pa = vec![Poly2::constant(1.0)];
        let mut pb = vec![Poly2::constant(1.0)];
        for k in 1..=self.degree {
            pa.push(&pa[k - 1] * a);
            pb.push(&pb[k - 1] * b);
        }
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            out = &out + &(&pa[i] * &pb[j]).scaled(c);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Poly2 {
        Poly2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let terms: Vec<_> = self.terms().chain(rhs.terms()).collect();
        Poly2::from_terms(&terms)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut terms = Vec::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                terms.push((i + k, j + l, a * b));
            }
        }
        Poly2::from_terms(&terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    Affine,
    Polynomial,
    CurveBased,
}

/// A coordinate change `(xi, eta) -> (u, v)` with polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub u: Poly2,
    pub v: Poly2,
    pub kind: ChartKind,
    du_dxi: Poly2,
    du_deta: Poly2,
    dv_dxi: Poly2,
    dv_deta: Poly2,
}

/// Jets of a chart's components and of their first partials.
#[derive(Debug, Clone, Copy)]
pub struct ChartJets {
    pub u: Jet2,
    pub v: Jet2,
    pub u_xi: Jet2,
    pub u_eta: Jet2,
    pub v_xi: Jet2,
    pub v_eta: Jet2,
}

impl ChartJets {
    pub fn jacobian(&self) -> Jet2 {
        self.u_xi * self.v_eta - self.u_eta * self.v_xi
    }
}

impl Chart {
    pub fn new(u: Poly2, v: Poly2, kind: ChartKind) -> Self {
        Chart {
            du_dxi: u.d_xi(),
            du_deta: u.d_eta(),
            dv_dxi: v.d_xi(),
            dv_deta: v.d_eta(),
            u,
            v,
            kind,
        }
    }

    pub fn identity() -> Self {
        Self::affine([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    }

    /// `(u, v) = origin + m * (xi, eta)`.
    pub fn affine(origin: [f64; 2], m: [[f64; 2]; 2]) -> Self {
        Self::new(
            Poly2::linear(origin[0], m[0][0], m[0][1]),
            Poly2::linear(origin[1], m[1][0], m[1][1]),
            ChartKind::Affine,
        )
    }

    pub fn apply(&self, xi: f64, eta: f64) -> [f64; 2] {
        [self.u.eval(xi, eta), self.v.eval(xi, eta)]
    }

    pub fn jacobian_at(&self, xi: f64, eta: f64) -> f64 {
        self.du_dxi.eval(xi, eta) * self.dv_deta.eval(xi, eta)
            - self.du_deta.eval(xi, eta) * self.dv_dxi.eval(xi, eta)
    }

    pub fn jets(&self, xi: f64, eta: f64, order: usize) -> ChartJets {
        ChartJets {
            u: self.u.jet(xi, eta, order),
            v: self.v.jet(xi, eta, order),
            u_xi: self.du_dxi.jet(xi, eta, order),
            u_eta: self.du_deta.jet(xi, eta, order),
            v_xi: self.dv_dxi.jet(xi, eta, order),
            v_eta: self.dv_deta.jet(xi, eta, order),
        }
    }

    /// The chart `self ∘ inner`: first apply `inner`, then `self`.
    pub fn after(&self, inner: &Chart) -> Chart {
        let kind = if self.kind == ChartKind::Affine && inner.kind == ChartKind::Affine {
            ChartKind::Affine
        } else {
            ChartKind::Polynomial
        };
        Chart::new(
            self.u.substitute(&inner.u, &inner.v),
            self.v.substitute(&inner.u, &inner.v),
            kind,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_evaluation_and_derivatives() {
        // p = 1 + 2 x y + 3 y^3
        let p = Poly2::from_terms(&[(0, 0, 1.0), (1, 1, 2.0), (0, 3, 3.0)]);
        assert_eq!(p.eval(2.0, -1.0), 1.0 - 4.0 - 3.0);
        assert_eq!(p.d_xi().eval(2.0, -1.0), -2.0);
        assert_eq!(p.d_eta().eval(2.0, -1.0), 4.0 + 9.0);
        let j = p.jet(2.0, -1.0, 3);
        assert_relative_eq!(j.derivative(0, 3), 18.0);
        assert_relative_eq!(j.derivative(1, 1), 2.0);
    }

    #[test]
    fn composition_matches_pointwise_application() {
        let outer = Chart::new(
            Poly2::from_terms(&[(1, 0, 1.0), (0, 2, 0.5)]),
            Poly2::from_terms(&[(0, 1, 2.0), (1, 1, -1.0)]),
            ChartKind::Polynomial,
        );
        let inner = Chart::affine([0.1, -0.2], [[1.0, 0.3], [-0.4, 1.2]]);
        let both = outer.after(&inner);
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.7), (1.1, 0.4)] {
            let [a, b] = inner.apply(x, y);
            let want = outer.apply(a, b);
            let got = both.apply(x, y);
            assert_relative_eq!(got[0], want[0], epsilon = 1e-14);
            assert_relative_eq!(got[1], want[1], epsilon = 1e-14);
        }
        assert_relative_eq!(
            both.jacobian_at(0.3, 0.2),
            outer.jacobian_at(inner.apply(0.3, 0.2)[0], inner.apply(0.3, 0.2)[1])
                * inner.jacobian_at(0.3, 0.2),
            epsilon = 1e-13
        );
    }
}
