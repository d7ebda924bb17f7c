//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] holds the Taylor coefficients `c_ij` of a scalar function
//! around a base point, for all monomials `du^i dv^j` with `i + j <= order`.
//! Arithmetic on jets is truncated power-series arithmetic, so every
//! partial derivative up to `order` comes out exact (up to rounding).
//!
//! Coefficients are stored in graded-lexicographic order: degree 0 first,
//! then within degree `d` the monomials `u^d, u^(d-1) v, ..., v^d`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest jet order accepted anywhere in the crate.
pub const MAX_ORDER: usize = 6;
const CAP: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

/// Number of coefficients of a jet of the given order.
pub const fn ncoeffs(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Position of the coefficient of `u^i v^j`.
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const EXPONENTS: [(usize, usize); CAP] = {
    let mut table = [(0usize, 0usize); CAP];
    let mut d = 0;
    let mut k = 0;
    while d <= MAX_ORDER {
        let mut j = 0;
        while j <= d {
            table[k] = (d - j, j);
            k += 1;
            j += 1;
        }
        d += 1;
    }
    table
};

/// Exponents `(i, j)` of the coefficient stored at position `k`.
#[inline]
pub fn exponents(k: usize) -> (usize, usize) {
    EXPONENTS[k]
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Truncated Taylor expansion of a scalar in two variables.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: u8,
    base: [f64; 2],
    coeffs: [f64; CAP],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("order", &self.order)
            .field("base", &self.base)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl Jet2 {
    fn raw(order: usize, base: [f64; 2]) -> Self {
        debug_assert!(order <= MAX_ORDER);
        Jet2 {
            order: order as u8,
            base,
            coeffs: [0.0; CAP],
        }
    }

    pub fn check_order(order: usize) -> Result<()> {
        if order > MAX_ORDER {
            Err(Error::OrderTooLarge(order))
        } else {
            Ok(())
        }
    }

    /// Jet from explicit coefficients in graded-lexicographic layout.
    pub fn from_coeffs(order: usize, base: [f64; 2], coeffs: &[f64]) -> Result<Self> {
        Self::check_order(order)?;
        let n = ncoeffs(order);
        if coeffs.len() != n {
            return Err(Error::JetLength {
                order,
                expected: n,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) || base.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFiniteJet);
        }
        let mut jet = Self::raw(order, base);
        jet.coeffs[..n].copy_from_slice(coeffs);
        Ok(jet)
    }

    pub fn constant(order: usize, base: [f64; 2], value: f64) -> Self {
        let mut jet = Self::raw(order, base);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `u` expanded at `base`.
    pub fn var_u(order: usize, base: [f64; 2]) -> Self {
        let mut jet = Self::constant(order, base, base[0]);
        if order >= 1 {
            jet.coeffs[index(1, 0)] = 1.0;
        }
        jet
    }

    /// The coordinate function `v` expanded at `base`.
    pub fn var_v(order: usize, base: [f64; 2]) -> Self {
        let mut jet = Self::constant(order, base, base[1]);
        if order >= 1 {
            jet.coeffs[index(0, 1)] = 1.0;
        }
        jet
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    #[inline]
    pub fn base(&self) -> [f64; 2] {
        self.base
    }

    #[inline]
    pub fn len(&self) -> usize {
        ncoeffs(self.order())
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.len()]
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of `du^i dv^j`; zero beyond the jet's order.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order() {
            0.0
        } else {
            self.coeffs[index(i, j)]
        }
    }

    /// Overwrites the coefficient of `du^i dv^j`.
    pub fn set_coeff(&mut self, i: usize, j: usize, c: f64) {
        assert!(i + j <= self.order(), "coefficient beyond jet order");
        self.coeffs[index(i, j)] = c;
    }

    /// Partial derivative `d^(i+j) / du^i dv^j` at the base point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.order(), "derivative beyond jet order");
        self.coeffs[index(i, j)] * factorial(i) * factorial(j)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    /// Same coefficients, re-labelled to a different base point.
    pub fn with_base(mut self, base: [f64; 2]) -> Self {
        self.base = base;
        self
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        assert!(order <= self.order());
        let mut out = Self::raw(order, self.base);
        let n = ncoeffs(order);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Jet of `d/du`, one order lower.
    pub fn d_du(&self) -> Jet2 {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let order = self.order() - 1;
        let mut out = Self::raw(order, self.base);
        for k in 0..ncoeffs(order) {
            let (i, j) = EXPONENTS[k];
            out.coeffs[k] = (i + 1) as f64 * self.coeffs[index(i + 1, j)];
        }
        out
    }

    /// Jet of `d/dv`, one order lower.
    pub fn d_dv(&self) -> Jet2 {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let order = self.order() - 1;
        let mut out = Self::raw(order, self.base);
        for k in 0..ncoeffs(order) {
            let (i, j) = EXPONENTS[k];
            out.coeffs[k] = (j + 1) as f64 * self.coeffs[index(i, j + 1)];
        }
        out
    }

    /// Evaluates the truncated Taylor polynomial at `base + (du, dv)`.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let n = self.order();
        let mut pu = [1.0; MAX_ORDER + 1];
        let mut pv = [1.0; MAX_ORDER + 1];
        for k in 1..=n {
            pu[k] = pu[k - 1] * du;
            pv[k] = pv[k - 1] * dv;
        }
        (0..self.len())
            .map(|k| {
                let (i, j) = EXPONENTS[k];
                self.coeffs[k] * pu[i] * pv[j]
            })
            .sum()
    }

    fn assert_compatible(&self, other: &Jet2) {
        assert!(
            self.order == other.order && self.base == other.base,
            "jet operands differ in order or base point ({}@{:?} vs {}@{:?})",
            self.order,
            self.base,
            other.order,
            other.base
        );
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        let mut out = *self;
        for c in out.coeffs[..self.len()].iter_mut() {
            *c *= s;
        }
        out
    }

    /// Evaluates a univariate function given its scaled derivatives
    /// `taylor[k] = f^(k)(a0) / k!` at the constant term `a0`.
    fn compose_series(&self, taylor: &[f64]) -> Jet2 {
        let n = self.order();
        debug_assert!(taylor.len() > n);
        let mut h = *self;
        h.coeffs[0] = 0.0;
        let mut acc = Jet2::constant(n, self.base, taylor[n]);
        for k in (0..n).rev() {
            acc = acc * h;
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    /// `a^r` for real `r`, for a positive constant term.
    fn real_power(&self, r: f64) -> Jet2 {
        let a0 = self.value();
        let mut taylor = [0.0; MAX_ORDER + 1];
        let mut binom = 1.0;
        for (k, t) in taylor.iter_mut().enumerate().take(self.order() + 1) {
            *t = binom * a0.powf(r - k as f64);
            binom *= (r - k as f64) / (k as f64 + 1.0);
        }
        self.compose_series(&taylor)
    }

    pub fn recip(&self) -> Result<Jet2> {
        let a0 = self.value();
        if a0 == 0.0 || !a0.is_finite() {
            return Err(Error::DivisionByDegenerate(a0));
        }
        let mut taylor = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / a0;
        for t in taylor.iter_mut().take(self.order() + 1) {
            *t = p;
            p *= -1.0 / a0;
        }
        Ok(self.compose_series(&taylor))
    }

    pub fn div(&self, other: &Jet2) -> Result<Jet2> {
        self.assert_compatible(other);
        Ok(*self * other.recip()?)
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        let a0 = self.value();
        if a0.is_nan() || a0 <= 0.0 {
            return Err(Error::NegativeRadicand(a0));
        }
        let mut out = self.real_power(0.5);
        out.coeffs[0] = a0.sqrt();
        Ok(out)
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn powi(&self, n: i32) -> Result<Jet2> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut result = Jet2::constant(self.order(), self.base, 1.0);
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result * sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq * sq;
            }
        }
        Ok(result)
    }

    /// `a^(k/2)` computed as an integer power of `sqrt(a)`.
    pub fn pow_half(&self, k: i32) -> Result<Jet2> {
        if k % 2 == 0 {
            self.powi(k / 2)
        } else {
            self.sqrt()?.powi(k)
        }
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        let mut taylor = [0.0; MAX_ORDER + 1];
        for (k, t) in taylor.iter_mut().enumerate().take(self.order() + 1) {
            *t = e / factorial(k);
        }
        self.compose_series(&taylor)
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut taylor = [0.0; MAX_ORDER + 1];
        for (k, t) in taylor.iter_mut().enumerate().take(self.order() + 1) {
            *t = cycle[k % 4] / factorial(k);
        }
        self.compose_series(&taylor)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut taylor = [0.0; MAX_ORDER + 1];
        for (k, t) in taylor.iter_mut().enumerate().take(self.order() + 1) {
            *t = cycle[k % 4] / factorial(k);
        }
        self.compose_series(&taylor)
    }

    /// Jet of `outer(x, y)` where `outer` is expanded in `(x, y)` at the
    /// constant terms of `x` and `y`.
    ///
    /// The result lives at the inner jets' base point and has order
    /// `min(outer.order, inner.order)`.
    pub fn compose(outer: &Jet2, x: &Jet2, y: &Jet2) -> Result<Jet2> {
        x.assert_compatible(y);
        let inner = [x.value(), y.value()];
        let ob = outer.base;
        for k in 0..2 {
            if (inner[k] - ob[k]).abs() > 1e-12 * (1.0 + ob[k].abs()) {
                return Err(Error::BasePointMismatch { inner, outer: ob });
            }
        }
        let n = outer.order().min(x.order());
        let mut dx = x.truncate(n);
        let mut dy = y.truncate(n);
        dx.coeffs[0] = 0.0;
        dy.coeffs[0] = 0.0;

        let one = Jet2::constant(n, x.base, 1.0);
        let mut px = [one; MAX_ORDER + 1];
        let mut py = [one; MAX_ORDER + 1];
        for k in 1..=n {
            px[k] = px[k - 1] * dx;
            py[k] = py[k - 1] * dy;
        }
        let mut out = Jet2::raw(n, x.base);
        for k in 0..ncoeffs(n) {
            let (i, j) = EXPONENTS[k];
            let c = outer.coeffs[k];
            if c == 0.0 {
                continue;
            }
            let term = px[i] * py[j];
            for (o, t) in out.coeffs[..ncoeffs(n)].iter_mut().zip(term.coeffs()) {
                *o += c * t;
            }
        }
        Ok(out)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.assert_compatible(&rhs);
        let n = self.len();
        for (a, b) in self.coeffs[..n].iter_mut().zip(&rhs.coeffs[..n]) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.assert_compatible(&rhs);
        let n = self.len();
        for (a, b) in self.coeffs[..n].iter_mut().zip(&rhs.coeffs[..n]) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.assert_compatible(&rhs);
        let order = self.order();
        let n = self.len();
        let mut out = Jet2::raw(order, self.base);
        for p in 0..n {
            let a = self.coeffs[p];
            if a == 0.0 {
                continue;
            }
            let (i, j) = EXPONENTS[p];
            let room = order - (i + j);
            for q in 0..ncoeffs(room) {
                let (k, l) = EXPONENTS[q];
                out.coeffs[index(i + k, j + l)] += a * rhs.coeffs[q];
            }
        }
        out
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn jet(order: usize, coeffs: &[f64]) -> Jet2 {
        Jet2::from_coeffs(order, [0.0, 0.0], coeffs).unwrap()
    }

    #[test]
    fn layout_is_graded_lexicographic() {
        assert_eq!(index(0, 0), 0);
        assert_eq!(index(1, 0), 1);
        assert_eq!(index(0, 1), 2);
        assert_eq!(index(2, 0), 3);
        assert_eq!(index(1, 1), 4);
        assert_eq!(index(0, 2), 5);
        for k in 0..CAP {
            let (i, j) = exponents(k);
            assert_eq!(index(i, j), k);
        }
        assert_eq!(ncoeffs(4), 15);
        assert_eq!(ncoeffs(6), 28);
    }

    #[test]
    fn product_of_linear_factors() {
        let a = jet(2, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let b = jet(2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!((a * b).coeffs(), &[1.0, 1.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn sqrt_binomial_series() {
        let a = jet(2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let r = a.sqrt().unwrap();
        let expected = [1.0, 1.0, 0.0, -0.5, 0.0, 0.0];
        for (x, y) in r.coeffs().iter().zip(expected) {
            assert_relative_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn self_quotient_is_one() {
        let a = jet(3, &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let q = a.div(&a).unwrap();
        assert_relative_eq!(q.value(), 1.0, epsilon = 1e-15);
        for c in &q.coeffs()[1..] {
            assert!(c.abs() < 1e-15);
        }
    }

    #[test]
    fn division_and_sqrt_errors() {
        let z = jet(1, &[0.0, 1.0, 0.0]);
        assert_eq!(z.recip(), Err(Error::DivisionByDegenerate(0.0)));
        assert!(matches!(z.sqrt(), Err(Error::NegativeRadicand(_))));
        let neg = jet(1, &[-1.0, 0.0, 0.0]);
        assert!(matches!(neg.sqrt(), Err(Error::NegativeRadicand(_))));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            Jet2::from_coeffs(1, [0.0; 2], &[1.0, f64::NAN, 0.0]),
            Err(Error::NonFiniteJet)
        );
        assert!(matches!(
            Jet2::from_coeffs(1, [0.0; 2], &[1.0]),
            Err(Error::JetLength { .. })
        ));
        assert!(Jet2::from_coeffs(7, [0.0; 2], &[0.0; 36]).is_err());
    }

    #[test]
    fn compose_square_of_sum() {
        // outer = x^2 at x0 = 0
        let x = Jet2::var_u(2, [0.0, 0.0]);
        let outer = x * x;
        let inner_x = Jet2::var_u(2, [0.0, 0.0]) + Jet2::var_v(2, [0.0, 0.0]);
        let inner_y = Jet2::constant(2, [0.0, 0.0], 0.0);
        let r = Jet2::compose(&outer, &inner_x, &inner_y).unwrap();
        assert_eq!(r.coeffs(), &[0.0, 0.0, 0.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let base = [0.3, -0.2];
        let outer = (Jet2::var_u(3, base) * Jet2::var_v(3, base)).sin();
        let r = Jet2::compose(&outer, &Jet2::var_u(3, base), &Jet2::var_v(3, base)).unwrap();
        for (a, b) in r.coeffs().iter().zip(outer.coeffs()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn compose_truncates_sin_series() {
        let x = Jet2::var_u(4, [0.0, 0.0]);
        let outer = x.sin();
        let u = Jet2::var_u(4, [0.0, 0.0]);
        let r = Jet2::compose(&outer, &(u * u), &Jet2::constant(4, [0.0, 0.0], 0.0)).unwrap();
        let mut expected = [0.0; 15];
        expected[index(2, 0)] = 1.0;
        for (a, b) in r.coeffs().iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn compose_rejects_base_mismatch() {
        let outer = Jet2::var_u(2, [1.0, 0.0]);
        let x = Jet2::var_u(2, [0.0, 0.0]);
        assert!(matches!(
            Jet2::compose(&outer, &x, &x),
            Err(Error::BasePointMismatch { .. })
        ));
    }

    #[test]
    fn derivatives_and_factorials() {
        // f = u^3 v^2 at (1, 2): d^2/du dv = 3 u^2 * 2 v = 12
        let b = [1.0, 2.0];
        let u = Jet2::var_u(5, b);
        let v = Jet2::var_v(5, b);
        let f = u.powi(3).unwrap() * v.powi(2).unwrap();
        assert_relative_eq!(f.derivative(1, 1), 12.0, epsilon = 1e-12);
        assert_relative_eq!(f.derivative(3, 2), 12.0, epsilon = 1e-12);
        assert_relative_eq!(f.d_du().d_dv().value(), 12.0, epsilon = 1e-12);
    }

    #[test]
    fn half_integer_power() {
        let b = [0.7, 0.0];
        let u = Jet2::var_u(3, b);
        let p = u.pow_half(3).unwrap();
        // d/du u^1.5 = 1.5 u^0.5
        assert_relative_eq!(p.derivative(1, 0), 1.5 * 0.7f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(p.derivative(2, 0), 0.75 / 0.7f64.sqrt(), epsilon = 1e-13);
        let m = u.pow_half(-1).unwrap();
        assert_relative_eq!(m.value(), 1.0 / 0.7f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn trig_exp_derivatives() {
        let b = [0.4, 0.0];
        let u = Jet2::var_u(4, b);
        let s = u.sin();
        let c = u.cos();
        let e = u.exp();
        for k in 0..=4 {
            let ds = [0.4f64.sin(), 0.4f64.cos(), -0.4f64.sin(), -0.4f64.cos()][k % 4];
            let dc = [0.4f64.cos(), -0.4f64.sin(), -0.4f64.cos(), 0.4f64.sin()][k % 4];
            assert_relative_eq!(s.derivative(k, 0), ds, epsilon = 1e-13);
            assert_relative_eq!(c.derivative(k, 0), dc, epsilon = 1e-13);
            assert_relative_eq!(e.derivative(k, 0), 0.4f64.exp(), epsilon = 1e-13);
        }
    }
}
