//! Small numerical building blocks: Gauss-Legendre rules, Richardson
//! extrapolation and polynomial extrapolation.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached rules for the orders used by the quadrature code.
pub fn gauss_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (1..=64).map(gauss_legendre).collect());
    &rules[n.clamp(1, 64) - 1]
}

/// Outcome of a Richardson ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Difference of the last two diagonal extrapolants.
    pub spread: f64,
}

/// Richardson extrapolation of `f(h) -> f(0)` over `h_k = h0 / 2^k`,
/// `k = 0..levels`. `power` is the exponent step of the error expansion:
/// 1 for a generic one-sided limit, 2 for an even function of `h`.
pub fn richardson<F>(f: F, h0: f64, levels: usize, power: i32, rel_tol: f64) -> Result<Extrapolated>
where
    F: Fn(f64) -> Result<f64>,
{
    assert!(levels >= 2);
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / 2f64.powi(k as i32);
        let mut row = vec![f(h)?];
        for j in 1..=k {
            let r = 2f64.powi(power * j as i32);
            let prev = row[j - 1];
            row.push(prev + (prev - table[k - 1][j - 1]) / (r - 1.0));
        }
        table.push(row);
    }
    let a = table[levels - 1][levels - 1];
    let b = table[levels - 2][levels - 2];
    if !a.is_finite() || (a - b).abs() > rel_tol * (1.0 + a.abs()) {
        return Err(Error::ExtrapolationDiverged { a: b, b: a });
    }
    Ok(Extrapolated {
        value: a,
        spread: (a - b).abs(),
    })
}

/// Value at `x` of the polynomial interpolating `(xs, ys)` (Neville).
pub fn neville(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = ((x - xs[i + m]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            // integral of x^(deg-1) over [-1,1]; deg-1 is even
            assert_relative_eq!(got, 2.0 / deg as f64, epsilon = 1e-13);
        }
    }

    #[test]
    fn richardson_recovers_limits() {
        let r = richardson(|h| Ok(h.sin() / h), 0.5, 6, 2, 1e-6).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);
        let r = richardson(|h| Ok((h.exp() - 1.0) / h), 0.5, 6, 1, 1e-4).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-9);
        assert!(richardson(|h| Ok(1.0 / h), 0.5, 6, 1, 1e-4).is_err());
    }

    #[test]
    fn neville_extrapolates_polynomials() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x - 2.0 * x + 5.0).collect();
        assert_relative_eq!(neville(&xs, &ys, 0.0), 5.0, epsilon = 1e-12);
    }
}
