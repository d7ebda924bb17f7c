//! Scalar expressions in the coordinates `u`, `v`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' signed-number)?
//! atom   := number | 'u' | 'v' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := sqrt | sin | cos | exp | bump
//! ```
//!
//! A leading minus binds looser than `^`, so `-u^2` is `-(u^2)`.
//! Exponents must be integers or half-integers.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    /// Smooth partition function: 1 on `|t| <= 1/4`, 0 on `|t| >= 3/4`.
    Bump,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Bump => "bump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    U,
    V,
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Power with exponent `half / 2`.
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.fail(&["+", "-", "*", "/", "^", "end of input"]));
        }
        Ok(e)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let dom = |reason: &str| Error::Domain {
            u,
            v,
            reason: reason.to_string(),
        };
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::U => u,
            Expr::V => v,
            Expr::Neg(a) => -a.eval(u, v)?,
            Expr::Func(f, a) => {
                let x = a.eval(u, v)?;
                match f {
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(dom("square root of a negative value"));
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Bump => bump(x),
                }
            }
            Expr::Bin(op, a, b) => {
                let x = a.eval(u, v)?;
                let y = b.eval(u, v)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(dom("division by zero"));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, half) => {
                let x = a.eval(u, v)?;
                if half % 2 == 0 {
                    if x == 0.0 && *half < 0 {
                        return Err(dom("negative power of zero"));
                    }
                    x.powi(half / 2)
                } else {
                    if x < 0.0 || (x == 0.0 && *half < 0) {
                        return Err(dom("half-integer power of a non-positive value"));
                    }
                    x.sqrt().powi(*half)
                }
            }
        })
    }

    /// Truncated Taylor expansion at `(u, v)`.
    pub fn eval_jet(&self, u: f64, v: f64, order: usize) -> Result<Jet2> {
        Jet2::check_order(order)?;
        self.jet(u, v, order).map_err(|e| match e {
            Error::DivisionByDegenerate(_) => Error::Domain {
                u,
                v,
                reason: "division by a vanishing value".into(),
            },
            Error::NegativeRadicand(c) => Error::Domain {
                u,
                v,
                reason: format!("square root of non-positive value {c:e}"),
            },
            other => other,
        })
    }

    fn jet(&self, u: f64, v: f64, order: usize) -> Result<Jet2> {
        let base = [u, v];
        Ok(match self {
            Expr::Const(c) => Jet2::constant(order, base, *c),
            Expr::U => Jet2::var_u(order, base),
            Expr::V => Jet2::var_v(order, base),
            Expr::Neg(a) => -a.jet(u, v, order)?,
            Expr::Func(Func::Bump, a) => bump_jet(a, u, v, order)?,
            Expr::Func(f, a) => {
                let x = a.jet(u, v, order)?;
                match f {
                    Func::Sqrt => x.sqrt()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Bump => unreachable!(),
                }
            }
            Expr::Bin(op, a, b) => {
                let x = a.jet(u, v, order)?;
                let y = b.jet(u, v, order)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x.div(&y)?,
                }
            }
            Expr::Pow(a, half) => a.jet(u, v, order)?.pow_half(*half)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if c.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn smooth_step(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// The smooth partition function behind the `bump` built-in.
pub fn bump(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.25 {
        1.0
    } else if a >= 0.75 {
        0.0
    } else {
        let p = smooth_step(0.75 - a);
        p / (p + smooth_step(a - 0.25))
    }
}

fn bump_jet(arg: &Expr, u: f64, v: f64, order: usize) -> Result<Jet2> {
    let base = [u, v];
    let t0 = arg.eval(u, v)?;
    let a = t0.abs();
    // Both plateaus are flat to infinite order, so the constant jet is exact
    // and the argument's own jet is never needed there.
    if a <= 0.25 {
        return Ok(Jet2::constant(order, base, 1.0));
    }
    if a >= 0.75 {
        return Ok(Jet2::constant(order, base, 0.0));
    }
    let t = arg.jet(u, v, order)?.scale(t0.signum());
    let s = |x: Jet2| -> Result<Jet2> { Ok((-x.recip()?).exp()) };
    let p = s(-t + 0.75)?;
    let q = s(t - 0.25)?;
    p.div(&(p + q))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{:?}", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::U => write!(f, "u"),
            Expr::V => write!(f, "v"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                wrap(f, a, prec)?;
                write!(f, " {sym} ")?;
                wrap(f, b, prec + 1)
            }
            Expr::Pow(a, half) => {
                wrap(f, a, 5)?;
                if half % 2 == 0 {
                    write!(f, "^{}", half / 2)
                } else {
                    write!(f, "^{:?}", *half as f64 / 2.0)
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

const ATOM_START: &[&str] = &["number", "u", "v", "pi", "function", "(", "-"];

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn fail(&self, expected: &[&str]) -> Error {
        Error::Parse {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let start = {
            self.skip_ws();
            self.pos
        };
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let value = self.number().ok_or_else(|| self.fail(&["number", "-"]))?;
        let value = if negative { -value } else { value };
        let twice = 2.0 * value;
        if twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::RejectedConstruct {
                offset: start,
                what: format!("exponent {value} is not an integer or half-integer"),
            });
        }
        Ok(Expr::Pow(Box::new(base), twice as i32))
    }

    fn number(&mut self) -> Option<f64> {
        let s = self.src;
        let start = self.pos;
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let from = *i;
            while *i < s.len() && s[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - from
        };
        let mut n = digits(&mut i);
        if i < s.len() && s[i] == b'.' {
            i += 1;
            n += digits(&mut i);
        }
        if n == 0 {
            return None;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) > 0 {
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).ok()?;
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        self.pos = i;
        Some(value)
    }

    fn atom(&mut self) -> Result<Expr> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.fail(ATOM_START)),
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.fail(&[")", "+", "-", "*", "/", "^"]));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self
                .number()
                .map(Expr::Const)
                .ok_or_else(|| self.fail(&["number"]));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
            let func = match word {
                "u" => return Ok(Expr::U),
                "v" => return Ok(Expr::V),
                "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
                "sqrt" => Func::Sqrt,
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "exp" => Func::Exp,
                "bump" => Func::Bump,
                "abs" => {
                    return Err(Error::RejectedConstruct {
                        offset: start,
                        what: "abs is not smooth".into(),
                    })
                }
                _ => {
                    self.pos = start;
                    return Err(self.fail(ATOM_START));
                }
            };
            if !self.eat(b'(') {
                return Err(self.fail(&["("]));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.fail(&[")", "+", "-", "*", "/", "^"]));
            }
            return Ok(Expr::Func(func, Box::new(arg)));
        }
        Err(self.fail(ATOM_START))
    }
}
