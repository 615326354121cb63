//! Expressions in the single variable `r1`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number | 'r1' | 'pi' | func '(' sum ')' | '(' sum ')'
//! func    := sin | cos | tan | exp | ln | sqrt
//! ```
//!
//! `^` binds tighter than unary minus, so `-r1^2` is `-(r1^2)`.

use std::fmt;

use crate::error::ExprError;
use crate::model::series::{Series, TAN_POLE_GUARD};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tan(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
}

// Smart constructors with light constant folding; keeps repeated derivatives small.
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(x), _) if x == 0.0 => Expr::Const(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (a.as_const(), n) {
            (_, 0) => Expr::Const(1.0),
            (_, 1) => a,
            (Some(x), n) if x != 0.0 || n > 0 => Expr::Const(x.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }
    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(Box::new(a))
    }
    pub fn tan(a: Expr) -> Expr {
        Expr::Tan(Box::new(a))
    }
    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }
    pub fn ln(a: Expr) -> Expr {
        Expr::Ln(Box::new(a))
    }
    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(Box::new(a))
    }

    /// True when the tree does not mention `r1`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Tan(a)
            | Expr::Exp(a)
            | Expr::Ln(a)
            | Expr::Sqrt(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates at `r1`. Undefined subexpressions are reported, never
    /// turned into NaN or infinity.
    pub fn eval(&self, r1: f64) -> Result<f64, ExprError> {
        let dom = |what| ExprError::Domain { what, at: r1 };
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => r1,
            Expr::Neg(a) => -a.eval(r1)?,
            Expr::Add(a, b) => a.eval(r1)? + b.eval(r1)?,
            Expr::Sub(a, b) => a.eval(r1)? - b.eval(r1)?,
            Expr::Mul(a, b) => a.eval(r1)? * b.eval(r1)?,
            Expr::Div(a, b) => {
                let d = b.eval(r1)?;
                if d == 0.0 {
                    return Err(dom("division by zero"));
                }
                a.eval(r1)? / d
            }
            Expr::Pow(a, n) => {
                let x = a.eval(r1)?;
                if x == 0.0 && *n < 0 {
                    return Err(dom("negative power of zero"));
                }
                x.powi(*n)
            }
            Expr::Sin(a) => a.eval(r1)?.sin(),
            Expr::Cos(a) => a.eval(r1)?.cos(),
            Expr::Tan(a) => {
                let x = a.eval(r1)?;
                if x.cos().abs() < TAN_POLE_GUARD {
                    return Err(dom("tangent at a pole"));
                }
                x.tan()
            }
            Expr::Exp(a) => a.eval(r1)?.exp(),
            Expr::Ln(a) => {
                let x = a.eval(r1)?;
                if x <= 0.0 {
                    return Err(dom("logarithm of a non-positive value"));
                }
                x.ln()
            }
            Expr::Sqrt(a) => {
                let x = a.eval(r1)?;
                if x < 0.0 {
                    return Err(dom("square root of a negative value"));
                }
                x.sqrt()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(dom("non-finite result"))
        }
    }

    /// Taylor expansion of order `order` at `r1` (forward-mode, exact up to
    /// rounding).
    pub fn series(&self, r1: f64, order: usize) -> Result<Series, ExprError> {
        let s = match self {
            Expr::Const(c) => Series::constant(*c, order),
            Expr::Var => Series::variable(r1, order),
            Expr::Neg(a) => -a.series(r1, order)?,
            Expr::Add(a, b) => a.series(r1, order)? + b.series(r1, order)?,
            Expr::Sub(a, b) => a.series(r1, order)? - b.series(r1, order)?,
            Expr::Mul(a, b) => a.series(r1, order)? * b.series(r1, order)?,
            Expr::Div(a, b) => a.series(r1, order)?.checked_div(&b.series(r1, order)?, r1)?,
            Expr::Pow(a, n) => a.series(r1, order)?.powi(*n, r1)?,
            Expr::Sin(a) => a.series(r1, order)?.sin_cos().0,
            Expr::Cos(a) => a.series(r1, order)?.sin_cos().1,
            Expr::Tan(a) => a.series(r1, order)?.tan(r1)?,
            Expr::Exp(a) => a.series(r1, order)?.exp(),
            Expr::Ln(a) => a.series(r1, order)?.ln(r1)?,
            Expr::Sqrt(a) => a.series(r1, order)?.checked_sqrt(r1)?,
        };
        if s.coefficients().iter().all(|c| c.is_finite()) {
            Ok(s)
        } else {
            Err(ExprError::Domain { what: "non-finite result", at: r1 })
        }
    }

    /// Structural derivative with respect to `r1`.
    pub fn diff(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(a) => Expr::neg(a.diff()),
            Expr::Add(a, b) => Expr::add(a.diff(), b.diff()),
            Expr::Sub(a, b) => Expr::sub(a.diff(), b.diff()),
            Expr::Mul(a, b) => Expr::add(Expr::mul(a.diff(), (**b).clone()), Expr::mul((**a).clone(), b.diff())),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(Expr::mul(a.diff(), (**b).clone()), Expr::mul((**a).clone(), b.diff())),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, n) => Expr::mul(Expr::mul(Expr::Const(*n as f64), Expr::pow((**a).clone(), n - 1)), a.diff()),
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.diff()),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.diff())),
            // (1 + tan^2) keeps the derivative's domain equal to that of tan.
            Expr::Tan(a) => Expr::mul(Expr::add(Expr::Const(1.0), Expr::pow(Expr::tan((**a).clone()), 2)), a.diff()),
            Expr::Exp(a) => Expr::mul(self.clone(), a.diff()),
            Expr::Ln(a) => Expr::div(a.diff(), (**a).clone()),
            Expr::Sqrt(a) => Expr::div(a.diff(), Expr::mul(Expr::Const(2.0), self.clone())),
        }
    }
}

/// Free-function form of [`Expr::diff`].
pub fn diff_expr(e: &Expr) -> Expr {
    e.diff()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "r1"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Tan(a) => write!(f, "tan({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(ExprError::Syntax { pos: 0, message: "empty expression".into() });
    }
    // Parse the literal tree without folding so the structure matches the text.
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i32 =
            digits.parse().map_err(|_| ExprError::Syntax { pos: start, message: "exponent out of range".into() })?;
        Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        let text = std::str::from_utf8(&s[start..i]).unwrap();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ExprError::Syntax { pos: start, message: format!("malformed number `{text}`") })
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let func: fn(Box<Expr>) -> Expr = match name {
            "r1" => return Ok(Expr::Var),
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "sin" => Expr::Sin,
            "cos" => Expr::Cos,
            "tan" => Expr::Tan,
            "exp" => Expr::Exp,
            "ln" => Expr::Ln,
            "sqrt" => Expr::Sqrt,
            _ => return Err(ExprError::UnknownIdentifier { name: name.to_string(), pos: start }),
        };
        if !self.eat(b'(') {
            return Err(self.error("expected `(` after function name"));
        }
        let arg = self.sum()?;
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(func(Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn central(e: &Expr, x: f64, h: f64) -> f64 {
        (e.eval(x + h).unwrap() - e.eval(x - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn parses_variable() {
        assert_eq!(parse_expr("r1").unwrap(), Expr::Var);
        assert_eq!(parse_expr("  r1 ").unwrap(), Expr::Var);
    }

    #[test]
    fn parses_negated_tangent() {
        assert_eq!(parse_expr("-tan(r1)").unwrap(), Expr::Neg(Box::new(Expr::Tan(Box::new(Expr::Var)))));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_expr("-r1^2").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), -9.0);
        assert_eq!(parse_expr("2^-2").unwrap().eval(0.0).unwrap(), 0.25);
    }

    #[test]
    fn evaluates_polynomial_plus_sine() {
        let e = parse_expr("3*r1^2 + sin(r1)").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
        assert_eq!(parse_expr("3 * r1 ^ 2+sin( r1 )").unwrap(), e);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expr("r1 + * 2") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("sin(r1"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("r1^x"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn unknown_identifier() {
        match parse_expr("2*theta") {
            Err(ExprError::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "theta");
                assert_eq!(pos, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn domain_errors_are_reported() {
        assert!(matches!(parse_expr("ln(r1)").unwrap().eval(0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(parse_expr("1/r1").unwrap().eval(0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(
            parse_expr("tan(r1)").unwrap().eval(std::f64::consts::FRAC_PI_2),
            Err(ExprError::Domain { .. })
        ));
        assert!(matches!(parse_expr("sqrt(r1)").unwrap().eval(-1.0), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(parse_expr("4.5").unwrap().diff(), Expr::Const(0.0));
        assert_eq!(parse_expr("r1").unwrap().diff(), Expr::Const(1.0));
        let d = parse_expr("-tan(r1)").unwrap().diff();
        assert!((d.eval(0.0).unwrap() + 1.0).abs() < 1e-15);
        // finite-difference oracle, h = 1e-6
        let fd = central(&parse_expr("-tan(r1)").unwrap(), 0.0, 1e-6);
        assert!((fd + 1.0).abs() < 1e-9);
    }

    #[test]
    fn is_constant_detects_variable_free_trees() {
        assert!(parse_expr("sin(2)*3").unwrap().is_constant());
        assert!(!parse_expr("sin(2)*r1").unwrap().is_constant());
    }

    #[test]
    fn series_matches_repeated_structural_derivatives() {
        let e = parse_expr("sqrt(1 + r1^2) * exp(-r1) / (2 + cos(r1)) + ln(3 + sin(r1)) - tan(r1)").unwrap();
        let x = 0.37;
        let s = e.series(x, 4).unwrap();
        let mut d = e.clone();
        for k in 0..=4 {
            let exact = d.eval(x).unwrap();
            assert!((s.nth_derivative(k) - exact).abs() < 1e-11 * (1.0 + exact.abs()), "k={k}");
            d = d.diff();
        }
    }

    const SAMPLES: [&str; 6] = [
        "r1",
        "-tan(r1)",
        "-2*cos(r1)",
        "sqrt(2 + r1^3) / (1 + exp(r1))",
        "ln(2 + sin(r1)) * r1^-1",
        "(r1 - 0.5)^3 * cos(3*r1)",
    ];

    proptest! {
        #[test]
        fn diff_agrees_with_central_differences(idx in 0usize..SAMPLES.len(), x in 0.2f64..1.0) {
            let e = parse_expr(SAMPLES[idx]).unwrap();
            let exact = e.diff().eval(x).unwrap();
            let h = 1e-5;
            let fd = central(&e, x, h);
            prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()));
        }

        #[test]
        fn display_round_trips(idx in 0usize..SAMPLES.len(), x in 0.2f64..1.0) {
            let e = parse_expr(SAMPLES[idx]).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            prop_assert_eq!(e.eval(x).unwrap(), again.eval(x).unwrap());
        }
    }
}
