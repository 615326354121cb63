//! Truncated Taylor series in the single base coordinate `r1`.
//!
//! A [`Series`] stores normalized coefficients `c_k = f^(k)(r1) / k!`. Binary
//! operations truncate to the shorter operand, so a series obtained by
//! differentiation (which loses one order) never pretends to know more than
//! it does.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::ExprError;

/// Arithmetic shared by plain values and Taylor series, so the class
/// coefficient formulas are written once.
pub trait Coefficient:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn scale(&self, c: f64) -> Self;
    fn offset(&self, c: f64) -> Self;
    /// Value at the expansion point.
    fn value(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;
}

impl Coefficient for f64 {
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn offset(&self, c: f64) -> Self {
        self + c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Series(c)
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        if order >= 1 {
            c[1] = 1.0;
        }
        Series(c)
    }

    pub fn from_coefficients(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "series needs at least one coefficient");
        Series(c)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    /// `k`-th derivative at the expansion point.
    pub fn nth_derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.0[k] * fact
    }

    /// Series of the derivative; one order shorter. A constant stays a
    /// zero-order zero.
    pub fn derivative(&self) -> Self {
        if self.0.len() == 1 {
            return Series(vec![0.0]);
        }
        Series(self.0[1..].iter().enumerate().map(|(k, c)| (k + 1) as f64 * c).collect())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series(self.0[..=order.min(self.order())].to_vec())
    }

    fn len_with(&self, other: &Series) -> usize {
        self.0.len().min(other.0.len())
    }

    pub fn checked_div(&self, other: &Series, at: f64) -> Result<Series, ExprError> {
        if other.0[0] == 0.0 {
            return Err(ExprError::Domain { what: "division by zero", at });
        }
        Ok(self.clone() / other.clone())
    }

    pub fn exp(&self) -> Series {
        let a = &self.0;
        let n = a.len();
        let mut e = vec![0.0; n];
        e[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Series(e)
    }

    pub fn ln(&self, at: f64) -> Result<Series, ExprError> {
        let a = &self.0;
        if a[0] <= 0.0 {
            return Err(ExprError::Domain { what: "logarithm of a non-positive value", at });
        }
        let n = a.len();
        let mut l = vec![0.0; n];
        l[0] = a[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Ok(Series(l))
    }

    pub fn checked_sqrt(&self, at: f64) -> Result<Series, ExprError> {
        let a = &self.0;
        if a[0] < 0.0 || (a[0] == 0.0 && a.len() > 1) {
            return Err(ExprError::Domain { what: "square root of a non-positive value", at });
        }
        Ok(self.sqrt_unchecked())
    }

    fn sqrt_unchecked(&self) -> Series {
        let a = &self.0;
        let n = a.len();
        let mut s = vec![0.0; n];
        s[0] = a[0].sqrt();
        for k in 1..n {
            let acc: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (a[k] - acc) / (2.0 * s[0]);
        }
        Series(s)
    }

    pub fn sin_cos(&self) -> (Series, Series) {
        let a = &self.0;
        let n = a.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Series(s), Series(c))
    }

    pub fn tan(&self, at: f64) -> Result<Series, ExprError> {
        let (s, c) = self.sin_cos();
        if c.0[0].abs() < TAN_POLE_GUARD {
            return Err(ExprError::Domain { what: "tangent at a pole", at });
        }
        Ok(s / c)
    }

    pub fn powi(&self, n: i32, at: f64) -> Result<Series, ExprError> {
        if n < 0 && self.0[0] == 0.0 {
            return Err(ExprError::Domain { what: "negative power of zero", at });
        }
        let mut acc = Series::constant(1.0, self.order());
        for _ in 0..n.unsigned_abs() {
            acc = acc * self.clone();
        }
        Ok(if n < 0 { acc.recip() } else { acc })
    }
}

/// `|cos x|` below this is treated as a pole of `tan`.
pub(crate) const TAN_POLE_GUARD: f64 = 1e-12;

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        let n = self.len_with(&rhs);
        Series((0..n).map(|k| self.0[k] + rhs.0[k]).collect())
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        let n = self.len_with(&rhs);
        Series((0..n).map(|k| self.0[k] - rhs.0[k]).collect())
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let n = self.len_with(&rhs);
        Series((0..n).map(|k| (0..=k).map(|i| self.0[i] * rhs.0[k - i]).sum()).collect())
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        let n = self.len_with(&rhs);
        let b = &rhs.0;
        let mut c = vec![0.0; n];
        for k in 0..n {
            let acc: f64 = (1..=k).map(|i| b[i] * c[k - i]).sum();
            c[k] = (self.0[k] - acc) / b[0];
        }
        Series(c)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Coefficient for Series {
    fn scale(&self, c: f64) -> Self {
        Series(self.0.iter().map(|v| v * c).collect())
    }
    fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.0[0] += c;
        out
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn sqrt(&self) -> Self {
        self.sqrt_unchecked()
    }
    fn recip(&self) -> Self {
        Series::constant(1.0, self.order()) / self.clone()
    }
}
