//! Laurent polynomials in the velocities whose coefficients are truncated
//! Taylor series in `r1`.
//!
//! Everything in the class depends on position only through `r1`, so a
//! velocity polynomial with series coefficients represents a function on the
//! tangent bundle together with all its `r1`-derivatives up to the series
//! order. Velocity exponents may be negative (Lagrangians contain `1/r1_dot`).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::model::series::{Coefficient, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct VPoly {
    n: usize,
    terms: BTreeMap<Vec<i32>, Series>,
}

impl VPoly {
    pub fn zero(n: usize) -> Self {
        VPoly { n, terms: BTreeMap::new() }
    }

    pub fn monomial(exponents: Vec<i32>, coeff: Series) -> Self {
        let mut p = VPoly::zero(exponents.len());
        p.terms.insert(exponents, coeff);
        p
    }

    pub fn constant(n: usize, coeff: Series) -> Self {
        VPoly::monomial(vec![0; n], coeff)
    }

    /// The velocity `v_i` with a constant coefficient of the given order.
    pub fn velocity(n: usize, i: usize, order: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        VPoly::monomial(e, Series::constant(1.0, order))
    }

    /// `coeff * prod v_i^{e_i}` from a list of `(index, exponent)` pairs.
    pub fn term(n: usize, factors: &[(usize, i32)], coeff: Series) -> Self {
        let mut e = vec![0; n];
        for &(i, k) in factors {
            e[i] += k;
        }
        VPoly::monomial(e, coeff)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &Series)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn insert(&mut self, e: Vec<i32>, c: Series) {
        match self.terms.remove(&e) {
            Some(old) => {
                self.terms.insert(e, old + c);
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        VPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.scale(k))).collect() }
    }

    pub fn mul_series(&self, s: &Series) -> Self {
        VPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * s.clone())).collect() }
    }

    /// Partial derivative in the velocity `v_i`.
    pub fn dv(&self, i: usize) -> Self {
        let mut out = VPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.insert(e2, c.scale(e[i] as f64));
        }
        out
    }

    /// Partial derivative in `r1`; lowers the coefficient order by one.
    pub fn dr1(&self) -> Self {
        VPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.derivative())).collect() }
    }

    /// Lowest coefficient order present, `None` for the zero polynomial.
    pub fn order(&self) -> Option<usize> {
        self.terms.values().map(Series::order).min()
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = c.value();
                for (x, &k) in v.iter().zip(e) {
                    if k != 0 {
                        m *= x.powi(k);
                    }
                }
                m
            })
            .sum()
    }
}

impl Add for &VPoly {
    type Output = VPoly;
    fn add(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &VPoly {
    type Output = VPoly;
    fn sub(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &VPoly {
    type Output = VPoly;
    fn neg(self) -> VPoly {
        self.scale(-1.0)
    }
}

impl Mul for &VPoly {
    type Output = VPoly;
    fn mul(self, rhs: &VPoly) -> VPoly {
        let mut out = VPoly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for VPoly {
            type Output = VPoly;
            fn $m(self, rhs: VPoly) -> VPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Derivative along the second-order field `v . d/dq + f . d/dv`. Only the
/// `r1` position derivative is nonzero in the class.
pub fn along_field(f: &[VPoly], x: &VPoly) -> VPoly {
    let n = x.dim();
    let order = x.order().unwrap_or(0);
    let mut out = &VPoly::velocity(n, 0, order) * &x.dr1();
    for (i, fi) in f.iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        let d = x.dv(i);
        if !d.is_zero() {
            out = &out + &(fi * &d);
        }
    }
    out
}

/// Matrix of velocity polynomials, row-major.
pub type PolyMatrix = Vec<Vec<VPoly>>;

pub fn eval_matrix(m: &PolyMatrix, v: &[f64]) -> nalgebra::DMatrix<f64> {
    let n = m.len();
    nalgebra::DMatrix::from_fn(n, m.first().map_or(0, Vec::len), |i, j| m[i][j].eval(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[f64]) -> Series {
        Series::from_coefficients(c.to_vec())
    }

    #[test]
    fn product_and_derivatives() {
        // p = (1 + 2 r) v0^2 v1^-1 at r = 0
        let p = VPoly::term(2, &[(0, 2), (1, -1)], s(&[1.0, 2.0]));
        let v = [1.5, -0.5];
        assert!((p.eval(&v) - 1.5f64.powi(2) / -0.5).abs() < 1e-15);
        assert!((p.dv(1).eval(&v) + 1.5f64.powi(2) / 0.25).abs() < 1e-14);
        assert!((p.dr1().eval(&v) - 2.0 * 1.5f64.powi(2) / -0.5).abs() < 1e-14);
        let q = &p * &p;
        assert!((q.eval(&v) - p.eval(&v).powi(2)).abs() < 1e-13);
    }

    #[test]
    fn cancellation_keeps_terms_combined() {
        let p = VPoly::velocity(3, 1, 2);
        let z = &p - &p;
        assert_eq!(z.eval(&[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(z.terms().count(), 1);
    }

    #[test]
    fn field_derivative_of_velocity_is_the_field() {
        let f = vec![VPoly::zero(2), VPoly::term(2, &[(0, 1), (1, 1)], s(&[3.0, 1.0]))];
        let g = along_field(&f, &VPoly::velocity(2, 1, 1));
        let v = [0.7, 1.1];
        assert!((g.eval(&v) - 3.0 * 0.7 * 1.1).abs() < 1e-15);
    }
}
