//! The scalar functions of `r1` that every formula in the class is built from.

use crate::model::series::Coefficient;

/// Values (or Taylor series) of the constraint coefficients and the derived
/// quantities at one base point.
#[derive(Debug, Clone)]
pub struct ClassCoefficients<C> {
    pub a: Vec<C>,
    pub da: Vec<C>,
    /// `I2 + sum I_alpha A_alpha^2`.
    pub denom: C,
    /// `sum I_alpha A_alpha A_alpha'`.
    pub coupling: C,
    /// Invariant measure density `1 / sqrt(denom)`.
    pub density: C,
    pub density_sq: C,
}

impl<C: Coefficient> ClassCoefficients<C> {
    pub fn new(i2: f64, i_alpha: &[f64], a: Vec<C>, da: Vec<C>) -> Self {
        let mut denom = a[0].clone() * a[0].clone();
        denom = denom.scale(i_alpha[0]);
        let mut coupling = (a[0].clone() * da[0].clone()).scale(i_alpha[0]);
        for k in 1..a.len() {
            denom = denom + (a[k].clone() * a[k].clone()).scale(i_alpha[k]);
            coupling = coupling + (a[k].clone() * da[k].clone()).scale(i_alpha[k]);
        }
        let denom = denom.offset(i2);
        let density_sq = denom.recip();
        let density = denom.sqrt().recip();
        ClassCoefficients { a, da, denom, coupling, density, density_sq }
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// Rate of `r2` in the first associated system and in the constrained
    /// dynamics: `-N^2 S`.
    pub fn base_rate(&self) -> C {
        -(self.density_sq.clone() * self.coupling.clone())
    }

    /// Coefficients of `r1_dot r2_dot` in the first associated system, one per
    /// non-base coordinate (`r2` first).
    pub fn first_kind_rates(&self) -> Vec<C> {
        let mut out = Vec::with_capacity(self.k() + 1);
        out.push(self.base_rate());
        let ns = self.density_sq.clone() * self.coupling.clone();
        for k in 0..self.k() {
            out.push(-(self.da[k].clone() - self.a[k].clone() * ns.clone()));
        }
        out
    }

    /// Logarithmic rates `W_a' / W_a` of the second associated system. The
    /// caller guarantees every `A_alpha` is nonzero.
    pub fn second_kind_rates(&self) -> Vec<C> {
        let base = self.base_rate();
        let mut out = Vec::with_capacity(self.k() + 1);
        out.push(base.clone());
        for k in 0..self.k() {
            out.push(base.clone() + self.da[k].clone() / self.a[k].clone());
        }
        out
    }

    /// Signed weights `W_2 = N`, `W_alpha = N A_alpha`; the exponentials of
    /// the second-kind potentials up to sign.
    pub fn weights(&self) -> Vec<C> {
        let mut out = Vec::with_capacity(self.k() + 1);
        out.push(self.density.clone());
        for k in 0..self.k() {
            out.push(self.density.clone() * self.a[k].clone());
        }
        out
    }

    /// Derivatives of [`weights`](Self::weights) with respect to `r1`.
    pub fn weight_derivatives(&self) -> Vec<C> {
        let dn = self.density.clone() * self.base_rate();
        let mut out = Vec::with_capacity(self.k() + 1);
        out.push(dn.clone());
        for k in 0..self.k() {
            out.push(dn.clone() * self.a[k].clone() + self.density.clone() * self.da[k].clone());
        }
        out
    }
}
