//! Closed-form Lagrangians of the associated systems, their Legendre
//! transforms and the corresponding Hamiltonians.
//!
//! The base kinetic term is fixed to `1/2 I1 r1_dot^2` (and `1/2 I2 r2_dot^2`
//! for the second kind), which keeps the Legendre transform explicit.

mod hamiltonian;
mod phase;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helmholtz::{MultiplierField, MultiplierProvenance};
use crate::model::series::{Coefficient, Series};
use crate::model::system::{Builtin, Jet, SystemSpec};
use crate::sode::{eval_matrix, PolyMatrix, SodeKind, SodeSystem, VPoly};

pub use hamiltonian::{HamiltonianKind, HamiltonianModel};
pub use phase::PhaseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagrangianKind {
    /// Inverse-weighted squares of all non-base velocities over `r1_dot`.
    First,
    /// Quadratic in `r2_dot`, inverse-weighted in the constrained velocities.
    /// Needs a constant measure density.
    Second,
    /// The Lagrangian whose Euler-Lagrange equations are the third
    /// associated system.
    Variational,
}

impl fmt::Display for LagrangianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LagrangianKind::First => "first",
            LagrangianKind::Second => "second",
            LagrangianKind::Variational => "variational",
        })
    }
}

impl FromStr for LagrangianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(LagrangianKind::First),
            "second" => Ok(LagrangianKind::Second),
            "variational" => Ok(LagrangianKind::Variational),
            other => Err(Error::InvalidConfig(format!("unknown Lagrangian kind `{other}`"))),
        }
    }
}

/// Default first-kind coefficients `C_b`, one per non-base coordinate:
/// `1/sqrt(m)` for the knife edge, `1` otherwise.
pub fn default_first_kind_parameters(sys: &SystemSpec) -> Vec<f64> {
    let c = match sys.builtin() {
        Some(Builtin::KnifeEdge { mass, .. }) => 1.0 / mass.sqrt(),
        _ => 1.0,
    };
    vec![c; sys.k() + 1]
}

/// Default second-kind coefficients `a_alpha = -I1 N`, which for the disk is
/// `-J / sqrt(I + m R^2)`.
pub fn default_second_kind_parameters(sys: &SystemSpec) -> Result<Vec<f64>> {
    Ok(vec![-sys.i1() * constant_density(sys)?; sys.k()])
}

/// The measure density of a system where it is constant.
pub fn constant_density(sys: &SystemSpec) -> Result<f64> {
    if !sys.has_constant_measure() {
        return Err(Error::NonConstantMeasure);
    }
    [0.0, 0.5, 1.0, -0.5, -1.0]
        .iter()
        .find_map(|&r1| sys.invariant_measure(r1).ok())
        .ok_or_else(|| Error::InvalidSpec("measure density undefined on [-1, 1]".into()))
}

fn check_parameters(values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: values.len() });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v == 0.0) {
        return Err(Error::InvalidParameters(format!("coefficients must be finite and nonzero, got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LagrangianModel {
    kind: LagrangianKind,
    sys: SystemSpec,
    params: Vec<f64>,
}

impl LagrangianModel {
    /// `c` holds one coefficient per non-base coordinate `(r2, s_1..s_k)`.
    pub fn first(sys: &SystemSpec, c: Vec<f64>) -> Result<Self> {
        check_parameters(&c, sys.k() + 1)?;
        Ok(LagrangianModel { kind: LagrangianKind::First, sys: sys.clone(), params: c })
    }

    /// `a` holds one coefficient per constrained coordinate.
    pub fn second(sys: &SystemSpec, a: Vec<f64>) -> Result<Self> {
        constant_density(sys)?;
        check_parameters(&a, sys.k())?;
        Ok(LagrangianModel { kind: LagrangianKind::Second, sys: sys.clone(), params: a })
    }

    pub fn variational(sys: &SystemSpec) -> Self {
        LagrangianModel { kind: LagrangianKind::Variational, sys: sys.clone(), params: Vec::new() }
    }

    /// The model with the default parameter presets.
    pub fn with_defaults(sys: &SystemSpec, kind: LagrangianKind) -> Result<Self> {
        match kind {
            LagrangianKind::First => Self::first(sys, default_first_kind_parameters(sys)),
            LagrangianKind::Second => Self::second(sys, default_second_kind_parameters(sys)?),
            LagrangianKind::Variational => Ok(Self::variational(sys)),
        }
    }

    pub fn kind(&self) -> LagrangianKind {
        self.kind
    }

    pub fn system(&self) -> &SystemSpec {
        &self.sys
    }

    /// `C_b` (first kind) or `a_alpha` (second kind); empty otherwise.
    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    /// The associated second-order system reproduced by the Euler-Lagrange
    /// equations.
    pub fn sode(&self) -> SodeSystem {
        match self.kind {
            LagrangianKind::Variational => SodeSystem::new(&self.sys, SodeKind::Third),
            _ => SodeSystem::new(&self.sys, SodeKind::Second),
        }
    }

    fn check(&self, jet: &Jet) -> Result<()> {
        self.sys.check_jet(jet)?;
        if self.kind != LagrangianKind::Variational && jet.qdot[0] == 0.0 {
            return Err(Error::SingularVelocity);
        }
        Ok(())
    }

    /// The Lagrangian as a velocity polynomial, coefficients expanded to
    /// `order` at `r1`.
    pub fn polynomial(&self, r1: f64, order: usize) -> Result<VPoly> {
        let sys = &self.sys;
        let n = sys.dim();
        let c = sys.coefficient_series(r1, order)?;
        let half = |k: f64| Series::constant(0.5 * k, order);
        let mut l = VPoly::term(n, &[(0, 2)], half(sys.i1()));
        match self.kind {
            LagrangianKind::First | LagrangianKind::Second => {
                let a: Vec<f64> = c.a.iter().map(Coefficient::value).collect();
                sys.check_nonzero_coefficients(r1, &a)?;
                let w = c.weights();
                // index into the non-base coordinates where the weighted terms start
                let first = if self.kind == LagrangianKind::First { 1 } else { 2 };
                if first == 2 {
                    l = &l + &VPoly::term(n, &[(1, 2)], half(sys.i2()));
                }
                for (j, p) in self.params.iter().enumerate() {
                    let b = first + j;
                    let coeff = w[b - 1].recip().scale(0.5 * p);
                    l = &l + &VPoly::term(n, &[(b, 2), (0, -1)], coeff);
                }
            }
            LagrangianKind::Variational => {
                l = &l + &VPoly::term(n, &[(1, 2)], half(sys.i2()));
                for (k, a) in c.a.iter().enumerate() {
                    let ia = sys.i_alpha()[k];
                    l = &l + &VPoly::term(n, &[(2 + k, 2)], half(-ia));
                    l = &l + &VPoly::term(n, &[(2 + k, 1), (1, 1)], a.scale(-ia));
                }
            }
        }
        Ok(l)
    }

    pub fn lagrangian_value(&self, jet: &Jet) -> Result<f64> {
        self.check(jet)?;
        Ok(self.polynomial(jet.r1(), 0)?.eval(&jet.qdot))
    }

    /// Velocity Hessian `d^2 L / dv_i dv_j` as polynomials.
    pub fn hessian_polynomials(&self, r1: f64, order: usize) -> Result<PolyMatrix> {
        let l = self.polynomial(r1, order)?;
        let n = self.sys.dim();
        let grad: Vec<VPoly> = (0..n).map(|i| l.dv(i)).collect();
        Ok((0..n).map(|i| (0..n).map(|j| grad[i].dv(j)).collect()).collect())
    }

    pub fn hessian(&self, jet: &Jet) -> Result<DMatrix<f64>> {
        self.check(jet)?;
        Ok(eval_matrix(&self.hessian_polynomials(jet.r1(), 0)?, &jet.qdot))
    }

    /// The Hessian as a multiplier field for the Helmholtz checks.
    pub fn hessian_field(&self) -> MultiplierField {
        let model = self.clone();
        MultiplierField::from_polynomials(
            self.sys.dim(),
            MultiplierProvenance::HessianOfLagrangian,
            move |r1, order| model.hessian_polynomials(r1, order),
        )
    }

    /// Accelerations solving `g q'' = dL/dq - (d^2 L / dv dq) q'`.
    pub fn euler_lagrange_rhs(&self, jet: &Jet) -> Result<Vec<f64>> {
        self.check(jet)?;
        let n = self.sys.dim();
        let l = self.polynomial(jet.r1(), 1)?;
        let v = &jet.qdot;
        let dl = l.dr1();
        let g = DMatrix::from_fn(n, n, |i, j| l.dv(i).dv(j).eval(v));
        let mut rhs = nalgebra::DVector::from_fn(n, |i, _| -v[0] * dl.dv(i).eval(v));
        rhs[0] += dl.eval(v);
        let lu = g.lu();
        if !lu.determinant().is_normal() {
            return Err(Error::SingularHessian);
        }
        let acc = lu.solve(&rhs).ok_or(Error::SingularHessian)?;
        Ok(acc.iter().copied().collect())
    }

    /// State-space field on `(q, q')` of the Euler-Lagrange equations.
    pub fn euler_lagrange_field(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.sys.dim();
        if y.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: y.len() });
        }
        let jet = Jet { q: y[..n].to_vec(), qdot: y[n..].to_vec() };
        let acc = self.euler_lagrange_rhs(&jet)?;
        Ok(y[n..].iter().copied().chain(acc).collect())
    }

    /// Energy `sum v_i dL/dv_i - L`.
    pub fn energy(&self, jet: &Jet) -> Result<f64> {
        self.check(jet)?;
        let l = self.polynomial(jet.r1(), 0)?;
        let v = &jet.qdot;
        Ok((0..v.len()).map(|i| v[i] * l.dv(i).eval(v)).sum::<f64>() - l.eval(v))
    }

    /// Momenta `p_i = dL/dv_i`.
    pub fn legendre(&self, jet: &Jet) -> Result<PhaseState> {
        self.check(jet)?;
        let l = self.polynomial(jet.r1(), 0)?;
        let p = (0..jet.dim()).map(|i| l.dv(i).eval(&jet.qdot)).collect();
        PhaseState::new(jet.q.clone(), p)
    }

    /// Inverse of [`legendre`](Self::legendre). The base velocity is an
    /// explicit function of the momenta, so the inverse is unique.
    pub fn legendre_inverse(&self, ps: &PhaseState) -> Result<Jet> {
        let n = self.sys.dim();
        if ps.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ps.dim() });
        }
        let r1 = ps.q[0];
        let mut v = vec![0.0; n];
        match self.kind {
            LagrangianKind::First | LagrangianKind::Second => {
                let h = HamiltonianModel::from_lagrangian(self)?;
                v[0] = h.base_velocity(ps)?;
                if v[0] == 0.0 {
                    return Err(Error::SingularVelocity);
                }
                let a = self.sys.coefficient_values(r1)?;
                self.sys.check_nonzero_coefficients(r1, &a)?;
                let w = self.sys.coefficients_at(r1)?.weights();
                let first = if self.kind == LagrangianKind::First { 1 } else { 2 };
                if first == 2 {
                    v[1] = ps.p[1] / self.sys.i2();
                }
                for (j, c) in self.params.iter().enumerate() {
                    let b = first + j;
                    v[b] = ps.p[b] * w[b - 1] * v[0] / c;
                }
            }
            LagrangianKind::Variational => {
                let g = eval_matrix(&self.hessian_polynomials(r1, 0)?, &v);
                let sol = g.lu().solve(&nalgebra::DVector::from_column_slice(&ps.p)).ok_or(Error::SingularHessian)?;
                v.copy_from_slice(sol.as_slice());
            }
        }
        Jet::new(ps.q.clone(), v)
    }
}
