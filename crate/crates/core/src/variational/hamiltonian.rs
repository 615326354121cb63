use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::system::SystemSpec;
use crate::variational::phase::PhaseState;
use crate::variational::{
    constant_density, default_first_kind_parameters, default_second_kind_parameters, LagrangianKind, LagrangianModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    /// `H = P^2 / 2 I1` with `P = p1 + 1/2 sum_b W_b p_b^2 / C_b`.
    First,
    /// `H = p2^2 / 2 I2 + P^2 / 2 I1` with
    /// `P = p1 + 1/2 sum_alpha W_alpha p_alpha^2 / a_alpha`.
    Second,
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HamiltonianKind::First => "first",
            HamiltonianKind::Second => "second",
        })
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(HamiltonianKind::First),
            "second" => Ok(HamiltonianKind::Second),
            other => Err(Error::InvalidConfig(format!("unknown Hamiltonian kind `{other}`"))),
        }
    }
}

/// Legendre image of a first- or second-kind Lagrangian. The weights are
/// `W_2 = N`, `W_alpha = N A_alpha`.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    kind: HamiltonianKind,
    sys: SystemSpec,
    params: Vec<f64>,
    /// `N`, cached for the second kind.
    density: f64,
}

struct Parts {
    /// The combination `P`.
    big_p: f64,
    /// `r1_dot = P / I1`.
    rate: f64,
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl HamiltonianModel {
    pub fn first(sys: &SystemSpec, c: Vec<f64>) -> Result<Self> {
        let l = LagrangianModel::first(sys, c)?;
        Ok(HamiltonianModel { kind: HamiltonianKind::First, sys: sys.clone(), params: l.params, density: f64::NAN })
    }

    pub fn second(sys: &SystemSpec, a: Vec<f64>) -> Result<Self> {
        let l = LagrangianModel::second(sys, a)?;
        let density = constant_density(sys)?;
        Ok(HamiltonianModel { kind: HamiltonianKind::Second, sys: sys.clone(), params: l.params, density })
    }

    pub fn with_defaults(sys: &SystemSpec, kind: HamiltonianKind) -> Result<Self> {
        match kind {
            HamiltonianKind::First => Self::first(sys, default_first_kind_parameters(sys)),
            HamiltonianKind::Second => Self::second(sys, default_second_kind_parameters(sys)?),
        }
    }

    pub fn from_lagrangian(l: &LagrangianModel) -> Result<Self> {
        match l.kind() {
            LagrangianKind::First => Self::first(l.system(), l.parameters().to_vec()),
            LagrangianKind::Second => Self::second(l.system(), l.parameters().to_vec()),
            LagrangianKind::Variational => Err(Error::InvalidConfig(
                "no closed-form Hamiltonian is provided for the variational Lagrangian".into(),
            )),
        }
    }

    /// The Lagrangian this Hamiltonian is the Legendre image of.
    pub fn lagrangian(&self) -> LagrangianModel {
        let kind = match self.kind {
            HamiltonianKind::First => LagrangianKind::First,
            HamiltonianKind::Second => LagrangianKind::Second,
        };
        LagrangianModel { kind, sys: self.sys.clone(), params: self.params.clone() }
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn system(&self) -> &SystemSpec {
        &self.sys
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    /// First non-base coordinate carrying a weighted momentum.
    fn offset(&self) -> usize {
        match self.kind {
            HamiltonianKind::First => 1,
            HamiltonianKind::Second => 2,
        }
    }

    fn parts(&self, ps: &PhaseState) -> Result<Parts> {
        let n = self.sys.dim();
        if ps.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ps.dim() });
        }
        let c = self.sys.coefficients_at(ps.q[0])?;
        let (w_all, dw_all) = (c.weights(), c.weight_derivatives());
        let skip = self.offset() - 1;
        let w: Vec<f64> = w_all[skip..].to_vec();
        let dw: Vec<f64> = dw_all[skip..].to_vec();
        let first = self.offset();
        let big_p = ps.p[0]
            + 0.5 * self.params.iter().enumerate().map(|(j, c)| w[j] * ps.p[first + j].powi(2) / c).sum::<f64>();
        Ok(Parts { big_p, rate: big_p / self.sys.i1(), w, dw })
    }

    /// `r1_dot` as a function on phase space.
    pub fn base_velocity(&self, ps: &PhaseState) -> Result<f64> {
        Ok(self.parts(ps)?.rate)
    }

    pub fn hamiltonian_value(&self, ps: &PhaseState) -> Result<f64> {
        let parts = self.parts(ps)?;
        let mut h = parts.big_p * parts.big_p / (2.0 * self.sys.i1());
        if self.kind == HamiltonianKind::Second {
            h += ps.p[1] * ps.p[1] / (2.0 * self.sys.i2());
        }
        Ok(h)
    }

    /// Canonical equations `(dH/dp, -dH/dq)` in the layout of
    /// [`PhaseState::to_vec`].
    pub fn hamilton_rhs(&self, ps: &PhaseState) -> Result<Vec<f64>> {
        let n = self.sys.dim();
        let parts = self.parts(ps)?;
        let first = self.offset();
        let u = parts.rate;
        let mut out = vec![0.0; 2 * n];
        out[0] = u;
        if self.kind == HamiltonianKind::Second {
            out[1] = ps.p[1] / self.sys.i2();
        }
        let mut dp = 0.0;
        for (j, c) in self.params.iter().enumerate() {
            let b = first + j;
            out[b] = u * parts.w[j] * ps.p[b] / c;
            dp += parts.dw[j] * ps.p[b] * ps.p[b] / c;
        }
        out[n] = -0.5 * u * dp;
        Ok(out)
    }

    pub fn hamilton_field(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.hamilton_rhs(&PhaseState::from_slice(y)?)
    }

    /// One residual per constrained coordinate, zero exactly on the Legendre
    /// image of the constraint distribution: `C_2 p_alpha + C_alpha p_2`
    /// (first kind), `I2 N r1_dot(p) p_alpha + a_alpha p_2` (second kind).
    pub fn phase_constraint_residual(&self, ps: &PhaseState) -> Result<Vec<f64>> {
        let k = self.sys.k();
        match self.kind {
            HamiltonianKind::First => {
                if ps.dim() != self.sys.dim() {
                    return Err(Error::DimensionMismatch { expected: self.sys.dim(), got: ps.dim() });
                }
                let c = &self.params;
                Ok((0..k).map(|a| c[0] * ps.p[2 + a] + c[1 + a] * ps.p[1]).collect())
            }
            HamiltonianKind::Second => {
                let u = self.base_velocity(ps)?;
                let scale = self.sys.i2() * self.density * u;
                Ok((0..k).map(|a| scale * ps.p[2 + a] + self.params[a] * ps.p[1]).collect())
            }
        }
    }
}
