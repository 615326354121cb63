//! Associated second-order systems `q'' = f(q, q')` in normal form.

pub mod vpoly;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::coefficients::ClassCoefficients;
use crate::model::series::Coefficient;
use crate::model::system::{Jet, SystemSpec};
pub use vpoly::{along_field, eval_matrix, PolyMatrix, VPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SodeKind {
    /// `r1'' = 0`, `q_a'' = Gamma_a(r1) r1' r2'`.
    First,
    /// `r1'' = 0`, `q_a'' = Xi_a(r1) r1' q_a'` (decoupled).
    Second,
    /// Euler-Lagrange equations of the variational Lagrangian.
    Third,
    /// `q'' = 0` in any dimension.
    Free,
}

impl fmt::Display for SodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SodeKind::First => "first",
            SodeKind::Second => "second",
            SodeKind::Third => "third",
            SodeKind::Free => "free",
        })
    }
}

impl FromStr for SodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(SodeKind::First),
            "second" => Ok(SodeKind::Second),
            "third" => Ok(SodeKind::Third),
            "free" => Ok(SodeKind::Free),
            other => Err(Error::InvalidConfig(format!("unknown second-order system kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SodeSystem {
    kind: SodeKind,
    dim: usize,
    owner: Option<SystemSpec>,
}

pub fn first_associated(sys: &SystemSpec) -> SodeSystem {
    SodeSystem { kind: SodeKind::First, dim: sys.dim(), owner: Some(sys.clone()) }
}

pub fn second_associated(sys: &SystemSpec) -> SodeSystem {
    SodeSystem { kind: SodeKind::Second, dim: sys.dim(), owner: Some(sys.clone()) }
}

/// Always constructed; only an associated system when
/// [`SodeSystem::is_associated`] holds.
pub fn third_associated(sys: &SystemSpec) -> SodeSystem {
    SodeSystem { kind: SodeKind::Third, dim: sys.dim(), owner: Some(sys.clone()) }
}

pub fn free_sode(dim: usize) -> SodeSystem {
    SodeSystem { kind: SodeKind::Free, dim, owner: None }
}

impl SodeSystem {
    pub fn new(sys: &SystemSpec, kind: SodeKind) -> Self {
        match kind {
            SodeKind::Free => free_sode(sys.dim()),
            kind => SodeSystem { kind, dim: sys.dim(), owner: Some(sys.clone()) },
        }
    }

    pub fn kind(&self) -> SodeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn owner(&self) -> Option<&SystemSpec> {
        self.owner.as_ref()
    }

    /// Whether the constrained solutions are among this system's solutions.
    /// The third kind qualifies only with constant measure density.
    pub fn is_associated(&self) -> bool {
        match (self.kind, &self.owner) {
            (SodeKind::Third, Some(s)) => s.has_constant_measure(),
            (SodeKind::Free, _) => false,
            _ => true,
        }
    }

    fn check(&self, jet: &Jet) -> Result<()> {
        if jet.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: jet.dim() });
        }
        Ok(())
    }

    fn coefficients(&self, r1: f64) -> Result<ClassCoefficients<f64>> {
        let sys = self.owner.as_ref().expect("class system");
        let c = sys.coefficients_at(r1)?;
        if self.kind == SodeKind::Second {
            sys.check_nonzero_coefficients(r1, &c.a)?;
        }
        Ok(c)
    }

    /// Per-coordinate rates: `Gamma_a` for the first kind, `Xi_a` for the
    /// second, indexed over `(r2, s_1..s_k)`.
    pub fn rates(&self, r1: f64) -> Result<Vec<f64>> {
        match self.kind {
            SodeKind::First => Ok(self.coefficients(r1)?.first_kind_rates()),
            SodeKind::Second => Ok(self.coefficients(r1)?.second_kind_rates()),
            _ => Err(Error::InvalidConfig(format!("no rate coefficients for the {} kind", self.kind))),
        }
    }

    /// Potentials `xi_a = ln |W_a|` of the second kind, with `xi_a' = Xi_a`.
    pub fn xi(&self, r1: f64) -> Result<Vec<f64>> {
        if self.kind != SodeKind::Second {
            return Err(Error::InvalidConfig("potentials exist for the second kind only".into()));
        }
        Ok(self.coefficients(r1)?.weights().iter().map(|w| w.abs().ln()).collect())
    }

    /// Accelerations `f(q, q')`.
    pub fn rhs(&self, jet: &Jet) -> Result<Vec<f64>> {
        self.check(jet)?;
        let n = self.dim;
        if self.kind == SodeKind::Free {
            return Ok(vec![0.0; n]);
        }
        let sys = self.owner.as_ref().expect("class system");
        let c = self.coefficients(jet.r1())?;
        let v = &jet.qdot;
        let mut out = vec![0.0; n];
        match self.kind {
            SodeKind::First => {
                for (a, g) in c.first_kind_rates().iter().enumerate() {
                    out[a + 1] = g * v[0] * v[1];
                }
            }
            SodeKind::Second => {
                for (a, x) in c.second_kind_rates().iter().enumerate() {
                    out[a + 1] = x * v[0] * v[a + 1];
                }
            }
            SodeKind::Third => {
                let t: f64 = (0..sys.k()).map(|b| sys.i_alpha()[b] * c.da[b] * v[2 + b]).sum();
                let s = c.coupling;
                out[0] = -t * v[1] / sys.i1();
                out[1] = c.density_sq * (t * v[0] - s * v[0] * v[1]);
                for a in 0..sys.k() {
                    out[2 + a] =
                        -(c.da[a] - c.density_sq * c.a[a] * s) * v[0] * v[1] - c.a[a] * c.density_sq * t * v[0];
                }
            }
            SodeKind::Free => unreachable!(),
        }
        Ok(out)
    }

    /// Vector field on the state `(q, q')`.
    pub fn field(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        if y.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: y.len() });
        }
        let jet = Jet { q: y[..n].to_vec(), qdot: y[n..].to_vec() };
        let acc = self.rhs(&jet)?;
        Ok(y[n..].iter().copied().chain(acc).collect())
    }

    /// The right-hand side as velocity polynomials whose coefficients are
    /// expanded to `order` in `r1`.
    pub fn polynomials(&self, r1: f64, order: usize) -> Result<Vec<VPoly>> {
        let n = self.dim;
        if self.kind == SodeKind::Free {
            return Ok(vec![VPoly::zero(n); n]);
        }
        let sys = self.owner.as_ref().expect("class system");
        if self.kind == SodeKind::Second {
            sys.check_nonzero_coefficients(r1, &sys.coefficient_values(r1)?)?;
        }
        let c = sys.coefficient_series(r1, order)?;
        let mut f = vec![VPoly::zero(n); n];
        match self.kind {
            SodeKind::First => {
                for (a, g) in c.first_kind_rates().into_iter().enumerate() {
                    f[a + 1] = VPoly::term(n, &[(0, 1), (1, 1)], g);
                }
            }
            SodeKind::Second => {
                for (a, x) in c.second_kind_rates().into_iter().enumerate() {
                    f[a + 1] = VPoly::term(n, &[(0, 1), (a + 1, 1)], x);
                }
            }
            SodeKind::Third => {
                // t = sum_b I_b A_b' v_{2+b}
                let mut t = VPoly::zero(n);
                for b in 0..sys.k() {
                    t = &t + &VPoly::term(n, &[(2 + b, 1)], c.da[b].scale(sys.i_alpha()[b]));
                }
                let v0 = VPoly::velocity(n, 0, order);
                let v1 = VPoly::velocity(n, 1, order);
                let v0v1 = &v0 * &v1;
                let ns = c.density_sq.clone() * c.coupling.clone();
                f[0] = (&t * &v1).scale(-1.0 / sys.i1());
                f[1] = &(&t * &v0).mul_series(&c.density_sq) - &v0v1.mul_series(&ns);
                for a in 0..sys.k() {
                    let rate = -(c.da[a].clone() - c.a[a].clone() * ns.clone());
                    let cross = c.a[a].clone() * c.density_sq.clone();
                    f[2 + a] = &v0v1.mul_series(&rate) - &(&t * &v0).mul_series(&cross);
                }
            }
            SodeKind::Free => unreachable!(),
        }
        Ok(f)
    }
}
