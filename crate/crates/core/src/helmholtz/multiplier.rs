use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helmholtz::tensors::PolyTensors;
use crate::model::series::Series;
use crate::model::system::Jet;
use crate::sode::{along_field, eval_matrix, PolyMatrix, SodeSystem, VPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierProvenance {
    HessianOfLagrangian,
    Candidate,
}

type Source = dyn Fn(f64, usize) -> Result<PolyMatrix> + Send + Sync;

/// A symmetric matrix of functions `g_ij(q, q')`, given as velocity
/// polynomials with `r1`-series coefficients so its derivatives are exact.
#[derive(Clone)]
pub struct MultiplierField {
    dim: usize,
    provenance: MultiplierProvenance,
    source: Arc<Source>,
}

impl fmt::Debug for MultiplierField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierField").field("dim", &self.dim).field("provenance", &self.provenance).finish()
    }
}

/// Copies the upper triangle onto the lower one.
pub fn symmetrize(mut m: PolyMatrix) -> PolyMatrix {
    for i in 0..m.len() {
        for j in 0..i {
            m[i][j] = m[j][i].clone();
        }
    }
    m
}

impl MultiplierField {
    /// `source(r1, order)` returns the matrix expanded to `order` at `r1`; only
    /// its upper triangle is used.
    pub fn from_polynomials<F>(dim: usize, provenance: MultiplierProvenance, source: F) -> Self
    where
        F: Fn(f64, usize) -> Result<PolyMatrix> + Send + Sync + 'static,
    {
        MultiplierField { dim, provenance, source: Arc::new(source) }
    }

    /// A constant symmetric matrix.
    pub fn constant(g: DMatrix<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::DimensionMismatch { expected: g.nrows(), got: g.ncols() });
        }
        let n = g.nrows();
        Ok(MultiplierField::from_polynomials(n, MultiplierProvenance::Candidate, move |_, order| {
            Ok((0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if g[(i, j)] == 0.0 {
                                VPoly::zero(n)
                            } else {
                                VPoly::constant(n, Series::constant(g[(i, j)], order))
                            }
                        })
                        .collect()
                })
                .collect())
        }))
    }

    pub fn identity(n: usize) -> Self {
        MultiplierField::constant(DMatrix::identity(n, n)).expect("square")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> MultiplierProvenance {
        self.provenance
    }

    pub fn polynomials(&self, r1: f64, order: usize) -> Result<PolyMatrix> {
        let m = (self.source)(r1, order)?;
        if m.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: m.len() });
        }
        Ok(symmetrize(m))
    }

    pub fn value(&self, jet: &Jet) -> Result<DMatrix<f64>> {
        Ok(eval_matrix(&self.polynomials(jet.r1(), 0)?, &jet.qdot))
    }
}

/// Worst residuals of the multiplier conditions over a set of jets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelmholtzReport {
    pub jets: usize,
    /// Smallest `|det g|`.
    pub min_abs_det: f64,
    /// Smallest `|det g|` after scaling `g` to unit largest entry.
    pub min_normalized_det: f64,
    /// `dg_ij/dv_k - dg_ik/dv_j`.
    pub symmetry: f64,
    /// `Gamma(g_ij) - nabla^k_j g_ik - nabla^k_i g_kj`.
    pub nabla: f64,
    /// `g_ik phi^k_j - g_jk phi^k_i`.
    pub phi: f64,
    /// Cyclic sum `g_ij R^j_kl + g_lj R^j_ik + g_kj R^j_li`.
    pub r_condition: f64,
    pub tolerance: f64,
    pub regular: bool,
    pub passed: bool,
}

/// Scaled determinant used for regularity decisions.
pub fn normalized_det(g: &DMatrix<f64>) -> f64 {
    let m = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    (g / m).determinant().abs()
}

pub const REGULARITY_TOL: f64 = 1e-10;

pub fn helmholtz_residuals(
    sode: &SodeSystem,
    g: &MultiplierField,
    jets: &[Jet],
    tolerance: f64,
) -> Result<HelmholtzReport> {
    let n = sode.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    let mut rep = HelmholtzReport {
        jets: jets.len(),
        min_abs_det: f64::INFINITY,
        min_normalized_det: f64::INFINITY,
        symmetry: 0.0,
        nabla: 0.0,
        phi: 0.0,
        r_condition: 0.0,
        tolerance,
        regular: true,
        passed: true,
    };
    for jet in jets {
        if jet.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: jet.dim() });
        }
        if sode.owner().is_some() && jet.qdot[0] == 0.0 {
            return Err(Error::SingularVelocity);
        }
        let t = PolyTensors::new(sode, jet.r1(), 0)?;
        let gp = g.polynomials(jet.r1(), 2)?;
        let v = &jet.qdot;
        let gv = eval_matrix(&gp, v);
        rep.min_abs_det = rep.min_abs_det.min(gv.determinant().abs());
        rep.min_normalized_det = rep.min_normalized_det.min(normalized_det(&gv));

        let nab = eval_matrix(&t.nabla, v);
        let ph = eval_matrix(&t.phi, v);
        let r: Vec<DMatrix<f64>> = t.curvature().iter().map(|m| eval_matrix(m, v)).collect();
        let dg: Vec<DMatrix<f64>> = (0..n).map(|k| DMatrix::from_fn(n, n, |i, j| gp[i][j].dv(k).eval(v))).collect();
        let gamma_g = DMatrix::from_fn(n, n, |i, j| along_field(&t.f, &gp[i][j]).eval(v));

        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    rep.symmetry = rep.symmetry.max((dg[k][(i, j)] - dg[j][(i, k)]).abs());
                }
                let mut c = gamma_g[(i, j)];
                let mut p = 0.0;
                for k in 0..n {
                    c -= nab[(k, j)] * gv[(i, k)] + nab[(k, i)] * gv[(k, j)];
                    p += gv[(i, k)] * ph[(k, j)] - gv[(j, k)] * ph[(k, i)];
                }
                rep.nabla = rep.nabla.max(c.abs());
                rep.phi = rep.phi.max(p.abs());
            }
        }
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += gv[(i, j)] * r[j][(k, l)] + gv[(l, j)] * r[j][(i, k)] + gv[(k, j)] * r[j][(l, i)];
                    }
                    rep.r_condition = rep.r_condition.max(s.abs());
                }
            }
        }
    }
    if jets.is_empty() {
        rep.min_abs_det = 0.0;
        rep.min_normalized_det = 0.0;
    }
    rep.regular = rep.min_normalized_det > REGULARITY_TOL;
    rep.passed = rep.regular
        && rep.symmetry < tolerance
        && rep.nabla < tolerance
        && rep.phi < tolerance
        && rep.r_condition < tolerance;
    Ok(rep)
}
