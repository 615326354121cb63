//! Exact tensors of a second-order system, built on velocity polynomials.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::system::Jet;
use crate::sode::{along_field, eval_matrix, PolyMatrix, SodeSystem, VPoly};

/// The right-hand side, its connection `nabla = -1/2 df/dv` and the Jacobi
/// endomorphism `phi`, as polynomials at one base point.
#[derive(Debug, Clone)]
pub struct PolyTensors {
    pub f: Vec<VPoly>,
    pub nabla: PolyMatrix,
    pub phi: PolyMatrix,
}

fn zeros(n: usize) -> PolyMatrix {
    vec![vec![VPoly::zero(n); n]; n]
}

impl PolyTensors {
    /// Expands the system at `r1` with enough series order for `iterates`
    /// applications of the dynamical covariant derivative to `phi`.
    pub fn new(sode: &SodeSystem, r1: f64, iterates: usize) -> Result<Self> {
        let f = sode.polynomials(r1, iterates + 2)?;
        Ok(PolyTensors::from_rhs(f))
    }

    pub fn from_rhs(f: Vec<VPoly>) -> Self {
        let n = f.len();
        let jac: PolyMatrix = (0..n).map(|k| (0..n).map(|j| f[k].dv(j)).collect()).collect();
        let nabla = jac.iter().map(|row| row.iter().map(|p| p.scale(-0.5)).collect()).collect();
        let mut phi = zeros(n);
        for k in 0..n {
            for j in 0..n {
                let mut p = along_field(&f, &jac[k][j]);
                if j == 0 {
                    p = &p - &f[k].dr1().scale(2.0);
                }
                for l in 0..n {
                    if !jac[l][j].is_zero() && !jac[k][l].is_zero() {
                        p = &p - &(&jac[l][j] * &jac[k][l]).scale(0.5);
                    }
                }
                phi[k][j] = p;
            }
        }
        PolyTensors { f, nabla, phi }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    /// `Gamma(psi) - nabla psi - psi nabla`.
    pub fn covariant_derivative(&self, psi: &PolyMatrix) -> PolyMatrix {
        let n = self.dim();
        let mut out = zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut p = along_field(&self.f, &psi[i][j]);
                for m in 0..n {
                    if !self.nabla[i][m].is_zero() && !psi[m][j].is_zero() {
                        p = &p - &(&self.nabla[i][m] * &psi[m][j]);
                    }
                    if !self.nabla[m][j].is_zero() && !psi[i][m].is_zero() {
                        p = &p - &(&self.nabla[m][j] * &psi[i][m]);
                    }
                }
                out[i][j] = p;
            }
        }
        out
    }

    /// `[phi, nabla phi, .., nabla^(count-1) phi]`.
    pub fn iterates(&self, count: usize) -> Vec<PolyMatrix> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(self.phi.clone());
        for _ in 1..count {
            let next = self.covariant_derivative(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// `R[j][k][l] = d phi^j_k / dv_l - d phi^j_l / dv_k`.
    pub fn curvature(&self) -> Vec<PolyMatrix> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|k| (0..n).map(|l| &self.phi[j][k].dv(l) - &self.phi[j][l].dv(k)).collect()).collect())
            .collect()
    }
}

fn checked(sode: &SodeSystem, jet: &Jet) -> Result<()> {
    if jet.dim() != sode.dim() {
        return Err(Error::DimensionMismatch { expected: sode.dim(), got: jet.dim() });
    }
    Ok(())
}

/// `nabla^i_j = -1/2 df^i / dv^j`.
pub fn nabla(sode: &SodeSystem, jet: &Jet) -> Result<DMatrix<f64>> {
    checked(sode, jet)?;
    Ok(eval_matrix(&PolyTensors::new(sode, jet.r1(), 0)?.nabla, &jet.qdot))
}

/// Jacobi endomorphism.
pub fn phi(sode: &SodeSystem, jet: &Jet) -> Result<DMatrix<f64>> {
    checked(sode, jet)?;
    Ok(eval_matrix(&PolyTensors::new(sode, jet.r1(), 0)?.phi, &jet.qdot))
}

/// The dynamical covariant derivative applied `order` times to `phi`.
pub fn nabla_phi(sode: &SodeSystem, jet: &Jet, order: usize) -> Result<DMatrix<f64>> {
    checked(sode, jet)?;
    let t = PolyTensors::new(sode, jet.r1(), order)?;
    Ok(eval_matrix(t.iterates(order + 1).last().unwrap(), &jet.qdot))
}

/// `R[j]` is the matrix over `(k, l)`.
pub fn r_tensor(sode: &SodeSystem, jet: &Jet) -> Result<Vec<DMatrix<f64>>> {
    checked(sode, jet)?;
    let t = PolyTensors::new(sode, jet.r1(), 0)?;
    Ok(t.curvature().iter().map(|m| eval_matrix(m, &jet.qdot)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::system::{builtin_system, BuiltinParams, SystemSpec};
    use crate::sode::{first_associated, free_sode, second_associated};

    fn sys(name: &str) -> SystemSpec {
        builtin_system(name, &BuiltinParams::default()).unwrap()
    }

    #[test]
    fn free_system_has_vanishing_tensors() {
        let s = free_sode(3);
        let jet = Jet::new(vec![0.2, 0.0, 1.0], vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(nabla(&s, &jet).unwrap(), DMatrix::zeros(3, 3));
        assert_eq!(phi(&s, &jet).unwrap(), DMatrix::zeros(3, 3));
        assert_eq!(nabla_phi(&s, &jet, 3).unwrap(), DMatrix::zeros(3, 3));
        assert!(r_tensor(&s, &jet).unwrap().iter().all(|m| m.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn free_particle_first_kind_nabla() {
        let s = first_associated(&sys("free_particle"));
        let jet = Jet::new(vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]).unwrap();
        assert!((nabla(&s, &jet).unwrap()[(1, 1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn second_kind_nabla_structure() {
        let s = second_associated(&sys("vertical_disk"));
        let jet = Jet::new(vec![0.4, 0.0, 0.0, 0.0], vec![1.3, 0.7, -0.5, 0.9]).unwrap();
        let xi = s.rates(0.4).unwrap();
        let m = nabla(&s, &jet).unwrap();
        for a in 1..4 {
            assert!((m[(a, a)] + 0.5 * xi[a - 1] * 1.3).abs() < 1e-15);
            assert!((m[(a, 0)] + 0.5 * xi[a - 1] * jet.qdot[a]).abs() < 1e-15);
        }
        assert_eq!(m[(2, 3)], 0.0);
        assert_eq!(m.row(0).iter().filter(|v| **v != 0.0).count(), 0);
    }

    #[test]
    fn disk_first_kind_base_row_vanishes() {
        let s = first_associated(&sys("vertical_disk"));
        let jet = Jet::new(vec![0.4, 0.0, 0.0, 0.0], vec![1.3, 0.7, -0.5, 0.9]).unwrap();
        for order in 0..3 {
            let m = nabla_phi(&s, &jet, order).unwrap();
            assert!(m[(1, 0)].abs() < 1e-15 && m[(1, 1)].abs() < 1e-15);
        }
    }
}
