//! Finite-difference tensors for an arbitrary right-hand side.
//!
//! Works for any `f(q, q')`, including systems outside the class. All
//! derivatives use the fourth-order central stencil; nested derivatives reuse
//! the same step, so deeper tensors need larger steps (about `1e-3`).

use nalgebra::DMatrix;

use crate::error::Result;
use crate::model::system::Jet;

/// Step for a single derivative level.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Step for tensors that nest two or three derivatives.
pub const NESTED_STEP: f64 = 1e-3;

pub type Rhs<'a> = &'a dyn Fn(&Jet) -> Result<Vec<f64>>;
type MatrixField<'a> = &'a dyn Fn(&Jet) -> Result<DMatrix<f64>>;

fn stencil<T, F>(h: f64, mut eval: F) -> Result<T>
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    F: FnMut(f64) -> Result<T>,
{
    let (p2, p1, m1, m2) = (eval(2.0 * h)?, eval(h)?, eval(-h)?, eval(-2.0 * h)?);
    Ok(((p1 - m1) * 8.0 + (m2 - p2)) * (1.0 / (12.0 * h)))
}

fn shifted(jet: &Jet, dq: &[f64], dv: &[f64], eps: f64) -> Jet {
    Jet {
        q: jet.q.iter().zip(dq).map(|(x, d)| x + eps * d).collect(),
        qdot: jet.qdot.iter().zip(dv).map(|(x, d)| x + eps * d).collect(),
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn vec_to_col(v: Vec<f64>) -> DMatrix<f64> {
    DMatrix::from_vec(v.len(), 1, v)
}

/// `df^i / dv^j` (`velocity = true`) or `df^i / dq^j`.
pub fn jacobian(rhs: Rhs, jet: &Jet, h: f64, velocity: bool) -> Result<DMatrix<f64>> {
    let n = jet.dim();
    let zero = vec![0.0; n];
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let e = unit(n, j);
        let base = if velocity { jet.qdot[j] } else { jet.q[j] };
        let hj = h * (1.0 + base.abs());
        let (dq, dv) = if velocity { (&zero, &e) } else { (&e, &zero) };
        let col = stencil(hj, |eps| rhs(&shifted(jet, dq, dv, eps)).map(vec_to_col))?;
        out.set_column(j, &col.column(0));
    }
    Ok(out)
}

/// Derivative of a matrix field along the second-order field through `jet`.
pub fn along_field(rhs: Rhs, m: MatrixField, jet: &Jet, h: f64) -> Result<DMatrix<f64>> {
    let f = rhs(jet)?;
    let scale = 1.0 + jet.qdot.iter().chain(&f).fold(0.0f64, |a, v| a.max(v.abs()));
    stencil(h / scale, |eps| m(&shifted(jet, &jet.qdot, &f, eps)))
}

pub fn nabla(rhs: Rhs, jet: &Jet, h: f64) -> Result<DMatrix<f64>> {
    Ok(jacobian(rhs, jet, h, true)? * -0.5)
}

pub fn phi(rhs: Rhs, jet: &Jet, h: f64) -> Result<DMatrix<f64>> {
    let j = jacobian(rhs, jet, h, true)?;
    let jac = |x: &Jet| jacobian(rhs, x, h, true);
    let gj = along_field(rhs, &jac, jet, h)?;
    let dq = jacobian(rhs, jet, h, false)?;
    Ok(gj - dq * 2.0 - (&j * &j) * 0.5)
}

/// Richardson combination `(16 T(h/2) - T(h)) / 15` of a fourth-order
/// approximation `T`.
pub fn richardson<F>(h: f64, mut approx: F) -> Result<DMatrix<f64>>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    let coarse = approx(h)?;
    let fine = approx(0.5 * h)?;
    Ok((fine * 16.0 - coarse) / 15.0)
}

/// `nabla phi`, one level of the covariant derivative.
pub fn nabla_phi(rhs: Rhs, jet: &Jet, h: f64) -> Result<DMatrix<f64>> {
    let phi_at = |x: &Jet| phi(rhs, x, h);
    let gp = along_field(rhs, &phi_at, jet, h)?;
    let nab = nabla(rhs, jet, h)?;
    let p = phi(rhs, jet, h)?;
    Ok(gp - &nab * &p - &p * &nab)
}

/// `R[j]` over `(k, l)`, from velocity derivatives of `phi`.
pub fn r_tensor(rhs: Rhs, jet: &Jet, h: f64) -> Result<Vec<DMatrix<f64>>> {
    let n = jet.dim();
    let zero = vec![0.0; n];
    // dphi[l] = d phi / dv_l
    let mut dphi = Vec::with_capacity(n);
    for l in 0..n {
        let e = unit(n, l);
        let hl = h * (1.0 + jet.qdot[l].abs());
        dphi.push(stencil(hl, |eps| phi(rhs, &shifted(jet, &zero, &e, eps), h))?);
    }
    Ok((0..n).map(|j| DMatrix::from_fn(n, n, |k, l| dphi[l][(j, k)] - dphi[k][(j, l)])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_of_a_quadratic_field() {
        // f = (v0 v1, q0 v0^2)
        let rhs = |j: &Jet| Ok(vec![j.qdot[0] * j.qdot[1], j.q[0] * j.qdot[0].powi(2)]);
        let jet = Jet::new(vec![0.5, 0.0], vec![1.5, -2.0]).unwrap();
        let jv = jacobian(&rhs, &jet, DEFAULT_STEP, true).unwrap();
        assert!((jv[(0, 0)] + 2.0).abs() < 1e-9);
        assert!((jv[(0, 1)] - 1.5).abs() < 1e-9);
        assert!((jv[(1, 0)] - 1.5).abs() < 1e-9);
        let jq = jacobian(&rhs, &jet, DEFAULT_STEP, false).unwrap();
        assert!((jq[(1, 0)] - 2.25).abs() < 1e-9);
    }

    #[test]
    fn free_field_has_zero_phi() {
        let rhs = |j: &Jet| Ok(vec![0.0; j.dim()]);
        let jet = Jet::new(vec![0.5, 0.0], vec![1.5, -2.0]).unwrap();
        assert_eq!(phi(&rhs, &jet, NESTED_STEP).unwrap(), DMatrix::zeros(2, 2));
    }
}
