//! The controlled first-order system, its cost functions and the optimal
//! Hamiltonians of the normal extremals.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::system::SystemSpec;
use crate::sampling::Sampler;
use crate::variational::{
    default_first_kind_parameters, default_second_kind_parameters, HamiltonianKind, HamiltonianModel, PhaseState,
};

/// Smallest admissible `|u1|`.
pub const MIN_BASE_CONTROL: f64 = 1e-6;
/// Sampled phase points with `|u1*|` below this are redrawn.
const SAMPLE_BASE_CONTROL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// Every non-base velocity is weighted and penalized through `C_a`.
    G1,
    /// `r2` is controlled directly; needs a constant measure density.
    G2,
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostKind::G1 => "g1",
            CostKind::G2 => "g2",
        })
    }
}

impl FromStr for CostKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g1" => Ok(CostKind::G1),
            "g2" => Ok(CostKind::G2),
            other => Err(Error::InvalidConfig(format!("unknown cost kind `{other}`"))),
        }
    }
}

impl CostKind {
    pub fn hamiltonian_kind(self) -> HamiltonianKind {
        match self {
            CostKind::G1 => HamiltonianKind::First,
            CostKind::G2 => HamiltonianKind::Second,
        }
    }
}

/// Controls `(u1, u_2, .., u_n)`, one per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlVector {
    pub u1: f64,
    pub u: Vec<f64>,
}

impl ControlVector {
    pub fn new(u1: f64, u: Vec<f64>) -> Self {
        ControlVector { u1, u }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.u1).chain(self.u.iter().copied()).collect()
    }

    pub fn from_slice(v: &[f64]) -> Self {
        ControlVector { u1: v[0], u: v[1..].to_vec() }
    }
}

/// A controlled system with its cost parameters.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    kind: CostKind,
    sys: SystemSpec,
    /// `C_a` (G1) or `a_alpha` (G2).
    params: Vec<f64>,
    hamiltonian: HamiltonianModel,
}

impl ControlProblem {
    /// Parameters shared with the Hamiltonian of the matching kind.
    pub fn new(sys: &SystemSpec, kind: CostKind, params: Vec<f64>) -> Result<Self> {
        let hamiltonian = match kind {
            CostKind::G1 => HamiltonianModel::first(sys, params.clone())?,
            CostKind::G2 => HamiltonianModel::second(sys, params.clone())?,
        };
        Ok(ControlProblem { kind, sys: sys.clone(), params, hamiltonian })
    }

    pub fn with_defaults(sys: &SystemSpec, kind: CostKind) -> Result<Self> {
        let params = match kind {
            CostKind::G1 => default_first_kind_parameters(sys),
            CostKind::G2 => default_second_kind_parameters(sys)?,
        };
        ControlProblem::new(sys, kind, params)
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn system(&self) -> &SystemSpec {
        &self.sys
    }

    pub fn hamiltonian(&self) -> &HamiltonianModel {
        &self.hamiltonian
    }

    /// First coordinate whose control is weighted.
    fn offset(&self) -> usize {
        match self.kind {
            CostKind::G1 => 1,
            CostKind::G2 => 2,
        }
    }

    /// Signed factors `exp(xi_a)` multiplying each non-base control.
    pub fn control_weights(&self, r1: f64) -> Result<Vec<f64>> {
        let w = self.sys.coefficients_at(r1)?.weights();
        Ok(match self.kind {
            CostKind::G1 => w,
            CostKind::G2 => std::iter::once(1.0).chain(w[1..].iter().copied()).collect(),
        })
    }

    fn check_controls(&self, u: &ControlVector) -> Result<()> {
        let n = self.sys.dim();
        if u.u.len() + 1 != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.u.len() + 1 });
        }
        Ok(())
    }

    /// `r1' = u1`, `q_a' = u_a exp(xi_a(r1))`.
    pub fn controlled_rhs(&self, q: &[f64], u: &ControlVector) -> Result<Vec<f64>> {
        self.check_controls(u)?;
        if q.len() != self.sys.dim() {
            return Err(Error::DimensionMismatch { expected: self.sys.dim(), got: q.len() });
        }
        let w = self.control_weights(q[0])?;
        Ok(std::iter::once(u.u1).chain(u.u.iter().zip(&w).map(|(u, w)| u * w)).collect())
    }

    /// Instantaneous cost `G1` or `G2`.
    pub fn cost(&self, q: &[f64], u: &ControlVector) -> Result<f64> {
        self.check_controls(u)?;
        if u.u1.abs() < MIN_BASE_CONTROL {
            return Err(Error::DegenerateControl(u.u1.abs()));
        }
        let w = self.control_weights(q[0])?;
        let mut g = self.sys.i1() * u.u1 * u.u1;
        if self.kind == CostKind::G2 {
            g += self.sys.i2() * u.u[0] * u.u[0];
        }
        let first = self.offset();
        for (j, c) in self.params.iter().enumerate() {
            let a = first + j - 1;
            g += c * w[a] * u.u[a] * u.u[a] / u.u1;
        }
        Ok(0.5 * g)
    }

    /// `H^P = p . f(q, u) - G(q, u)` with the normal multiplier.
    pub fn pontryagin_hamiltonian(&self, ps: &PhaseState, u: &ControlVector) -> Result<f64> {
        let f = self.controlled_rhs(&ps.q, u)?;
        let pf: f64 = ps.p.iter().zip(&f).map(|(p, f)| p * f).sum();
        Ok(pf - self.cost(&ps.q, u)?)
    }

    /// Stationary point of `H^P` in `u`.
    pub fn optimal_controls(&self, ps: &PhaseState) -> Result<ControlVector> {
        let n = self.sys.dim();
        if ps.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ps.dim() });
        }
        let u1 = self.hamiltonian.base_velocity(ps)?;
        if u1.abs() < MIN_BASE_CONTROL {
            return Err(Error::DegenerateControl(u1.abs()));
        }
        let mut u = vec![0.0; n - 1];
        if self.kind == CostKind::G2 {
            u[0] = ps.p[1] / self.sys.i2();
        }
        let first = self.offset();
        for (j, c) in self.params.iter().enumerate() {
            let b = first + j;
            u[b - 1] = u1 * ps.p[b] / c;
        }
        Ok(ControlVector { u1, u })
    }

    /// `H^P` at the optimal controls.
    pub fn optimal_hamiltonian_value(&self, ps: &PhaseState) -> Result<f64> {
        let u = self.optimal_controls(ps)?;
        self.pontryagin_hamiltonian(ps, &u)
    }

    /// Largest entry of the central-difference gradient of `H^P` in `u`.
    pub fn stationarity_residual(&self, ps: &PhaseState, u: &ControlVector) -> Result<f64> {
        let base = u.to_vec();
        let mut worst = 0.0f64;
        for i in 0..base.len() {
            // The cost has a pole at u1 = 0, so the u1 step shrinks with |u1|.
            let mut h = 1e-5 * (1.0 + base[i].abs());
            if i == 0 {
                h = h.min(1e-3 * base[0].abs());
            }
            let at = |d: f64| {
                let mut v = base.clone();
                v[i] += d;
                self.pontryagin_hamiltonian(ps, &ControlVector::from_slice(&v))
            };
            let d = (8.0 * (at(h)? - at(-h)?) - (at(2.0 * h)? - at(-2.0 * h)?)) / (12.0 * h);
            worst = worst.max(d.abs());
        }
        Ok(worst)
    }

    /// Random phase point with admissible coefficients and `|u1*|` bounded
    /// away from zero.
    pub fn sample_phase_point(&self, sampler: &mut Sampler) -> Result<PhaseState> {
        loop {
            let r1 = sampler.base_point(&self.sys)?;
            let mut q = vec![r1];
            q.extend((1..self.sys.dim()).map(|_| sampler.coordinate()));
            let p: Vec<f64> = (0..self.sys.dim()).map(|_| sampler.velocity()).collect();
            let ps = PhaseState::new(q, p)?;
            if self.hamiltonian.base_velocity(&ps)?.abs() >= SAMPLE_BASE_CONTROL {
                return Ok(ps);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PontryaginReport {
    pub kind: CostKind,
    pub samples: usize,
    pub seed: u64,
    /// `max |H* - H|` against the closed-form Hamiltonian.
    pub max_deviation: f64,
    /// Largest finite-difference gradient entry of `H^P` at `u*`.
    pub max_stationarity: f64,
    pub tolerance: f64,
    pub stationarity_tolerance: f64,
    pub passed: bool,
}

pub const CONSISTENCY_TOL: f64 = 1e-10;
pub const STATIONARITY_TOL: f64 = 1e-8;

/// Compares the optimal Hamiltonian with the closed-form one at seeded
/// random phase points.
pub fn pontryagin_check(problem: &ControlProblem, samples: usize, seed: u64) -> Result<PontryaginReport> {
    let mut sampler = Sampler::new(seed);
    let mut rep = PontryaginReport {
        kind: problem.kind,
        samples,
        seed,
        max_deviation: 0.0,
        max_stationarity: 0.0,
        tolerance: CONSISTENCY_TOL,
        stationarity_tolerance: STATIONARITY_TOL,
        passed: true,
    };
    for _ in 0..samples {
        let ps = problem.sample_phase_point(&mut sampler)?;
        let u = problem.optimal_controls(&ps)?;
        let h_star = problem.pontryagin_hamiltonian(&ps, &u)?;
        let h = problem.hamiltonian.hamiltonian_value(&ps)?;
        rep.max_deviation = rep.max_deviation.max((h_star - h).abs());
        rep.max_stationarity = rep.max_stationarity.max(problem.stationarity_residual(&ps, &u)?);
    }
    rep.passed = rep.max_deviation < rep.tolerance && rep.max_stationarity < rep.stationarity_tolerance;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::system::{builtin_system, BuiltinParams, BUILTIN_NAMES};

    fn sys(name: &str) -> SystemSpec {
        builtin_system(name, &BuiltinParams::default()).unwrap()
    }

    fn ps(q: &[f64], p: &[f64]) -> PhaseState {
        PhaseState::new(q.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn free_particle_examples() {
        let pr = ControlProblem::with_defaults(&sys("free_particle"), CostKind::G1).unwrap();
        let u = ControlVector::new(1.0, vec![1.0, 0.0]);
        assert_eq!(pr.cost(&[0.0; 3], &u).unwrap(), 1.0);
        let x = ps(&[0.0; 3], &[1.0, 0.0, 0.0]);
        assert_eq!(pr.optimal_controls(&x).unwrap(), ControlVector::new(1.0, vec![0.0, 0.0]));
        assert_eq!(pr.optimal_hamiltonian_value(&x).unwrap(), 0.5);
        let still = ControlVector::new(0.0, vec![0.0, 0.0]);
        assert!(pr.controlled_rhs(&[0.3, 1.0, 2.0], &still).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cost_without_fiber_controls_is_kinetic() {
        for name in BUILTIN_NAMES {
            let pr = ControlProblem::with_defaults(&sys(name), CostKind::G1).unwrap();
            let n = pr.system().dim();
            let u = ControlVector::new(1.7, vec![0.0; n - 1]);
            assert!((pr.cost(&vec![0.4; n], &u).unwrap() - 0.5 * pr.system().i1() * 1.7 * 1.7).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_momenta_give_pure_base_motion() {
        let pr = ControlProblem::with_defaults(&sys("knife_edge"), CostKind::G1).unwrap();
        let u = pr.optimal_controls(&ps(&[0.2, 0.0, 0.0], &[2.0, 0.0, 0.0])).unwrap();
        assert_eq!(u, ControlVector::new(2.0 / pr.system().i1(), vec![0.0, 0.0]));
    }

    #[test]
    fn degenerate_controls() {
        let pr = ControlProblem::with_defaults(&sys("free_particle"), CostKind::G1).unwrap();
        assert!(matches!(pr.optimal_controls(&ps(&[0.0; 3], &[0.0; 3])), Err(Error::DegenerateControl(_))));
        assert!(matches!(
            pr.cost(&[0.0; 3], &ControlVector::new(0.0, vec![1.0, 1.0])),
            Err(Error::DegenerateControl(_))
        ));
    }

    #[test]
    fn g2_requires_constant_measure() {
        assert_eq!(
            ControlProblem::with_defaults(&sys("knife_edge"), CostKind::G2).unwrap_err(),
            Error::NonConstantMeasure
        );
    }

    #[test]
    fn disk_g2_cost_display() {
        let pr = ControlProblem::with_defaults(&sys("vertical_disk"), CostKind::G2).unwrap();
        let (phi, u) = (0.7f64, ControlVector::new(1.3, vec![0.4, -0.8, 1.1]));
        let a = -0.5f64.sqrt();
        let n = 0.5f64.sqrt();
        let w = [n * -phi.cos(), n * -phi.sin()];
        let expected = 0.5 * (1.3 * 1.3 + 0.4 * 0.4 + (a * w[0] * 0.64 + a * w[1] * 1.21) / 1.3);
        assert!((pr.cost(&[phi, 0.0, 0.0, 0.0], &u).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn consistency_on_all_systems() {
        for name in BUILTIN_NAMES {
            for kind in [CostKind::G1, CostKind::G2] {
                let Ok(pr) = ControlProblem::with_defaults(&sys(name), kind) else { continue };
                let rep = pontryagin_check(&pr, 200, 1).unwrap();
                assert!(rep.passed, "{name} {kind}: {rep:?}");
            }
        }
    }
}
