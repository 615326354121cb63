//! Trajectories of every formulation on a shared time grid.

use thiserror::Error;

use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegrationFailure, IntegratorConfig};
use crate::model::disk::{disk_closed_form, DiskInitial};
use crate::model::system::{BuiltinParams, Jet, SystemSpec};
use crate::model::trajectory::{Provenance, Trajectory};
use crate::pontryagin::ControlProblem;
use crate::sode::SodeSystem;
use crate::variational::{HamiltonianModel, LagrangianModel, PhaseState};

/// Constraint residual above which initial data counts as off the
/// constraint distribution, relative to `1 + |r2_dot|`.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// A flow that was rejected before starting, or that stopped mid-run.
#[derive(Debug, Clone, Error)]
pub enum FlowError {
    #[error(transparent)]
    Setup(#[from] Error),
    #[error(transparent)]
    Integration(#[from] IntegrationFailure),
}

impl From<FlowError> for Error {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Setup(e) => e,
            FlowError::Integration(f) => f.error,
        }
    }
}

pub type FlowResult<T> = std::result::Result<T, FlowError>;

fn check_on_constraints(sys: &SystemSpec, jet: &Jet) -> Result<()> {
    let r = sys.constraint_residual(jet)?;
    let scale = 1.0 + jet.qdot[1].abs();
    if let Some(v) = r.iter().find(|v| v.abs() > CONSTRAINT_TOL * scale) {
        return Err(Error::InvalidParameters(format!(
            "initial jet violates the velocity constraints (residual {v:e})"
        )));
    }
    Ok(())
}

fn split(y: &[f64]) -> Jet {
    let n = y.len() / 2;
    Jet { q: y[..n].to_vec(), qdot: y[n..].to_vec() }
}

fn flat(jet: &Jet) -> Vec<f64> {
    jet.q.iter().chain(&jet.qdot).copied().collect()
}

/// The constrained motion from a jet on the constraint distribution.
pub fn nonholonomic_flow(sys: &SystemSpec, jet0: &Jet, cfg: &IntegratorConfig) -> FlowResult<Trajectory<Jet>> {
    check_on_constraints(sys, jet0)?;
    let y0 = sys.reduced_from_jet(jet0);
    sys.nonholonomic_field(&y0)?;
    let raw = integrate(|_, y| sys.nonholonomic_field(y), y0, cfg, Provenance::Nonholonomic)?;
    Ok(raw.try_map(Provenance::Nonholonomic, |y| sys.jet_from_reduced(y))?)
}

/// Solution of a second-order system from any jet.
pub fn sode_flow(sode: &SodeSystem, jet0: &Jet, cfg: &IntegratorConfig) -> FlowResult<Trajectory<Jet>> {
    sode.rhs(jet0)?;
    let raw = integrate(|_, y| sode.field(y), flat(jet0), cfg, Provenance::AssociatedSystem)?;
    Ok(raw.map(|y| split(y)))
}

pub fn euler_lagrange_flow(l: &LagrangianModel, jet0: &Jet, cfg: &IntegratorConfig) -> FlowResult<Trajectory<Jet>> {
    l.euler_lagrange_rhs(jet0)?;
    let raw = integrate(|_, y| l.euler_lagrange_field(y), flat(jet0), cfg, Provenance::EulerLagrange)?;
    Ok(raw.map(|y| split(y)))
}

pub fn hamiltonian_flow(
    h: &HamiltonianModel,
    ps0: &PhaseState,
    cfg: &IntegratorConfig,
) -> FlowResult<Trajectory<PhaseState>> {
    h.hamilton_rhs(ps0)?;
    let raw = integrate(|_, y| h.hamilton_field(y), ps0.to_vec(), cfg, Provenance::Hamiltonian)?;
    Ok(raw.try_map(Provenance::Hamiltonian, |y| PhaseState::from_slice(y))?)
}

/// The exact disk motion sampled on the grid of `cfg`.
pub fn disk_closed_form_flow(
    params: &BuiltinParams,
    ic: &DiskInitial,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<Jet>> {
    cfg.validate()?;
    let times = cfg.grid();
    let states = times.iter().map(|&t| disk_closed_form(params, ic, t - cfg.t0)).collect();
    Trajectory::new(times, states, Provenance::ClosedForm)
}

/// Disk initial data of a jet on the constraint distribution.
pub fn disk_initial_from_jet(jet: &Jet) -> DiskInitial {
    DiskInitial {
        phi0: jet.q[0],
        theta0: jet.q[1],
        x0: jet.q[2],
        y0: jet.q[3],
        u_phi: jet.qdot[0],
        u_theta: jet.qdot[1],
    }
}

/// A canonical flow of the optimal Hamiltonian together with the controlled
/// system driven by the optimal controls evaluated along it.
#[derive(Debug, Clone)]
pub struct ControlledRun {
    pub hamiltonian: Trajectory<PhaseState>,
    pub controlled: Trajectory<Vec<f64>>,
}

pub fn controlled_flow(
    problem: &ControlProblem,
    ps0: &PhaseState,
    cfg: &IntegratorConfig,
) -> FlowResult<ControlledRun> {
    let h = problem.hamiltonian();
    let n = ps0.dim();
    problem.optimal_controls(ps0)?;
    let mut y0 = ps0.to_vec();
    y0.extend_from_slice(&ps0.q);
    let raw = integrate(
        |_, y| {
            let ps = PhaseState::from_slice(&y[..2 * n])?;
            let u = problem.optimal_controls(&ps)?;
            let mut out = h.hamilton_rhs(&ps)?;
            out.extend(problem.controlled_rhs(&y[2 * n..], &u)?);
            Ok(out)
        },
        y0,
        cfg,
        Provenance::Controlled,
    )?;
    let hamiltonian = raw.try_map(Provenance::Hamiltonian, |y| PhaseState::from_slice(&y[..2 * n]))?;
    let controlled = raw.map(|y| y[2 * n..].to_vec());
    Ok(ControlledRun { hamiltonian, controlled })
}

/// `max_t |H(t) - H(0)| / |H(0)|` (absolute when `H(0) = 0`).
pub fn energy_drift(h: &HamiltonianModel, traj: &Trajectory<PhaseState>) -> Result<f64> {
    let e0 = h.hamiltonian_value(&traj.states()[0])?;
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    let mut worst = 0.0f64;
    for s in traj.states() {
        worst = worst.max((h.hamiltonian_value(s)? - e0).abs() / scale);
    }
    Ok(worst)
}

/// `max_t max_alpha |c_alpha(t) - c_alpha(0)|` of the phase constraint
/// residuals.
pub fn constraint_drift(h: &HamiltonianModel, traj: &Trajectory<PhaseState>) -> Result<f64> {
    let r0 = h.phase_constraint_residual(&traj.states()[0])?;
    let mut worst = 0.0f64;
    for s in traj.states() {
        for (r, r0) in h.phase_constraint_residual(s)?.iter().zip(&r0) {
            worst = worst.max((r - r0).abs());
        }
    }
    Ok(worst)
}

/// Largest velocity-constraint residual along a jet trajectory.
pub fn velocity_constraint_violation(sys: &SystemSpec, traj: &Trajectory<Jet>) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in traj.states() {
        for r in sys.constraint_residual(s)? {
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}
