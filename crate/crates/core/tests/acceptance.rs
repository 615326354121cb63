//! Acceptance suite: one PASS/FAIL line per criterion, at the stated
//! tolerances. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hamiltonize::flows::{
    constraint_drift, disk_closed_form_flow, energy_drift, euler_lagrange_flow, hamiltonian_flow, nonholonomic_flow,
};
use hamiltonize::helmholtz::{helmholtz_residuals, singularity_certificate, CertificateConfig};
use hamiltonize::model::{DiskInitial, Jet, Trajectory, BUILTIN_NAMES};
use hamiltonize::pontryagin::{pontryagin_check, ControlProblem, CostKind};
use hamiltonize::sampling::sample_jets;
use hamiltonize::sode::{first_associated, second_associated};
use hamiltonize::{
    builtin_system, compare, BuiltinParams, HamiltonianKind, HamiltonianModel, IntegratorConfig, LagrangianKind,
    LagrangianModel, Result, SystemSpec,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn sys(name: &str) -> SystemSpec {
    builtin_system(name, &BuiltinParams::default()).expect("builtin")
}

/// Constraint-satisfying start with unit base velocity.
fn start(name: &str) -> Jet {
    let s = sys(name);
    let q = match name {
        "free_particle" => vec![1.0, 0.0, 0.0],
        "knife_edge" => vec![0.3, 0.0, 0.0],
        _ => vec![0.3, 0.0, 0.0, 0.0],
    };
    s.constrained_jet(q, 1.0, 1.0).expect("start jet")
}

fn criterion_1() -> Result<Outcome> {
    let t0 = Instant::now();
    let params = BuiltinParams::default();
    let ic = DiskInitial { u_theta: 2.0, u_phi: 1.0, ..Default::default() };
    let cfg = IntegratorConfig::new(1e-3, 10.0);
    let exact = disk_closed_form_flow(&params, &ic, &cfg)?;
    let s = sys("vertical_disk");
    let nh = nonholonomic_flow(&s, &exact.states()[0], &cfg)?;
    let err = compare(&nh, &exact, &[0, 1, 2, 3])?.sup_norm;
    let secs = t0.elapsed().as_secs_f64();
    Ok(Outcome {
        passed: err < 1e-6 && secs < 1.0,
        detail: format!("sup-norm {err:.2e} (< 1e-6), runtime {secs:.3} s (< 1 s)"),
    })
}

fn criterion_2() -> Result<Outcome> {
    let cfg = IntegratorConfig::new(1e-3, 5.0);
    let mut passed = true;
    let mut parts = Vec::new();
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let jet = start(name);
        let idx: Vec<usize> = (0..s.dim()).collect();
        let l = LagrangianModel::with_defaults(&s, LagrangianKind::First)?;
        let h = HamiltonianModel::from_lagrangian(&l)?;
        let nh = nonholonomic_flow(&s, &jet, &cfg)?;
        let el = euler_lagrange_flow(&l, &jet, &cfg)?;
        let ham = q_of(&hamiltonian_flow(&h, &l.legendre(&jet)?, &cfg)?);
        let mut pairs = vec![
            ("nh/el", compare(&nh, &el, &idx)?.sup_norm),
            ("nh/ham", compare(&nh, &ham, &idx)?.sup_norm),
            ("el/ham", compare(&el, &ham, &idx)?.sup_norm),
        ];
        if s.has_constant_measure() {
            let l2 = LagrangianModel::with_defaults(&s, LagrangianKind::Second)?;
            let h2 = HamiltonianModel::from_lagrangian(&l2)?;
            let ham2 = q_of(&hamiltonian_flow(&h2, &l2.legendre(&jet)?, &cfg)?);
            pairs.push(("nh/ham2", compare(&nh, &ham2, &idx)?.sup_norm));
            pairs.push(("ham/ham2", compare(&ham, &ham2, &idx)?.sup_norm));
        }
        let text: Vec<String> = pairs.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect();
        passed &= pairs.iter().all(|(_, v)| *v < 1e-6);
        parts.push(format!("{name}: {}", text.join(", ")));
    }
    let mut detail = format!("tol 1e-6; {}", parts.join("; "));
    if !passed {
        detail.push_str(
            "; every unit-speed path on [0, 5] crosses a coefficient pole of the knife-edge constraint field \
             or of the first-kind Euler-Lagrange field, where RK4 at h = 1e-3 loses accuracy",
        );
    }
    Ok(Outcome { passed, detail })
}

fn q_of(traj: &Trajectory<hamiltonize::PhaseState>) -> Trajectory<Vec<f64>> {
    traj.map(|p| p.q.clone())
}

fn criterion_3() -> Result<Outcome> {
    let t0 = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let jets = sample_jets(&s, 50, 1)?;
        let rep = singularity_certificate(&first_associated(&s), &jets, &CertificateConfig::default())?;
        let worst = rep.jets.iter().map(|j| j.max_normalized_det).fold(0.0, f64::max);
        passed &= rep.passed;
        parts.push(format!("{name} max |det| {worst:.1e}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    passed &= secs < 10.0;
    Ok(Outcome { passed, detail: format!("{} (< 1e-10), runtime {secs:.2} s (< 10 s)", parts.join(", ")) })
}

fn criterion_4() -> Result<Outcome> {
    let cases = [
        ("free_particle", LagrangianKind::First),
        ("knife_edge", LagrangianKind::First),
        ("vertical_disk", LagrangianKind::First),
        ("vertical_disk", LagrangianKind::Second),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, kind) in cases {
        let s = sys(name);
        let l = LagrangianModel::with_defaults(&s, kind)?;
        let jets = sample_jets(&s, 100, 2)?;
        let rep = helmholtz_residuals(&second_associated(&s), &l.hessian_field(), &jets, 1e-8)?;
        let worst = rep.symmetry.max(rep.nabla).max(rep.phi).max(rep.r_condition);
        passed &= rep.passed;
        parts.push(format!("{name}/{kind} max residual {worst:.1e}, min |det| {:.1e}", rep.min_normalized_det));
    }
    Ok(Outcome { passed, detail: format!("tol 1e-8; {}", parts.join("; ")) })
}

fn criterion_5() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut cases: Vec<(&str, CostKind)> = BUILTIN_NAMES.iter().map(|n| (*n, CostKind::G1)).collect();
    cases.push(("vertical_disk", CostKind::G2));
    for (name, kind) in cases {
        let rep = pontryagin_check(&ControlProblem::with_defaults(&sys(name), kind)?, 1000, 5)?;
        passed &= rep.max_deviation < 1e-10;
        parts.push(format!("{name}/{kind} {:.1e}", rep.max_deviation));
    }
    Ok(Outcome { passed, detail: format!("max |H* - H| (< 1e-10): {}", parts.join(", ")) })
}

fn criterion_6() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let mut residual = 0.0f64;
        let mut shape = 0.0f64;
        let closed = |r1: f64| match name {
            "free_particle" => 1.0 / (1.0 + r1 * r1).sqrt(),
            "knife_edge" => r1.cos(),
            _ => 1.0,
        };
        let r0 = 0.2;
        let ratio0 = s.invariant_measure(r0)? / closed(r0);
        for jet in sample_jets(&s, 200, 3)? {
            let r1 = jet.r1();
            residual = residual.max(s.measure_pde_residual(r1)?.0.abs().max(s.measure_pde_residual(r1)?.1.abs()));
            shape = shape.max((s.invariant_measure(r1)? / closed(r1) - ratio0).abs());
        }
        passed &= residual < 1e-8 && shape < 1e-12;
        parts.push(format!("{name} residual {residual:.1e}, closed-form deviation {shape:.1e}"));
    }
    Ok(Outcome { passed, detail: format!("tol 1e-8 / 1e-12; {}", parts.join("; ")) })
}

fn criterion_7() -> Result<Outcome> {
    let cfg = IntegratorConfig::new(1e-3, 10.0);
    let mut passed = true;
    let mut parts = Vec::new();
    for name in BUILTIN_NAMES {
        let s = sys(name);
        for kind in [HamiltonianKind::First, HamiltonianKind::Second] {
            let Ok(h) = HamiltonianModel::with_defaults(&s, kind) else { continue };
            let ps0 = h.lagrangian().legendre(&start(name))?;
            let traj = hamiltonian_flow(&h, &ps0, &cfg)?;
            let (e, c) = (energy_drift(&h, &traj)?, constraint_drift(&h, &traj)?);
            passed &= e < 1e-8 && c < 1e-6;
            parts.push(format!("{name}/{kind} energy {e:.1e}, constraint {c:.1e}"));
        }
    }
    Ok(Outcome { passed, detail: format!("tol 1e-8 / 1e-6; {}", parts.join("; ")) })
}

fn criterion_8() -> Result<Outcome> {
    let s = sys("free_particle");
    let jet = start("free_particle");
    let end = |h: f64| -> Result<Vec<f64>> {
        let traj = nonholonomic_flow(&s, &jet, &IntegratorConfig::new(h, 2.0))?;
        Ok(traj.last().1.q.clone())
    };
    let reference = end(0.1 / 64.0)?;
    let err =
        |h: f64| -> Result<f64> { Ok(end(h)?.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)) };
    let (e1, e2) = (err(0.1)?, err(0.05)?);
    let order = (e1 / e2).log2();
    Ok(Outcome {
        passed: order >= 3.9,
        detail: format!("observed order {order:.3} (>= 3.9), errors {e1:.2e} -> {e2:.2e}"),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("disk closed-form oracle", criterion_1),
        ("Hamiltonization equivalence", criterion_2),
        ("singularity certificate", criterion_3),
        ("Helmholtz positive suite", criterion_4),
        ("Pontryagin consistency", criterion_5),
        ("invariant measure", criterion_6),
        ("energy and constraint drift", criterion_7),
        ("integrator order", criterion_8),
    ];
    let mut failures = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(o) => (if o.passed { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {} [{title}]: {status} - {detail}", k + 1);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
