use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hamiltonize::flows::{
    constraint_drift, disk_closed_form_flow, disk_initial_from_jet, energy_drift, euler_lagrange_flow,
    hamiltonian_flow, nonholonomic_flow, sode_flow, CONSTRAINT_TOL,
};
use hamiltonize::helmholtz::{helmholtz_residuals, singularity_certificate, CertificateConfig, HelmholtzReport};
use hamiltonize::model::Builtin;
use hamiltonize::pontryagin::{pontryagin_check as consistency_check, ControlProblem, CostKind};
use hamiltonize::sampling::{sample_jets, Sampler};
use hamiltonize::sode::{first_associated, second_associated};
use hamiltonize::{
    compare as compare_trajectories, HamiltonianModel, IntegratorConfig, Jet, LagrangianKind, LagrangianModel,
    PhaseState, SodeKind, SodeSystem, SystemSpec, Trajectory,
};
use serde_json::{json, Map, Value};

use crate::args::{
    CertifyArgs, CheckName, CompareArgs, CostArg, Formulation, HelmholtzArgs, MeasureArgs, ModelArgs, MultiplierArg,
    PontryaginArgs, RunArgs, SimulateArgs, SodeArg,
};
use crate::setup::{
    build_lagrangian, hamiltonian_from, initial_jet, load_system, model_from_args, output_dir, write_json, CliError,
    CliResult, LoadedSystem, DEFAULT_R1,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn header(command: &str, sys: &LoadedSystem, seed: u64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("hamiltonize"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("system".into(), json!(sys.label));
    m.insert("seed".into(), json!(seed));
    m
}

fn emit(report: &Value, dir: Option<&Path>, file: &str) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(report)?);
    if let Some(dir) = dir {
        write_json(&dir.join(file), report)?;
    }
    Ok(())
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn sode_kind(arg: SodeArg) -> SodeKind {
    match arg {
        SodeArg::First => SodeKind::First,
        SodeArg::Second => SodeKind::Second,
        SodeArg::Third => SodeKind::Third,
    }
}

enum Energy {
    Kinetic(Vec<f64>),
    Lagrangian(LagrangianModel),
}

enum Run {
    Jets { traj: Trajectory<Jet>, energy: Energy },
    Phase { traj: Trajectory<PhaseState>, hamiltonian: HamiltonianModel },
}

struct RunMetrics {
    energy_drift: f64,
    constraint_drift: f64,
    constraint_violation: f64,
}

fn relative_drift(values: &[f64]) -> f64 {
    let e0 = values[0];
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    values.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
}

impl Run {
    fn configurations(&self) -> Trajectory<Vec<f64>> {
        match self {
            Run::Jets { traj, .. } => traj.map(|j| j.q.clone()),
            Run::Phase { traj, .. } => traj.map(|p| p.q.clone()),
        }
    }

    fn metrics(&self, sys: &SystemSpec) -> CliResult<RunMetrics> {
        match self {
            Run::Jets { traj, energy } => {
                let mut energies = Vec::with_capacity(traj.len());
                let mut residuals = Vec::with_capacity(traj.len());
                for jet in traj.states() {
                    energies.push(match energy {
                        Energy::Kinetic(inertias) => {
                            0.5 * inertias.iter().zip(&jet.qdot).map(|(i, v)| i * v * v).sum::<f64>()
                        }
                        Energy::Lagrangian(l) => l.energy(jet)?,
                    });
                    residuals.push(sys.constraint_residual(jet)?);
                }
                let (mut drift, mut violation) = (0.0f64, 0.0f64);
                for r in &residuals {
                    for (a, b) in r.iter().zip(&residuals[0]) {
                        drift = drift.max((a - b).abs());
                        violation = violation.max(a.abs());
                    }
                }
                Ok(RunMetrics {
                    energy_drift: relative_drift(&energies),
                    constraint_drift: drift,
                    constraint_violation: violation,
                })
            }
            Run::Phase { traj, hamiltonian } => {
                let mut violation = 0.0f64;
                for ps in traj.states() {
                    for r in hamiltonian.phase_constraint_residual(ps)? {
                        violation = violation.max(r.abs());
                    }
                }
                Ok(RunMetrics {
                    energy_drift: energy_drift(hamiltonian, traj)?,
                    constraint_drift: constraint_drift(hamiltonian, traj)?,
                    constraint_violation: violation,
                })
            }
        }
    }

    fn write_csv(&self, names: &[String], path: &Path) -> CliResult<()> {
        let w = BufWriter::new(File::create(path)?);
        match self {
            Run::Jets { traj, .. } => traj.write_csv(names, w)?,
            Run::Phase { traj, .. } => traj.write_csv(names, w)?,
        }
        Ok(())
    }
}

fn run_formulation(
    sys: &LoadedSystem,
    model: &ModelArgs,
    run: &RunArgs,
    jet0: &Jet,
    cfg: &IntegratorConfig,
    formulation: Formulation,
) -> CliResult<Run> {
    let spec = &sys.spec;
    let kinetic = || Energy::Kinetic(spec.inertias());
    Ok(match formulation {
        Formulation::Nonholonomic => Run::Jets { traj: nonholonomic_flow(spec, jet0, cfg)?, energy: kinetic() },
        Formulation::Sode => {
            let sode = SodeSystem::new(spec, sode_kind(run.sode));
            Run::Jets { traj: sode_flow(&sode, jet0, cfg)?, energy: kinetic() }
        }
        Formulation::Lagrangian => {
            let l = model_from_args(spec, model)?;
            Run::Jets { traj: euler_lagrange_flow(&l, jet0, cfg)?, energy: Energy::Lagrangian(l) }
        }
        Formulation::Hamiltonian => {
            let l = model_from_args(spec, model)?;
            let hamiltonian = hamiltonian_from(&l)?;
            let ps0 = l.legendre(jet0)?;
            Run::Phase { traj: hamiltonian_flow(&hamiltonian, &ps0, cfg)?, hamiltonian }
        }
        Formulation::ClosedForm => {
            if !matches!(spec.builtin(), Some(Builtin::VerticalDisk { .. })) {
                return Err(CliError::Config("the closed-form solution exists only for vertical_disk".into()));
            }
            let worst = spec.constraint_residual(jet0)?.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            if worst > CONSTRAINT_TOL * (1.0 + jet0.qdot[1].abs()) {
                return Err(CliError::Config(format!(
                    "closed-form solution needs initial data on the constraints (residual {worst:e})"
                )));
            }
            let traj = disk_closed_form_flow(&sys.params, &disk_initial_from_jet(jet0), cfg)?;
            Run::Jets { traj, energy: kinetic() }
        }
    })
}

fn integrator(run: &RunArgs) -> CliResult<IntegratorConfig> {
    let cfg = IntegratorConfig::new(run.h, run.t_end);
    cfg.validate()?;
    Ok(cfg)
}

fn describe(formulation: Formulation, model: &ModelArgs, run: &RunArgs) -> Value {
    match formulation {
        Formulation::Lagrangian | Formulation::Hamiltonian => json!(value_name(&model.model)),
        Formulation::Sode => json!(value_name(&run.sode)),
        _ => Value::Null,
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let sys = load_system(&args.system)?;
    let cfg = integrator(&args.run)?;
    let jet0 = initial_jet(&sys.spec, &args.run)?;
    let dir = output_dir(&args.system.out)?.unwrap_or_else(|| PathBuf::from("."));
    let name = value_name(&args.formulation);
    let run = run_formulation(&sys, &args.model, &args.run, &jet0, &cfg, args.formulation)?;
    let metrics = run.metrics(&sys.spec)?;
    let stem = format!("{}_{name}", sys.label);
    let csv = dir.join(format!("{stem}.csv"));
    run.write_csv(sys.spec.names(), &csv)?;

    let mut report = header("simulate", &sys, args.system.seed);
    report.insert("formulation".into(), json!(name));
    report.insert("variant".into(), describe(args.formulation, &args.model, &args.run));
    report.insert("h".into(), json!(cfg.effective_step()));
    report.insert("t_end".into(), json!(cfg.t1));
    report.insert("steps".into(), json!(cfg.steps()));
    report.insert("initial".into(), json!({ "q": jet0.q, "qdot": jet0.qdot }));
    report.insert("energy_drift".into(), json!(metrics.energy_drift));
    report.insert("constraint_drift".into(), json!(metrics.constraint_drift));
    report.insert("constraint_violation".into(), json!(metrics.constraint_violation));
    report.insert("csv".into(), json!(csv.display().to_string()));
    emit(&Value::Object(report), Some(&dir), &format!("{stem}.json"))
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let mut formulations = args.formulation.clone();
    formulations.dedup();
    if formulations.len() < 2 {
        return Err(CliError::Config("compare needs at least two distinct formulations".into()));
    }
    let sys = load_system(&args.system)?;
    let cfg = integrator(&args.run)?;
    let jet0 = initial_jet(&sys.spec, &args.run)?;
    let dir = output_dir(&args.system.out)?;
    let mut runs = Vec::new();
    let mut summaries = Map::new();
    for &f in &formulations {
        let run = run_formulation(&sys, &args.model, &args.run, &jet0, &cfg, f)?;
        let m = run.metrics(&sys.spec)?;
        summaries.insert(
            value_name(&f),
            json!({
                "variant": describe(f, &args.model, &args.run),
                "energy_drift": m.energy_drift,
                "constraint_drift": m.constraint_drift,
                "constraint_violation": m.constraint_violation,
            }),
        );
        if let Some(dir) = &dir {
            run.write_csv(sys.spec.names(), &dir.join(format!("{}_{}.csv", sys.label, value_name(&f))))?;
        }
        runs.push((f, run.configurations()));
    }
    let idx: Vec<usize> = (0..sys.spec.dim()).collect();
    let mut pairs = Vec::new();
    let mut worst = 0.0f64;
    for (i, (fa, a)) in runs.iter().enumerate() {
        for (fb, b) in &runs[i + 1..] {
            let m = compare_trajectories(a, b, &idx)?;
            worst = worst.max(m.sup_norm);
            pairs.push(json!({ "a": value_name(fa), "b": value_name(fb), "sup_norm": m.sup_norm, "rms": m.rms }));
        }
    }
    let passed = worst < args.tol;
    let mut report = header("compare", &sys, args.system.seed);
    report.insert("h".into(), json!(cfg.effective_step()));
    report.insert("t_end".into(), json!(cfg.t1));
    report.insert("tol".into(), json!(args.tol));
    report.insert("initial".into(), json!({ "q": jet0.q, "qdot": jet0.qdot }));
    report.insert("runs".into(), Value::Object(summaries));
    report.insert("pairs".into(), Value::Array(pairs));
    report.insert("max_sup_norm".into(), json!(worst));
    report.insert("passed".into(), json!(passed));
    emit(&Value::Object(report), dir.as_deref(), &format!("{}_compare.json", sys.label))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Certification(format!("largest pairwise sup-norm {worst:e} is not below {:e}", args.tol)))
    }
}

fn helmholtz_json(rep: &HelmholtzReport) -> CliResult<Value> {
    Ok(serde_json::to_value(rep)?)
}

fn check_result(status: &str, reason: Option<&str>, report: Value) -> Value {
    json!({ "status": status, "reason": reason, "report": report })
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_check(sys: &LoadedSystem, check: CheckName, args: &CertifyArgs) -> CliResult<Value> {
    let spec = &sys.spec;
    let seed = args.system.seed;
    let needs_constant = matches!(check, CheckName::G2 | CheckName::Ham2);
    if needs_constant && !spec.has_constant_measure() {
        return Ok(check_result("SKIPPED", Some("non-constant invariant measure"), Value::Null));
    }
    Ok(match check {
        CheckName::Certificate => {
            let jets = sample_jets(spec, 50, seed)?;
            let cfg = CertificateConfig { seed, ..Default::default() };
            let rep = singularity_certificate(&first_associated(spec), &jets, &cfg)?;
            check_result(status(rep.passed), None, certificate_summary(&rep))
        }
        CheckName::Helmholtz => {
            let l = LagrangianModel::with_defaults(spec, LagrangianKind::First)?;
            let rep = helmholtz_residuals(
                &second_associated(spec),
                &l.hessian_field(),
                &sample_jets(spec, 100, seed)?,
                1e-8,
            )?;
            check_result(status(rep.passed), None, helmholtz_json(&rep)?)
        }
        CheckName::G1 | CheckName::G2 => {
            let kind = if check == CheckName::G1 { CostKind::G1 } else { CostKind::G2 };
            let rep = consistency_check(&ControlProblem::with_defaults(spec, kind)?, args.samples, seed)?;
            check_result(status(rep.passed), None, serde_json::to_value(&rep)?)
        }
        CheckName::Ham2 => {
            let l = LagrangianModel::with_defaults(spec, LagrangianKind::Second)?;
            let rep = helmholtz_residuals(
                &second_associated(spec),
                &l.hessian_field(),
                &sample_jets(spec, 100, seed)?,
                1e-8,
            )?;
            let h = HamiltonianModel::from_lagrangian(&l)?;
            let mut q = vec![0.0; spec.dim()];
            q[0] = DEFAULT_R1;
            let ps0 = l.legendre(&spec.constrained_jet(q, 1.0, 1.0)?)?;
            let traj = hamiltonian_flow(&h, &ps0, &IntegratorConfig::new(1e-3, 10.0))?;
            let (e, c) = (energy_drift(&h, &traj)?, constraint_drift(&h, &traj)?);
            let passed = rep.passed && e < 1e-8 && c < 1e-6;
            let report = json!({
                "helmholtz": helmholtz_json(&rep)?,
                "energy_drift": e,
                "energy_tolerance": 1e-8,
                "constraint_drift": c,
                "constraint_tolerance": 1e-6,
            });
            check_result(status(passed), None, report)
        }
        CheckName::Measure => {
            let (report, passed) = measure_report(spec, 200, seed, 1e-8)?;
            check_result(status(passed), None, report)
        }
    })
}

fn certificate_summary(rep: &hamiltonize::helmholtz::CertificateReport) -> Value {
    json!({
        "singular": rep.passed,
        "depth": rep.depth,
        "det_tol": rep.det_tol,
        "nullspace_dimensions": rep.jets.iter().map(|j| j.nullity).collect::<Vec<_>>(),
        "max_normalized_det": rep.jets.iter().map(|j| j.max_normalized_det).fold(0.0, f64::max),
        "warnings": rep.jets.iter().flat_map(|j| j.warnings.clone()).collect::<Vec<_>>(),
        "counterexample": rep.counterexample,
    })
}

pub fn certify(args: &CertifyArgs) -> CliResult<()> {
    let sys = load_system(&args.system)?;
    let dir = output_dir(&args.system.out)?;
    let checks = if args.check.is_empty() { CheckName::ALL.to_vec() } else { args.check.clone() };
    let mut results = Map::new();
    let mut failed = Vec::new();
    for check in checks {
        let name = value_name(&check);
        let result = match run_check(&sys, check, args) {
            Ok(v) => v,
            Err(e) => check_result("FAIL", Some(&e.to_string()), Value::Null),
        };
        if result["status"] == "FAIL" {
            failed.push(name.clone());
        }
        results.insert(name, result);
    }
    let mut report = header("certify", &sys, args.system.seed);
    report.insert("checks".into(), Value::Object(results));
    report.insert("passed".into(), json!(failed.is_empty()));
    emit(&Value::Object(report), dir.as_deref(), &format!("{}_certify.json", sys.label))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certification(format!("failed checks: {}", failed.join(", "))))
    }
}

pub fn helmholtz_check(args: &HelmholtzArgs) -> CliResult<()> {
    let sys = load_system(&args.system)?;
    let spec = &sys.spec;
    let seed = args.system.seed;
    let dir = output_dir(&args.system.out)?;
    let sode = SodeSystem::new(spec, sode_kind(args.sode));
    let jets = sample_jets(spec, args.samples, seed)?;
    let cfg = CertificateConfig { depth: args.depth, seed, ..Default::default() };
    let cert = singularity_certificate(&sode, &jets, &cfg)?;
    let model = args.model.unwrap_or(match args.sode {
        SodeArg::First => MultiplierArg::None,
        SodeArg::Second => MultiplierArg::First,
        SodeArg::Third => MultiplierArg::Variational,
    });
    let kind = match model {
        MultiplierArg::First => Some(LagrangianKind::First),
        MultiplierArg::Second => Some(LagrangianKind::Second),
        MultiplierArg::Variational => Some(LagrangianKind::Variational),
        MultiplierArg::None => None,
    };
    let mut passed = true;
    let multiplier = match kind {
        Some(kind) => {
            let l = build_lagrangian(spec, kind, args.coeffs.as_deref())?;
            let rep = helmholtz_residuals(&sode, &l.hessian_field(), &jets, args.tol)?;
            passed = rep.passed;
            json!({ "model": kind, "parameters": l.parameters(), "residuals": helmholtz_json(&rep)? })
        }
        None => Value::Null,
    };
    let mut report = header("helmholtz-check", &sys, seed);
    report.insert("sode".into(), json!(value_name(&args.sode)));
    report.insert("associated".into(), json!(sode.is_associated()));
    report.insert("samples".into(), json!(args.samples));
    report.insert("certificate".into(), certificate_summary(&cert));
    report.insert("multiplier".into(), multiplier);
    report.insert("passed".into(), json!(passed));
    emit(&Value::Object(report), dir.as_deref(), &format!("{}_helmholtz.json", sys.label))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Certification("the multiplier violates the Helmholtz conditions".into()))
    }
}

pub fn pontryagin_check(args: &PontryaginArgs) -> CliResult<()> {
    let sys = load_system(&args.system)?;
    let dir = output_dir(&args.system.out)?;
    let kind = match args.kind {
        CostArg::G1 => CostKind::G1,
        CostArg::G2 => CostKind::G2,
    };
    let problem = match &args.coeffs {
        Some(c) => ControlProblem::new(&sys.spec, kind, c.clone())?,
        None => ControlProblem::with_defaults(&sys.spec, kind)?,
    };
    let rep = consistency_check(&problem, args.samples, args.system.seed)?;
    let mut report = header("pontryagin-check", &sys, args.system.seed);
    report.insert("parameters".into(), json!(problem.hamiltonian().parameters()));
    report.insert("result".into(), serde_json::to_value(&rep)?);
    report.insert("passed".into(), json!(rep.passed));
    emit(&Value::Object(report), dir.as_deref(), &format!("{}_pontryagin_{kind}.json", sys.label))?;
    if rep.passed {
        Ok(())
    } else {
        Err(CliError::Certification("optimal Hamiltonian deviates from the closed form".into()))
    }
}

fn measure_report(spec: &SystemSpec, samples: usize, seed: u64, tol: f64) -> CliResult<(Value, bool)> {
    let mut sampler = Sampler::new(seed);
    let (mut worst_r1, mut worst_r2) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let r1 = sampler.base_point(spec)?;
        let (a, b) = spec.measure_pde_residual(r1)?;
        worst_r1 = worst_r1.max(a.abs());
        worst_r2 = worst_r2.max(b.abs());
    }
    let passed = worst_r1 < tol && worst_r2 < tol;
    let report = json!({
        "samples": samples,
        "constant_density": spec.has_constant_measure(),
        "density_expression": spec.density_expr().map(|e| e.to_string()),
        "max_residual_r1": worst_r1,
        "max_residual_r2": worst_r2,
        "tolerance": tol,
        "passed": passed,
    });
    Ok((report, passed))
}

pub fn measure_check(args: &MeasureArgs) -> CliResult<()> {
    let sys = load_system(&args.system)?;
    let dir = output_dir(&args.system.out)?;
    let (body, passed) = measure_report(&sys.spec, args.samples, args.system.seed, args.tol)?;
    let mut report = header("measure-check", &sys, args.system.seed);
    report.insert("result".into(), body);
    report.insert("passed".into(), json!(passed));
    emit(&Value::Object(report), dir.as_deref(), &format!("{}_measure.json", sys.label))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Certification("invariant-measure equations not satisfied".into()))
    }
}
