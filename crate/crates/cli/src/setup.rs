//! Turning flags into systems, models and initial data.

use std::path::{Path, PathBuf};

use hamiltonize::flows::FlowError;
use hamiltonize::model::load_system_spec;
use hamiltonize::{builtin_system, BuiltinParams, HamiltonianModel, Jet, LagrangianKind, LagrangianModel, SystemSpec};
use thiserror::Error;

use crate::args::{ModelArgs, ModelKind, RunArgs, SystemArgs};

/// Failures grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Certification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Certification(_) => 3,
        }
    }
}

impl From<hamiltonize::Error> for CliError {
    fn from(e: hamiltonize::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Setup(e) => CliError::Config(e.to_string()),
            FlowError::Integration(f) => CliError::Domain(format!("domain error mid-run: {f}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A loaded system with the label used in reports and file names.
pub struct LoadedSystem {
    pub spec: SystemSpec,
    pub label: String,
    pub params: BuiltinParams,
}

pub fn load_system(args: &SystemArgs) -> CliResult<LoadedSystem> {
    let params =
        BuiltinParams { mass: args.mass, radius: args.radius, inertia: args.inertia, spin_inertia: args.spin_inertia };
    match (&args.system, &args.spec) {
        (Some(name), None) => Ok(LoadedSystem { spec: builtin_system(name, &params)?, label: name.clone(), params }),
        (None, Some(path)) => {
            if !path.exists() {
                return Err(CliError::Config(format!("spec file {} does not exist", path.display())));
            }
            let spec = load_system_spec(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spec".into());
            Ok(LoadedSystem { spec, label, params })
        }
        _ => Err(CliError::Config("exactly one of --system and --spec is required".into())),
    }
}

pub fn lagrangian_kind(kind: ModelKind) -> LagrangianKind {
    match kind {
        ModelKind::First => LagrangianKind::First,
        ModelKind::Second => LagrangianKind::Second,
        ModelKind::Variational => LagrangianKind::Variational,
    }
}

pub fn build_lagrangian(sys: &SystemSpec, kind: LagrangianKind, coeffs: Option<&[f64]>) -> CliResult<LagrangianModel> {
    let model = match (kind, coeffs) {
        (LagrangianKind::First, Some(c)) => LagrangianModel::first(sys, c.to_vec())?,
        (LagrangianKind::Second, Some(a)) => LagrangianModel::second(sys, a.to_vec())?,
        (LagrangianKind::Variational, Some(_)) => {
            return Err(CliError::Config("the variational Lagrangian takes no coefficients".into()))
        }
        (kind, None) => LagrangianModel::with_defaults(sys, kind)?,
    };
    Ok(model)
}

pub fn model_from_args(sys: &SystemSpec, args: &ModelArgs) -> CliResult<LagrangianModel> {
    build_lagrangian(sys, lagrangian_kind(args.model), args.coeffs.as_deref())
}

pub fn hamiltonian_from(l: &LagrangianModel) -> CliResult<HamiltonianModel> {
    HamiltonianModel::from_lagrangian(l)
        .map_err(|e| CliError::Config(format!("no Hamiltonian for the {} Lagrangian: {e}", l.kind())))
}

/// Default base point away from coefficient zeros of the built-ins.
pub const DEFAULT_R1: f64 = 0.3;

/// Initial jet from `--q`/`--qdot`. Without `--qdot`, or with
/// `--ic-on-constraint`, the constrained velocities follow from
/// `(r1_dot, r2_dot)` (default `(1, 1)`).
pub fn initial_jet(sys: &SystemSpec, run: &RunArgs) -> CliResult<Jet> {
    let n = sys.dim();
    let q = match &run.q {
        Some(q) => q.clone(),
        None => {
            let mut q = vec![0.0; n];
            q[0] = DEFAULT_R1;
            q
        }
    };
    if q.len() != n {
        return Err(CliError::Config(format!("--q needs {n} values, got {}", q.len())));
    }
    match &run.qdot {
        Some(v) if v.len() != n && !(run.ic_on_constraint && v.len() == 2) => {
            Err(CliError::Config(format!("--qdot needs {n} values, got {}", v.len())))
        }
        Some(v) if run.ic_on_constraint => Ok(sys.constrained_jet(q, v[0], v[1])?),
        Some(v) => Ok(Jet::new(q, v.clone())?),
        None => Ok(sys.constrained_jet(q, 1.0, 1.0)?),
    }
}

pub fn output_dir(out: &Option<PathBuf>) -> CliResult<Option<PathBuf>> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
