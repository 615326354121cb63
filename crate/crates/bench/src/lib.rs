//! Fixtures shared by the benchmarks.

use hamiltonize::{builtin_system, BuiltinParams, Jet, SystemSpec};

pub fn system(name: &str) -> SystemSpec {
    builtin_system(name, &BuiltinParams::default()).expect("built-in system")
}

/// Constraint-satisfying jet with unit base and fiber velocities.
pub fn start_jet(sys: &SystemSpec) -> Jet {
    let mut q = vec![0.0; sys.dim()];
    q[0] = 0.3;
    sys.constrained_jet(q, 1.0, 1.0).expect("start jet")
}
