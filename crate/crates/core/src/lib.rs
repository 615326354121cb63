//! Hamiltonization of nonholonomic systems with Lagrangian
//! `1/2 (I1 r1'^2 + I2 r2'^2 + sum I_alpha s_alpha'^2)` and constraints
//! `s_alpha' = -A_alpha(r1) r2'`.
//!
//! The crate builds the associated second-order systems, tests them against
//! the Helmholtz conditions, constructs closed-form Lagrangians and
//! Hamiltonians, and compares all formulations by integration.

pub mod error;
pub mod flows;
pub mod helmholtz;
pub mod integrate;
pub mod model;
pub mod pontryagin;
pub mod sampling;
pub mod sode;
pub mod variational;

pub use error::{Error, ExprError, Result};
pub use integrate::{compare, integrate, ComparisonMetrics, IntegratorConfig};
pub use model::{builtin_system, parse_expr, BuiltinParams, Expr, Jet, SystemSpec, Trajectory};
pub use sode::{SodeKind, SodeSystem};
pub use variational::{HamiltonianKind, HamiltonianModel, LagrangianKind, LagrangianModel, PhaseState};
