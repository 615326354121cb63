//! The system class, coefficient expressions and shared state types.

pub mod coefficients;
pub mod config;
pub mod disk;
pub mod expr;
pub mod series;
pub mod system;
pub mod trajectory;

pub use coefficients::ClassCoefficients;
pub use config::{load_system_spec, parse_system_spec};
pub use disk::{disk_closed_form, DiskInitial};
pub use expr::{diff_expr, parse_expr, Expr};
pub use series::{Coefficient, Series};
pub use system::{builtin_system, Builtin, BuiltinParams, Jet, NonholonomicRates, SystemSpec, BUILTIN_NAMES};
pub use trajectory::{CsvState, HasConfiguration, Provenance, Trajectory};
