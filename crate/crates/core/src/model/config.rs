//! Declarative system files.
//!
//! ```toml
//! I1 = 1.0
//! I2 = 1.0
//! I_alpha = [1.0]
//! A_alpha = ["r1"]
//! names = ["x", "y", "z"]
//! ```
//!
//! An optional `N = "..."` gives an analytic measure density; it must square
//! to `1 / (I2 + sum I_alpha A_alpha^2)`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::system::SystemSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(rename = "I1")]
    i1: f64,
    #[serde(rename = "I2")]
    i2: f64,
    #[serde(rename = "I_alpha")]
    i_alpha: Vec<f64>,
    #[serde(rename = "A_alpha")]
    a_alpha: Vec<String>,
    names: Option<Vec<String>>,
    #[serde(rename = "N")]
    density: Option<String>,
}

pub fn parse_system_spec(text: &str) -> Result<SystemSpec> {
    let file: SystemFile = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let exprs: Vec<&str> = file.a_alpha.iter().map(String::as_str).collect();
    let spec = SystemSpec::from_strings(file.i1, file.i2, file.i_alpha, &exprs, file.names)?;
    match file.density {
        Some(n) => spec.with_density(crate::model::expr::parse_expr(&n)?),
        None => Ok(spec),
    }
}

pub fn load_system_spec(path: impl AsRef<Path>) -> Result<SystemSpec> {
    let text =
        std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_system_spec(&text)
}
