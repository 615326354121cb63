use crate::error::{Error, Result};
use crate::model::trajectory::{CsvState, HasConfiguration};

/// A point `(q, p)` of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
        }
        if q.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: q.len() });
        }
        Ok(PhaseState { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Flat state `(q, p)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_slice(y: &[f64]) -> Result<Self> {
        if !y.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: y.len() + 1, got: y.len() });
        }
        let n = y.len() / 2;
        PhaseState::new(y[..n].to_vec(), y[n..].to_vec())
    }
}

impl HasConfiguration for PhaseState {
    fn configuration(&self) -> &[f64] {
        &self.q
    }
}

impl CsvState for PhaseState {
    fn csv_header(names: &[String]) -> Vec<String> {
        let mut h: Vec<String> = names.to_vec();
        h.extend(names.iter().map(|n| format!("p_{n}")));
        h
    }
    fn csv_values(&self) -> Vec<f64> {
        self.to_vec()
    }
}
