use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::system::Jet;

/// Which formulation produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Nonholonomic,
    AssociatedSystem,
    EulerLagrange,
    Hamiltonian,
    Controlled,
    ClosedForm,
    Raw,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Nonholonomic => "nonholonomic",
            Provenance::AssociatedSystem => "associated-system",
            Provenance::EulerLagrange => "euler-lagrange",
            Provenance::Hamiltonian => "hamiltonian",
            Provenance::Controlled => "controlled",
            Provenance::ClosedForm => "closed-form",
            Provenance::Raw => "raw",
        })
    }
}

/// States that carry a configuration `q`.
pub trait HasConfiguration {
    fn configuration(&self) -> &[f64];
}

impl HasConfiguration for Jet {
    fn configuration(&self) -> &[f64] {
        &self.q
    }
}

impl HasConfiguration for Vec<f64> {
    fn configuration(&self) -> &[f64] {
        self
    }
}

/// States that can be written as one CSV row.
pub trait CsvState {
    fn csv_header(names: &[String]) -> Vec<String>;
    fn csv_values(&self) -> Vec<f64>;
}

impl CsvState for Jet {
    fn csv_header(names: &[String]) -> Vec<String> {
        let mut h: Vec<String> = names.to_vec();
        h.extend(names.iter().map(|n| format!("{n}_dot")));
        h
    }
    fn csv_values(&self) -> Vec<f64> {
        self.q.iter().chain(&self.qdot).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    provenance: Provenance,
}

impl<S> Trajectory<S> {
    pub fn new(times: Vec<f64>, states: Vec<S>, provenance: Provenance) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::InvalidConfig(format!(
                "trajectory needs matching non-empty times and states, got {} and {}",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("trajectory times must be strictly increasing".into()));
        }
        Ok(Trajectory { times, states, provenance })
    }

    pub(crate) fn start(t0: f64, s0: S, provenance: Provenance) -> Self {
        Trajectory { times: vec![t0], states: vec![s0], provenance }
    }

    pub(crate) fn push(&mut self, t: f64, s: S) {
        self.times.push(t);
        self.states.push(s);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn states(&self) -> &[S] {
        &self.states
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn last(&self) -> (f64, &S) {
        let n = self.times.len() - 1;
        (self.times[n], &self.states[n])
    }

    /// Converts every state, stopping at the first failure.
    pub fn try_map<T, F>(&self, provenance: Provenance, mut f: F) -> Result<Trajectory<T>>
    where
        F: FnMut(&S) -> Result<T>,
    {
        let states = self.states.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times: self.times.clone(), states, provenance })
    }

    pub fn map<T, F: FnMut(&S) -> T>(&self, f: F) -> Trajectory<T> {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(f).collect(),
            provenance: self.provenance,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

impl<S: CsvState> Trajectory<S> {
    /// Writes `t,<columns>` followed by one row per sample with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, names: &[String], mut w: W) -> Result<()> {
        let header = S::csv_header(names);
        writeln!(w, "t,{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut line = format!("{t:.16e}");
            for v in s.csv_values() {
                line.push(',');
                line.push_str(&format!("{v:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_times() {
        let e = Trajectory::new(vec![0.0, 0.0], vec![1, 2], Provenance::Raw);
        assert!(e.is_err());
        assert!(Trajectory::<i32>::new(vec![], vec![], Provenance::Raw).is_err());
    }

    #[test]
    fn csv_round_trips_at_full_precision() {
        let jet = Jet::new(vec![0.1, 1.0 / 3.0], vec![2.0, -1e-300]).unwrap();
        let tr = Trajectory::new(vec![0.0], vec![jet.clone()], Provenance::Raw).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&["a".into(), "b".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,a,b,a_dot,b_dot");
        let vals: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(&vals[1..], &jet.csv_values()[..]);
    }
}
