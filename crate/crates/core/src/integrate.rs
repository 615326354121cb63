//! Fixed-step integration and trajectory comparison.

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::trajectory::{HasConfiguration, Provenance, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub h: f64,
    pub t0: f64,
    pub t1: f64,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { h: 1e-3, t0: 0.0, t1: 1.0, method: Method::Rk4 }
    }
}

impl IntegratorConfig {
    pub fn new(h: f64, t_end: f64) -> Self {
        IntegratorConfig { h, t1: t_end, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", self.h)));
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::InvalidConfig(format!("empty time span [{}, {}]", self.t0, self.t1)));
        }
        Ok(())
    }

    /// Number of steps; the step is shrunk slightly so the grid ends at `t1`.
    pub fn steps(&self) -> usize {
        (((self.t1 - self.t0) / self.h).round() as usize).max(1)
    }

    pub fn effective_step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps() as f64
    }

    /// The time grid every trajectory under this configuration uses.
    pub fn grid(&self) -> Vec<f64> {
        let (n, h) = (self.steps(), self.effective_step());
        (0..=n).map(|k| if k == n { self.t1 } else { self.t0 + k as f64 * h }).collect()
    }
}

/// An integration that stopped early, with everything computed before the
/// failing step.
#[derive(Debug, Clone, Error)]
#[error("{error} (integration stopped at t = {time})")]
pub struct IntegrationFailure {
    pub error: Error,
    pub time: f64,
    pub partial: Trajectory<Vec<f64>>,
}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Self {
        f.error
    }
}

/// Classical fourth-order Runge-Kutta on the grid of `cfg`.
pub fn integrate<F>(
    mut rhs: F,
    y0: Vec<f64>,
    cfg: &IntegratorConfig,
    provenance: Provenance,
) -> std::result::Result<Trajectory<Vec<f64>>, IntegrationFailure>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut traj = Trajectory::start(cfg.t0, y0.clone(), provenance);
    if let Err(error) = cfg.validate() {
        return Err(IntegrationFailure { error, time: cfg.t0, partial: traj });
    }
    let grid = cfg.grid();
    let mut y = y0;
    let n = y.len();
    let mut tmp = vec![0.0; n];
    for w in grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let step = (|| {
            let k1 = rhs(t, &y)?;
            check_len(&k1, n)?;
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            let k2 = rhs(t + 0.5 * h, &tmp)?;
            check_len(&k2, n)?;
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            let k3 = rhs(t + 0.5 * h, &tmp)?;
            check_len(&k3, n)?;
            for i in 0..n {
                tmp[i] = y[i] + h * k3[i];
            }
            let k4 = rhs(t + h, &tmp)?;
            check_len(&k4, n)?;
            Ok((0..n).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect::<Vec<f64>>())
        })();
        match step {
            Ok(next) if next.iter().all(|v| v.is_finite()) => {
                y = next;
                traj.push(w[1], y.clone());
            }
            Ok(_) => {
                let error = Error::InvalidConfig("state became non-finite".into());
                return Err(IntegrationFailure { error, time: t, partial: traj });
            }
            Err(error) => return Err(IntegrationFailure { error, time: t, partial: traj }),
        }
    }
    Ok(traj)
}

fn check_len(k: &[f64], n: usize) -> Result<()> {
    if k.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: k.len() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateMetrics {
    pub index: usize,
    pub sup_norm: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMetrics {
    pub sup_norm: f64,
    pub rms: f64,
    pub per_coordinate: Vec<CoordinateMetrics>,
}

/// Sup-norm and RMS of the difference of the configurations `q[projection]`.
pub fn compare<A: HasConfiguration, B: HasConfiguration>(
    a: &Trajectory<A>,
    b: &Trajectory<B>,
    projection: &[usize],
) -> Result<ComparisonMetrics> {
    if a.len() != b.len() || a.times().iter().zip(b.times()).any(|(x, y)| (x - y).abs() > 1e-12 * (1.0 + x.abs())) {
        return Err(Error::GridMismatch);
    }
    let dim = a.states()[0].configuration().len().min(b.states()[0].configuration().len());
    if let Some(&bad) = projection.iter().find(|&&i| i >= dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad + 1 });
    }
    let mut sup = vec![0.0f64; projection.len()];
    let mut sq = vec![0.0f64; projection.len()];
    for (sa, sb) in a.states().iter().zip(b.states()) {
        let (qa, qb) = (sa.configuration(), sb.configuration());
        for (k, &i) in projection.iter().enumerate() {
            let d = (qa[i] - qb[i]).abs();
            sup[k] = sup[k].max(d);
            sq[k] += d * d;
        }
    }
    let n = a.len() as f64;
    let per_coordinate: Vec<CoordinateMetrics> = projection
        .iter()
        .enumerate()
        .map(|(k, &index)| CoordinateMetrics { index, sup_norm: sup[k], rms: (sq[k] / n).sqrt() })
        .collect();
    let total: f64 = sq.iter().sum();
    Ok(ComparisonMetrics {
        sup_norm: sup.iter().copied().fold(0.0, f64::max),
        rms: (total / (n * projection.len().max(1) as f64)).sqrt(),
        per_coordinate,
    })
}
