//! Seeded sampling of jets and phase points.
//!
//! Coordinates are uniform in `[-1, 1]`; the base coordinate is redrawn while
//! any coefficient is undefined or smaller than [`MIN_COEFFICIENT`] in
//! magnitude. Velocities are uniform in `[0.5, 2]` with a random sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::system::{Jet, SystemSpec};

pub const MIN_COEFFICIENT: f64 = 0.1;
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn coordinate(&mut self) -> f64 {
        self.rng.gen_range(-1.0..=1.0)
    }

    /// Magnitude in `[0.5, 2]`, random sign.
    pub fn velocity(&mut self) -> f64 {
        let m = self.rng.gen_range(0.5..=2.0);
        if self.rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    }

    pub fn base_point(&mut self, sys: &SystemSpec) -> Result<f64> {
        for _ in 0..MAX_REDRAWS {
            let r1 = self.coordinate();
            let Ok(a) = sys.coefficient_values(r1) else { continue };
            if a.iter().all(|v| v.abs() >= MIN_COEFFICIENT) && sys.coefficients_at(r1).is_ok() {
                return Ok(r1);
            }
        }
        Err(Error::InvalidSpec("no admissible base point in [-1, 1]: coefficients vanish or are undefined".into()))
    }

    fn configuration(&mut self, sys: &SystemSpec) -> Result<Vec<f64>> {
        let mut q = vec![self.base_point(sys)?];
        q.extend((1..sys.dim()).map(|_| self.coordinate()));
        Ok(q)
    }

    /// A jet with all velocities drawn independently.
    pub fn jet(&mut self, sys: &SystemSpec) -> Result<Jet> {
        let q = self.configuration(sys)?;
        let qdot = (0..sys.dim()).map(|_| self.velocity()).collect();
        Jet::new(q, qdot)
    }

    /// A jet on the constraint distribution.
    pub fn constrained_jet(&mut self, sys: &SystemSpec) -> Result<Jet> {
        let q = self.configuration(sys)?;
        let (v1, v2) = (self.velocity(), self.velocity());
        sys.constrained_jet(q, v1, v2)
    }
}

pub fn sample_jets(sys: &SystemSpec, count: usize, seed: u64) -> Result<Vec<Jet>> {
    let mut s = Sampler::new(seed);
    (0..count).map(|_| s.jet(sys)).collect()
}

pub fn sample_constrained_jets(sys: &SystemSpec, count: usize, seed: u64) -> Result<Vec<Jet>> {
    let mut s = Sampler::new(seed);
    (0..count).map(|_| s.constrained_jet(sys)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::system::{builtin_system, BuiltinParams, BUILTIN_NAMES};

    #[test]
    fn deterministic_and_within_ranges() {
        for name in BUILTIN_NAMES {
            let sys = builtin_system(name, &BuiltinParams::default()).unwrap();
            let a = sample_jets(&sys, 20, 7).unwrap();
            assert_eq!(a, sample_jets(&sys, 20, 7).unwrap());
            for jet in &a {
                assert!(jet.q.iter().all(|x| x.abs() <= 1.0));
                assert!(jet.qdot.iter().all(|v| (0.5..=2.0).contains(&v.abs())));
                assert!(sys.coefficient_values(jet.r1()).unwrap().iter().all(|v| v.abs() >= 0.1));
            }
            for jet in sample_constrained_jets(&sys, 20, 3).unwrap() {
                assert!(sys.constraint_residual(&jet).unwrap().iter().all(|r| r.abs() < 1e-15));
            }
        }
    }
}
