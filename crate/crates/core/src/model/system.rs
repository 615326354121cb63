use crate::error::{Error, Result};
use crate::model::coefficients::ClassCoefficients;
use crate::model::expr::{parse_expr, Expr};
use crate::model::series::Series;

/// Parameters of the built-in examples. Unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinParams {
    pub mass: f64,
    pub radius: f64,
    /// Moment of inertia about the rolling axis (disk).
    pub inertia: f64,
    /// Moment of inertia about the vertical axis (knife edge, disk).
    pub spin_inertia: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams { mass: 1.0, radius: 1.0, inertia: 1.0, spin_inertia: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    FreeParticle,
    KnifeEdge { mass: f64, spin_inertia: f64 },
    VerticalDisk { mass: f64, radius: f64, inertia: f64, spin_inertia: f64 },
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::FreeParticle => "free_particle",
            Builtin::KnifeEdge { .. } => "knife_edge",
            Builtin::VerticalDisk { .. } => "vertical_disk",
        }
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["free_particle", "knife_edge", "vertical_disk"];

/// A point `(q, q_dot)` of the tangent bundle, ordered `(r1, r2, s_1..s_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

impl Jet {
    pub fn new(q: Vec<f64>, qdot: Vec<f64>) -> Result<Self> {
        if q.len() != qdot.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), got: qdot.len() });
        }
        Ok(Jet { q, qdot })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn r1(&self) -> f64 {
        self.q[0]
    }
}

/// Accelerations of the base coordinates and the slaved constraint velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct NonholonomicRates {
    pub r1_ddot: f64,
    pub r2_ddot: f64,
    pub s_dot: Vec<f64>,
}

/// A system of the class: kinetic energy `1/2 (I1 r1'^2 + I2 r2'^2 + sum I_a s_a'^2)`
/// with constraints `s_a' = -A_a(r1) r2'`.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    i1: f64,
    i2: f64,
    i_alpha: Vec<f64>,
    a_alpha: Vec<Expr>,
    da_alpha: Vec<Expr>,
    names: Vec<String>,
    builtin: Option<Builtin>,
    constant_measure: bool,
    /// Analytic measure density overriding the positive root `1/sqrt(D)`.
    density: Option<Expr>,
}

const MEASURE_SAMPLES: usize = 32;
const MEASURE_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

impl SystemSpec {
    pub fn new(i1: f64, i2: f64, i_alpha: Vec<f64>, a_alpha: Vec<Expr>, names: Option<Vec<String>>) -> Result<Self> {
        let check = |label: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("inertia {label} must be positive, got {v}")))
            }
        };
        check("I1", i1)?;
        check("I2", i2)?;
        for (k, &v) in i_alpha.iter().enumerate() {
            check(&format!("I_alpha[{k}]"), v)?;
        }
        if i_alpha.is_empty() {
            return Err(Error::InvalidSpec("at least one constrained coordinate is required".into()));
        }
        if i_alpha.len() != a_alpha.len() {
            return Err(Error::InvalidSpec(format!(
                "I_alpha has {} entries but A_alpha has {}",
                i_alpha.len(),
                a_alpha.len()
            )));
        }
        if a_alpha.iter().all(Expr::is_constant) {
            return Err(Error::InvalidSpec(
                "all constraint coefficients are constant; the constraints are holonomic".into(),
            ));
        }
        let n = 2 + i_alpha.len();
        let names = match names {
            Some(names) if names.len() != n => {
                return Err(Error::InvalidSpec(format!("expected {n} coordinate names, got {}", names.len())))
            }
            Some(names) => names,
            None => {
                let mut v = vec!["r1".to_string(), "r2".to_string()];
                v.extend((1..=i_alpha.len()).map(|k| format!("s{k}")));
                v
            }
        };
        let da_alpha = a_alpha.iter().map(Expr::diff).collect();
        let mut spec = SystemSpec {
            i1,
            i2,
            i_alpha,
            a_alpha,
            da_alpha,
            names,
            builtin: None,
            constant_measure: false,
            density: None,
        };
        spec.constant_measure = spec.detect_constant_measure();
        Ok(spec)
    }

    /// Parses the coefficient expressions and builds the system.
    pub fn from_strings(
        i1: f64,
        i2: f64,
        i_alpha: Vec<f64>,
        a_alpha: &[&str],
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let exprs = a_alpha.iter().map(|s| parse_expr(s)).collect::<Result<Vec<_>, _>>()?;
        SystemSpec::new(i1, i2, i_alpha, exprs, names)
    }

    /// Replaces the measure density `1/sqrt(D)` by an expression with the
    /// same square. A signed density stays analytic where a coefficient has a
    /// pole (the knife edge has `N = cos(r1)/sqrt(m)` rather than `|cos r1|`),
    /// and every weight built from it inherits that.
    pub fn with_density(mut self, density: Expr) -> Result<Self> {
        let mut seen = 0;
        for k in 0..MEASURE_SAMPLES {
            let r1 = -1.0 + 2.0 * (k as f64 + 0.5) / MEASURE_SAMPLES as f64;
            let (Ok(c), Ok(n)) = (self.coefficients_at(r1), density.eval(r1)) else { continue };
            seen += 1;
            if (n * n * c.denom - 1.0).abs() > DENSITY_TOL {
                return Err(Error::InvalidSpec(format!(
                    "density expression squares to {} instead of {} at r1 = {r1}",
                    n * n,
                    c.density_sq
                )));
            }
        }
        if seen == 0 {
            return Err(Error::InvalidSpec("density expression could not be checked on [-1, 1]".into()));
        }
        self.density = Some(density);
        Ok(self)
    }

    pub fn density_expr(&self) -> Option<&Expr> {
        self.density.as_ref()
    }

    // |N'| = N^3 |S| below tolerance at fixed sample points in [-1, 1].
    fn detect_constant_measure(&self) -> bool {
        let mut seen = 0;
        for k in 0..MEASURE_SAMPLES {
            let r1 = -1.0 + 2.0 * (k as f64 + 0.5) / MEASURE_SAMPLES as f64;
            let Ok(c) = self.coefficients_at(r1) else { continue };
            seen += 1;
            let dn = c.density * c.density_sq * c.coupling;
            if dn.abs() >= MEASURE_TOL {
                return false;
            }
        }
        seen > 0
    }

    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i2(&self) -> f64 {
        self.i2
    }
    pub fn i_alpha(&self) -> &[f64] {
        &self.i_alpha
    }
    pub fn a_alpha(&self) -> &[Expr] {
        &self.a_alpha
    }
    pub fn da_alpha(&self) -> &[Expr] {
        &self.da_alpha
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn builtin(&self) -> Option<Builtin> {
        self.builtin
    }

    /// Number of constrained coordinates.
    pub fn k(&self) -> usize {
        self.i_alpha.len()
    }

    /// Configuration dimension `2 + k`.
    pub fn dim(&self) -> usize {
        2 + self.k()
    }

    /// Inertias in coordinate order.
    pub fn inertias(&self) -> Vec<f64> {
        let mut v = vec![self.i1, self.i2];
        v.extend_from_slice(&self.i_alpha);
        v
    }

    /// Whether the invariant measure density was detected to be constant.
    pub fn has_constant_measure(&self) -> bool {
        self.constant_measure
    }

    pub fn coefficient_values(&self, r1: f64) -> Result<Vec<f64>> {
        Ok(self.a_alpha.iter().map(|a| a.eval(r1)).collect::<Result<Vec<_>, _>>()?)
    }

    pub fn coefficients_at(&self, r1: f64) -> Result<ClassCoefficients<f64>> {
        let a = self.coefficient_values(r1)?;
        let da = self.da_alpha.iter().map(|a| a.eval(r1)).collect::<Result<Vec<_>, _>>()?;
        let mut c = ClassCoefficients::new(self.i2, &self.i_alpha, a, da);
        if let Some(n) = &self.density {
            c.density = n.eval(r1)?;
        }
        Ok(c)
    }

    /// Taylor expansions of order `order` of all class coefficients at `r1`.
    pub fn coefficient_series(&self, r1: f64, order: usize) -> Result<ClassCoefficients<Series>> {
        let a = self.a_alpha.iter().map(|a| a.series(r1, order + 1)).collect::<Result<Vec<_>, _>>()?;
        let da = a.iter().map(Series::derivative).collect();
        let a = a.iter().map(|s| s.truncate(order)).collect();
        let mut c = ClassCoefficients::new(self.i2, &self.i_alpha, a, da);
        if let Some(n) = &self.density {
            c.density = n.series(r1, order)?;
        }
        Ok(c)
    }

    /// Fails with the first vanishing coefficient, if any.
    pub fn check_nonzero_coefficients(&self, r1: f64, a: &[f64]) -> Result<()> {
        match a.iter().position(|&v| v == 0.0) {
            Some(alpha) => Err(Error::CoefficientSingularity { alpha: alpha + 1, r1 }),
            None => Ok(()),
        }
    }

    pub fn check_jet(&self, jet: &Jet) -> Result<()> {
        if jet.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: jet.dim() });
        }
        Ok(())
    }

    /// Residuals `s_a' + A_a r2'` of the velocity constraints.
    pub fn constraint_residual(&self, jet: &Jet) -> Result<Vec<f64>> {
        self.check_jet(jet)?;
        let a = self.coefficient_values(jet.r1())?;
        Ok((0..self.k()).map(|k| jet.qdot[2 + k] + a[k] * jet.qdot[1]).collect())
    }

    /// A jet on the constraint distribution with the given base data and
    /// constrained positions.
    pub fn constrained_jet(&self, q: Vec<f64>, r1_dot: f64, r2_dot: f64) -> Result<Jet> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.len() });
        }
        let a = self.coefficient_values(q[0])?;
        let mut qdot = vec![r1_dot, r2_dot];
        qdot.extend(a.iter().map(|a| -a * r2_dot));
        Jet::new(q, qdot)
    }

    pub fn invariant_measure(&self, r1: f64) -> Result<f64> {
        Ok(self.coefficients_at(r1)?.density)
    }

    /// Residuals of the two first-order equations characterizing the measure
    /// density: `N_r1 / N + S / D` and `N_r2 / N`, with `N_r1` by central
    /// differences of step `h`.
    pub fn measure_pde_residual_with_step(&self, r1: f64, h: f64) -> Result<(f64, f64)> {
        let c = self.coefficients_at(r1)?;
        let np = self.invariant_measure(r1 + h)?;
        let nm = self.invariant_measure(r1 - h)?;
        let dn = (np - nm) / (2.0 * h);
        // N does not depend on r2, so the second equation vanishes identically.
        Ok((dn / c.density + c.coupling / c.denom, 0.0))
    }

    pub fn measure_pde_residual(&self, r1: f64) -> Result<(f64, f64)> {
        self.measure_pde_residual_with_step(r1, 1e-5)
    }

    /// Base accelerations and constraint velocities of the constrained motion.
    pub fn nonholonomic_rhs(&self, jet: &Jet) -> Result<NonholonomicRates> {
        self.check_jet(jet)?;
        let c = self.coefficients_at(jet.r1())?;
        let (v1, v2) = (jet.qdot[0], jet.qdot[1]);
        Ok(NonholonomicRates {
            r1_ddot: 0.0,
            r2_ddot: c.base_rate() * v1 * v2,
            s_dot: c.a.iter().map(|a| -a * v2).collect(),
        })
    }

    /// Vector field on the reduced state `(r1, r2, s_1..s_k, r1_dot, r2_dot)`.
    pub fn nonholonomic_field(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if y.len() != n + 2 {
            return Err(Error::DimensionMismatch { expected: n + 2, got: y.len() });
        }
        let c = self.coefficients_at(y[0])?;
        let (v1, v2) = (y[n], y[n + 1]);
        let mut out = Vec::with_capacity(n + 2);
        out.push(v1);
        out.push(v2);
        out.extend(c.a.iter().map(|a| -a * v2));
        out.push(0.0);
        out.push(c.base_rate() * v1 * v2);
        Ok(out)
    }

    /// Full jet from a reduced state, with slaved constraint velocities.
    pub fn jet_from_reduced(&self, y: &[f64]) -> Result<Jet> {
        let n = self.dim();
        self.constrained_jet(y[..n].to_vec(), y[n], y[n + 1])
    }

    pub fn reduced_from_jet(&self, jet: &Jet) -> Vec<f64> {
        let mut y = jet.q.clone();
        y.push(jet.qdot[0]);
        y.push(jet.qdot[1]);
        y
    }
}

/// One of the three built-in example systems.
pub fn builtin_system(name: &str, params: &BuiltinParams) -> Result<SystemSpec> {
    let positive = |label: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidParameters(format!("{label} must be positive, got {v}")))
        }
    };
    let names = |v: &[&str]| Some(v.iter().map(|s| s.to_string()).collect());
    let (mut spec, builtin) = match name {
        "free_particle" => {
            (SystemSpec::new(1.0, 1.0, vec![1.0], vec![Expr::var()], names(&["x", "y", "z"]))?, Builtin::FreeParticle)
        }
        "knife_edge" => {
            let m = positive("mass", params.mass)?;
            let j = positive("spin inertia", params.spin_inertia)?;
            let a = Expr::neg(Expr::tan(Expr::var()));
            let density = Expr::mul(Expr::constant(1.0 / m.sqrt()), Expr::cos(Expr::var()));
            (
                SystemSpec::new(j, m, vec![m], vec![a], names(&["phi", "x", "y"]))?.with_density(density)?,
                Builtin::KnifeEdge { mass: m, spin_inertia: j },
            )
        }
        "vertical_disk" => {
            let m = positive("mass", params.mass)?;
            let r = positive("radius", params.radius)?;
            let i = positive("inertia", params.inertia)?;
            let j = positive("spin inertia", params.spin_inertia)?;
            let a1 = Expr::mul(Expr::constant(-r), Expr::cos(Expr::var()));
            let a2 = Expr::mul(Expr::constant(-r), Expr::sin(Expr::var()));
            (
                SystemSpec::new(j, i, vec![m, m], vec![a1, a2], names(&["phi", "theta", "x", "y"]))?,
                Builtin::VerticalDisk { mass: m, radius: r, inertia: i, spin_inertia: j },
            )
        }
        other => return Err(Error::UnknownSystem(other.to_string())),
    };
    spec.builtin = Some(builtin);
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sys(name: &str) -> SystemSpec {
        builtin_system(name, &BuiltinParams::default()).unwrap()
    }

    #[test]
    fn free_particle_measure_values() {
        let s = sys("free_particle");
        assert_eq!(s.invariant_measure(0.0).unwrap(), 1.0);
        assert!((s.invariant_measure(1.0).unwrap() - 0.7071067811865475).abs() < 1e-16);
    }

    #[test]
    fn disk_measure_is_constant() {
        let s = sys("vertical_disk");
        for r1 in [-2.0, 0.0, 0.3, 1.7] {
            assert!((s.invariant_measure(r1).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        }
        assert!(s.has_constant_measure());
        assert!(!sys("free_particle").has_constant_measure());
        assert!(!sys("knife_edge").has_constant_measure());
    }

    #[test]
    fn measure_residuals() {
        let (a, b) = sys("free_particle").measure_pde_residual(1.0).unwrap();
        assert!(a.abs() < 1e-8 && b == 0.0);
        let (a, b) = sys("knife_edge").measure_pde_residual(0.5).unwrap();
        assert!(a.abs() < 1e-8 && b == 0.0);
        let (a, b) = sys("vertical_disk").measure_pde_residual(0.3).unwrap();
        assert!(a.abs() < 1e-10 && b == 0.0);
    }

    #[test]
    fn free_particle_rhs_example() {
        let s = sys("free_particle");
        let jet = Jet::new(vec![1.0, 0.0, 0.0], vec![1.0, 2.0, 0.0]).unwrap();
        let r = s.nonholonomic_rhs(&jet).unwrap();
        assert_eq!(r.r1_ddot, 0.0);
        assert!((r.r2_ddot + 1.0).abs() < 1e-15);
        assert!((r.s_dot[0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn disk_rhs_has_no_acceleration() {
        let s = sys("vertical_disk");
        let jet = s.constrained_jet(vec![0.4, 1.0, 0.0, 0.0], 1.3, -0.7).unwrap();
        let r = s.nonholonomic_rhs(&jet).unwrap();
        assert_eq!(r.r1_ddot, 0.0);
        assert!(r.r2_ddot.abs() < 1e-15);
    }

    #[test]
    fn knife_edge_reproduces_its_equation() {
        let s = sys("knife_edge");
        let (phi, phidot, xdot) = (0.4, 1.5, -0.8);
        let jet = s.constrained_jet(vec![phi, 0.0, 0.0], phidot, xdot).unwrap();
        let r = s.nonholonomic_rhs(&jet).unwrap();
        assert!((r.r2_ddot + phi.tan() * phidot * xdot).abs() < 1e-14);
        // y_dot = tan(phi) x_dot
        assert!((r.s_dot[0] - phi.tan() * xdot).abs() < 1e-15);
    }

    #[test]
    fn free_particle_constraint() {
        let s = sys("free_particle");
        let x = 0.7;
        let jet = Jet::new(vec![x, 0.0, 0.0], vec![0.3, 1.0, -x]).unwrap();
        assert_eq!(s.constraint_residual(&jet).unwrap(), vec![0.0]);
    }

    #[test]
    fn disk_measure_value() {
        assert!((sys("vertical_disk").invariant_measure(0.0).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn zero_base_velocity_kills_accelerations() {
        for name in BUILTIN_NAMES {
            let s = sys(name);
            let mut q = vec![0.0; s.dim()];
            q[0] = 0.3;
            let jet = s.constrained_jet(q, 1.0, 0.0).unwrap();
            let r = s.nonholonomic_rhs(&jet).unwrap();
            assert_eq!(r.r2_ddot, 0.0);
            assert!(r.s_dot.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn validation() {
        let e = SystemSpec::from_strings(1.0, 1.0, vec![1.0], &["2"], None);
        assert!(matches!(e, Err(Error::InvalidSpec(_))));
        let e = SystemSpec::from_strings(1.0, -1.0, vec![1.0], &["r1"], None);
        assert!(matches!(e, Err(Error::InvalidSpec(_))));
        let e = SystemSpec::from_strings(1.0, 1.0, vec![1.0, 2.0], &["r1"], None);
        assert!(matches!(e, Err(Error::InvalidSpec(_))));
        assert!(matches!(builtin_system("cart", &BuiltinParams::default()), Err(Error::UnknownSystem(_))));
        let bad = BuiltinParams { mass: 0.0, ..Default::default() };
        assert!(matches!(builtin_system("knife_edge", &bad), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn tangent_pole_is_a_domain_error() {
        let s = sys("knife_edge");
        assert!(matches!(s.invariant_measure(std::f64::consts::FRAC_PI_2), Err(Error::Expr(_))));
    }

    proptest! {
        #[test]
        fn measure_pde_residual_vanishes(idx in 0usize..3, r1 in -1.2f64..1.2) {
            let s = sys(BUILTIN_NAMES[idx]);
            let (a, b) = s.measure_pde_residual(r1).unwrap();
            prop_assert!(a.abs() < 1e-8);
            prop_assert_eq!(b, 0.0);
        }

        #[test]
        fn builtin_derivatives_match_central_differences(idx in 0usize..3, r1 in -1.2f64..1.2) {
            let s = sys(BUILTIN_NAMES[idx]);
            let h = 1e-5;
            for (a, da) in s.a_alpha().iter().zip(s.da_alpha()) {
                let exact = da.eval(r1).unwrap();
                let fd = (a.eval(r1 + h).unwrap() - a.eval(r1 - h).unwrap()) / (2.0 * h);
                prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0));
            }
        }

        #[test]
        fn measure_closed_forms(r1 in -1.2f64..1.2) {
            let fp = sys("free_particle").invariant_measure(r1).unwrap();
            prop_assert!((fp - 1.0 / (1.0 + r1 * r1).sqrt()).abs() < 1e-15);
            let ke = sys("knife_edge").invariant_measure(r1).unwrap();
            prop_assert!((ke - r1.cos()).abs() < 1e-15);
        }
    }
}
