//! Exact motion of the vertically rolling disk.

use crate::model::system::{BuiltinParams, Jet};

/// Initial state of the disk: angles, contact point, and the (constant)
/// angular rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiskInitial {
    pub phi0: f64,
    pub theta0: f64,
    pub x0: f64,
    pub y0: f64,
    pub u_theta: f64,
    pub u_phi: f64,
}

/// State at time `t`, ordered `(phi, theta, x, y)`. The contact point moves on
/// a circle when the disk turns and on a line otherwise.
pub fn disk_closed_form(params: &BuiltinParams, ic: &DiskInitial, t: f64) -> Jet {
    let r = params.radius;
    let phi = ic.phi0 + ic.u_phi * t;
    let theta = ic.theta0 + ic.u_theta * t;
    let (x, y) = if ic.u_phi != 0.0 {
        let k = ic.u_theta / ic.u_phi * r;
        (ic.x0 + k * (phi.sin() - ic.phi0.sin()), ic.y0 - k * (phi.cos() - ic.phi0.cos()))
    } else {
        (ic.x0 + r * ic.phi0.cos() * ic.u_theta * t, ic.y0 + r * ic.phi0.sin() * ic.u_theta * t)
    };
    let (xdot, ydot) = (r * phi.cos() * ic.u_theta, r * phi.sin() * ic.u_theta);
    Jet { q: vec![phi, theta, x, y], qdot: vec![ic.u_phi, ic.u_theta, xdot, ydot] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn quarter_circle() {
        let ic = DiskInitial { u_theta: 1.0, u_phi: 1.0, ..Default::default() };
        let s = disk_closed_form(&BuiltinParams::default(), &ic, FRAC_PI_2);
        assert!((s.q[2] - 1.0).abs() < 1e-15);
        assert!((s.q[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn straight_line() {
        let ic = DiskInitial { u_theta: 1.0, ..Default::default() };
        let s = disk_closed_form(&BuiltinParams::default(), &ic, 2.0);
        assert_eq!((s.q[2], s.q[3]), (2.0, 0.0));
    }

    #[test]
    fn initial_time_returns_initial_state() {
        let ic = DiskInitial { phi0: 0.3, theta0: -1.0, x0: 2.0, y0: -0.5, u_theta: 2.0, u_phi: 1.0 };
        let s = disk_closed_form(&BuiltinParams::default(), &ic, 0.0);
        assert_eq!(s.q, vec![0.3, -1.0, 2.0, -0.5]);
    }

    #[test]
    fn closed_form_satisfies_the_equations() {
        let params = BuiltinParams { radius: 0.7, ..Default::default() };
        let ic = DiskInitial { phi0: 0.2, theta0: 0.1, x0: 1.0, y0: 2.0, u_theta: 2.0, u_phi: -1.3 };
        let h = 1e-4;
        for t in [0.5, 1.7, 4.0] {
            let m = disk_closed_form(&params, &ic, t - h);
            let c = disk_closed_form(&params, &ic, t);
            let p = disk_closed_form(&params, &ic, t + h);
            for i in 0..2 {
                let acc = (p.q[i] - 2.0 * c.q[i] + m.q[i]) / (h * h);
                assert!(acc.abs() < 1e-6);
            }
            let xdot = (p.q[2] - m.q[2]) / (2.0 * h);
            let ydot = (p.q[3] - m.q[3]) / (2.0 * h);
            let phi = c.q[0];
            assert!((xdot - params.radius * phi.cos() * ic.u_theta).abs() < 1e-8);
            assert!((ydot - params.radius * phi.sin() * ic.u_theta).abs() < 1e-8);
        }
    }
}
