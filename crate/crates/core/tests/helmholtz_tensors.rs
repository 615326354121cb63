use hamiltonize::helmholtz::{
    algebraic_system, fd, nabla, nabla_phi, nullspace, phi, r_tensor, singularity_certificate, sym_index,
    CertificateConfig,
};
use hamiltonize::model::{builtin_system, BuiltinParams, Coefficient, Jet, Series, SystemSpec, BUILTIN_NAMES};
use hamiltonize::sampling::sample_jets;
use hamiltonize::sode::{first_associated, second_associated, third_associated, SodeKind, SodeSystem};
use nalgebra::DMatrix;

fn sys(name: &str) -> SystemSpec {
    builtin_system(name, &BuiltinParams::default()).unwrap()
}

fn rel_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    let scale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (a - b).iter().all(|d| d.abs() <= tol * scale)
}

fn rhs_of(sode: &SodeSystem) -> impl Fn(&Jet) -> hamiltonize::Result<Vec<f64>> + '_ {
    move |j: &Jet| sode.rhs(j)
}

/// Taylor expansion of the first-kind rates; index 0 is `r2`.
fn rate_series(s: &SystemSpec, r1: f64, order: usize) -> Vec<Series> {
    s.coefficient_series(r1, order).unwrap().first_kind_rates()
}

#[test]
fn exact_tensors_agree_with_finite_differences() {
    for name in BUILTIN_NAMES {
        let s = sys(name);
        for kind in [SodeKind::First, SodeKind::Second, SodeKind::Third] {
            let sode = SodeSystem::new(&s, kind);
            let f = rhs_of(&sode);
            for jet in sample_jets(&s, 100, 11).unwrap() {
                let exact = nabla(&sode, &jet).unwrap();
                assert!(rel_close(&exact, &fd::nabla(&f, &jet, fd::DEFAULT_STEP).unwrap(), 1e-8), "{name} {kind}");
                let exact = phi(&sode, &jet).unwrap();
                let approx = fd::phi(&f, &jet, fd::NESTED_STEP).unwrap();
                assert!(rel_close(&exact, &approx, 1e-6), "{name} {kind}\n{exact}\n{approx}");
            }
            for jet in sample_jets(&s, 10, 12).unwrap() {
                let exact = nabla_phi(&sode, &jet, 1).unwrap();
                let approx = fd::richardson(4e-3, |h| fd::nabla_phi(&f, &jet, h)).unwrap();
                assert!(rel_close(&exact, &approx, 1e-6), "{name} {kind}\n{exact}\n{approx}");
                let exact = r_tensor(&sode, &jet).unwrap();
                let approx = fd::r_tensor(&f, &jet, 3e-3).unwrap();
                for (e, a) in exact.iter().zip(&approx) {
                    assert!(rel_close(e, a, 1e-6), "{name} {kind}");
                }
            }
        }
    }
}

#[test]
fn first_kind_iterates_follow_the_closed_forms() {
    // psi^0_a = 1/2 G_a G_2 - G_a'; psi^(k+1)_a = psi^k_a' + 1/2 G_2 psi^k_a + 1/2 G_a psi^k_2
    // and (nabla^k phi)^a_1 = psi^k_a r1'^(k+1) r2', (nabla^k phi)^a_2 = -psi^k_a r1'^(k+2).
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let sode = first_associated(&s);
        for jet in sample_jets(&s, 100, 5).unwrap() {
            let g = rate_series(&s, jet.r1(), 5);
            let half = |x: &Series| x.scale(0.5);
            let mut psi: Vec<Series> =
                g.iter().map(|ga| half(&(ga.clone() * g[0].clone())) - ga.derivative()).collect();
            let (v1, v2) = (jet.qdot[0], jet.qdot[1]);
            for k in 0..3 {
                let m = nabla_phi(&sode, &jet, k).unwrap();
                let scale = 1.0 + m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                for (a, p) in psi.iter().enumerate() {
                    let c = p.coefficients()[0];
                    assert!((m[(a + 1, 0)] - c * v1.powi(k as i32 + 1) * v2).abs() < 1e-12 * scale, "{name} k={k}");
                    assert!((m[(a + 1, 1)] + c * v1.powi(k as i32 + 2)).abs() < 1e-12 * scale, "{name} k={k}");
                }
                assert!(m.row(0).iter().all(|v| *v == 0.0));
                let p2 = psi[0].clone();
                psi = psi
                    .iter()
                    .zip(&g)
                    .map(|(p, ga)| {
                        p.derivative() + half(&(g[0].clone() * p.clone())) + half(&(ga.clone() * p2.clone()))
                    })
                    .collect();
            }
        }
    }
}

#[test]
fn disk_first_kind_matches_displayed_iterates() {
    // With G_2 = 0 the displayed coefficients reduce to -G_a'', -G_a'''.
    let s = sys("vertical_disk");
    let sode = first_associated(&s);
    for jet in sample_jets(&s, 50, 8).unwrap() {
        let (phi_, v1, v2) = (jet.r1(), jet.qdot[0], jet.qdot[1]);
        // G_3 = -R sin(phi), G_4 = R cos(phi)
        let g =
            [(-phi_.sin(), -phi_.cos(), phi_.sin(), phi_.cos()), (phi_.cos(), -phi_.sin(), -phi_.cos(), phi_.sin())];
        let p = phi(&sode, &jet).unwrap();
        let d1 = nabla_phi(&sode, &jet, 1).unwrap();
        let d2 = nabla_phi(&sode, &jet, 2).unwrap();
        for (k, (_, g1, g2, g3)) in g.iter().enumerate() {
            let a = 2 + k;
            assert!((p[(a, 0)] + g1 * v1 * v2).abs() < 1e-13);
            assert!((d1[(a, 0)] + g2 * v1 * v1 * v2).abs() < 1e-13);
            assert!((d1[(a, 1)] - g2 * v1.powi(3)).abs() < 1e-13);
            assert!((d2[(a, 0)] + g3 * v1.powi(3) * v2).abs() < 1e-12);
            assert!((d2[(a, 1)] - g3 * v1.powi(4)).abs() < 1e-12);
        }
    }
}

#[test]
fn first_kind_rank_one_property() {
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let sode = first_associated(&s);
        for jet in sample_jets(&s, 30, 2).unwrap() {
            for k in 0..3 {
                let m = nabla_phi(&sode, &jet, k).unwrap();
                for a in 1..s.dim() {
                    for b in 1..s.dim() {
                        let d = m[(a, 0)] * m[(b, 1)] - m[(b, 0)] * m[(a, 1)];
                        assert!(d.abs() < 1e-10, "{name} k={k}: {d}");
                    }
                }
            }
        }
    }
}

#[test]
fn second_kind_phi_closed_form() {
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let sode = second_associated(&s);
        for jet in sample_jets(&s, 50, 4).unwrap() {
            let xi = s.coefficient_series(jet.r1(), 2).unwrap().second_kind_rates();
            let p = phi(&sode, &jet).unwrap();
            let v1 = jet.qdot[0];
            for (a, x) in xi.iter().enumerate() {
                let c = 2.0 * x.coefficients()[1] - x.coefficients()[0].powi(2);
                let qa = jet.qdot[a + 1];
                let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!((p[(a + 1, 0)] + 0.5 * v1 * qa * c).abs() < 1e-13 * scale);
                assert!((p[(a + 1, a + 1)] - 0.5 * v1 * v1 * c).abs() < 1e-13 * scale);
            }
        }
    }
}

fn null_basis(sode: &SodeSystem, jet: &Jet, depth: usize) -> DMatrix<f64> {
    nullspace(&algebraic_system(sode, jet, depth).unwrap(), 1e-10).basis
}

#[test]
fn free_particle_algebraic_solutions() {
    let s = sys("free_particle");
    let sode = first_associated(&s);
    let jet = Jet::new(vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]).unwrap();
    let basis = null_basis(&sode, &jet, 2);
    assert!(basis.ncols() >= 1);
    let n = 3;
    for c in 0..basis.ncols() {
        let x = basis.column(c);
        assert!(x[sym_index(n, 1, 2)].abs() < 1e-12);
        assert!(x[sym_index(n, 2, 2)].abs() < 1e-12);
        assert!(x[sym_index(n, 0, 2)].abs() < 1e-12);
        assert!((x[sym_index(n, 0, 1)] + x[sym_index(n, 1, 1)]).abs() < 1e-12);
    }
}

#[test]
fn disk_algebraic_solutions_have_bordered_structure() {
    let s = sys("vertical_disk");
    let sode = first_associated(&s);
    for jet in sample_jets(&s, 20, 9).unwrap() {
        let basis = null_basis(&sode, &jet, 3);
        let lambda = -jet.qdot[1] / jet.qdot[0];
        let n = 4;
        assert_eq!(basis.ncols(), 5);
        for c in 0..basis.ncols() {
            let x = basis.column(c);
            for (i, j) in [(2, 2), (2, 3), (3, 3)] {
                assert!(x[sym_index(n, i, j)].abs() < 1e-12);
            }
            assert!((x[sym_index(n, 0, 2)] - lambda * x[sym_index(n, 1, 2)]).abs() < 1e-12);
            assert!((x[sym_index(n, 0, 3)] - lambda * x[sym_index(n, 1, 3)]).abs() < 1e-12);
        }
    }
}

#[test]
fn disk_curvature_condition_is_implied() {
    let s = sys("vertical_disk");
    let sode = first_associated(&s);
    for (t, jet) in sample_jets(&s, 20, 10).unwrap().into_iter().enumerate() {
        let basis = null_basis(&sode, &jet, 3);
        let w = DMatrix::from_fn(basis.ncols(), 1, |i, _| ((i + t) as f64 * 0.37).sin() + 0.5);
        let g = hamiltonize::helmholtz::assemble_multiplier(4, (&basis * w).as_slice());
        let r = r_tensor(&sode, &jet).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let c: f64 = (0..4)
                        .map(|j| g[(i, j)] * r[j][(k, l)] + g[(l, j)] * r[j][(i, k)] + g[(k, j)] * r[j][(l, i)])
                        .sum();
                    assert!(c.abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn first_kind_certificates_pass() {
    for name in BUILTIN_NAMES {
        let s = sys(name);
        let jets = sample_jets(&s, 50, 1).unwrap();
        let rep = singularity_certificate(&first_associated(&s), &jets, &CertificateConfig::default()).unwrap();
        assert!(rep.passed, "{name}: {:?}", rep.counterexample);
        assert!(rep.jets.iter().all(|j| j.warnings.is_empty()));
    }
}

#[test]
fn third_kind_on_the_disk_reduces_to_its_display() {
    let s = sys("vertical_disk");
    let sode = third_associated(&s);
    assert!(sode.is_associated());
    for jet in sample_jets(&s, 20, 3).unwrap() {
        let (phi_, v) = (jet.r1(), &jet.qdot);
        let f = sode.rhs(&jet).unwrap();
        // m = R = I = J = 1
        assert!((f[0] + (phi_.sin() * v[2] - phi_.cos() * v[3]) * v[1]).abs() < 1e-14);
    }
}
