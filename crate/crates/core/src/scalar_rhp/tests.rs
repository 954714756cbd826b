use super::*;
use proptest::prelude::*;

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ctx(p: &str, g: &str) -> ScalarContext {
    ScalarContext::new(-1.0, 1.0, AnalyticFn::parse(p).unwrap(), AnalyticFn::parse(g).unwrap(), 0.5).unwrap()
}

fn arc(alpha: f64, t: f64, phi: &str) -> ArcContext {
    ArcContext::new(alpha, t, AnalyticFn::parse(phi).unwrap()).unwrap()
}

#[test]
fn q_examples() {
    assert!((q_branch(z(2.0, 0.0), -1.0, 1.0).unwrap() - 3f64.sqrt()).norm() < 1e-15);
    let big = z(1e4, 0.0);
    assert!((q_branch(big, -1.0, 1.0).unwrap() / big - 1.0).norm() <= 1e-3);
    assert!((q_branch(z(0.0, 1e-8), -1.0, 1.0).unwrap() - z(0.0, 1.0)).norm() < 1e-7);
    assert!((q_branch(z(0.0, -1e-8), -1.0, 1.0).unwrap() - z(0.0, -1.0)).norm() < 1e-7);
    assert!(matches!(q_branch(z(0.3, 0.0), -1.0, 1.0), Err(GskError::Domain { .. })));
}

#[test]
fn h_linear_phase() {
    let c = ctx("x", "0");
    let exact = |l: Complex64| -0.5 * I * (l - q_branch(l, -1.0, 1.0).unwrap());
    assert!((c.h(z(2.0, 0.0)).unwrap() - z(0.0, -0.5 * (2.0 - 3f64.sqrt()))).norm() < 1e-13);
    // inside and outside both loops
    for l in [z(0.3, 0.02), z(-0.9, -0.1), z(0.0, 0.2), z(1.1, 0.0), z(0.5, -2.0), z(-3.0, 1.0)] {
        assert!((c.h(l).unwrap() - exact(l)).norm() < 1e-12, "h({l})");
    }
    assert!(c.h_infinity().norm() <= 1e-12);
    assert!(matches!(c.h(z(0.1, 0.0)), Err(GskError::Domain { .. })));
}

#[test]
fn h_jump() {
    for (p, x) in [("x", 0.3), ("x + 0.2*sin(x)", 0.3), ("x + 0.2*sin(x)", -0.7)] {
        let c = ctx(p, "0");
        let (hp, hm) = c.boundary_values(x, |l| c.h(l)).unwrap();
        let px = c.p.value(z(x, 0.0)).unwrap();
        assert!((hp + hm + I * px).norm() < 1e-6, "{p} at {x}: {}", (hp + hm + I * px).norm());
    }
}

#[test]
fn h_gap_is_positive_and_squares_to_zeta() {
    let c = ctx("x + 0.2*sin(x)", "0");
    for k in 0..8 {
        let x = -0.875 + 0.25 * k as f64;
        let (hp, hm) = c.boundary_values(x, |l| c.h(l)).unwrap();
        let gap = hm - hp;
        let u = c.u(z(x, 0.0)).unwrap();
        let expect = ((x + 1.0) * (1.0 - x)).sqrt() * u;
        assert!(gap.re > 0.0 && gap.im.abs() < 1e-6, "gap at {x}: {gap}");
        assert!((gap - expect).norm() < 1e-6, "gap at {x}: {gap} vs {expect}");
        let (za, _) = c.zeta(z(x, 0.0)).unwrap();
        assert!((gap * gap - za).norm() < 1e-6);
    }
}

#[test]
fn u_examples() {
    let lin = ctx("x", "0");
    for l in [z(0.0, 0.0), z(0.7, 0.1), z(-1.0, 0.0), z(1.3, -0.2)] {
        assert!((lin.u(l).unwrap() - 1.0).norm() < 1e-13);
    }
    let c = ctx("x + 0.2*sin(x)", "0");
    assert!(c.u(z(0.0, 0.0)).unwrap().re > 0.8);
    for e in [-1.0, 1.0] {
        let v = c.u(z(e, 0.0)).unwrap();
        assert!(v.re > 0.0 && v.im.abs() <= 1e-12);
    }
    // a node hit exactly
    let s = c.cheb[17];
    let near = c.u(z(s, 0.0)).unwrap();
    let off = c.u(z(s + 1e-4, 0.0)).unwrap();
    assert!((near - off).norm() < 1e-4);
}

#[test]
fn zeta_examples() {
    let c = ctx("x", "0");
    let (za, _) = c.zeta(z(-1.0, 0.0)).unwrap();
    let (_, zb) = c.zeta(z(1.0, 0.0)).unwrap();
    assert_eq!((za.norm(), zb.norm()), (0.0, 0.0));
    let h = 1e-6;
    let d = (c.zeta(z(-1.0 + h, 0.0)).unwrap().0 - c.zeta(z(-1.0 - h, 0.0)).unwrap().0) / (2.0 * h);
    assert!((d - 2.0).norm() < 1e-8);
    let w = ctx("x + 0.2*sin(x)", "0.3*cos(x)");
    let mut rng = 7u64;
    for _ in 0..10 {
        rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let l = z(((rng >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0, 0.3 * ((rng >> 40) as f64 / (1u64 << 24) as f64) - 0.15);
        let (a, b) = w.zeta(l).unwrap();
        assert!((a + b).norm() <= 1e-13);
    }
}

#[test]
fn szego_function() {
    let zero = ctx("x", "0");
    assert_eq!(zero.d(z(0.2, 0.3)).unwrap(), z(1.0, 0.0));
    assert!((zero.d_infinity() - 1.0).norm() == 0.0);
    let cst = ctx("x", "0.7");
    let e = (-0.35f64).exp();
    for l in [z(0.2, 0.05), z(2.0, 0.0), z(-0.5, -1.0), z(0.0, 0.3)] {
        assert!((cst.d(l).unwrap() - e).norm() < 1e-12, "D({l})");
    }
    assert!((cst.d_infinity() - e).norm() < 1e-14);

    let c = ctx("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x");
    let (dp, dm) = c.boundary_values(0.2, |l| c.d(l)).unwrap();
    let gx = c.g.value(z(0.2, 0.0)).unwrap();
    assert!((dp * dm * gx.exp() - 1.0).norm() < 1e-6);
    // D -> D_inf far away
    assert!((c.d(z(1e6, 0.0)).unwrap() - c.d_infinity()).norm() < 1e-5);
}

#[test]
fn beta_r_t_identities() {
    let zero = ctx("x", "0");
    let v = zero.beta_r_t(z(0.9, 0.1)).unwrap();
    assert_eq!((v.beta, v.r, v.t), (z(1.0, 0.0), z(1.0, 0.0), z(0.0, 0.0)));

    let c = ctx("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x");
    for l in [z(-0.8, 0.05), z(0.93, -0.02), z(1.05, 0.1)] {
        let v = c.beta_r_t(l).unwrap();
        let q = c.q(l).unwrap();
        assert!((v.r * v.r - q * q * v.t * v.t - 1.0).norm() < 1e-12);
    }

    // the identities hold with sqrt(-zeta_a) := q u and the principal root of the ratio
    let (a, b) = (-1.0, 1.0);
    for l in [z(a + 0.1 * (b - a), 0.05), z(a + 0.1 * (b - a), -0.05)] {
        let v = c.beta_r_t(l).unwrap();
        let (q, u) = (c.q(l).unwrap(), c.u(l).unwrap());
        let root = q * u;
        let (za, _) = c.zeta(l).unwrap();
        assert!((root * root + za).norm() < 1e-12);
        // near a the principal root of -zeta_a is the other one
        assert!(((-za).sqrt() + root).norm() < 1e-12);
        let ab = ((l - a) / (l - b)).sqrt();
        let ba = ((l - b) / (l - a)).sqrt();
        let half = 0.5 * (v.beta - v.beta.inv());
        let checks = [
            half / root - v.t / u,
            ab * half - v.t * (l - a),
            ba * half - v.t * (l - b),
            ab / root - 1.0 / ((l - b) * u),
            ba / root - 1.0 / ((l - a) * u),
        ];
        for (k, d) in checks.iter().enumerate() {
            assert!(d.norm() < 1e-10, "identity {k} at {l}: {}", d.norm());
        }
    }
}

#[test]
fn r_and_t_continue_through_the_cut() {
    let c = ctx("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x");
    let (up, down) = boundary_values(0.95, 2.0, |l| {
        let v = c.beta_r_t(l)?;
        Ok(crate::linalg::Mat2::new(v.r, v.t, z(0.0, 0.0), z(0.0, 0.0)))
    })
    .unwrap();
    assert!((up - down).norm() < 1e-6);
}

#[test]
fn moebius_examples() {
    let al = std::f64::consts::FRAC_PI_2;
    assert!(moebius(z(1.0, 0.0), al, MoebiusDirection::ToZ).unwrap().norm() < 1e-16);
    let up = Complex64::from_polar(1.0, al);
    assert!((moebius(up, al, MoebiusDirection::ToZ).unwrap() - 1.0).norm() < 1e-14);
    assert!((moebius(up.conj(), al, MoebiusDirection::ToZ).unwrap() + 1.0).norm() < 1e-14);
    assert!(moebius(z(-1.0, 0.0), al, MoebiusDirection::ToZ).is_err());
    assert!(moebius(z(0.0, -1.0 / (0.5 * al).tan()), al, MoebiusDirection::ToLambda).is_err());
    for k in 0..10 {
        let l = Complex64::from_polar(0.3 + 0.2 * k as f64, 0.6 * k as f64 - 2.5);
        for alpha in [0.4, 1.3, 2.9] {
            let back = moebius(moebius(l, alpha, MoebiusDirection::ToZ).unwrap(), alpha, MoebiusDirection::ToLambda);
            assert!((back.unwrap() - l).norm() <= 1e-13 * l.norm().max(1.0));
        }
    }
}

#[test]
fn arc_r_examples() {
    for alpha in [0.5, std::f64::consts::FRAC_PI_2, 2.5] {
        let cot = 1.0 / (0.5 * alpha).tan();
        let kappa = (0.5 * alpha).cos().powi(2);
        assert!((arc_r(z(0.0, -cot), alpha).unwrap() - 1.0).norm() < 1e-14);
        assert!((arc_r(z(0.0, cot), alpha).unwrap() - kappa).norm() < 1e-14);
        // approaching the removable point
        assert!((arc_r(z(1e-7, cot), alpha).unwrap() - kappa).norm() < 1e-6);
        assert!((arc_r(z(1e5, 0.0), alpha).unwrap() - (0.5 * alpha).cos()).norm() <= 1e-4);
        assert!(arc_r(z(0.5, 0.0), alpha).is_err());
    }
    let al = std::f64::consts::FRAC_PI_2;
    let (rp, rm) = boundary_values(0.0, 2.0, |w| arc_r(w, al)).unwrap();
    let s = (0.5 * al).sin();
    assert!(((rp / rm).norm() - (1.0 - s) / (1.0 + s)).abs() < 1e-8);
    assert!(((1.0 - s) / (1.0 + s) - 0.1716).abs() < 1e-4);
}

#[test]
fn arc_r_jump_product() {
    for alpha in [0.7, std::f64::consts::FRAC_PI_2, 2.2] {
        let (tau, kappa) = ((0.5 * alpha).tan(), (0.5 * alpha).cos().powi(2));
        for x in [-0.6, 0.0, 0.45] {
            let (rp, rm) = boundary_values(x, 2.0, |w| arc_r(w, alpha)).unwrap();
            let expect = kappa * (1.0 - I * x * tau) / (1.0 + I * x * tau);
            assert!((rp * rm - expect).norm() < 1e-7);
            assert!((rp / rm).norm() < 1.0);
        }
    }
}

#[test]
fn log_r_derivative() {
    let alpha = 1.1;
    for w in [z(0.3, 0.4), z(-2.0, 0.1), z(0.1, -0.6)] {
        let h = 1e-5;
        let fd = (arc_r(w + h, alpha).unwrap().ln() - arc_r(w - h, alpha).unwrap().ln()) / (2.0 * h);
        assert!((arc_log_r_deriv(w, alpha).unwrap() - fd).norm() < 1e-8);
    }
}

#[test]
fn interval_arc_bridge() {
    for alpha in [std::f64::consts::FRAC_PI_2, 1.0] {
        let tau = (0.5 * alpha).tan();
        let p = AnalyticFn::parse(&format!("2*atan({tau:.17}*x)")).unwrap();
        // atan is singular at +-i cot(alpha/2)
        let radius = 0.5 * (1.0 / tau).min(1.0);
        let c = ScalarContext::new(-1.0, 1.0, p, AnalyticFn::zero(), radius).unwrap();
        for w in [z(1.5, 0.0), z(-2.0, 0.3), z(0.3, 0.5), z(0.3, -0.2), z(-0.5, 0.1), z(0.8, -0.05)] {
            let h = c.h(w).unwrap();
            let expect = arc_r(w, alpha).unwrap().ln() - (0.5 * alpha).cos().ln();
            assert!((h - expect).norm() < 1e-8, "alpha {alpha} at {w}: {h} vs {expect}");
        }
    }
}

#[test]
fn eta_examples() {
    let zero = arc(1.0, 0.4, "0");
    assert_eq!(zero.eta(z(0.3, 0.2)).unwrap(), z(0.0, 0.0));
    assert_eq!(zero.eta_infinity(), z(0.0, 0.0));
    let one = arc(1.0, 0.4, "1");
    assert!((one.eta_infinity() - 0.5).norm() < 1e-15);
    assert!((one.eta(z(0.3, 0.2)).unwrap() - 0.5).norm() < 1e-13);

    let a = arc(std::f64::consts::FRAC_PI_2, 0.6, "x + 0.3*x*x");
    let x = 0.3;
    let (ep, em) = boundary_values(x, 2.0, |w| a.eta(w)).unwrap();
    let phi = a.phi_z(z(x, 0.0)).unwrap();
    let t = a.t;
    assert!(((-t * ep).exp() * (-t * em).exp() * (t * phi).exp() - 1.0).norm() < 1e-6);
    let w = z(0.4, 0.7);
    let h = 1e-5;
    let fd = (a.eta(w + h).unwrap() - a.eta(w - h).unwrap()) / (2.0 * h);
    assert!((a.eta_with_deriv(w).unwrap().1 - fd).norm() < 1e-8);
    assert!((a.eta(z(0.0, 1e7)).unwrap() - a.eta_infinity()).norm() < 1e-6);
}

#[test]
fn arc_loop_avoids_the_poles() {
    for alpha in [0.3, std::f64::consts::FRAC_PI_2, 2.8] {
        let a = arc(alpha, 1.0, "x");
        let l = a.loop_l();
        assert!(!l.encloses(a.z_infinity()));
        assert!(!l.encloses(-a.z_infinity()));
        assert!(l.encloses(z(0.99, 0.0)) && l.encloses(z(-0.99, 0.0)));
    }
    assert!(ArcContext::new(3.2, 1.0, AnalyticFn::zero()).is_err());
}

#[test]
fn context_validation() {
    assert!(ScalarContext::new(1.0, -1.0, AnalyticFn::identity(), AnalyticFn::zero(), 0.5).is_err());
    assert!(ScalarContext::new(-1.0, 1.0, AnalyticFn::parse("-x").unwrap(), AnalyticFn::zero(), 0.5).is_err());
    assert!(ScalarContext::new(-1.0, 1.0, AnalyticFn::identity(), AnalyticFn::zero(), 0.0).is_err());
    let c = ctx("x", "0");
    assert!(c.gamma().encloses(z(0.0, 0.2)) && !c.gamma().encloses(z(0.0, 0.3)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zeta_sum_vanishes(re in -1.3f64..1.3, im in -0.2f64..0.2) {
        let c = ctx("x + 0.2*sin(x)", "0");
        let (a, b) = c.zeta(z(re, im)).unwrap();
        prop_assert!((a + b).norm() <= 1e-13);
    }

    #[test]
    fn r_t_determinant(re in -1.2f64..1.2, im in 0.01f64..0.2) {
        let c = ctx("x + 0.1*x*x", "0.2*x");
        let l = z(re, im);
        let v = c.beta_r_t(l).unwrap();
        let q = c.q(l).unwrap();
        prop_assert!((v.r * v.r - q * q * v.t * v.t - 1.0).norm() < 1e-11);
    }

    #[test]
    fn moebius_maps_the_arc_to_the_segment(theta in -0.99f64..0.99, alpha in 0.2f64..3.0) {
        let l = Complex64::from_polar(1.0, theta * alpha);
        let w = moebius(l, alpha, MoebiusDirection::ToZ).unwrap();
        prop_assert!(w.im.abs() < 1e-12 && w.re.abs() < 1.0 + 1e-12);
    }
}
