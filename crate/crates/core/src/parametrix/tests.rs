use super::*;
use crate::exprs::AnalyticFn;
use crate::operator::{ChiSolution, KernelSpec};
use crate::scalar_rhp::{boundary_values, ArcContext};

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn f(s: &str) -> AnalyticFn {
    AnalyticFn::parse(s).unwrap()
}

fn bundle(p: &str, g: &str, m: f64) -> ParametrixBundle {
    let ctx = ScalarContext::new(-1.0, 1.0, f(p), f(g), 0.5).unwrap();
    ParametrixBundle::new(ctx, m).unwrap()
}

/// Points on the circle `|l - x| = rho`, at half-step angles.
fn circle(x: f64, rho: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| x + Complex64::from_polar(rho, 2.0 * PI * (k as f64 + 0.5) / n as f64)).collect()
}

fn sup<F: Fn(Complex64) -> f64>(pts: &[Complex64], f: F) -> f64 {
    pts.iter().map(|&l| f(l)).fold(0.0, f64::max)
}

/// `f'` by the five-point stencil.
fn deriv<F: Fn(Complex64) -> Mat2>(f: F, l: Complex64, h: f64) -> Mat2 {
    let s = |k: f64| f(l + k * h);
    (s(-2.0) - s(-1.0).scale(c(8.0)) + s(1.0).scale(c(8.0)) - s(2.0)).scale(c(1.0 / (12.0 * h)))
}

#[test]
fn global_m_basics() {
    let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", 10.0);
    for k in 0..10 {
        let l = Complex64::from_polar(0.3 + 0.35 * k as f64, 0.7 * k as f64 + 0.2);
        assert!((b.global_m(l).unwrap().det() - 1.0).norm() < 1e-9, "det M at {l}");
    }
    assert!((b.global_m(z(1e6, 0.0)).unwrap() - Mat2::IDENTITY).norm() < 1e-5);
    assert!(b.global_m(z(0.1, 0.0)).is_err());
}

#[test]
fn global_m_jump() {
    let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", 10.0);
    for x in [0.0, -0.6, 0.8] {
        let (mp, mm) = boundary_values(x, 2.0, |l| b.global_m(l)).unwrap();
        let g = b.ctx.g.value(z(x, 0.0)).unwrap();
        let gm = Mat2::new(c(0.0), -g.exp(), (-g).exp(), c(0.0));
        assert!((mm - mp * gm).norm() < 1e-6, "M jump at {x}: {}", (mm - mp * gm).norm());
    }
}

#[test]
fn global_m_trace_identity() {
    // the identity is used with g = 0; for general g the trace is 2 D'/D
    let zero = bundle("x + 0.2*sin(x)", "0", 10.0);
    let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", 10.0);
    for k in 0..10 {
        let l = Complex64::from_polar(1.4 + 0.2 * k as f64, 0.6 * k as f64 + 0.3);
        let tr = |b: &ParametrixBundle| {
            let dm = deriv(|w| b.global_m(w).unwrap(), l, 1e-3);
            (dm * Mat2::SIGMA3 * b.global_m(l).unwrap().inverse()).trace()
        };
        assert!(tr(&zero).norm() <= 1e-10, "tr at {l}: {}", tr(&zero).norm());
        let h = 1e-3;
        let dd = |k: f64| b.ctx.d(l + k * h).unwrap().ln();
        let dlog = (dd(-2.0) - 8.0 * dd(-1.0) + 8.0 * dd(1.0) - dd(2.0)) / (12.0 * h);
        assert!((tr(&b) - 2.0 * dlog).norm() <= 1e-9);
    }
}

#[test]
fn prefactor_is_analytic_in_the_disk() {
    for e in [Endpoint::A, Endpoint::B] {
        let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", 12.0);
        let x = b.endpoint(e);
        let n = 128;
        let pts = circle(x, 0.5 * b.delta, n);
        let vals: Vec<Mat2> = pts.iter().map(|&l| b.prefactor_e(e, l).unwrap()).collect();
        for target in [x + Complex64::from_polar(0.1 * b.delta, 1.0), x + Complex64::from_polar(0.2 * b.delta, -2.5)] {
            let mut acc = Mat2::ZERO;
            for (k, &s) in pts.iter().enumerate() {
                // ds = i (s - x) dtheta
                let ds = I * (s - x) * (2.0 * PI / n as f64);
                acc = acc + vals[k].scale(ds / (s - target));
            }
            let interp = acc.scale((2.0 * PI * I).inv());
            let direct = b.prefactor_e(e, target).unwrap();
            assert!((interp - direct).norm() < 1e-9, "{e:?} at {target}: {}", (interp - direct).norm());
        }
        // continuity across the cut inside the disk
        let xc = if e == Endpoint::A { x + 0.5 * b.delta } else { x - 0.5 * b.delta };
        let (up, down) = boundary_values(xc, 2.0, |l| b.prefactor_e(e, l)).unwrap();
        assert!((up - down).norm() < 1e-6);
        let l = x + Complex64::from_polar(0.4 * b.delta, 0.7);
        assert!((b.prefactor_e(e, l).unwrap().det() - I * PI / 8.0).norm() < 1e-9);
        assert!(matches!(b.prefactor_e(e, c(x + 2.0 * b.delta)), Err(GskError::OutOfRange(_))));
    }
}

#[test]
fn hankel_block_determinant() {
    for e in [Endpoint::A, Endpoint::B] {
        let b = bundle("x + 0.2*sin(x)", "0.3*cos(x)", 15.0);
        let x = b.endpoint(e);
        for k in 1..8 {
            let l = x + Complex64::from_polar(0.12 * k as f64 * b.delta, 0.9 * k as f64);
            let d = b.local_p0(e, l).unwrap().det();
            assert!((d + 8.0 * I / PI).norm() < 1e-9, "{e:?} at {l}: {d}");
            assert!((b.local_parametrix(e, l).unwrap().det() - 1.0).norm() < 1e-9);
        }
    }
}

#[test]
fn hankel_block_matches_its_expansion() {
    for e in [Endpoint::A, Endpoint::B] {
        let b = bundle("x + 0.2*sin(x)", "0.3*cos(x)", 200.0);
        let x = b.endpoint(e);
        for l in circle(x, b.delta * 0.999, 16) {
            let exact = b.local_p0(e, l).unwrap();
            let series = b.local_p0_series(e, l, 2).unwrap();
            let rel = (exact - series).norm() / exact.norm();
            assert!(rel <= 1e-4, "{e:?} at {l}: {rel}");
        }
    }
}

#[test]
fn endpoint_mirror_symmetry() {
    // p odd, g = 0: zeta_b(-l) = -zeta_a(l), and the Hankel blocks differ by the row and column swap
    let b = bundle("x + 0.2*sin(x)", "0", 20.0);
    let s1 = Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0));
    for l in circle(-1.0, 0.9 * b.delta, 8) {
        let pa = b.local_p0(Endpoint::A, l).unwrap();
        let pb = b.local_p0(Endpoint::B, -l).unwrap();
        assert!((s1 * pa * s1 - pb).norm() < 1e-10 * pa.norm(), "at {l}: {}", (s1 * pa * s1 - pb).norm());
    }
}

#[test]
fn local_parametrix_jump() {
    let b = bundle("x", "0", 20.0);
    for e in [Endpoint::A, Endpoint::B] {
        let x0 = b.endpoint(e);
        let x = if e == Endpoint::A { x0 + 0.5 * b.delta } else { x0 - 0.5 * b.delta };
        let g = b.g_xi(x).unwrap();
        // offsets relative to the disk radius
        let (up, down) = boundary_values(x, b.delta, |l| b.local_parametrix(e, l)).unwrap();
        let res = (down * g.inverse() - up).norm();
        assert!(res <= 1e-6, "{e:?}: {res}");
    }
}

#[test]
fn local_parametrix_matches_m() {
    for e in [Endpoint::A, Endpoint::B] {
        let dist = |m: f64| {
            let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", m);
            let pts = circle(b.endpoint(e), b.delta, 32);
            sup(&pts, |l| (b.local_parametrix(e, l).unwrap() * b.global_m(l).unwrap().inverse() - Mat2::IDENTITY).norm())
        };
        let ratio = dist(40.0) / dist(80.0);
        assert!((1.7..=2.3).contains(&ratio), "{e:?}: {ratio}");
    }
}

#[test]
fn local_parametrix_log_growth() {
    let b = bundle("x", "0", 20.0);
    let norms: Vec<f64> = (3..=6)
        .map(|k| b.local_parametrix(Endpoint::A, -1.0 + 10f64.powi(-k) * z(1.0, 1.0) * b.delta).unwrap().norm())
        .collect();
    let steps: Vec<f64> = norms.windows(2).map(|w| w[1] - w[0]).collect();
    for s in &steps {
        assert!(*s > 0.0 && (s / steps[0] - 1.0).abs() < 0.05, "{norms:?}");
    }
}

#[test]
fn g_upsilon_series_orders() {
    for e in [Endpoint::A, Endpoint::B] {
        let err = |m: f64, order: usize| {
            let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", m);
            let pts = circle(b.endpoint(e), b.delta, 16);
            sup(&pts, |l| (b.g_upsilon(e, l).unwrap() - b.g_upsilon_series(e, l, order).unwrap()).norm())
        };
        let e0 = err(40.0, 0);
        assert!(e0 < 1.0 && e0 > 1e-4);
        let r1 = err(40.0, 1) / err(80.0, 1);
        assert!((3.2..=4.8).contains(&r1), "{e:?} order 1: {r1}");
        let r2 = err(40.0, 2) / err(80.0, 2);
        assert!((6.5..=9.5).contains(&r2), "{e:?} order 2: {r2}");
        let b = bundle("x", "0", 40.0);
        assert!(b.g_upsilon_series(e, b.endpoint(e) + 0.5 * b.delta * I, 5).is_err());
    }
}

#[test]
fn g1_residue() {
    let b = bundle("x", "0", 40.0);
    let (res, at) = b.g1_pole_part(Endpoint::A).unwrap();
    assert_eq!(at, -1.0);
    let expect = (Mat2::U_INV * Mat2::SIGMA_MINUS * Mat2::U).scale(c(-0.25 / b.u_endpoint(Endpoint::A)));
    assert!((res - expect).norm() < 1e-12);
    assert_eq!(res.rank(1e-12), 1);

    let b = bundle("x + 0.2*sin(x)", "0.3*cos(x) + 0.1*x", 40.0);
    for e in [Endpoint::A, Endpoint::B] {
        let (res, x) = b.g1_pole_part(e).unwrap();
        assert_eq!(res.rank(1e-12), 1);
        let n = 128;
        let pts = circle(x, 0.5 * b.delta, n);
        let mut acc = Mat2::ZERO;
        for &s in &pts {
            let ds = I * (s - x) * (2.0 * PI / n as f64);
            acc = acc + (b.g_upsilon_series(e, s, 1).unwrap() - Mat2::IDENTITY).scale(ds);
        }
        let extracted = acc.scale(c(b.m) / (2.0 * PI * I));
        assert!((extracted - res).norm() < 1e-9, "{e:?}: {}", (extracted - res).norm());
    }
}

#[test]
fn upsilon_leading_structure() {
    let b = bundle("x", "0", 40.0);
    let far = b.upsilon_leading(z(1e4, 1e4)).unwrap();
    assert!((far - Mat2::IDENTITY).norm() < 1e-5);
    let l = z(0.3, 1.2);
    let u = b.upsilon_leading(l).unwrap();
    let corr = u - Mat2::IDENTITY;
    // U^{-1} s^{+-} U has a nonzero diagonal; the correction is traceless and det = 1 + O(1/m^2)
    assert!(corr.a.norm() > 1e-4);
    assert!(corr.trace().norm() < 1e-15);
    assert!((u.det() - 1.0 - corr.det()).norm() < 1e-15);
    assert!((u.det() - 1.0).norm() < 1.0 / (40.0 * 40.0));
    assert!(b.upsilon_leading(z(-0.9, 0.1)).is_err());
}

/// `Xi M^{-1}` from the Nyström solution.
fn upsilon_numeric(b: &ParametrixBundle, sol: &ChiSolution, l: Complex64) -> Mat2 {
    b.to_xi_gauge(sol.chi(l).unwrap(), l).unwrap() * b.global_m(l).unwrap().inverse()
}

#[test]
fn upsilon_matches_numerics() {
    let l = z(2.0, 1.0);
    let err = |m: f64| {
        let spec = KernelSpec::pure_sine(-1.0, 1.0, m).unwrap();
        let sol = ChiSolution::new(&spec, 160).unwrap();
        let b = bundle("x", "0", m);
        (upsilon_numeric(&b, &sol, l) - b.upsilon_leading(l).unwrap()).norm()
    };
    let (e40, e80) = (err(40.0), err(80.0));
    let ratio = e40 / e80;
    assert!((3.2..=4.8).contains(&ratio), "{e40} {e80} {ratio}");
}

#[test]
fn chi_leading_matches_numerics() {
    let l = z(1.5, 0.5);
    let err = |m: f64| {
        let spec = KernelSpec::pure_sine(-1.0, 1.0, m).unwrap();
        let sol = ChiSolution::new(&spec, 128).unwrap();
        let b = bundle("x", "0", m);
        let num = b.to_xi_gauge(sol.chi(l).unwrap(), l).unwrap();
        let asy = b.to_xi_gauge(b.chi_leading(l).unwrap(), l).unwrap();
        (num - asy).norm()
    };
    let (e20, e40) = (err(20.0), err(40.0));
    assert!(e20 < 0.01 && (3.0..=5.0).contains(&(e20 / e40)), "{e20} {e40}");
    let b = bundle("x", "0", 20.0);
    assert!((b.chi_leading(z(1e5, 0.0)).unwrap() - Mat2::IDENTITY).norm() < 1e-4);
    let d = b.chi_leading(z(0.0, 2.0)).unwrap().det();
    assert!((d - 1.0).norm() < 1.0 / (20.0 * 20.0));
}

#[test]
fn g_xi_decays() {
    let b = bundle("x + 0.2*sin(x)", "0.1*x", 30.0);
    let u0 = b.ctx.u(z(0.0, 0.0)).unwrap().re;
    let g = b.g_xi(0.0).unwrap();
    assert!(g.a.norm() <= 2.0 * (-30.0 * u0).exp() * (1.0 + 1e-12));
    assert!(b.g_xi(1.5).is_err());
}

#[test]
fn bundle_validation() {
    let ctx = ScalarContext::new(-1.0, 1.0, f("x"), f("0"), 0.5).unwrap();
    assert!(ParametrixBundle::with_delta(ctx.clone(), 10.0, 0.6).is_err());
    assert!(ParametrixBundle::with_delta(ctx.clone(), 0.0, 0.1).is_err());
    let b = ParametrixBundle::new(ctx, 10.0).unwrap();
    assert!((b.delta - 0.25).abs() < 1e-15);
    assert!("c".parse::<Endpoint>().is_err());
}

fn arc_setup(alpha: f64, t: f64, phi: &str, m: f64, n: usize) -> (ArcContext, ChiSolution) {
    let actx = ArcContext::new(alpha, t, f(phi)).unwrap();
    let spec = KernelSpec::arc(alpha, m, f(phi), t).unwrap();
    (actx, ChiSolution::new(&spec, n).unwrap())
}

#[test]
fn arc_n_basics() {
    assert!((arc_n(z(1e8, 0.0)).unwrap() - Mat2::IDENTITY).norm() < 1e-8);
    let actx = ArcContext::new(1.0, 0.0, f("x")).unwrap();
    let w = z(0.4, 0.7);
    assert_eq!(arc_global_m(&actx, w).unwrap(), arc_n(w).unwrap());
    for k in 0..10 {
        let w = Complex64::from_polar(1.3 + 0.1 * k as f64, 0.6 * k as f64 + 0.1);
        let n = arc_n(w).unwrap();
        let dn = deriv(|v| arc_n(v).unwrap(), w, 1e-3);
        assert!((Mat2::SIGMA3 * n.inverse() * dn).trace().norm() <= 1e-10);
        assert!((n.det() - 1.0).norm() < 1e-13);
    }
}

#[test]
fn arc_phi_close_to_global_parametrix() {
    let delta = 0.1;
    let err = |m: f64| {
        let (actx, sol) = arc_setup(std::f64::consts::FRAC_PI_2, 0.5, "x", m, 160);
        let mut pts = circle(1.0, 2.0 * delta, 16);
        pts.extend(circle(-1.0, 2.0 * delta, 16));
        sup(&pts, |w| {
            let o = arc_phi_objects(&actx, &sol, w).unwrap();
            (o.phi * o.m_arc.inverse() - Mat2::IDENTITY).norm()
        })
    };
    let ratio = err(30.0) / err(60.0);
    assert!((1.6..=2.4).contains(&ratio), "{ratio}");
}

#[test]
fn arc_phi_jump() {
    let (actx, sol) = arc_setup(std::f64::consts::FRAC_PI_2, 0.5, "x", 10.0, 128);
    let (up, down) = boundary_values(0.0, 1.0, |w| Ok(arc_phi_objects(&actx, &sol, w)?.phi)).unwrap();
    let g = arc_g_phi(&actx, 10.0, 0.0).unwrap();
    assert!((down - up * g).norm() < 1e-5, "{}", (down - up * g).norm());
    let wrong = KernelSpec::arc(1.0, 10.0, f("x"), 0.5).unwrap();
    let other = ChiSolution::new(&wrong, 32).unwrap();
    assert!(arc_phi_objects(&actx, &other, z(0.0, 2.0)).is_err());
}

