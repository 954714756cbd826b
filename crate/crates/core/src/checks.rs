//! The identity suite behind `gsk rhp-check`: exact relations of the scalar functions and
//! parametrices, evaluated numerically, each with its own threshold.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::asymptotics::c_t_value;
use crate::error::Result;
use crate::exprs::AnalyticFn;
use crate::linalg::Mat2;
use crate::operator::{ChiSolution, KernelSpec, Support};
use crate::parametrix::{arc_n, arc_phi_objects, Endpoint, ParametrixBundle};
use crate::scalar_rhp::{arc_r, boundary_values, ArcContext, ScalarContext};
use crate::specfun::{hankel_h0, hankel_h0_prime, HankelKind};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Nyström nodes for the solutions used by the scaling fits.
pub const SCALING_NODES: usize = 160;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Above(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(t) => v <= t,
            Bound::Above(t) => v > t,
            Bound::Within(lo, hi) => (lo..=hi).contains(&v),
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:e}"),
            Bound::Above(t) => write!(f, "> {t:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> CheckRow {
        CheckRow { name: name.into(), value, bound, pass: bound.holds(value) }
    }
}

fn end_name(e: Endpoint) -> &'static str {
    match e {
        Endpoint::A => "a",
        Endpoint::B => "b",
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// Five-point derivative of a matrix function.
fn deriv<F: Fn(Complex64) -> Result<Mat2>>(f: F, l: Complex64, h: f64) -> Result<Mat2> {
    let s = |k: f64| f(l + k * h);
    Ok((s(-2.0)? - s(-1.0)?.scale(c(8.0)) + s(1.0)?.scale(c(8.0)) - s(2.0)?).scale(c(1.0 / (12.0 * h))))
}

/// Least-squares slope of `ln err` against `ln m`, sign flipped so that decay gives a positive exponent.
pub fn fit_exponent(ms: &[f64], errs: &[f64]) -> f64 {
    let n = ms.len() as f64;
    let xs: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

/// Hankel Wronskian and the rotation formulas.
pub fn specfun_checks() -> Result<Vec<CheckRow>> {
    use HankelKind::{First, Second};
    let pts = [Complex64::new(1.0, 0.0), Complex64::new(3.0, 1.0), Complex64::new(20.0, 0.0), Complex64::new(0.5, 2.0)];
    let wr = max_of(pts.iter().map(|&z| {
        let w = hankel_h0_prime(Second, z)? * hankel_h0(First, z)? - hankel_h0_prime(First, z)? * hankel_h0(Second, z)?;
        let want = Complex64::new(0.0, -4.0 / PI) / z;
        Ok((w - want).norm() / want.norm())
    }))?;
    let add = max_of(pts.iter().filter(|z| z.im > 0.0).map(|&z| {
        // -z = e^{-i pi} z for z in the upper half-plane
        let (h1, h2) = (hankel_h0(First, z)?, hankel_h0(Second, z)?);
        let e1 = (hankel_h0(First, -z)? - (2.0 * h1 + h2)).norm();
        let e2 = (hankel_h0(Second, -z)? + h1).norm();
        Ok(e1.max(e2) / (1.0 + h1.norm() + h2.norm()))
    }))?;
    Ok(vec![
        CheckRow::new("Hankel Wronskian H1 H2' - H1' H2 = -4i/(pi z)", wr, Bound::AtMost(1e-10)),
        CheckRow::new("Hankel rotation H(-z) in terms of H(z)", add, Bound::AtMost(1e-10)),
    ])
}

/// Scalar-function and parametrix identities for an interval kernel.
pub fn interval_checks(spec: &KernelSpec) -> Result<Vec<CheckRow>> {
    let ctx = ScalarContext::from_spec(spec)?;
    let (a, b) = (ctx.a, ctx.b);
    let len = b - a;
    let interior: Vec<f64> = (0..8).map(|k| a + len * (k as f64 + 0.5) / 8.0).collect();
    let mut rows = Vec::new();

    let mut jump = 0.0f64;
    let mut gap_err = 0.0f64;
    let mut gap_min = f64::INFINITY;
    let mut sq_err = 0.0f64;
    for &x in &interior {
        let (hp, hm) = ctx.boundary_values(x, |l| ctx.h(l))?;
        jump = jump.max((hp + hm + I * ctx.p.value(c(x))?).norm());
        let gap = hm - hp;
        let u = ctx.u(c(x))?;
        gap_err = gap_err.max((gap - ((x - a) * (b - x)).sqrt() * u).norm());
        gap_min = gap_min.min(gap.re);
        sq_err = sq_err.max((gap * gap - ctx.zeta(c(x))?.0).norm());
    }
    rows.push(CheckRow::new("h_+ + h_- = -i p on (a, b)", jump, Bound::AtMost(1e-6)));
    rows.push(CheckRow::new("h_- - h_+ = sqrt((x-a)(b-x)) u", gap_err, Bound::AtMost(1e-6)));
    rows.push(CheckRow::new("min Re(h_- - h_+) on (a, b)", gap_min, Bound::Above(0.0)));
    rows.push(CheckRow::new("(h_- - h_+)^2 = zeta_a", sq_err, Bound::AtMost(1e-6)));

    let ring: Vec<Complex64> = (0..10)
        .map(|k| c(0.5 * (a + b)) + Complex64::from_polar(0.3 * len + 0.2 * len * k as f64, 0.7 * k as f64 + 0.2))
        .collect();
    let zsum = max_of(ring.iter().map(|&l| {
        let (za, zb) = ctx.zeta(l)?;
        Ok((za + zb).norm())
    }))?;
    rows.push(CheckRow::new("zeta_a + zeta_b = 0", zsum, Bound::AtMost(1e-12)));

    let szego = max_of(interior.iter().step_by(3).map(|&x| {
        let (dp, dm) = ctx.boundary_values(x, |l| ctx.d(l))?;
        Ok((dp * dm * ctx.g.value(c(x))?.exp() - 1.0).norm())
    }))?;
    rows.push(CheckRow::new("D_+ D_- = exp(-g)", szego, Bound::AtMost(1e-6)));

    let bundle = ParametrixBundle::new(ctx.clone(), spec.m)?;
    let det_m = max_of(ring.iter().map(|&l| Ok((bundle.global_m(l)?.det() - 1.0).norm())))?;
    rows.push(CheckRow::new("det M = 1", det_m, Bound::AtMost(1e-9)));

    // the trace identity is exact for g = 0; otherwise it equals 2 D'/D
    let far: Vec<Complex64> = (0..10)
        .map(|k| c(0.5 * (a + b)) + Complex64::from_polar(len + 0.1 * len * k as f64, 0.6 * k as f64 + 0.3))
        .collect();
    let flat = ParametrixBundle::new(ScalarContext::new(a, b, ctx.p.clone(), AnalyticFn::zero(), ctx.analyticity_radius)?, spec.m)?;
    let tr_zero = max_of(far.iter().map(|&l| {
        let dm = deriv(|w| flat.global_m(w), l, 1e-3)?;
        Ok((dm * Mat2::SIGMA3 * flat.global_m(l)?.inverse()).trace().norm())
    }))?;
    rows.push(CheckRow::new("tr[M' s3 M^-1] = 0 (g = 0)", tr_zero, Bound::AtMost(1e-10)));
    let tr_d = max_of(far.iter().map(|&l| {
        let dm = deriv(|w| bundle.global_m(w), l, 1e-3)?;
        let tr = (dm * Mat2::SIGMA3 * bundle.global_m(l)?.inverse()).trace();
        let h = 1e-3;
        let dd = |k: f64| -> Result<Complex64> { Ok(ctx.d(l + k * h)?.ln()) };
        let dlog = (dd(-2.0)? - 8.0 * dd(-1.0)? + 8.0 * dd(1.0)? - dd(2.0)?) / (12.0 * h);
        Ok((tr - 2.0 * dlog).norm())
    }))?;
    rows.push(CheckRow::new("tr[M' s3 M^-1] = 2 D'/D", tr_d, Bound::AtMost(1e-9)));

    for e in [Endpoint::A, Endpoint::B] {
        let x0 = bundle.endpoint(e);
        let det_p = max_of((1..8).map(|k| {
            let l = x0 + Complex64::from_polar(0.12 * k as f64 * bundle.delta, 0.9 * k as f64);
            Ok((bundle.local_parametrix(e, l)?.det() - 1.0).norm())
        }))?;
        rows.push(CheckRow::new(format!("det P_{} = 1", end_name(e)), det_p, Bound::AtMost(1e-9)));
        let x = if e == Endpoint::A { x0 + 0.5 * bundle.delta } else { x0 - 0.5 * bundle.delta };
        let g = bundle.g_xi(x)?;
        let (up, down) = boundary_values(x, bundle.delta, |l| bundle.local_parametrix(e, l))?;
        rows.push(CheckRow::new(
            format!("P_{}- = P_{}+ G_Xi", end_name(e), end_name(e)),
            (down * g.inverse() - up).norm() / up.norm(),
            Bound::AtMost(1e-6),
        ));
    }

    let ul = max_of(far.iter().map(|&l| {
        let u = bundle.upsilon_leading(l)?;
        let corr = u - Mat2::IDENTITY;
        Ok((u.det() - 1.0 - corr.det()).norm().max(corr.trace().norm()))
    }))?;
    rows.push(CheckRow::new("Upsilon_leading: tr corr = 0, det = 1 + det corr", ul, Bound::AtMost(1e-13)));

    let mid = 0.5 * (a + b);
    let cmid = ((mid - a) * (b - mid)).sqrt() * ctx.u(c(mid))?.re;
    let gx = bundle.g_xi(mid)?.a.norm() / (2.0 * (-spec.m * cmid).exp());
    rows.push(CheckRow::new("|G_Xi[1,1]| / 2 exp(-m c) at the midpoint", gx, Bound::AtMost(1.0 + 1e-9)));

    let ct = c_t_value(&ctx, 0.5)?;
    rows.push(CheckRow::new("C_t loop integral = finite difference (t = 0.5)", (ct.contour - ct.finite_difference).abs(), Bound::AtMost(1e-6)));
    Ok(rows)
}

/// `r`-function, Möbius-side and `N` identities for the arc of opening `alpha`.
pub fn arc_checks(alpha: f64) -> Result<Vec<CheckRow>> {
    let cot = 1.0 / (0.5 * alpha).tan();
    let tau = (0.5 * alpha).tan();
    let kappa = (0.5 * alpha).cos().powi(2);
    let mut rows = Vec::new();
    rows.push(CheckRow::new("r(-i cot(alpha/2)) = 1", (arc_r(Complex64::new(0.0, -cot), alpha)? - 1.0).norm(), Bound::AtMost(1e-12)));
    rows.push(CheckRow::new("r(i cot(alpha/2)) = kappa", (arc_r(Complex64::new(0.0, cot), alpha)? - kappa).norm(), Bound::AtMost(1e-12)));
    rows.push(CheckRow::new(
        "|r(1e5) - cos(alpha/2)|",
        (arc_r(c(1e5), alpha)? - (0.5 * alpha).cos()).norm(),
        Bound::AtMost(1e-4),
    ));
    let mut prod = 0.0f64;
    let mut ratio = 0.0f64;
    for x in [-0.6, 0.0, 0.45] {
        let (rp, rm) = boundary_values(x, 2.0, |w| arc_r(w, alpha))?;
        let expect = kappa * (1.0 - I * x * tau) / (1.0 + I * x * tau);
        prod = prod.max((rp * rm - expect).norm());
        ratio = ratio.max((rp / rm).norm());
    }
    rows.push(CheckRow::new("r_+ r_- = kappa (1 - i x tan)/(1 + i x tan)", prod, Bound::AtMost(1e-7)));
    rows.push(CheckRow::new("max |r_+/r_-| on (-1, 1)", ratio, Bound::AtMost(1.0 - 1e-9)));

    let p = AnalyticFn::parse(&format!("2*atan({tau:?}*x)"))?;
    let bridge_ctx = ScalarContext::new(-1.0, 1.0, p, AnalyticFn::zero(), 0.5 * cot.min(1.0))?;
    let pts = [Complex64::new(1.5, 0.0), Complex64::new(-2.0, 0.3), Complex64::new(0.3, 0.5), Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.1), Complex64::new(0.8, -0.05)];
    let bridge = max_of(pts.iter().map(|&w| Ok((bridge_ctx.h(w)? - (arc_r(w, alpha)?.ln() - (0.5 * alpha).cos().ln())).norm())))?;
    rows.push(CheckRow::new("h = ln r - ln cos(alpha/2) for p = 2 atan(x tan(alpha/2))", bridge, Bound::AtMost(1e-8)));

    let ring: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(1.3 + 0.1 * k as f64, 0.6 * k as f64 + 0.1)).collect();
    let tr = max_of(ring.iter().map(|&w| {
        let n = arc_n(w)?;
        let dn = deriv(arc_n, w, 1e-3)?;
        Ok((Mat2::SIGMA3 * n.inverse() * dn).trace().norm().max((n.det() - 1.0).norm()))
    }))?;
    rows.push(CheckRow::new("tr[s3 N^-1 N'] = 0, det N = 1", tr, Bound::AtMost(1e-10)));
    Ok(rows)
}

/// `sup |Xi M^{-1} - Upsilon_leading|` over 8 points on a loop around the interval, at `m`.
pub fn upsilon_error(spec: &KernelSpec, m: f64) -> Result<f64> {
    let s = spec.with_m(m);
    let ctx = ScalarContext::from_spec(&s)?;
    let bundle = ParametrixBundle::new(ctx, m)?;
    let sol = ChiSolution::new(&s, SCALING_NODES)?;
    let (a, b) = (bundle.ctx.a, bundle.ctx.b);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    max_of((0..8).map(|k| {
        let th = PI * (k as f64 + 0.5) / 4.0;
        let l = Complex64::new(mid + 2.0 * half * th.cos(), 1.0 * half * th.sin());
        let num = bundle.to_xi_gauge(sol.chi(l)?, l)? * bundle.global_m(l)?.inverse();
        Ok((num - bundle.upsilon_leading(l)?).norm())
    }))
}

/// `sup |Phi M_arc^{-1} - I|` on circles of radius 0.2 around `z = +-1`, at `m`.
pub fn phi_error(spec: &KernelSpec, m: f64) -> Result<f64> {
    let s = spec.with_m(m);
    let actx = ArcContext::from_spec(&s)?;
    let sol = ChiSolution::new(&s, SCALING_NODES)?;
    let pts = (0..32).map(|k| {
        let centre = if k < 16 { 1.0 } else { -1.0 };
        c(centre) + Complex64::from_polar(0.2, 2.0 * PI * (k as f64 + 0.5) / 16.0)
    });
    max_of(pts.map(|w| {
        let o = arc_phi_objects(&actx, &sol, w)?;
        Ok((o.phi * o.m_arc.inverse() - Mat2::IDENTITY).norm())
    }))
}

/// Scaling fits between `m0` and `2 m0`: exponent 2 for `Upsilon` on an interval, 1 for `Phi` on the arc.
pub fn scaling_checks(spec: &KernelSpec, m0: f64) -> Result<Vec<CheckRow>> {
    let ms = [m0, 2.0 * m0];
    match spec.support {
        Support::Interval { .. } => {
            let errs = [upsilon_error(spec, ms[0])?, upsilon_error(spec, ms[1])?];
            Ok(vec![CheckRow::new(
                format!("Upsilon_leading exponent, m = {} -> {}", ms[0], ms[1]),
                fit_exponent(&ms, &errs),
                Bound::Within(1.7, 2.4),
            )])
        }
        Support::Arc { .. } => {
            let errs = [phi_error(spec, ms[0])?, phi_error(spec, ms[1])?];
            Ok(vec![CheckRow::new(
                format!("Phi M_arc^-1 - I exponent, m = {} -> {}", ms[0], ms[1]),
                fit_exponent(&ms, &errs),
                Bound::Within(0.8, 1.3),
            )])
        }
    }
}

/// Every identity that applies to `spec`; the arc `r`-function checks use `pi/2` for interval kernels.
pub fn identity_suite(spec: &KernelSpec) -> Result<Vec<CheckRow>> {
    let mut rows = specfun_checks()?;
    match spec.support {
        Support::Interval { .. } => {
            rows.extend(interval_checks(spec)?);
            rows.extend(arc_checks(PI / 2.0)?);
        }
        Support::Arc { alpha } => rows.extend(arc_checks(alpha)?),
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_default_kernels() {
        let specs = [
            KernelSpec::pure_sine(-1.0, 1.0, 10.0).unwrap(),
            KernelSpec::interval(-1.0, 1.0, 12.0, AnalyticFn::parse("x + 0.2*sin(x)").unwrap(), AnalyticFn::parse("0.3*cos(x)").unwrap())
                .unwrap()
                .with_analyticity_radius(0.5),
            KernelSpec::arc(1.2, 10.0, AnalyticFn::parse("x").unwrap(), 0.5).unwrap(),
        ];
        for spec in &specs {
            for row in identity_suite(spec).unwrap() {
                assert!(row.pass, "{}: {} {}", row.name, row.value, row.bound);
            }
        }
    }

    #[test]
    fn exponent_fit() {
        let ms = [10.0, 20.0, 40.0];
        let errs: Vec<f64> = ms.iter().map(|m: &f64| 3.0 * m.powf(-1.5)).collect();
        assert!((fit_exponent(&ms, &errs) - 1.5).abs() < 1e-12);
        assert!(Bound::Within(1.0, 2.0).holds(1.5) && !Bound::Above(0.0).holds(0.0));
    }
}
