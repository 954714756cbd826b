//! Closed-form large-`m` expansions of `ln det(I + V)`.
//!
//! Every evaluator returns the coefficients of `m^2`, `m`, `ln m` and the constant
//! separately. The remainders are `O(1/m)`; no correction terms are provided.
//!
//! Widom's arc formula is read as a statement about `ln P(m)`, the logarithm of the
//! determinant, which is what the arc expansion reduces to at `t = 0`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{GskError, Result};
use crate::exprs::{AnalyticFn, Expr};
use crate::prec::Dd;
use crate::quad::{ellipse_rule, gauss_chebyshev};
use crate::scalar_rhp::{arc_log_r_deriv, ArcContext, ScalarContext};
use crate::specfun::nu_symbol;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Chebyshev nodes per variable for the double integral; the value is also computed with half as many.
pub const DOUBLE_INTEGRAL_NODES: usize = 256;
/// Relative disagreement between the two node counts that counts as non-convergence.
const DOUBLE_INTEGRAL_TOL: f64 = 1e-9;
/// Step of the centred differences in `t`.
pub const FD_STEP: f64 = 1e-4;

/// `B_{2j}` for `j = 1..=8`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ln A` for the Glaisher–Kinkelin constant, from `sum_{k <= N} k ln k` and its Euler–Maclaurin tail.
fn ln_glaisher() -> f64 {
    const N: u32 = 30;
    let mut s = Dd::from_f64(0.0);
    for k in 2..=N {
        let kd = Dd::from_f64(k as f64);
        s = s + kd * kd.ln();
    }
    let n = Dd::from_f64(N as f64);
    let ln_n = n.ln();
    let lead = (n * n * Dd::from_f64(0.5) + n * Dd::from_f64(0.5) + Dd::from_f64(1.0) / Dd::from_f64(12.0)) * ln_n
        - n * n * Dd::from_f64(0.25);
    let mut tail = 0.0;
    for (idx, &b) in BERNOULLI.iter().enumerate().skip(1) {
        let j = (idx + 1) as f64;
        tail += b / ((2.0 * j) * (2.0 * j - 1.0) * (2.0 * j - 2.0) * (N as f64).powf(2.0 * j - 2.0));
    }
    (s - lead).to_f64() + tail
}

/// `zeta'(-1) = 1/12 - ln A`.
pub fn zeta_prime_minus_one() -> f64 {
    1.0 / 12.0 - ln_glaisher()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub zeta_prime_minus_one: f64,
    /// `(ln 2)/12 + 3 zeta'(-1)`
    pub widom_c0: f64,
}

impl Constants {
    pub fn new() -> Constants {
        let z = zeta_prime_minus_one();
        Constants { zeta_prime_minus_one: z, widom_c0: LN_2 / 12.0 + 3.0 * z }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::new()
    }
}

/// `leading_m2 m^2 + linear_m m + log_coeff ln m + constant`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticResult {
    pub leading_m2: Complex64,
    pub linear_m: Complex64,
    pub log_coeff: f64,
    pub constant: Complex64,
}

impl AsymptoticResult {
    pub fn formula_value(&self, m: f64) -> Complex64 {
        self.leading_m2 * m * m + self.linear_m * m + self.log_coeff * m.ln() + self.constant
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(GskError::OutOfRange(format!("m must be positive, got {m}")))
    }
}

/// `(1/(4 pi)^2) int int K(l, s) ((p(l) - p(s) - i (g(l) - g(s))/m) / (l - s))^2`
/// against the Chebyshev weight in both variables, on `n` nodes each.
fn double_integral(ctx: &ScalarContext, m: f64, n: usize) -> Result<Complex64> {
    let (a, b) = (ctx.a, ctx.b);
    let rule = gauss_chebyshev(n, a, b)?;
    let x: Vec<f64> = rule.nodes.iter().map(|z| z.re).collect();
    let mut f = Vec::with_capacity(n);
    let mut df = Vec::with_capacity(n);
    for &s in &x {
        let (p, dp) = ctx.p.eval_with_derivative(Complex64::new(s, 0.0))?;
        let (g, dg) = ctx.g.eval_with_derivative(Complex64::new(s, 0.0))?;
        f.push(p - I * g / m);
        df.push(dp - I * dg / m);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let quot = if j == k { df[j] } else { (f[j] - f[k]) / (x[j] - x[k]) };
            let kern = 2.0 * x[j] * x[k] + 2.0 * a * b - (a + b) * (x[j] + x[k]);
            row += kern * quot * quot;
        }
        acc += row;
    }
    let w = PI / n as f64;
    Ok(acc * w * w / (16.0 * PI * PI))
}

/// The expansion of an interval kernel. The `m^2` coefficient keeps `g/m` inside the square
/// as written, so it depends mildly on `m`. The constant is `(1/8) ln(16 / ((b - a)^2 u(a) u(b)))`
/// plus Widom's constant: with `p = c x` the kernel is the sine kernel at `c m`, which fixes
/// the sign of the `u` term.
pub fn interval_log_det_asym(ctx: &ScalarContext, m: f64) -> Result<AsymptoticResult> {
    check_m(m)?;
    let fine = double_integral(ctx, m, DOUBLE_INTEGRAL_NODES)?;
    let coarse = double_integral(ctx, m, DOUBLE_INTEGRAL_NODES / 2)?;
    let err = (fine - coarse).norm() / fine.norm().max(1.0);
    if err > DOUBLE_INTEGRAL_TOL {
        return Err(GskError::NotConverged { what: "double integral under node doubling", error: err });
    }
    let (a, b) = (ctx.a, ctx.b);
    let ua = ctx.u(Complex64::new(a, 0.0))?;
    let ub = ctx.u(Complex64::new(b, 0.0))?;
    let c0 = Constants::new().widom_c0;
    Ok(AsymptoticResult {
        leading_m2: fine,
        linear_m: Complex64::new(0.0, 0.0),
        log_coeff: -0.25,
        constant: (16.0 / ((b - a) * (b - a) * ua * ub)).ln() / 8.0 + c0,
    })
}

/// The sine kernel on `[a, b]`.
pub fn pure_sine_log_det(a: f64, b: f64, m: f64) -> Result<AsymptoticResult> {
    if !(a < b) {
        return Err(GskError::InvalidSpec(format!("interval needs a < b, got [{a}, {b}]")));
    }
    check_m(m)?;
    let len = b - a;
    Ok(AsymptoticResult {
        leading_m2: Complex64::new(-len * len / 32.0, 0.0),
        linear_m: Complex64::new(0.0, 0.0),
        log_coeff: -0.25,
        constant: Complex64::new(-0.25 * (len / 4.0).ln() + Constants::new().widom_c0, 0.0),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < PI {
        Ok(())
    } else {
        Err(GskError::InvalidSpec(format!("alpha out of (0, pi): {alpha}")))
    }
}

/// Widom's formula for the arc with `t = 0`.
pub fn widom_log_det(alpha: f64, m: f64) -> Result<AsymptoticResult> {
    check_alpha(alpha)?;
    check_m(m)?;
    Ok(AsymptoticResult {
        leading_m2: Complex64::new((0.5 * alpha).cos().ln(), 0.0),
        linear_m: Complex64::new(0.0, 0.0),
        log_coeff: -0.25,
        constant: Complex64::new(-0.25 * (0.5 * alpha).sin().ln() + Constants::new().widom_c0, 0.0),
    })
}

/// The two loop integrals of the arc expansion:
/// `(1/2 pi i) oint_L phi(l(z)) d_z ln r dz` and `(1/4 pi i) oint_L phi(l(z)) d_z eta dz`.
pub fn arc_loop_integrals(actx: &ArcContext) -> Result<(Complex64, Complex64)> {
    let lp = actx.loop_l();
    if lp.encloses(actx.z_infinity()) {
        return Err(GskError::InvalidSpec("the loop L encloses the preimage of infinity".into()));
    }
    let rule = ellipse_rule(&lp)?;
    let mut i1 = Complex64::new(0.0, 0.0);
    let mut i2 = Complex64::new(0.0, 0.0);
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let phi = actx.phi_z(z)?;
        let (_, deta) = actx.eta_with_deriv(z)?;
        i1 += w * phi * arc_log_r_deriv(z, actx.alpha)?;
        i2 += w * phi * deta;
    }
    Ok((i1 / (2.0 * PI * I), i2 / (4.0 * PI * I)))
}

/// The arc expansion: Widom's terms plus `m t I_1 - t^2 I_2`.
pub fn arc_log_det_asym(actx: &ArcContext, m: f64) -> Result<AsymptoticResult> {
    let mut res = widom_log_det(actx.alpha, m)?;
    if actx.t != 0.0 {
        let (i1, i2) = arc_loop_integrals(actx)?;
        res.linear_m = actx.t * i1;
        res.constant -= actx.t * actx.t * i2;
    }
    Ok(res)
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(GskError::OutOfRange(format!("t must lie in [0, 1], got {t}")))
    }
}

/// `p(l, t) = t p(l) + (1 - t) l`.
pub fn homotopy_p(ctx: &ScalarContext, t: f64) -> Result<AnalyticFn> {
    check_t(t)?;
    Ok(homotopy_unchecked(&ctx.p, t))
}

fn homotopy_unchecked(p: &AnalyticFn, t: f64) -> AnalyticFn {
    if t == 1.0 {
        return p.clone();
    }
    if t == 0.0 {
        return AnalyticFn::identity();
    }
    let scaled = Expr::Mul(Box::new(Expr::Num(t)), Box::new(p.ast().clone()));
    let rest = Expr::Mul(Box::new(Expr::Num(1.0 - t)), Box::new(Expr::Var));
    AnalyticFn::from_ast(Expr::Add(Box::new(scaled), Box::new(rest)))
}

/// `d_t p(l, t) = p(l) - l`.
pub fn homotopy_dt(ctx: &ScalarContext) -> AnalyticFn {
    AnalyticFn::from_ast(Expr::Sub(Box::new(ctx.p.ast().clone()), Box::new(Expr::Var)))
}

/// `C_t`, the `O(1)` part of `d_t ln det(I + V_t)`, by the loop integral
/// `-(i (0,1) / 4 pi) oint d_t p / q (1/(u(a,t)(l - a)) + 1/(u(b,t)(l - b))) dl`
/// and by differentiating `-(1/8) ln[u(a, t) u(b, t)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtValue {
    pub contour: f64,
    pub finite_difference: f64,
}

fn ln_uab(ctx: &ScalarContext, t: f64) -> Result<f64> {
    let h = ScalarContext::new(ctx.a, ctx.b, homotopy_unchecked(&ctx.p, t), ctx.g.clone(), ctx.analyticity_radius)?;
    let ua = h.u(Complex64::new(ctx.a, 0.0))?;
    let ub = h.u(Complex64::new(ctx.b, 0.0))?;
    Ok((ua * ub).ln().re)
}

/// Both routes to `C_t`. Near `t = 0` and `t = 1` the difference stencil reaches
/// slightly outside `[0, 1]`, which is harmless since `p(l, t)` is affine in `t`.
pub fn c_t_value(ctx: &ScalarContext, t: f64) -> Result<CtValue> {
    check_t(t)?;
    let hctx = ScalarContext::new(ctx.a, ctx.b, homotopy_unchecked(&ctx.p, t), ctx.g.clone(), ctx.analyticity_radius)?;
    let (a, b) = (ctx.a, ctx.b);
    let ua = hctx.u(Complex64::new(a, 0.0))?;
    let ub = hctx.u(Complex64::new(b, 0.0))?;
    let dtp = homotopy_dt(ctx);
    let rule = ellipse_rule(&hctx.gamma())?;
    let total = rule.try_integrate(|l| {
        let q = hctx.q(l)?;
        Ok(dtp.value(l)? / q * (1.0 / (ua * (l - a)) + 1.0 / (ub * (l - b))))
    })?;
    let contour = -I * nu_symbol(1)? * total / (4.0 * PI);

    let diff = |h: f64| -> Result<f64> { Ok((ln_uab(ctx, t + h)? - ln_uab(ctx, t - h)?) / (2.0 * h)) };
    let coarse = diff(FD_STEP)?;
    let fine = diff(0.5 * FD_STEP)?;
    let finite_difference = -(4.0 * fine - coarse) / 3.0 / 8.0;
    Ok(CtValue { contour: contour.re, finite_difference })
}
