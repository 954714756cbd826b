//! Scalar functions of the steepest-descent analysis: the square root `q`,
//! the `h`-function, `u`, the local variables `zeta_a`, `zeta_b`, the Szegő
//! function `D`, the endpoint functions `beta`, `r`, `t`, and on the arc side the
//! Möbius map, the `r`-function and `eta`.
//!
//! Boundary values follow the operator module: `f_+` is the limit from above
//! `[a, b]` (and from above `[-1, 1]` in the `z`-plane of the arc).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GskError, Result};
use crate::exprs::AnalyticFn;
use crate::operator::{KernelSpec, Support};
use crate::quad::{ellipse_rule, gauss_chebyshev, Ellipse};

/// Chebyshev nodes used for every integral against `ds / sqrt((s - a)(b - s))`.
pub const CHEB_NODES: usize = 256;
/// Points on each loop around the cut.
pub const LOOP_POINTS: usize = 512;

/// Relative distance below which the difference quotient in `u` is replaced by `p'` at the midpoint.
const COLLIDE: f64 = 1e-5;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn on_segment(l: Complex64, a: f64, b: f64) -> bool {
    l.im == 0.0 && l.re >= a && l.re <= b
}

/// `(l - a)^{1/2} (l - b)^{1/2}` with principal factors: cut on `[a, b]`, `~ l` at infinity,
/// `q_+(s) = i sqrt((s - a)(b - s))`.
pub fn q_branch(l: Complex64, a: f64, b: f64) -> Result<Complex64> {
    if on_segment(l, a, b) {
        return Err(GskError::Domain { what: "q on its cut", at: l });
    }
    Ok((l - a).sqrt() * (l - b).sqrt())
}

/// A loop around the cut with the data needed by the Cauchy-type integrals.
#[derive(Clone, Debug)]
struct Loop {
    shape: Ellipse,
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
    /// `p`, `g`, `q` at the nodes
    p: Vec<Complex64>,
    g: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl Loop {
    fn new(a: f64, b: f64, semi_minor: f64, p: &AnalyticFn, g: &AnalyticFn) -> Result<Loop> {
        let shape = Ellipse::new(c(0.5 * (a + b)), 0.5 * (b - a), semi_minor, LOOP_POINTS);
        let rule = ellipse_rule(&shape)?;
        let mut lp = Loop {
            shape,
            nodes: rule.nodes.clone(),
            weights: rule.weights,
            p: Vec::new(),
            g: Vec::new(),
            q: Vec::new(),
        };
        for &s in &rule.nodes {
            lp.p.push(p.value(s)?);
            lp.g.push(g.value(s)?);
            lp.q.push(q_branch(s, a, b)?);
        }
        Ok(lp)
    }

    fn distance(&self, l: Complex64) -> f64 {
        self.nodes.iter().map(|s| (s - l).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `oint f(s) / ((s - l) q(s)) ds` with `f` given at the nodes; `sub` is subtracted when `l` is inside.
    fn cauchy(&self, l: Complex64, f: &[Complex64], sub: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.nodes.len() {
            acc += self.weights[k] * (f[k] - sub) / ((self.nodes[k] - l) * self.q[k]);
        }
        acc
    }
}

/// Interval data: endpoints, `p`, `g`, a Chebyshev rule and two nested loops `Gamma`.
#[derive(Clone, Debug)]
pub struct ScalarContext {
    pub a: f64,
    pub b: f64,
    pub p: AnalyticFn,
    pub g: AnalyticFn,
    pub analyticity_radius: f64,
    cheb: Vec<f64>,
    p_cheb: Vec<Complex64>,
    g_cheb: Vec<Complex64>,
    loops: [Loop; 2],
}

impl ScalarContext {
    /// Validates `a < b` and `p' > 0` on `[a, b]`. The loops are ellipses with foci `a`, `b`
    /// and semi-minor axes `r/2` and `r/4`, so they stay inside the analyticity neighbourhood.
    pub fn new(a: f64, b: f64, p: AnalyticFn, g: AnalyticFn, analyticity_radius: f64) -> Result<ScalarContext> {
        let spec = KernelSpec::interval(a, b, 1.0, p, g)?;
        ScalarContext::from_spec(&spec.with_analyticity_radius(analyticity_radius))
    }

    pub fn from_spec(spec: &KernelSpec) -> Result<ScalarContext> {
        let (a, b) = match spec.support {
            Support::Interval { a, b } => (a, b),
            Support::Arc { .. } => {
                return Err(GskError::InvalidSpec("scalar context needs an interval kernel".into()));
            }
        };
        let r = spec.analyticity_radius;
        if !(r > 0.0) {
            return Err(GskError::InvalidSpec(format!("analyticity radius must be positive, got {r}")));
        }
        let rule = gauss_chebyshev(CHEB_NODES, a, b)?;
        let cheb: Vec<f64> = rule.nodes.iter().map(|z| z.re).collect();
        let p_cheb = cheb.iter().map(|&s| spec.p.value(c(s))).collect::<Result<Vec<_>>>()?;
        let g_cheb = cheb.iter().map(|&s| spec.g.value(c(s))).collect::<Result<Vec<_>>>()?;
        let loops = [Loop::new(a, b, 0.5 * r, &spec.p, &spec.g)?, Loop::new(a, b, 0.25 * r, &spec.p, &spec.g)?];
        Ok(ScalarContext {
            a,
            b,
            p: spec.p.clone(),
            g: spec.g.clone(),
            analyticity_radius: r,
            cheb,
            p_cheb,
            g_cheb,
            loops,
        })
    }

    /// The outer loop `Gamma`.
    pub fn gamma(&self) -> Ellipse {
        self.loops[0].shape
    }

    fn check_off_cut(&self, l: Complex64, what: &'static str) -> Result<()> {
        if on_segment(l, self.a, self.b) {
            Err(GskError::Domain { what, at: l })
        } else {
            Ok(())
        }
    }

    /// The loop farther from `l`, for accuracy of the trapezoid rule.
    fn loop_for(&self, l: Complex64) -> &Loop {
        if self.loops[0].distance(l) >= self.loops[1].distance(l) {
            &self.loops[0]
        } else {
            &self.loops[1]
        }
    }

    pub fn q(&self, l: Complex64) -> Result<Complex64> {
        q_branch(l, self.a, self.b)
    }

    /// `h(l)`, through the loop representation (regularised when `l` is inside the loop).
    pub fn h(&self, l: Complex64) -> Result<Complex64> {
        self.check_off_cut(l, "h on its cut")?;
        let lp = self.loop_for(l);
        let q = self.q(l)?;
        if lp.shape.encloses(l) {
            let pl = self.p.value(l)?;
            Ok(q * lp.cauchy(l, &lp.p, pl) / (4.0 * PI) - I * pl / 2.0)
        } else {
            Ok(q * lp.cauchy(l, &lp.p, c(0.0)) / (4.0 * PI))
        }
    }

    /// `h_inf = (1/2 pi) int p / q_+ ds`.
    pub fn h_infinity(&self) -> Complex64 {
        -I * 0.5 * mean(&self.p_cheb)
    }

    /// `u(l) = int (p(l) - p(s)) / (pi (l - s)) ds / sqrt((s - a)(b - s))`, analytic through `[a, b]`.
    pub fn u(&self, l: Complex64) -> Result<Complex64> {
        let pl = self.p.value(l)?;
        let tiny = COLLIDE * (self.b - self.a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &s) in self.cheb.iter().enumerate() {
            let d = l - s;
            acc += if d.norm() < tiny { self.p.deriv(0.5 * (l + s))? } else { (pl - self.p_cheb[k]) / d };
        }
        Ok(acc / self.cheb.len() as f64)
    }

    /// `(zeta_a, zeta_b) = ((l - a)(b - l) u^2, (l - a)(l - b) u^2)`.
    pub fn zeta(&self, l: Complex64) -> Result<(Complex64, Complex64)> {
        let u = self.u(l)?;
        let za = (l - self.a) * (self.b - l) * u * u;
        Ok((za, -za))
    }

    /// Szegő function `D(l)`; identically 1 when `g = 0`.
    pub fn d(&self, l: Complex64) -> Result<Complex64> {
        self.check_off_cut(l, "D on its cut")?;
        if self.g.is_zero() {
            return Ok(c(1.0));
        }
        let lp = self.loop_for(l);
        let q = self.q(l)?;
        let four_pi_i = Complex64::new(0.0, 4.0 * PI);
        let e = if lp.shape.encloses(l) {
            let gl = self.g.value(l)?;
            q * lp.cauchy(l, &lp.g, gl) / four_pi_i - gl / 2.0
        } else {
            q * lp.cauchy(l, &lp.g, c(0.0)) / four_pi_i
        };
        Ok(e.exp())
    }

    /// `D_inf = exp(int g / (2 pi i q_+) ds)`.
    pub fn d_infinity(&self) -> Complex64 {
        (-0.5 * mean(&self.g_cheb)).exp()
    }

    /// `beta = e^g D^2`, `r = (beta + 1/beta)/2`, `t = (beta - 1/beta)/(2q)`.
    pub fn beta_r_t(&self, l: Complex64) -> Result<BetaRT> {
        let d = self.d(l)?;
        let beta = self.g.value(l)?.exp() * d * d;
        let inv = beta.inv();
        Ok(BetaRT { beta, r: 0.5 * (beta + inv), t: 0.5 * (beta - inv) / self.q(l)? })
    }

    /// Boundary values `(f_+(x), f_-(x))` of `f` at `x` in `(a, b)` by eps-extrapolation.
    pub fn boundary_values<F>(&self, x: f64, f: F) -> Result<(Complex64, Complex64)>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        boundary_values(x, self.b - self.a, f)
    }
}

/// Limits from above and below of `f` at the real point `x`, with offsets `eps * scale`.
pub fn boundary_values<V, F>(x: f64, scale: f64, f: F) -> Result<(V, V)>
where
    V: Copy + std::ops::Sub<Output = V> + std::ops::Mul<Complex64, Output = V>,
    F: Fn(Complex64) -> Result<V>,
{
    let side = |sign: f64| -> Result<V> {
        let e = crate::quad::EPS_LADDER;
        let v = [
            f(Complex64::new(x, sign * e[0] * scale))?,
            f(Complex64::new(x, sign * e[1] * scale))?,
            f(Complex64::new(x, sign * e[2] * scale))?,
        ];
        Ok(crate::quad::eps_extrapolate(v))
    };
    Ok((side(1.0)?, side(-1.0)?))
}

fn distance_to_segment(z: Complex64) -> f64 {
    let x = z.re.clamp(-1.0, 1.0);
    (z - x).norm()
}

fn mean(v: &[Complex64]) -> Complex64 {
    v.iter().sum::<Complex64>() / v.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaRT {
    pub beta: Complex64,
    pub r: Complex64,
    pub t: Complex64,
}

pub fn h_eval(ctx: &ScalarContext, l: Complex64) -> Result<Complex64> {
    ctx.h(l)
}

pub fn h_infinity(ctx: &ScalarContext) -> Complex64 {
    ctx.h_infinity()
}

pub fn u_eval(ctx: &ScalarContext, l: Complex64) -> Result<Complex64> {
    ctx.u(l)
}

pub fn zeta_maps(ctx: &ScalarContext, l: Complex64) -> Result<(Complex64, Complex64)> {
    ctx.zeta(l)
}

pub fn d_eval(ctx: &ScalarContext, l: Complex64) -> Result<Complex64> {
    ctx.d(l)
}

pub fn d_infinity(ctx: &ScalarContext) -> Complex64 {
    ctx.d_infinity()
}

pub fn beta_r_t(ctx: &ScalarContext, l: Complex64) -> Result<BetaRT> {
    ctx.beta_r_t(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoebiusDirection {
    /// `z(l) = -i cot(alpha/2) (l - 1)/(l + 1)`
    ToZ,
    /// `l(z) = (1 + i z tan(alpha/2)) / (1 - i z tan(alpha/2))`
    ToLambda,
}

/// The Möbius map between the unit circle and the real line; the arc goes to `[-1, 1]`.
pub fn moebius(w: Complex64, alpha: f64, direction: MoebiusDirection) -> Result<Complex64> {
    let tau = (0.5 * alpha).tan();
    match direction {
        MoebiusDirection::ToZ => {
            if w == c(-1.0) {
                return Err(GskError::Domain { what: "Möbius map at its pole l = -1", at: w });
            }
            Ok(-I / tau * (w - 1.0) / (w + 1.0))
        }
        MoebiusDirection::ToLambda => {
            let den = 1.0 - I * w * tau;
            if den.norm() == 0.0 {
                return Err(GskError::Domain { what: "Möbius map at its pole z = -i cot(alpha/2)", at: w });
            }
            Ok((1.0 + I * w * tau) / den)
        }
    }
}

/// `sqrt(z^2 - 1)` as `sqrt(z - 1) sqrt(z + 1)`: cut `[-1, 1]`, `~ z` at infinity.
pub fn sqrt_z2m1(z: Complex64) -> Result<Complex64> {
    if on_segment(z, -1.0, 1.0) {
        return Err(GskError::Domain { what: "sqrt(z^2 - 1) on its cut", at: z });
    }
    Ok((z - 1.0).sqrt() * (z + 1.0).sqrt())
}

/// The `r`-function `(1 + i sqrt(z^2 - 1) sin(alpha/2)) / (1 + i z tan(alpha/2))`.
pub fn arc_r(z: Complex64, alpha: f64) -> Result<Complex64> {
    let (s, tau) = ((0.5 * alpha).sin(), (0.5 * alpha).tan());
    let w = sqrt_z2m1(z)?;
    let num = 1.0 + I * w * s;
    let den = 1.0 + I * z * tau;
    if den.norm() < 1e-12 {
        // removable point z = i cot(alpha/2)
        return Ok(c((0.5 * alpha).cos().powi(2)));
    }
    Ok(num / den)
}

/// `d/dz ln r(z)`.
pub fn arc_log_r_deriv(z: Complex64, alpha: f64) -> Result<Complex64> {
    let (s, tau) = ((0.5 * alpha).sin(), (0.5 * alpha).tan());
    let w = sqrt_z2m1(z)?;
    let num = 1.0 + I * w * s;
    let den = 1.0 + I * z * tau;
    if den.norm() < 1e-8 || num.norm() < 1e-8 {
        return Err(GskError::Domain { what: "ln r derivative at the removable point", at: z });
    }
    Ok(I * s * z / (w * num) - I * tau / den)
}

/// Arc data in the `z`-plane: `alpha`, the coupling `t`, `phi`, `kappa = cos^2(alpha/2)`,
/// Chebyshev samples of `phi(l(s))` and the loop `L` around `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct ArcContext {
    pub alpha: f64,
    pub t: f64,
    pub phi: AnalyticFn,
    pub kappa: f64,
    cheb: Vec<f64>,
    phi_cheb: Vec<Complex64>,
    loop_l: Ellipse,
}

impl ArcContext {
    /// The loop `L` is an ellipse with foci `-1, 1` whose semi-minor axis is half the
    /// distance to `+-i cot(alpha/2)`, the preimages of `l = infinity` and `l = 0`.
    pub fn new(alpha: f64, t: f64, phi: AnalyticFn) -> Result<ArcContext> {
        if !(alpha > 0.0 && alpha < PI) {
            return Err(GskError::InvalidSpec(format!("alpha out of (0, pi): {alpha}")));
        }
        let rule = gauss_chebyshev(CHEB_NODES, -1.0, 1.0)?;
        let cheb: Vec<f64> = rule.nodes.iter().map(|z| z.re).collect();
        let phi_cheb = cheb
            .iter()
            .map(|&s| phi.value(moebius(c(s), alpha, MoebiusDirection::ToLambda)?))
            .collect::<Result<Vec<_>>>()?;
        let cot = 1.0 / (0.5 * alpha).tan();
        let loop_l = Ellipse::new(c(0.0), 1.0, 0.5 * cot.min(1.0), LOOP_POINTS);
        Ok(ArcContext { alpha, t, phi, kappa: (0.5 * alpha).cos().powi(2), cheb, phi_cheb, loop_l })
    }

    pub fn from_spec(spec: &KernelSpec) -> Result<ArcContext> {
        match spec.support {
            Support::Arc { alpha } => ArcContext::new(alpha, spec.t, spec.phi.clone()),
            Support::Interval { .. } => Err(GskError::InvalidSpec("arc context needs an arc kernel".into())),
        }
    }

    pub fn loop_l(&self) -> Ellipse {
        self.loop_l
    }

    pub fn with_loop(mut self, loop_l: Ellipse) -> ArcContext {
        self.loop_l = loop_l;
        self
    }

    pub fn lambda(&self, z: Complex64) -> Result<Complex64> {
        moebius(z, self.alpha, MoebiusDirection::ToLambda)
    }

    pub fn z(&self, l: Complex64) -> Result<Complex64> {
        moebius(l, self.alpha, MoebiusDirection::ToZ)
    }

    /// The normalisation point `z = -i cot(alpha/2)`, image of `l = infinity`.
    pub fn z_infinity(&self) -> Complex64 {
        -I / (0.5 * self.alpha).tan()
    }

    pub fn r(&self, z: Complex64) -> Result<Complex64> {
        arc_r(z, self.alpha)
    }

    /// `phi(l(z))`.
    pub fn phi_z(&self, z: Complex64) -> Result<Complex64> {
        self.phi.value(self.lambda(z)?)
    }

    /// `(eta(z), eta'(z))` with `eta(z) = -(sqrt(z^2 - 1)/2 pi) int phi(l(s)) / (sqrt(1 - s^2)(s - z)) ds`.
    /// Close to the cut `phi(l(z))` is subtracted first, using `int ds / (sqrt(1 - s^2)(s - z)) = -pi / sqrt(z^2 - 1)`.
    pub fn eta_with_deriv(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let w = sqrt_z2m1(z)?;
        let n = self.cheb.len() as f64;
        let near = distance_to_segment(z) < 0.25 * (1.0 / (0.5 * self.alpha).tan()).min(1.0);
        let (f, df) = if near {
            let l = self.lambda(z)?;
            let dl = 2.0 * I * (0.5 * self.alpha).tan() / (1.0 - I * z * (0.5 * self.alpha).tan()).powi(2);
            let (f, d) = self.phi.eval_with_derivative(l)?;
            (f, d * dl)
        } else {
            (c(0.0), c(0.0))
        };
        let tiny = COLLIDE * 2.0;
        let (mut s1, mut s2) = (c(0.0), c(0.0));
        for (k, &s) in self.cheb.iter().enumerate() {
            let d = s - z;
            if d.norm() < tiny {
                // coincident node: the quotient is dphi/dz, its z-derivative term is dropped
                s1 += df;
                continue;
            }
            let q = (self.phi_cheb[k] - f) / d;
            s1 += q;
            s2 += (q - df) / d;
        }
        let eta = 0.5 * f - 0.5 * w * s1 / n;
        let deta = 0.5 * df - 0.5 * (z / w * s1 + w * s2) / n;
        Ok((eta, deta))
    }

    pub fn eta(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eta_with_deriv(z)?.0)
    }

    /// `eta_inf = (1/2 pi) int phi(l(s)) / sqrt(1 - s^2) ds`.
    pub fn eta_infinity(&self) -> Complex64 {
        0.5 * mean(&self.phi_cheb)
    }
}

pub fn arc_eta(actx: &ArcContext, z: Complex64) -> Result<Complex64> {
    actx.eta(z)
}

pub fn arc_eta_infinity(actx: &ArcContext) -> Complex64 {
    actx.eta_infinity()
}

#[cfg(test)]
mod tests;
