//! Resolvent solves and the Cauchy reconstruction of `chi` and `chi^{-1}`.
//!
//! With `f = sqrt(w) F_R` and `g = sqrt(w) F_L` at the nodes,
//!
//! ```text
//! (I + K^T) f = sqrt(w) E_R,   (I + K) g = sqrt(w) E_L,
//! chi(l)      = I - sum sqrt(w_k) f_k E_L(mu_k)^T / (mu_k - l),
//! chi^{-1}(l) = I + sum sqrt(w_k) E_R(mu_k) g_k^T / (mu_k - l),
//! ```
//!
//! where `E_L = (-1/e, e)` and `E_R = -(e, 1/e) / (2 pi i)`. Near the support
//! the Cauchy sums are evaluated with singularity subtraction, using the
//! Nyström interpolants of `F_R` and `F_L` at `l` itself.
//!
//! Boundary values: `chi_+` is the limit from the left of the oriented support
//! (above the interval, inside the unit circle for the arc) and
//! `chi_- = chi_+ G_chi` with `G_chi = [[2, -e^2], [e^{-2}, 0]]`.

use num_complex::{Complex, Complex64};

use super::{KernelSpec, Support};
use crate::error::{GskError, Result};
use crate::exprs::AnalyticFn;
use crate::linalg::{Lu, Mat2};
use crate::prec::{cx, lift, lower, Dd, Precision, Qd, Real};
use crate::quad::{contour_rule, Contour};

type C<T> = Complex<T>;
type M<T> = [C<T>; 4];

/// Distance, relative to the support scale, below which the subtracted form is used.
const SUBTRACT_BELOW: f64 = 0.25;

fn outer<T: Real>(u: [C<T>; 2], v: [C<T>; 2]) -> M<T> {
    [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]]
}

fn lower_m<T: Real>(a: M<T>) -> Mat2 {
    Mat2::new(lower(a[0]), lower(a[1]), lower(a[2]), lower(a[3]))
}

fn axpy<T: Real>(acc: &mut M<T>, s: C<T>, a: &M<T>) {
    for (x, y) in acc.iter_mut().zip(a) {
        *x = *x + s * *y;
    }
}

/// `F_R` and `F_L` at the Nyström nodes, in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct FVectors {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub f_r: Vec<[Complex64; 2]>,
    pub f_l: Vec<[Complex64; 2]>,
}

struct Sol<T: Real> {
    spec: KernelSpec,
    nodes: Vec<C<T>>,
    weights: Vec<C<T>>,
    sw: Vec<C<T>>,
    /// `sqrt(w_k) f_k E_L(mu_k)^T`
    right: Vec<M<T>>,
    /// `sqrt(w_k) E_R(mu_k) g_k^T`
    left: Vec<M<T>>,
    f: Vec<[C<T>; 2]>,
    g: Vec<[C<T>; 2]>,
}

fn e_vectors<T: Real>(spec: &KernelSpec, l: C<T>) -> Result<([C<T>; 2], [C<T>; 2], C<T>, C<T>)> {
    let (le, dle) = spec.log_e(l)?;
    let e = cx::exp(le);
    let einv = cx::exp(-le);
    let pi = T::pi();
    // -1/(2 pi i) = i/(2 pi)
    let c = Complex::new(T::zero(), T::one() / (pi + pi));
    Ok(([-einv, e], [c * e, c * einv], le, dle))
}

impl<T: Real> Sol<T> {
    fn new(spec: &KernelSpec, n: usize) -> Result<Sol<T>> {
        let (mat, nodes, weights, sw) = super::assemble::complex_matrix::<T>(spec, n)?;
        let lu = Lu::factor(mat, n)?;
        let mut el = Vec::with_capacity(n);
        let mut er = Vec::with_capacity(n);
        for &l in &nodes {
            let (a, b, ..) = e_vectors(spec, l)?;
            el.push(a);
            er.push(b);
        }
        let mut f = vec![[cx::re(T::zero()); 2]; n];
        let mut g = vec![[cx::re(T::zero()); 2]; n];
        for comp in 0..2 {
            let mut r: Vec<C<T>> = (0..n).map(|k| sw[k] * er[k][comp]).collect();
            lu.solve_transpose(&mut r);
            let mut s: Vec<C<T>> = (0..n).map(|k| sw[k] * el[k][comp]).collect();
            lu.solve(&mut s);
            for k in 0..n {
                f[k][comp] = r[k];
                g[k][comp] = s[k];
            }
        }
        let right = (0..n).map(|k| {
            let mut o = outer(f[k], el[k]);
            o.iter_mut().for_each(|x| *x = *x * sw[k]);
            o
        });
        let left = (0..n).map(|k| {
            let mut o = outer(er[k], g[k]);
            o.iter_mut().for_each(|x| *x = *x * sw[k]);
            o
        });
        Ok(Sol { spec: spec.clone(), right: right.collect(), left: left.collect(), nodes, weights, sw, f, g })
    }

    /// `V(x, y)` in precision `T` from the logs of `e`.
    fn kernel(&self, x: C<T>, lex: C<T>, dlex: C<T>, y: C<T>, ley: C<T>) -> C<T> {
        let pi = T::pi();
        let d = x - y;
        if cx::abs(d).to_f64() < 1e-8 * self.spec.scale() {
            return cx::scale(cx::mul_i(dlex), T::one() / pi);
        }
        let c = Complex::new(T::zero(), T::one() / (pi + pi));
        let s = lex - ley;
        c * (cx::exp(s) - cx::exp(-s)) / d
    }

    /// `int_support dmu / (mu - l)`.
    fn log_integral(&self, l: C<T>) -> C<T> {
        let (lo, hi) = self.spec.endpoints();
        let (lo, hi) = (lift::<T>(lo), lift::<T>(hi));
        let base = cx::ln((hi - l) / (lo - l));
        match self.spec.support {
            Support::Interval { .. } => base,
            Support::Arc { alpha } => {
                // the principal log has its cut on the chord; the arc bounds the lens beyond it
                let z = lower(l);
                if z.norm() < 1.0 && z.re > alpha.cos() {
                    base + Complex::new(T::zero(), T::pi() + T::pi())
                } else {
                    base
                }
            }
        }
    }

    fn cauchy(&self, l: C<T>, terms: &[M<T>]) -> M<T> {
        let mut acc = [cx::re(T::zero()); 4];
        for (mu, t) in self.nodes.iter().zip(terms) {
            axpy(&mut acc, cx::re(T::one()) / (*mu - l), t);
        }
        acc
    }

    fn weight_sum(&self, l: C<T>) -> C<T> {
        self.nodes.iter().zip(&self.weights).fold(cx::re(T::zero()), |s, (mu, w)| s + *w / (*mu - l))
    }

    /// `chi` (or `chi^{-1}` when `inverse`) at `l`.
    fn eval(&self, z: Complex64, inverse: bool) -> Result<M<T>> {
        let dist = self.spec.distance_to_support(z);
        if dist < 1e-12 * self.spec.scale() {
            return Err(GskError::TooClose { what: "the support of the kernel", distance: dist });
        }
        let l = lift::<T>(z);
        let one = cx::re(T::one());
        let sign = if inverse { one } else { -one };
        let s = self.cauchy(l, if inverse { &self.left } else { &self.right });
        let mut out = [one, cx::re(T::zero()), cx::re(T::zero()), one];
        axpy(&mut out, sign, &s);
        if dist < SUBTRACT_BELOW * self.spec.scale() {
            // sum w_k (H_k - H(l)) / (mu_k - l) + H(l) L(l) replaces sum w_k H_k / (mu_k - l)
            let (el, er, le, dle) = e_vectors(&self.spec, l)?;
            let mut interp = if inverse { el } else { er };
            for k in 0..self.nodes.len() {
                let (lek, dlek) = self.spec.log_e(self.nodes[k])?;
                let v = if inverse {
                    self.kernel(l, le, dle, self.nodes[k], lek)
                } else {
                    self.kernel(self.nodes[k], lek, dlek, l, le)
                };
                let coef = v * self.sw[k];
                let vec = if inverse { self.g[k] } else { self.f[k] };
                interp[0] = interp[0] - coef * vec[0];
                interp[1] = interp[1] - coef * vec[1];
            }
            let h = if inverse { outer(er, interp) } else { outer(interp, el) };
            let corr = self.log_integral(l) - self.weight_sum(l);
            axpy(&mut out, sign * corr, &h);
        }
        Ok(out)
    }

    fn deriv(&self, z: Complex64) -> Result<M<T>> {
        let n = self.nodes.len();
        let dist = self.spec.distance_to_support(z);
        let spacing = std::f64::consts::PI * self.spec.scale() / n as f64;
        if dist < 2.0 * spacing {
            return Err(GskError::TooClose { what: "the support (derivative of chi)", distance: dist });
        }
        let l = lift::<T>(z);
        let mut acc = [cx::re(T::zero()); 4];
        for (mu, t) in self.nodes.iter().zip(&self.right) {
            let d = *mu - l;
            axpy(&mut acc, -(cx::re(T::one()) / (d * d)), t);
        }
        Ok(acc)
    }

    /// `tr[chi'(l) sigma_3 chi^{-1}(l)]` accumulated in precision `T`.
    fn trace_identity(&self, z: Complex64) -> Result<Complex64> {
        let d = self.deriv(z)?;
        let x = self.eval(z, true)?;
        Ok(lower(d[0] * x[0] - d[1] * x[2] + d[2] * x[1] - d[3] * x[3]))
    }

    fn f_vectors(&self) -> FVectors {
        let lw = |k: usize, v: [C<T>; 2]| {
            let s = self.sw[k];
            [lower(v[0] / s), lower(v[1] / s)]
        };
        FVectors {
            nodes: self.nodes.iter().map(|&z| lower(z)).collect(),
            weights: self.weights.iter().map(|&z| lower(z)).collect(),
            f_r: (0..self.nodes.len()).map(|k| lw(k, self.f[k])).collect(),
            f_l: (0..self.nodes.len()).map(|k| lw(k, self.g[k])).collect(),
        }
    }
}

enum Inner {
    F64(Sol<f64>),
    Dd(Sol<Dd>),
    Qd(Sol<Qd>),
}

macro_rules! dispatch {
    ($self:expr, $s:ident => $body:expr) => {
        match &$self.inner {
            Inner::F64($s) => $body,
            Inner::Dd($s) => $body,
            Inner::Qd($s) => $body,
        }
    };
}

/// Solved resolvent equations for one kernel; evaluates `chi`, `chi^{-1}` and `chi'`.
pub struct ChiSolution {
    inner: Inner,
    precision: Precision,
    n_nodes: usize,
}

impl ChiSolution {
    pub fn new(spec: &KernelSpec, n_nodes: usize) -> Result<ChiSolution> {
        let precision = spec.precision_for(n_nodes)?;
        let inner = match precision {
            Precision::Double => Inner::F64(Sol::new(spec, n_nodes)?),
            Precision::DoubleDouble => Inner::Dd(Sol::new(spec, n_nodes)?),
            Precision::Quad => Inner::Qd(Sol::new(spec, n_nodes)?),
        };
        Ok(ChiSolution { inner, precision, n_nodes })
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn spec(&self) -> &KernelSpec {
        dispatch!(self, s => &s.spec)
    }

    pub fn chi(&self, l: Complex64) -> Result<Mat2> {
        dispatch!(self, s => s.eval(l, false).map(lower_m))
    }

    pub fn chi_inverse(&self, l: Complex64) -> Result<Mat2> {
        dispatch!(self, s => s.eval(l, true).map(lower_m))
    }

    pub fn chi_deriv(&self, l: Complex64) -> Result<Mat2> {
        dispatch!(self, s => s.deriv(l).map(lower_m))
    }

    /// `tr[chi' sigma_3 chi^{-1}]`, formed before rounding to double.
    pub fn trace_identity(&self, l: Complex64) -> Result<Complex64> {
        dispatch!(self, s => s.trace_identity(l))
    }

    pub fn f_vectors(&self) -> FVectors {
        dispatch!(self, s => s.f_vectors())
    }
}

/// Solve the two resolvent equations on an `n_nodes` rule.
pub fn solve_f_vectors(spec: &KernelSpec, n_nodes: usize) -> Result<FVectors> {
    Ok(ChiSolution::new(spec, n_nodes)?.f_vectors())
}

pub fn chi_eval(sol: &ChiSolution, l: Complex64) -> Result<Mat2> {
    sol.chi(l)
}

pub fn chi_inverse_eval(sol: &ChiSolution, l: Complex64) -> Result<Mat2> {
    sol.chi_inverse(l)
}

pub fn chi_deriv_eval(sol: &ChiSolution, l: Complex64) -> Result<Mat2> {
    sol.chi_deriv(l)
}

/// `(1/2 pi i) oint d_t(ln e) tr[chi' sigma_3 chi^{-1}] dl` over `contour`, where
/// `d_t ln e = i m dtp / 2` on an interval (`dtp = d_t p`) and `dtp / 2` on the arc (`dtp = phi`).
/// On an interval this is `m oint tr[..] dtp dl / (4 pi)`; on the arc `(1/4 pi i) oint phi tr[..] dl`.
pub fn differential_identity_rhs(sol: &ChiSolution, dtp: &AnalyticFn, contour: &Contour) -> Result<Complex64> {
    let spec = sol.spec();
    let rule = contour_rule(contour)?;
    for &z in &rule.nodes {
        if spec.distance_to_support(z) < 1e-3 * spec.scale() {
            return Err(GskError::TooClose { what: "the support (identity contour)", distance: spec.distance_to_support(z) });
        }
    }
    let factor = if spec.is_arc() { Complex64::new(0.5, 0.0) } else { Complex64::new(0.0, 0.5 * spec.m) };
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let total = rule.try_integrate(|z| Ok(dtp.value(z)? * sol.trace_identity(z)?))?;
    Ok(factor * total / two_pi_i)
}
