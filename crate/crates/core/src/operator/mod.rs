//! The integrable kernel, its Nyström Fredholm determinant and the matrix
//! function `chi` reconstructed from the resolvent.
//!
//! Both variants share the form
//!
//! ```text
//! V(l, m) = -(e(l)/e(m) - e(m)/e(l)) / (2 pi i (l - m))
//! ```
//!
//! with `e = exp(i m p / 2 + g / 2)` on an interval and `e = l^{m/2} exp(t phi / 2)`
//! on the arc `|l| = 1, |arg l| < alpha`. Internally everything is written in
//! terms of `le = ln e`.

mod assemble;
mod chi;

use num_complex::{Complex, Complex64};

use crate::error::{GskError, Result};
use crate::exprs::AnalyticFn;
use crate::prec::{cx, lift, Precision, Real};

pub use crate::linalg::Mat2;
pub use chi::{
    chi_deriv_eval, chi_eval, chi_inverse_eval, differential_identity_rhs, solve_f_vectors, ChiSolution,
    FVectors,
};

use assemble::{log_det_in, DetPath};

/// Extra decimal digits kept beyond the estimated cancellation in `I + V`.
const SAFETY_DIGITS: f64 = 13.0;

/// How the arc is parametrised for the Nyström rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ArcChart {
    /// Gauss-Legendre in the angle `theta` on `(-alpha, alpha)`.
    #[default]
    Angle,
    /// Gauss-Legendre in `z` on `(-1, 1)` through the Möbius map `l = (1 + i z tan(alpha/2)) / (1 - i z tan(alpha/2))`.
    Moebius,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Interval { a: f64, b: f64 },
    Arc { alpha: f64 },
}

/// Working precision: fixed, or chosen from the estimated conditioning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrecisionChoice {
    #[default]
    Auto,
    Fixed(Precision),
}

impl std::str::FromStr for PrecisionChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            Ok(PrecisionChoice::Auto)
        } else {
            s.parse().map(PrecisionChoice::Fixed)
        }
    }
}

/// A kernel on an interval (`p`, `g`) or on the arc (`phi`, `t`).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub support: Support,
    pub m: f64,
    pub p: AnalyticFn,
    pub g: AnalyticFn,
    pub phi: AnalyticFn,
    /// Coupling in front of `phi`; unused on an interval.
    pub t: f64,
    /// Radius of the neighbourhood of the support where `p`, `g`, `phi` are analytic.
    pub analyticity_radius: f64,
    pub precision: PrecisionChoice,
    pub arc_chart: ArcChart,
}

/// Result of a Nyström determinant evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct DetReport {
    pub m: f64,
    pub n_nodes: usize,
    pub lndet_numeric: Complex64,
    pub lndet_asymptotic: Option<Complex64>,
    pub residual: Option<f64>,
    pub node_doubling_error: f64,
    pub precision: Precision,
}

impl DetReport {
    /// Attach an asymptotic value, moving the numeric log onto the branch nearest to it.
    pub fn with_asymptotic(mut self, asym: Complex64) -> DetReport {
        let two_pi = 2.0 * std::f64::consts::PI;
        let k = ((asym.im - self.lndet_numeric.im) / two_pi).round();
        self.lndet_numeric.im += k * two_pi;
        self.lndet_asymptotic = Some(asym);
        self.residual = Some((self.lndet_numeric - asym).norm());
        self
    }
}

fn sample_points(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| {
        let c = ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
        0.5 * (a + b) + 0.5 * (b - a) * c
    })
}

impl KernelSpec {
    /// Interval kernel; checks `a < b` and `p' > 0` at 64 Chebyshev points.
    pub fn interval(a: f64, b: f64, m: f64, p: AnalyticFn, g: AnalyticFn) -> Result<KernelSpec> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(GskError::InvalidSpec(format!("interval needs a < b, got [{a}, {b}]")));
        }
        if !(m >= 0.0) || !m.is_finite() {
            return Err(GskError::InvalidSpec(format!("m must be non-negative, got {m}")));
        }
        for x in sample_points(a, b, 64) {
            let dp = p.deriv(Complex64::new(x, 0.0))?;
            if !(dp.re > 0.0) {
                return Err(GskError::InvalidSpec(format!("p' must be positive on [a, b]; p'({x}) = {dp}")));
            }
        }
        Ok(KernelSpec {
            support: Support::Interval { a, b },
            m,
            p,
            g,
            phi: AnalyticFn::zero(),
            t: 0.0,
            analyticity_radius: 1.0,
            precision: PrecisionChoice::Auto,
            arc_chart: ArcChart::Angle,
        })
    }

    /// Pure sine kernel: `p = x`, `g = 0`.
    pub fn pure_sine(a: f64, b: f64, m: f64) -> Result<KernelSpec> {
        KernelSpec::interval(a, b, m, AnalyticFn::identity(), AnalyticFn::zero())
    }

    /// Arc kernel `e = l^{m/2} exp(t phi / 2)` on `|arg l| < alpha`.
    pub fn arc(alpha: f64, m: f64, phi: AnalyticFn, t: f64) -> Result<KernelSpec> {
        if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
            return Err(GskError::InvalidSpec(format!("alpha out of (0, pi): {alpha}")));
        }
        if !(m >= 0.0) || !m.is_finite() || !t.is_finite() {
            return Err(GskError::InvalidSpec(format!("m must be non-negative and t finite, got m = {m}, t = {t}")));
        }
        Ok(KernelSpec {
            support: Support::Arc { alpha },
            m,
            p: AnalyticFn::identity(),
            g: AnalyticFn::zero(),
            phi,
            t,
            analyticity_radius: 0.5,
            precision: PrecisionChoice::Auto,
            arc_chart: ArcChart::Angle,
        })
    }

    pub fn with_m(&self, m: f64) -> KernelSpec {
        KernelSpec { m, ..self.clone() }
    }

    pub fn with_t(&self, t: f64) -> KernelSpec {
        KernelSpec { t, ..self.clone() }
    }

    pub fn with_precision(&self, precision: PrecisionChoice) -> KernelSpec {
        KernelSpec { precision, ..self.clone() }
    }

    pub fn with_analyticity_radius(&self, r: f64) -> KernelSpec {
        KernelSpec { analyticity_radius: r, ..self.clone() }
    }

    pub fn with_chart(&self, arc_chart: ArcChart) -> KernelSpec {
        KernelSpec { arc_chart, ..self.clone() }
    }

    pub fn is_arc(&self) -> bool {
        matches!(self.support, Support::Arc { .. })
    }

    /// Length scale of the support, used for closeness thresholds.
    pub fn scale(&self) -> f64 {
        match self.support {
            Support::Interval { a, b } => b - a,
            Support::Arc { alpha } => 2.0 * (0.5 * alpha).sin().max(alpha / std::f64::consts::PI),
        }
    }

    /// Endpoints of the support (`e^{-i alpha}`, `e^{i alpha}` for the arc).
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        match self.support {
            Support::Interval { a, b } => (Complex64::new(a, 0.0), Complex64::new(b, 0.0)),
            Support::Arc { alpha } => (Complex64::from_polar(1.0, -alpha), Complex64::from_polar(1.0, alpha)),
        }
    }

    /// Euclidean distance from `z` to the support.
    pub fn distance_to_support(&self, z: Complex64) -> f64 {
        let (l, r) = self.endpoints();
        let ends = (z - l).norm().min((z - r).norm());
        match self.support {
            Support::Interval { a, b } => {
                if z.re >= a && z.re <= b {
                    z.im.abs()
                } else {
                    ends
                }
            }
            Support::Arc { alpha } => {
                if z.norm() > 0.0 && z.arg().abs() <= alpha {
                    (z.norm() - 1.0).abs()
                } else {
                    ends
                }
            }
        }
    }

    /// `ln e(l)` and its derivative in precision `T`.
    pub fn log_e<T: Real>(&self, l: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        let half = T::from_f64(0.5);
        match self.support {
            Support::Interval { .. } => {
                let p = self.p.eval_dual(l)?;
                let g = self.g.eval_dual(l)?;
                let im = cx::cf::<T>(0.0, self.m);
                Ok((cx::scale(im * p.value + g.value, half), cx::scale(im * p.deriv + g.deriv, half)))
            }
            Support::Arc { .. } => {
                if l.re == T::zero() && l.im == T::zero() {
                    return Err(GskError::Domain { what: "arc kernel at the origin", at: Complex64::new(0.0, 0.0) });
                }
                let mh = T::from_f64(0.5 * self.m);
                let th = T::from_f64(0.5 * self.t);
                let (mut le, mut dle) = (cx::scale(cx::ln(l), mh), cx::re(mh) / l);
                if self.t != 0.0 {
                    let f = self.phi.eval_dual(l)?;
                    le = le + cx::scale(f.value, th);
                    dle = dle + cx::scale(f.deriv, th);
                }
                Ok((le, dle))
            }
        }
    }

    /// `e(l)`.
    pub fn e_value(&self, l: Complex64) -> Result<Complex64> {
        Ok(self.log_e::<f64>(l)?.0.exp())
    }

    /// Whether the Nyström matrix can be formed in real arithmetic.
    pub(crate) fn det_path(&self) -> DetPath {
        match self.support {
            Support::Interval { .. } if self.g.is_zero() => DetPath::RealInterval,
            Support::Arc { .. } if self.arc_chart == ArcChart::Angle && (self.t == 0.0 || self.phi.is_zero()) => {
                DetPath::RealArc
            }
            _ => DetPath::Complex,
        }
    }

    /// `true` when the determinant is known to be real (pure sine type, Widom case).
    pub fn has_real_determinant(&self) -> bool {
        match self.support {
            Support::Interval { a, b } => {
                self.g.is_zero()
                    && sample_points(a, b, 16)
                        .all(|x| self.p.value(Complex64::new(x, 0.0)).map(|v| v.im == 0.0).unwrap_or(false))
            }
            Support::Arc { .. } => self.t == 0.0 || self.phi.is_zero(),
        }
    }

    /// Exponential rate `c` such that the smallest factor of `I + V` is about `e^{-m c}`.
    pub fn decay_rate(&self) -> Result<f64> {
        Ok(match self.support {
            Support::Interval { a, b } => {
                let mut top: f64 = 0.0;
                for x in sample_points(a, b, 64) {
                    top = top.max(self.p.deriv(Complex64::new(x, 0.0))?.re);
                }
                0.5 * (b - a) * top
            }
            Support::Arc { alpha } => {
                let s = (0.5 * alpha).sin();
                ((1.0 + s) / (1.0 - s)).ln()
            }
        })
    }

    /// Spread of `Re ln|e|` along the support that does not scale with `m`.
    fn weight_spread(&self) -> Result<f64> {
        let (f, scale): (&AnalyticFn, f64) = match self.support {
            Support::Interval { .. } => (&self.g, 0.5),
            Support::Arc { .. } => (&self.phi, 0.5 * self.t.abs()),
        };
        if scale == 0.0 || f.is_zero() {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in sample_points(-1.0, 1.0, 64) {
            let z = match self.support {
                Support::Interval { a, b } => Complex64::new(0.5 * (a + b) + 0.5 * (b - a) * s, 0.0),
                Support::Arc { alpha } => Complex64::from_polar(1.0, alpha * s),
            };
            let v = f.value(z)?.re;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(2.0 * scale * (hi - lo))
    }

    /// Decimal digits needed for an `n`-node Nyström determinant.
    pub fn digits_needed(&self, n: usize) -> Result<f64> {
        let ln10 = std::f64::consts::LN_10;
        Ok(self.m * self.decay_rate()? / ln10 + self.weight_spread()? / ln10 + SAFETY_DIGITS + (n as f64).log10())
    }

    /// Working precision for an `n`-node computation.
    pub fn precision_for(&self, n: usize) -> Result<Precision> {
        match self.precision {
            PrecisionChoice::Fixed(p) => Ok(p),
            PrecisionChoice::Auto => {
                let d = self.digits_needed(n)?;
                Precision::for_digits(d).ok_or_else(|| {
                    GskError::OutOfRange(format!("m = {} needs about {d:.0} digits, beyond quad-double", self.m))
                })
            }
        }
    }
}

/// `V(l, mu)` in double precision, with the diagonal limit `-(e'/e)(l) / (i pi)` when `l ~ mu`.
pub fn kernel_value(spec: &KernelSpec, l: Complex64, mu: Complex64) -> Result<Complex64> {
    let (le_l, dle) = spec.log_e::<f64>(l)?;
    if (l - mu).norm() < 1e-8 * spec.scale() {
        return Ok(-dle / Complex64::new(0.0, std::f64::consts::PI));
    }
    let (le_m, _) = spec.log_e::<f64>(mu)?;
    let d = le_l - le_m;
    let num = d.exp() - (-d).exp();
    Ok(-num / (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * (l - mu)))
}

/// Principal-branch `ln det(I + V)` for an `n`-node rule, with its precision.
pub fn log_det(spec: &KernelSpec, n_nodes: usize) -> Result<(Complex64, Precision)> {
    if n_nodes == 0 {
        return Err(GskError::InvalidSpec("n_nodes must be positive".into()));
    }
    let prec = spec.precision_for(n_nodes)?;
    let raw = match prec {
        Precision::Double => log_det_in::<f64>(spec, n_nodes)?,
        Precision::DoubleDouble => log_det_in::<crate::prec::Dd>(spec, n_nodes)?,
        Precision::Quad => log_det_in::<crate::prec::Qd>(spec, n_nodes)?,
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut v = raw;
    v.im -= two_pi * (v.im / two_pi).round();
    if spec.has_real_determinant() {
        if v.im.abs() > 1e-6 {
            return Err(GskError::Accuracy(format!(
                "determinant should be positive but ln det has imaginary part {:e}",
                v.im
            )));
        }
        v.im = 0.0;
    }
    Ok((v, prec))
}

/// Nyström `ln det(I + V)` with the node-doubling error estimate.
pub fn fredholm_log_det(spec: &KernelSpec, n_nodes: usize) -> Result<DetReport> {
    if n_nodes < 32 {
        return Err(GskError::InvalidSpec(format!("fredholm_log_det needs at least 32 nodes, got {n_nodes}")));
    }
    let (v, precision) = log_det(spec, n_nodes)?;
    let (v2, _) = log_det(spec, 2 * n_nodes)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut diff = v2 - v;
    diff.im -= two_pi * (diff.im / two_pi).round();
    let err = diff.norm();
    if err > 1e-6 {
        return Err(GskError::NotConverged { what: "Nyström determinant under node doubling", error: err });
    }
    Ok(DetReport {
        m: spec.m,
        n_nodes,
        lndet_numeric: v,
        lndet_asymptotic: None,
        residual: None,
        node_doubling_error: err,
        precision,
    })
}

/// Nodes and weights of the Nyström rule in precision `T`.
pub(crate) fn discretize<T: Real>(spec: &KernelSpec, n: usize) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    match spec.support {
        Support::Interval { a, b } => {
            let (x, w) = crate::quad::gauss_legendre_in::<T>(n, a, b)?;
            Ok((x.into_iter().map(cx::re).collect(), w.into_iter().map(cx::re).collect()))
        }
        Support::Arc { alpha } => match spec.arc_chart {
            ArcChart::Angle => crate::quad::arc_rule_in::<T>(n, alpha),
            ArcChart::Moebius => {
                let (z, w) = crate::quad::gauss_legendre_in::<T>(n, -1.0, 1.0)?;
                let tau = lift::<T>(Complex64::new(0.0, (0.5 * alpha).tan()));
                let one = cx::re(T::one());
                let mut nodes = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                for (z, w) in z.into_iter().zip(w) {
                    let iz = tau * cx::re(z);
                    let den = one - iz;
                    nodes.push((one + iz) / den);
                    // dl/dz = 2 i tan(alpha/2) / (1 - i z tan(alpha/2))^2
                    weights.push(cx::scale((tau + tau) / (den * den), w));
                }
                Ok((nodes, weights))
            }
        },
    }
}
