//! Quadrature rules: Gauss-Legendre and Gauss-Chebyshev on intervals and the
//! trapezoid rule on circles.
//!
//! Legendre nodes are found by Newton iteration on the three-term recurrence,
//! first in `f64` and then polished in the working precision, so a
//! quad-double Nyström matrix sees quad-double nodes.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};

use crate::error::{GskError, Result};
use crate::prec::{cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    GaussLegendre,
    GaussChebyshev,
    Circle,
    Ellipse,
}

/// `sum w_k f(x_k)` approximates the integral the rule was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub kind: RuleKind,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Like [`QuadRule::integrate`] for integrands that can fail.
    pub fn try_integrate<F: FnMut(Complex64) -> Result<Complex64>>(&self, mut f: F) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(x)?;
        }
        Ok(s)
    }
}

/// A circle `center + radius e^{i theta}`; `orientation` is +1 for counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
    pub n_points: usize,
    pub orientation: i8,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64, n_points: usize) -> Contour {
        Contour { center, radius, n_points, orientation: 1 }
    }

    pub fn reversed(self) -> Contour {
        Contour { orientation: -self.orientation, ..self }
    }

    pub fn with_points(self, n_points: usize) -> Contour {
        Contour { n_points, ..self }
    }

    /// `true` if `z` lies strictly inside the circle.
    pub fn encloses(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

fn check_interval(n: usize, a: f64, b: f64) -> Result<()> {
    if n == 0 {
        return Err(GskError::InvalidSpec("a quadrature rule needs at least one node".into()));
    }
    if !(a < b) {
        return Err(GskError::InvalidSpec(format!("quadrature interval needs a < b, got [{a}, {b}]")));
    }
    Ok(())
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let one = T::one();
    let (mut p0, mut p1) = (one, x);
    for k in 1..n {
        let kf = T::from_f64(k as f64);
        let p2 = (T::from_f64((2 * k + 1) as f64) * x * p1 - kf * p0) / (kf + one);
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    (p1, nf * (p0 - x * p1) / (one - x * x))
}

/// Gauss-Legendre nodes and weights on [-1, 1] in precision `T`, nodes increasing.
pub fn legendre_nodes<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(GskError::InvalidSpec("a quadrature rule needs at least one node".into()));
    }
    let mut xs = vec![T::zero(); n];
    let mut ws = vec![T::zero(); n];
    let two = T::from_f64(2.0);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(GskError::NotConverged { what: "Gauss-Legendre node", error: n as f64 });
        }
        let mut xt = T::from_f64(x);
        // quadratic convergence: each step doubles the correct digits
        let mut err = 1e-16;
        while err > T::EPS {
            let (p, dp) = legendre(n, xt);
            xt = xt - p / dp;
            err *= err * 1e2;
        }
        let (_, dp) = legendre(n, xt);
        let w = two / ((T::one() - xt * xt) * dp * dp);
        xs[n - 1 - i] = xt;
        ws[n - 1 - i] = w;
        xs[i] = -xt;
        ws[i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = T::zero();
    }
    Ok((xs, ws))
}

/// Gauss-Legendre rule of size `n` on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadRule> {
    check_interval(n, a, b)?;
    let (xs, ws) = legendre_nodes::<f64>(n)?;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(QuadRule {
        nodes: xs.iter().map(|&x| Complex64::new(mid + half * x, 0.0)).collect(),
        weights: ws.iter().map(|&w| Complex64::new(half * w, 0.0)).collect(),
        kind: RuleKind::GaussLegendre,
    })
}

/// Gauss-Chebyshev rule: `sum w_k f(x_k) ~ int_a^b f(s) ds / sqrt((s-a)(b-s))`.
pub fn gauss_chebyshev(n: usize, a: f64, b: f64) -> Result<QuadRule> {
    check_interval(n, a, b)?;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let w = Complex64::new(PI / n as f64, 0.0);
    Ok(QuadRule {
        nodes: (1..=n)
            .map(|k| Complex64::new(mid + half * ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos(), 0.0))
            .collect(),
        weights: vec![w; n],
        kind: RuleKind::GaussChebyshev,
    })
}

/// Trapezoid rule on a circle, nodes at half-step angles `2 pi (k + 1/2) / n`
/// so that none sits on the horizontal diameter.
pub fn contour_rule(c: &Contour) -> Result<QuadRule> {
    if c.n_points < 8 {
        return Err(GskError::InvalidSpec(format!("a contour needs at least 8 points, got {}", c.n_points)));
    }
    if !(c.radius > 0.0) || (c.orientation != 1 && c.orientation != -1) {
        return Err(GskError::InvalidSpec("contour needs a positive radius and orientation +-1".into()));
    }
    let n = c.n_points;
    let step = 2.0 * PI / n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let e = Complex64::from_polar(1.0, step * (k as f64 + 0.5));
        nodes.push(c.center + c.radius * e);
        // dz = i r e^{i theta} d theta
        weights.push(Complex64::new(0.0, c.orientation as f64 * c.radius * step) * e);
    }
    Ok(QuadRule { nodes, weights, kind: RuleKind::Circle })
}

/// Counterclockwise ellipse `center + half_length cosh(rho + i theta)` with foci
/// `center -+ half_length` and semi-minor axis `half_length sinh(rho)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: Complex64,
    pub half_length: f64,
    pub semi_minor: f64,
    pub n_points: usize,
}

impl Ellipse {
    pub fn new(center: Complex64, half_length: f64, semi_minor: f64, n_points: usize) -> Ellipse {
        Ellipse { center, half_length, semi_minor, n_points }
    }

    fn rho(&self) -> f64 {
        (self.semi_minor / self.half_length).asinh()
    }

    pub fn semi_major(&self) -> f64 {
        self.half_length * self.rho().cosh()
    }

    pub fn encloses(&self, z: Complex64) -> bool {
        let w = z - self.center;
        let (a, b) = (self.semi_major(), self.semi_minor);
        (w.re / a).powi(2) + (w.im / b).powi(2) < 1.0
    }
}

/// Trapezoid rule on an ellipse, half-step angles as for circles.
pub fn ellipse_rule(e: &Ellipse) -> Result<QuadRule> {
    if e.n_points < 8 {
        return Err(GskError::InvalidSpec(format!("a contour needs at least 8 points, got {}", e.n_points)));
    }
    if !(e.half_length > 0.0 && e.semi_minor > 0.0) {
        return Err(GskError::InvalidSpec("ellipse needs positive axes".into()));
    }
    let n = e.n_points;
    let step = 2.0 * PI / n as f64;
    let rho = e.rho();
    let (nodes, weights) = (0..n)
        .map(|k| {
            let w = Complex64::new(rho, step * (k as f64 + 0.5));
            (e.center + e.half_length * w.cosh(), Complex64::new(0.0, e.half_length * step) * w.sinh())
        })
        .unzip();
    Ok(QuadRule { nodes, weights, kind: RuleKind::Ellipse })
}

/// Offsets used for boundary values: `f(x +- i eps)` at these `eps`.
pub const EPS_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Richardson limit at `eps = 0` from values at `eps`, `eps/10`, `eps/100`,
/// removing the `eps` and `eps^2` terms. Works for scalars and 2x2 matrices.
pub fn eps_extrapolate<V>(v: [V; 3]) -> V
where
    V: Copy + std::ops::Sub<Output = V> + std::ops::Mul<Complex64, Output = V>,
{
    let step = |a: V, b: V, r: f64| (b * Complex64::new(r, 0.0) - a) * Complex64::new(1.0 / (r - 1.0), 0.0);
    let r1 = step(v[0], v[1], 10.0);
    let r2 = step(v[1], v[2], 10.0);
    step(r1, r2, 100.0)
}

/// Gauss-Legendre nodes on `[a, b]` and weights, in precision `T`.
pub fn gauss_legendre_in<T: Real>(n: usize, a: f64, b: f64) -> Result<(Vec<T>, Vec<T>)> {
    check_interval(n, a, b)?;
    let (xs, ws) = legendre_nodes::<T>(n)?;
    let mid = T::from_f64(a) * T::from_f64(0.5) + T::from_f64(b) * T::from_f64(0.5);
    let half = T::from_f64(b) * T::from_f64(0.5) - T::from_f64(a) * T::from_f64(0.5);
    Ok((xs.into_iter().map(|x| mid + half * x).collect(), ws.into_iter().map(|w| half * w).collect()))
}

/// Points `e^{i theta_k}` of a Gauss-Legendre rule in the angle on `(-alpha, alpha)`
/// with the curve weights `w_k i e^{i theta_k}`, in precision `T`.
pub fn arc_rule_in<T: Real>(n: usize, alpha: f64) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    let (th, w) = gauss_legendre_in::<T>(n, -alpha, alpha)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (t, w) in th.into_iter().zip(w) {
        let (s, c) = t.sin_cos();
        let z = Complex::new(c, s);
        nodes.push(z);
        weights.push(cx::scale(cx::mul_i(z), w));
    }
    Ok((nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{Dd, Qd};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn midpoint_rule() {
        let r = gauss_legendre(1, 0.0, 1.0).unwrap();
        assert_eq!(r.nodes, vec![c(0.5, 0.0)]);
        assert_eq!(r.weights, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn legendre_examples() {
        let r = gauss_legendre(2, -1.0, 1.0).unwrap();
        assert!((r.integrate(|s| s * s) - 2.0 / 3.0).norm() < 1e-14);
        let r = gauss_legendre(12, 0.0, 1.0).unwrap();
        assert!((r.integrate(|s| s.exp()) - (std::f64::consts::E - 1.0)).norm() < 1e-13);
    }

    #[test]
    fn legendre_exactness() {
        for n in [2usize, 4, 8, 16] {
            let (a, b) = (-0.3, 1.7);
            let r = gauss_legendre(n, a, b).unwrap();
            for d in 0..2 * n as i32 {
                let got = r.integrate(|s| s.powi(d)).re;
                let want = (b.powi(d + 1) - a.powi(d + 1)) / (d + 1) as f64;
                assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0), "n = {n}, degree {d}");
            }
        }
    }

    #[test]
    fn high_precision_nodes() {
        // sum of weights and a degree-2n-1 moment to quad-double accuracy
        let n = 40;
        let (x, w) = legendre_nodes::<Qd>(n).unwrap();
        let sw = w.iter().fold(Qd::from_f64(0.0), |s, &v| s + v);
        assert!((sw - Qd::from_f64(2.0)).abs().to_f64() < 1e-60);
        let m = x.iter().zip(&w).fold(Qd::from_f64(0.0), |s, (&x, &w)| {
            let x2 = x * x;
            s + w * x2 * x2 * x2 * x2
        });
        let want = Qd::from_f64(2.0) / Qd::from_f64(9.0);
        assert!((m - want).abs().to_f64() < 1e-60);
        let (xd, _) = legendre_nodes::<Dd>(n).unwrap();
        for (a, b) in xd.iter().zip(&x) {
            assert!((a.to_qd() - *b).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn arc_rule_measures_the_arc() {
        // int over the arc of dz = e^{i alpha} - e^{-i alpha}
        let alpha = 1.2;
        let (_, w) = arc_rule_in::<f64>(16, alpha).unwrap();
        let s: Complex64 = w.iter().sum();
        assert!((s - c(0.0, 2.0 * alpha.sin())).norm() < 1e-14);
    }

    #[test]
    fn chebyshev_examples() {
        for (a, b) in [(-1.0, 1.0), (0.5, 3.0)] {
            let r = gauss_chebyshev(7, a, b).unwrap();
            assert!((r.integrate(|_| c(1.0, 0.0)) - std::f64::consts::PI).norm() < 1e-15);
            assert!(r.weights.iter().all(|&w| w == c(std::f64::consts::PI / 7.0, 0.0)));
        }
        let r = gauss_chebyshev(9, -1.0, 1.0).unwrap();
        assert!(r.integrate(|s| s).norm() < 1e-15);
        assert!((r.integrate(|s| s * s) - std::f64::consts::FRAC_PI_2).norm() < 1e-14);
    }

    #[test]
    fn contour_examples() {
        let k = c(0.3, -0.2);
        let r = contour_rule(&Contour::new(k, 1.5, 16)).unwrap();
        let two_pi_i = c(0.0, 2.0 * std::f64::consts::PI);
        assert!((r.integrate(|z| 1.0 / (z - k)) - two_pi_i).norm() < 1e-13);
        assert!(r.integrate(|z| (z - k).powi(3)).norm() < 1e-13);
        assert!(r.integrate(|z| 1.0 / ((z - k) * (z - k))).norm() < 1e-13);
        let back = contour_rule(&Contour::new(k, 1.5, 16).reversed()).unwrap();
        assert!((back.integrate(|z| 1.0 / (z - k)) + two_pi_i).norm() < 1e-13);
        for z in &r.nodes {
            assert!(((z - k).norm() - 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn ellipse_examples() {
        let e = Ellipse::new(c(0.0, 0.0), 1.0, 0.3, 128);
        let r = ellipse_rule(&e).unwrap();
        let two_pi_i = c(0.0, 2.0 * std::f64::consts::PI);
        assert!((r.integrate(|z| 1.0 / (z - 0.9)) - two_pi_i).norm() < 1e-12);
        // poles at +-0.5i sit outside
        assert!(r.integrate(|z| 1.0 / (z * z + 0.25)).norm() < 1e-12);
        assert!(e.encloses(c(1.0, 0.0)) && e.encloses(c(0.0, 0.29)) && !e.encloses(c(0.0, 0.31)));
        for z in &r.nodes {
            let (a, b) = (e.semi_major(), e.semi_minor);
            assert!(((z.re / a).powi(2) + (z.im / b).powi(2) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(3, 1.0, 1.0).is_err());
        assert!(gauss_chebyshev(3, 2.0, 1.0).is_err());
        assert!(contour_rule(&Contour::new(c(0.0, 0.0), 1.0, 4)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn contour_doubling_converges(x in -1.0f64..1.0, y in -1.0f64..1.0, p in 2.5f64..4.0) {
            // analytic integrand with singularities outside the circle
            let f = |z: Complex64| (0.3 * z).exp() / (z - c(p, 0.5)) + (z * z + c(x, y)).sin();
            let base = Contour::new(c(0.2, 0.1), 1.5, 128);
            let a = contour_rule(&base).unwrap().integrate(f);
            let b = contour_rule(&base.with_points(256)).unwrap().integrate(f);
            prop_assert!((a - b).norm() <= 1e-11);
        }
    }
}
