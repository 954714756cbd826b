//! Nyström matrices `I + sqrt(w) V sqrt(w)` in working precision.

use num_complex::{Complex, Complex64};

use super::{discretize, KernelSpec, Support};
use crate::error::Result;
use crate::linalg::{Entry, Lu};
use crate::prec::{cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum DetPath {
    /// `g = 0` on an interval: `V = -sin(m (p(x) - p(y)) / 2) / (pi (x - y))`.
    RealInterval,
    /// `t = 0` on the arc in the angle chart: `-sin(m d/2) / (2 pi sin(d/2))` with `d = theta - theta'`.
    RealArc,
    Complex,
}

/// Row-major `I + K`, `K_jk = sqrt(w_j) V(l_j, l_k) sqrt(w_k)`, with the square roots used.
pub(crate) fn complex_matrix<T: Real>(
    spec: &KernelSpec,
    n: usize,
) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>, Vec<Complex<T>>, Vec<Complex<T>>)> {
    let (nodes, weights) = discretize::<T>(spec, n)?;
    let sw: Vec<Complex<T>> = weights.iter().map(|&w| cx::sqrt(w)).collect();
    let mut e = Vec::with_capacity(n);
    let mut einv = Vec::with_capacity(n);
    let mut dle = Vec::with_capacity(n);
    for &l in &nodes {
        let (le, d) = spec.log_e(l)?;
        e.push(cx::exp(le));
        einv.push(cx::exp(-le));
        dle.push(d);
    }
    let one = cx::re(T::one());
    let pi = T::pi();
    // -1 / (2 pi i) = i / (2 pi)
    let c = Complex::new(T::zero(), T::one() / (pi + pi));
    let mut a = vec![cx::re(T::zero()); n * n];
    for j in 0..n {
        let row = &mut a[j * n..(j + 1) * n];
        for k in 0..n {
            let v = if j == k {
                // -(e'/e) / (i pi) = i (e'/e) / pi
                cx::scale(cx::mul_i(dle[j]), T::one() / pi)
            } else {
                c * (e[j] * einv[k] - einv[j] * e[k]) / (nodes[j] - nodes[k])
            };
            row[k] = sw[j] * v * sw[k];
        }
        row[j] = row[j] + one;
    }
    Ok((a, nodes, weights, sw))
}

fn real_interval_matrix<T: Real + Entry>(spec: &KernelSpec, n: usize) -> Result<Option<Vec<T>>> {
    let (a, b) = match spec.support {
        Support::Interval { a, b } => (a, b),
        Support::Arc { .. } => unreachable!("real interval path on an arc"),
    };
    let (x, w) = crate::quad::gauss_legendre_in::<T>(n, a, b)?;
    let half_m = T::from_f64(0.5 * spec.m);
    let mut s = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    for &xk in &x {
        let d = spec.p.eval_dual(cx::re(xk))?;
        if d.value.im != T::zero() || d.deriv.im != T::zero() {
            return Ok(None);
        }
        let (sk, ck) = (half_m * d.value.re).sin_cos();
        s.push(sk);
        c.push(ck);
        dp.push(d.deriv.re);
    }
    let sw: Vec<T> = w.iter().map(|&v| v.sqrt()).collect();
    let pi = T::pi();
    let inv_pi = T::one() / pi;
    let mut mat = vec![T::zero(); n * n];
    for j in 0..n {
        let row = &mut mat[j * n..(j + 1) * n];
        for k in 0..n {
            let v = if j == k {
                -(half_m * dp[j]) * inv_pi
            } else {
                -(s[j] * c[k] - c[j] * s[k]) * inv_pi / (x[j] - x[k])
            };
            row[k] = sw[j] * v * sw[k];
        }
        row[j] += T::one();
    }
    Ok(Some(mat))
}

fn real_arc_matrix<T: Real + Entry>(spec: &KernelSpec, n: usize) -> Result<Vec<T>> {
    let alpha = match spec.support {
        Support::Arc { alpha } => alpha,
        Support::Interval { .. } => unreachable!("real arc path on an interval"),
    };
    let (th, w) = crate::quad::gauss_legendre_in::<T>(n, -alpha, alpha)?;
    let half = T::from_f64(0.5);
    let half_m = T::from_f64(0.5 * spec.m);
    let (mut s, mut c, mut sh, mut ch) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &t in &th {
        let (a, b) = (half_m * t).sin_cos();
        s.push(a);
        c.push(b);
        let (a, b) = (half * t).sin_cos();
        sh.push(a);
        ch.push(b);
    }
    let sw: Vec<T> = w.iter().map(|&v| v.sqrt()).collect();
    let two_pi = T::pi() + T::pi();
    let mut mat = vec![T::zero(); n * n];
    for j in 0..n {
        let row = &mut mat[j * n..(j + 1) * n];
        for k in 0..n {
            let v = if j == k {
                -(half_m + half_m) / two_pi
            } else {
                -(s[j] * c[k] - c[j] * s[k]) / (two_pi * (sh[j] * ch[k] - ch[j] * sh[k]))
            };
            row[k] = sw[j] * v * sw[k];
        }
        row[j] += T::one();
    }
    Ok(mat)
}

/// Unreduced `ln det(I + K)` in precision `T`.
pub(crate) fn log_det_in<T: Real + Entry>(spec: &KernelSpec, n: usize) -> Result<Complex64> {
    match spec.det_path() {
        DetPath::RealInterval => {
            if let Some(mat) = real_interval_matrix::<T>(spec, n)? {
                return Ok(Lu::factor(mat, n)?.log_det_unwound());
            }
        }
        DetPath::RealArc => {
            let mat = real_arc_matrix::<T>(spec, n)?;
            return Ok(Lu::factor(mat, n)?.log_det_unwound());
        }
        DetPath::Complex => {}
    }
    let (mat, ..) = complex_matrix::<T>(spec, n)?;
    Ok(Lu::factor(mat, n)?.log_det_unwound())
}
