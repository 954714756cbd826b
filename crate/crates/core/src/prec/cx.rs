//! Elementary functions of a complex variable over any [`Real`].
//!
//! Branches are principal: `ln` and `sqrt` have their cut on the negative
//! real axis and `arg` takes values in (-pi, pi]. As with `f64`, a negative
//! zero imaginary part selects the lower lip of the cut.

use num_complex::Complex;

use super::Real;

pub type C<T> = Complex<T>;

#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn cf<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

#[inline]
pub fn i<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn abs<T: Real>(z: C<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

#[inline]
pub fn arg<T: Real>(z: C<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn scale<T: Real>(z: C<T>, s: T) -> C<T> {
    Complex::new(z.re * s, z.im * s)
}

#[inline]
pub fn mul_i<T: Real>(z: C<T>) -> C<T> {
    Complex::new(-z.im, z.re)
}

pub fn exp<T: Real>(z: C<T>) -> C<T> {
    let r = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(r * c, r * s)
}

pub fn ln<T: Real>(z: C<T>) -> C<T> {
    Complex::new(abs(z).ln(), arg(z))
}

pub fn sqrt<T: Real>(z: C<T>) -> C<T> {
    let zero = T::zero();
    if z.re == zero && z.im == zero {
        return z;
    }
    let r = abs(z);
    let half = T::from_f64(0.5);
    if z.re >= zero {
        let t = ((r + z.re) * half).sqrt();
        Complex::new(t, z.im / (t + t))
    } else {
        let t = ((r - z.re) * half).sqrt();
        let u = z.im.abs() / (t + t);
        if z.im < zero || (z.im == zero && z.im.hi().is_sign_negative()) {
            Complex::new(u, -t)
        } else {
            Complex::new(u, t)
        }
    }
}

/// `(sinh z, cosh z)`.
pub fn sinh_cosh<T: Real>(z: C<T>) -> (C<T>, C<T>) {
    let e = z.re.exp();
    let ei = T::one() / e;
    let half = T::from_f64(0.5);
    let (sh, ch) = if z.re.abs().to_f64() < 1e-3 {
        // avoid cancellation in (e - 1/e)/2
        (sinh_small(z.re), (e + ei) * half)
    } else {
        ((e - ei) * half, (e + ei) * half)
    };
    let (s, c) = z.im.sin_cos();
    (Complex::new(sh * c, ch * s), Complex::new(ch * c, sh * s))
}

fn sinh_small<T: Real>(x: T) -> T {
    // x + x^3/3! + ... ; |x| < 1e-3 so a handful of terms reach any working precision
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    for _ in 0..12 {
        term = term * x2 / T::from_f64((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

pub fn sinh<T: Real>(z: C<T>) -> C<T> {
    sinh_cosh(z).0
}

pub fn cosh<T: Real>(z: C<T>) -> C<T> {
    sinh_cosh(z).1
}

pub fn sin<T: Real>(z: C<T>) -> C<T> {
    // sin z = -i sinh(i z)
    let s = sinh(mul_i(z));
    Complex::new(s.im, -s.re)
}

pub fn cos<T: Real>(z: C<T>) -> C<T> {
    cosh(mul_i(z))
}

pub fn tan<T: Real>(z: C<T>) -> C<T> {
    sin(z) / cos(z)
}

/// Principal arctangent, `(i/2) [ln(1 - i z) - ln(1 + i z)]`.
pub fn atan<T: Real>(z: C<T>) -> C<T> {
    let one = C::new(T::one(), T::zero());
    let iz = mul_i(z);
    let d = ln(one - iz) - ln(one + iz);
    scale(mul_i(d), T::from_f64(0.5))
}

pub fn powi<T: Real>(z: C<T>, n: i32) -> C<T> {
    let mut base = if n < 0 { C::new(T::one(), T::zero()) / z } else { z };
    let mut e = n.unsigned_abs();
    let mut acc = C::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `true` if `z` lies on the principal branch cut `(-inf, 0]` (to within `tol`).
pub fn on_negative_axis<T: Real>(z: C<T>, tol: f64) -> bool {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re <= 0.0 && im.abs() <= tol * re.abs().max(1e-300)
}
