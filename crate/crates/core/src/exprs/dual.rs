use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};

use super::Func;
use crate::error::{GskError, Result};
use crate::prec::{cx, lower, Real};

/// `value + deriv * eps` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T: Real> {
    pub value: Complex<T>,
    pub deriv: Complex<T>,
}

fn domain<T: Real>(what: &'static str, at: Complex<T>) -> GskError {
    GskError::Domain { what, at: lower(at) }
}

/// Principal-branch functions are undefined on `(-inf, 0]`.
fn check_cut<T: Real>(what: &'static str, z: Complex<T>) -> Result<()> {
    if cx::on_negative_axis(z, 4.0 * T::EPS) {
        Err(domain(what, z))
    } else {
        Ok(())
    }
}

impl<T: Real> Dual<T> {
    pub fn new(value: Complex<T>, deriv: Complex<T>) -> Self {
        Dual { value, deriv }
    }

    pub fn constant(value: Complex<T>) -> Self {
        Dual { value, deriv: Complex::new(T::zero(), T::zero()) }
    }

    /// The independent variable at `z`.
    pub fn variable(z: Complex<T>) -> Self {
        Dual { value: z, deriv: Complex::new(T::one(), T::zero()) }
    }

    fn chain(self, value: Complex<T>, slope: Complex<T>) -> Self {
        Dual { value, deriv: slope * self.deriv }
    }

    pub fn div(self, o: Dual<T>) -> Result<Dual<T>> {
        if o.value.re == T::zero() && o.value.im == T::zero() {
            return Err(domain("division by zero", o.value));
        }
        let q = self.value / o.value;
        Ok(Dual { value: q, deriv: (self.deriv - q * o.deriv) / o.value })
    }

    fn is_constant(&self) -> bool {
        self.deriv.re == T::zero() && self.deriv.im == T::zero()
    }

    pub fn pow(self, e: Dual<T>) -> Result<Dual<T>> {
        // constant integer exponents stay exact and are defined for every base
        if e.is_constant() && e.value.im == T::zero() {
            let n = e.value.re.to_f64();
            if n.fract() == 0.0 && n.abs() <= 1024.0 {
                let n = n as i32;
                if n == 0 {
                    return Ok(Dual::constant(Complex::new(T::one(), T::zero())));
                }
                if n < 0 && self.value.re == T::zero() && self.value.im == T::zero() {
                    return Err(domain("negative power of zero", self.value));
                }
                let pm1 = cx::powi(self.value, n - 1);
                let nn = T::from_f64(n as f64);
                return Ok(self.chain(pm1 * self.value, cx::scale(pm1, nn)));
            }
        }
        check_cut("non-integer power of a non-positive base", self.value)?;
        let l = cx::ln(self.value);
        let v = cx::exp(e.value * l);
        // d(a^b) = a^b (b' ln a + b a'/a)
        let deriv = v * (e.deriv * l + e.value * self.deriv / self.value);
        Ok(Dual { value: v, deriv })
    }

    pub fn apply(self, f: Func) -> Result<Dual<T>> {
        let z = self.value;
        Ok(match f {
            Func::Sin => self.chain(cx::sin(z), cx::cos(z)),
            Func::Cos => self.chain(cx::cos(z), -cx::sin(z)),
            Func::Tan => {
                let c = cx::cos(z);
                if cx::abs(c).to_f64() == 0.0 {
                    return Err(domain("pole of tan", z));
                }
                let t = cx::sin(z) / c;
                let one = Complex::new(T::one(), T::zero());
                self.chain(t, one + t * t)
            }
            Func::Sinh => {
                let (s, c) = cx::sinh_cosh(z);
                self.chain(s, c)
            }
            Func::Cosh => {
                let (s, c) = cx::sinh_cosh(z);
                self.chain(c, s)
            }
            Func::Exp => {
                let e = cx::exp(z);
                self.chain(e, e)
            }
            Func::Log => {
                check_cut("log on its branch cut", z)?;
                let one = Complex::new(T::one(), T::zero());
                self.chain(cx::ln(z), one / z)
            }
            Func::Sqrt => {
                check_cut("sqrt on its branch cut", z)?;
                let s = cx::sqrt(z);
                let half = T::from_f64(0.5);
                self.chain(s, Complex::new(half, T::zero()) / s)
            }
            Func::Atan => {
                // cuts on the imaginary axis beyond +-i
                let one = Complex::new(T::one(), T::zero());
                let iz = cx::mul_i(z);
                check_cut("atan on its branch cut", one + iz)?;
                check_cut("atan on its branch cut", one - iz)?;
                self.chain(cx::atan(z), one / (one + z * z))
            }
        })
    }

    pub fn lower(self) -> Dual<f64> {
        Dual { value: lower(self.value), deriv: lower(self.deriv) }
    }
}

impl Dual<f64> {
    pub fn as_pair(self) -> (Complex64, Complex64) {
        (self.value, self.deriv)
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Dual<T>;
    fn add(self, o: Dual<T>) -> Dual<T> {
        Dual { value: self.value + o.value, deriv: self.deriv + o.deriv }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Dual<T>;
    fn sub(self, o: Dual<T>) -> Dual<T> {
        Dual { value: self.value - o.value, deriv: self.deriv - o.deriv }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Dual<T>;
    fn mul(self, o: Dual<T>) -> Dual<T> {
        Dual { value: self.value * o.value, deriv: self.deriv * o.value + self.value * o.deriv }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Dual<T>;
    fn neg(self) -> Dual<T> {
        Dual { value: -self.value, deriv: -self.deriv }
    }
}
