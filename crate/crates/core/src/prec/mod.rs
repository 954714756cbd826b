//! Working-precision scalars.
//!
//! Everything that touches the Nyström matrix is generic over [`Real`], which
//! is implemented for `f64`, double-double [`Dd`] and quad-double [`Qd`]. Determinants
//! of the sine kernel decay like `exp(-c m^2)` while the smallest factor of
//! `I + V` is roughly `exp(-c' m)`, so double precision stops resolving it
//! once `m` is a few dozen.

pub mod cx;
mod dd;
mod qd;

use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::Num;

pub use dd::Dd;
pub use qd::{parse_decimal, Qd};

/// Real scalar with the elementary functions needed by the kernels.
pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Unit roundoff.
    const EPS: f64;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    /// Leading limb; carries the sign of zero.
    fn hi(self) -> f64;

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        self * Self::from_f64(b)
    }
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    const NAME: &'static str = "f64";

    #[inline]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn pi() -> f64 {
        std::f64::consts::PI
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    #[inline]
    fn sin_cos(self) -> (f64, f64) {
        f64::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: f64) -> f64 {
        f64::atan2(self, x)
    }
    #[inline]
    fn hi(self) -> f64 {
        self
    }
}

impl Real for Qd {
    const EPS: f64 = Qd::EPSILON;
    const NAME: &'static str = "quad-double";

    #[inline]
    fn from_f64(x: f64) -> Qd {
        Qd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Qd::to_f64(self)
    }
    #[inline]
    fn pi() -> Qd {
        Qd::PI
    }
    #[inline]
    fn abs(self) -> Qd {
        Qd::abs(self)
    }
    fn sqrt(self) -> Qd {
        Qd::sqrt(self)
    }
    fn exp(self) -> Qd {
        Qd::exp(self)
    }
    fn ln(self) -> Qd {
        Qd::ln(self)
    }
    fn sin_cos(self) -> (Qd, Qd) {
        Qd::sin_cos(self)
    }
    fn atan2(self, x: Qd) -> Qd {
        Qd::atan2(self, x)
    }
    #[inline]
    fn hi(self) -> f64 {
        self.0[0]
    }
    #[inline]
    fn mul_f64(self, b: f64) -> Qd {
        Qd::mul_f64(self, b)
    }
}

impl Real for Dd {
    const EPS: f64 = Dd::EPSILON;
    const NAME: &'static str = "double-double";

    #[inline]
    fn from_f64(x: f64) -> Dd {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn pi() -> Dd {
        Dd::PI
    }
    #[inline]
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    fn exp(self) -> Dd {
        Dd::exp(self)
    }
    fn ln(self) -> Dd {
        Dd::ln(self)
    }
    fn sin_cos(self) -> (Dd, Dd) {
        Dd::sin_cos(self)
    }
    fn atan2(self, x: Dd) -> Dd {
        Dd::atan2(self, x)
    }
    #[inline]
    fn hi(self) -> f64 {
        self.0[0]
    }
    #[inline]
    fn mul_f64(self, b: f64) -> Dd {
        Dd::mul_f64(self, b)
    }
}

/// Lift a double-precision complex number.
#[inline]
pub fn lift<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Round a complex number to double precision.
#[inline]
pub fn lower<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// Working precision of a determinant or resolvent computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
    Quad,
}

impl Precision {
    /// Decimal digits carried.
    pub fn digits(self) -> f64 {
        match self {
            Precision::Double => 15.9,
            Precision::DoubleDouble => 31.3,
            Precision::Quad => 62.8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::DoubleDouble => "double-double",
            Precision::Quad => "quad-double",
        }
    }
}

impl Precision {
    /// Cheapest precision carrying at least `digits` decimal digits, or `None`
    /// if even quad-double falls short.
    pub fn for_digits(digits: f64) -> Option<Precision> {
        [Precision::Double, Precision::DoubleDouble, Precision::Quad]
            .into_iter()
            .find(|p| p.digits() >= digits)
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" | "f64" => Ok(Precision::Double),
            "double-double" | "dd" => Ok(Precision::DoubleDouble),
            "quad" | "qd" | "quad-double" => Ok(Precision::Quad),
            _ => Err(format!("unknown precision '{s}'")),
        }
    }
}
