//! Double-double arithmetic (about 106 bits).
//!
//! Only the field operations are native; the transcendental functions are
//! rounded from their quad-double counterparts since they are never on a hot path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use super::qd::Qd;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd(pub [f64; 2]);

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    #[cfg(target_feature = "fma")]
    {
        (p, a.mul_add(b, -p))
    }
    #[cfg(not(target_feature = "fma"))]
    {
        const SPLITTER: f64 = 134_217_729.0;
        let t = SPLITTER * a;
        let ah = t - (t - a);
        let al = a - ah;
        let t = SPLITTER * b;
        let bh = t - (t - b);
        let bl = b - bh;
        (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
    }
}

impl Dd {
    pub const ZERO: Dd = Dd([0.0, 0.0]);
    pub const ONE: Dd = Dd([1.0, 0.0]);
    pub const PI: Dd = Dd([std::f64::consts::PI, 1.2246467991473532e-16]);
    /// 2^-104
    pub const EPSILON: f64 = 4.930380657631324e-32;

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd([x, 0.0])
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }

    pub fn to_qd(self) -> Qd {
        Qd([self.0[0], self.0[1], 0.0, 0.0])
    }

    pub fn from_qd(q: Qd) -> Dd {
        let (s, e) = quick_two_sum(q.0[0], q.0[1] + q.0[2]);
        Dd([s, e])
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.0[0], b);
        let (s, e) = quick_two_sum(p1, p2 + self.0[1] * b);
        Dd([s, e])
    }

    pub fn sqrt(self) -> Dd {
        if self.0[0] <= 0.0 {
            return Dd::from_f64(if self.0[0] == 0.0 { 0.0 } else { f64::NAN });
        }
        let x = 1.0 / self.0[0].sqrt();
        let ax = self.0[0] * x;
        let ax_dd = Dd::from_f64(ax);
        let corr = (self - ax_dd * ax_dd).0[0] * (x * 0.5);
        let (s, e) = two_sum(ax, corr);
        Dd([s, e])
    }

    pub fn exp(self) -> Dd {
        Dd::from_qd(self.to_qd().exp())
    }

    pub fn ln(self) -> Dd {
        Dd::from_qd(self.to_qd().ln())
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let (s, c) = self.to_qd().sin_cos();
        (Dd::from_qd(s), Dd::from_qd(c))
    }

    pub fn atan2(self, x: Dd) -> Dd {
        Dd::from_qd(self.to_qd().atan2(x.to_qd()))
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({})", self.to_qd().to_sci_string(32))
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd([-self.0[0], -self.0[1]])
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.0[0], b.0[0]);
        let (t1, t2) = two_sum(self.0[1], b.0[1]);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd([s1, s2])
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.0[0], b.0[0]);
        let p2 = p2 + (self.0[0] * b.0[1] + self.0[1] * b.0[0]);
        let (s, e) = quick_two_sum(p1, p2);
        Dd([s, e])
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.0[0] / b.0[0];
        let r = self - b.mul_f64(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q2);
        let q3 = r.0[0] / b.0[0];
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd([q1, q2]) + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        Dd::from_qd(self.to_qd() % b.to_qd())
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, b: Dd) {
                *self = *self $op b;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.0[0].partial_cmp(&other.0[0])? {
            Ordering::Equal => self.0[1].partial_cmp(&other.0[1]),
            o => Some(o),
        }
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, Self::FromStrRadixErr> {
        Qd::from_str_radix(s, radix).map(Dd::from_qd)
    }
}
