//! Quad-double arithmetic.
//!
//! A [`Qd`] is an unevaluated sum of four non-overlapping `f64` limbs, giving
//! roughly 212 bits of mantissa with the exponent range of `f64`. The
//! algorithms follow Hida, Li and Bailey's QD library (the "sloppy" add and
//! multiply variants, which are accurate relative to the operand magnitudes).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

/// Quad-double number `x[0] + x[1] + x[2] + x[3]` with `|x[i+1]| <= ulp(x[i]) / 2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Qd(pub [f64; 4]);

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

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
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
        let (ah, al) = split(a);
        let (bh, bl) = split(b);
        (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
    }
}

#[inline(always)]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    let (b, c) = two_sum(t2, t3);
    (a, b, c)
}

#[inline(always)]
fn three_sum2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    (a, t2 + t3)
}

#[inline(always)]
fn renorm4(c0: f64, c1: f64, c2: f64, c3: f64) -> Qd {
    if !c0.is_finite() {
        return Qd([c0, 0.0, 0.0, 0.0]);
    }
    let (s0, c3) = quick_two_sum(c2, c3);
    let (s0, c2) = quick_two_sum(c1, s0);
    let (c0, c1) = quick_two_sum(c0, s0);
    let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
        }
    }
    Qd([s0, s1, s2, s3])
}

#[inline(always)]
fn renorm5(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Qd {
    if !c0.is_finite() {
        return Qd([c0, 0.0, 0.0, 0.0]);
    }
    let (s0, c4) = quick_two_sum(c3, c4);
    let (s0, c3) = quick_two_sum(c2, s0);
    let (s0, c2) = quick_two_sum(c1, s0);
    let (c0, c1) = quick_two_sum(c0, s0);
    let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                (s2, s3) = quick_two_sum(s2, c4);
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    Qd([s0, s1, s2, s3])
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);
    pub const PI: Qd = Qd([
        std::f64::consts::PI,
        1.2246467991473532e-16,
        -2.9947698097183397e-33,
        1.1124542208633653e-49,
    ]);
    pub const TWO_PI: Qd = Qd([
        std::f64::consts::TAU,
        2.4492935982947064e-16,
        -5.989539619436679e-33,
        2.2249084417267306e-49,
    ]);
    pub const HALF_PI: Qd = Qd([
        std::f64::consts::FRAC_PI_2,
        6.123233995736766e-17,
        -1.4973849048591698e-33,
        5.562271104316826e-50,
    ]);
    pub const LN2: Qd = Qd([
        std::f64::consts::LN_2,
        2.3190468138462996e-17,
        5.707708438416212e-34,
        -3.5824322106018114e-50,
    ]);
    /// 2^-209, a safe unit roundoff for the sloppy operations.
    pub const EPSILON: f64 = 1.5192908393215678e-63;

    #[inline]
    pub const fn from_f64(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }

    /// Nearest `f64` (to within one rounding of the leading limbs).
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0[0] + (self.0[1] + self.0[2])
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0[0].is_finite()
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0[0] < 0.0
    }

    #[inline]
    pub fn abs(self) -> Qd {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    pub fn ldexp(self, e: i32) -> Qd {
        let s = 2f64.powi(e);
        Qd([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (c0, e) = two_sum(a[0], b);
        let (c1, e) = two_sum(a[1], e);
        let (c2, e) = two_sum(a[2], e);
        let (c3, e) = two_sum(a[3], e);
        renorm5(c0, c1, c2, c3, e)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (p0, q0) = two_prod(a[0], b);
        let (p1, q1) = two_prod(a[1], b);
        let (p2, q2) = two_prod(a[2], b);
        let p3 = a[3] * b;
        let (s1, s2) = two_sum(q0, p1);
        let (s2, q1, p2) = three_sum(s2, q1, p2);
        let (q1, q2) = three_sum2(q1, q2, p3);
        renorm5(p0, s1, s2, q1, q2 + p2)
    }

    pub fn div_f64(self, b: f64) -> Qd {
        let q0 = self.0[0] / b;
        let r = self - Qd::from_f64(b).mul_f64(q0);
        let q1 = r.0[0] / b;
        let r = r - Qd::from_f64(b).mul_f64(q1);
        let q2 = r.0[0] / b;
        let r = r - Qd::from_f64(b).mul_f64(q2);
        let q3 = r.0[0] / b;
        renorm4(q0, q1, q2, q3)
    }

    #[inline]
    pub fn sqr(self) -> Qd {
        self * self
    }

    /// Round to the nearest integer (ties away from zero).
    pub fn round(self) -> Qd {
        let x = self.0;
        let mut r0 = x[0].round();
        if r0 == x[0] {
            let mut r1 = x[1].round();
            if r1 == x[1] {
                let mut r2 = x[2].round();
                if r2 == x[2] {
                    let r3 = x[3].round();
                    return renorm4(r0, r1, r2, r3);
                }
                if (r2 - x[2]).abs() == 0.5 && x[3] < 0.0 {
                    r2 -= 1.0;
                }
                return renorm4(r0, r1, r2, 0.0);
            }
            if (r1 - x[1]).abs() == 0.5 && x[2] < 0.0 {
                r1 -= 1.0;
            }
            return renorm4(r0, r1, 0.0, 0.0);
        }
        if (r0 - x[0]).abs() == 0.5 && x[1] < 0.0 {
            r0 -= 1.0;
        }
        Qd([r0, 0.0, 0.0, 0.0])
    }

    pub fn sqrt(self) -> Qd {
        if self.0[0] == 0.0 {
            return Qd::ZERO;
        }
        if self.0[0] < 0.0 {
            return Qd::from_f64(f64::NAN);
        }
        // Newton on 1/sqrt(a): r <- r + r (1/2 - a r^2 / 2)
        let h = self.ldexp(-1);
        let mut r = Qd::from_f64(1.0 / self.0[0].sqrt());
        for _ in 0..3 {
            r += (Qd::from_f64(0.5) - h * r.sqr()) * r;
        }
        r * self
    }

    pub fn exp(self) -> Qd {
        const SQUARINGS: i32 = 10;
        let a0 = self.0[0];
        if a0 > 709.78 {
            return Qd::from_f64(f64::INFINITY);
        }
        if a0 < -745.2 {
            return Qd::ZERO;
        }
        if a0 == 0.0 {
            return Qd::ONE;
        }
        let k = (a0 / Qd::LN2.0[0]).round();
        let r = (self - Qd::LN2.mul_f64(k)).ldexp(-SQUARINGS);
        // expm1 of the reduced argument, |r| < 3.5e-4
        let inv = inv_factorials();
        let mut s = r;
        let mut p = r;
        for c in inv.iter().skip(2) {
            p *= r;
            let t = p * *c;
            s += t;
            if t.0[0].abs() <= 1e-66 * s.0[0].abs() {
                break;
            }
        }
        for _ in 0..SQUARINGS {
            s = s.ldexp(1) + s.sqr();
        }
        (s + Qd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Qd {
        if self.0[0] <= 0.0 {
            return Qd::from_f64(if self.0[0] == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self == Qd::ONE {
            return Qd::ZERO;
        }
        // Newton on exp(x) = a
        let mut x = Qd::from_f64(self.0[0].ln());
        for _ in 0..3 {
            x = x + self * (-x).exp() - Qd::ONE;
        }
        x
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(self) -> (Qd, Qd) {
        if self.0[0] == 0.0 {
            return (Qd::ZERO, Qd::ONE);
        }
        let z = (self.0[0] / Qd::TWO_PI.0[0]).round();
        let r = self - Qd::TWO_PI.mul_f64(z);
        let j = (r.0[0] / Qd::HALF_PI.0[0]).round();
        let t = r - Qd::HALF_PI.mul_f64(j);
        // halve four times, Taylor, then double back
        let s = t.ldexp(-4);
        let x = s.sqr();
        let inv = inv_factorials();
        let mut sn = Qd::ZERO;
        let mut cs = Qd::ZERO;
        for k in (0..15).rev() {
            let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
            sn = sn * x + inv[2 * k + 1].mul_f64(sgn);
            cs = cs * x + inv[2 * k].mul_f64(sgn);
        }
        let mut sn = sn * s;
        for _ in 0..4 {
            let s2 = (sn * cs).ldexp(1);
            cs = (cs - sn) * (cs + sn);
            sn = s2;
        }
        match (j as i64).rem_euclid(4) {
            0 => (sn, cs),
            1 => (cs, -sn),
            2 => (-sn, -cs),
            _ => (-cs, sn),
        }
    }

    pub fn sin(self) -> Qd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Qd {
        self.sin_cos().1
    }

    /// Four-quadrant arctangent of `self / x`, in [-pi, pi]; like `f64::atan2`
    /// a negative zero `self` on the negative axis gives -pi.
    pub fn atan2(self, x: Qd) -> Qd {
        let y = self;
        if x.0[0] == 0.0 && y.0[0] == 0.0 {
            return Qd::ZERO;
        }
        if y.0[0] == 0.0 {
            return if x.0[0] > 0.0 {
                Qd::ZERO
            } else if y.0[0].is_sign_negative() {
                -Qd::PI
            } else {
                Qd::PI
            };
        }
        if x.0[0] == 0.0 {
            return if y.0[0] > 0.0 { Qd::HALF_PI } else { -Qd::HALF_PI };
        }
        let r = (x.sqr() + y.sqr()).sqrt();
        let xx = x / r;
        let yy = y / r;
        let mut z = Qd::from_f64(y.0[0].atan2(x.0[0]));
        for _ in 0..3 {
            let (s, c) = z.sin_cos();
            if xx.0[0].abs() > yy.0[0].abs() {
                z += (yy - s) / c;
            } else {
                z -= (xx - c) / s;
            }
        }
        z
    }

    /// Decimal rendering with `digits` significant digits (for diagnostics).
    pub fn to_sci_string(self, digits: usize) -> String {
        if self.0[0] == 0.0 {
            return "0".to_string();
        }
        if !self.is_finite() {
            return format!("{}", self.0[0]);
        }
        let neg = self.0[0] < 0.0;
        let mut x = self.abs();
        let mut e = x.0[0].log10().floor() as i32;
        x = x * pow10(-e);
        if x.0[0] >= 10.0 {
            x = x.div_f64(10.0);
            e += 1;
        } else if x.0[0] < 1.0 {
            x = x.mul_f64(10.0);
            e -= 1;
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        for i in 0..digits {
            let d = x.0[0].floor().clamp(0.0, 9.0);
            out.push(char::from(b'0' + d as u8));
            if i == 0 {
                out.push('.');
            }
            x = (x - Qd::from_f64(d)).mul_f64(10.0);
        }
        out.push_str(&format!("e{e}"));
        out
    }
}

fn pow10(e: i32) -> Qd {
    let mut r = Qd::ONE;
    let ten = Qd::from_f64(10.0);
    for _ in 0..e.unsigned_abs() {
        r = if e > 0 { r * ten } else { r / ten };
    }
    r
}

fn inv_factorials() -> &'static [Qd; 32] {
    static TABLE: OnceLock<[Qd; 32]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [Qd::ONE; 32];
        for k in 1..32 {
            t[k] = t[k - 1].div_f64(k as f64);
        }
        t
    })
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qd({})", self.to_sci_string(64))
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Qd {
        Qd::from_f64(x)
    }
}

impl Neg for Qd {
    type Output = Qd;
    #[inline]
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    #[inline]
    fn add(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (s0, t0) = two_sum(a[0], b[0]);
        let (s1, t1) = two_sum(a[1], b[1]);
        let (s2, t2) = two_sum(a[2], b[2]);
        let (s3, t3) = two_sum(a[3], b[3]);
        let (s1, t0) = two_sum(s1, t0);
        let (s2, t0, t1) = three_sum(s2, t0, t1);
        let (s3, t0) = three_sum2(s3, t0, t2);
        renorm5(s0, s1, s2, s3, t0 + t1 + t3)
    }
}

impl Sub for Qd {
    type Output = Qd;
    #[inline]
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    #[inline]
    fn mul(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (p0, q0) = two_prod(a[0], b[0]);
        let (p1, q1) = two_prod(a[0], b[1]);
        let (p2, q2) = two_prod(a[1], b[0]);
        let (p3, q3) = two_prod(a[0], b[2]);
        let (p4, q4) = two_prod(a[1], b[1]);
        let (p5, q5) = two_prod(a[2], b[0]);

        let (p1, p2, q0) = three_sum(p1, p2, q0);

        // six-three sum of p2, q1, q2, p3, p4, p5
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        let s2 = s2 + (t0 + t1);

        let s1 = s1 + (a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5);
        renorm5(p0, p1, s0, s1, s2)
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let q0 = self.0[0] / b.0[0];
        let r = self - b.mul_f64(q0);
        let q1 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q2);
        let q3 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q3);
        let q4 = r.0[0] / b.0[0];
        renorm5(q0, q1, q2, q3, q4)
    }
}

impl Rem for Qd {
    type Output = Qd;
    fn rem(self, b: Qd) -> Qd {
        let q = self / b;
        let n = if q.0[0] < 0.0 { -((-q).floor_pos()) } else { q.floor_pos() };
        self - n * b
    }
}

impl Qd {
    fn floor_pos(self) -> Qd {
        let r = self.round();
        if r > self {
            r - Qd::ONE
        } else {
            r
        }
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Qd {
            #[inline]
            fn $m(&mut self, b: Qd) {
                *self = *self $op b;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i])? {
                Ordering::Equal => continue,
                o => return Some(o),
            }
        }
        Some(Ordering::Equal)
    }
}

impl Zero for Qd {
    fn zero() -> Qd {
        Qd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for Qd {
    fn one() -> Qd {
        Qd::ONE
    }
}

impl Num for Qd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Qd, Self::FromStrRadixErr> {
        if radix != 10 {
            // only decimal text is meaningful here; fall through to the float parser error
            return "radix".parse::<f64>().map(Qd::from_f64);
        }
        parse_decimal(s)
    }
}

/// Parse a decimal literal to full quad-double accuracy.
pub fn parse_decimal(s: &str) -> Result<Qd, std::num::ParseFloatError> {
    // validate with the f64 parser first
    let _: f64 = s.trim().parse()?;
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().unwrap_or(0)),
        None => (t, 0),
    };
    let mut acc = Qd::ZERO;
    let mut scale = exp;
    let mut after_dot = false;
    for ch in mant.chars() {
        match ch {
            '.' => after_dot = true,
            d if d.is_ascii_digit() => {
                acc = acc.mul_f64(10.0).add_f64(f64::from(d as u8 - b'0'));
                if after_dot {
                    scale -= 1;
                }
            }
            _ => {}
        }
    }
    let v = if scale >= 0 { acc * pow10(scale) } else { acc / pow10(-scale) };
    Ok(if neg { -v } else { v })
}
