//! Dense LU factorisation and the 2x2 matrix type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{Num, Zero};

use crate::error::GskError;
use crate::prec::{cx, Dd, Qd, Real};

/// Matrix entry: a [`Real`] or a complex number over one.
pub trait Entry: Copy + Num + Send + Sync + fmt::Debug + 'static {
    type Real: Real;
    /// `|re| + |im|` in double precision, used for pivoting.
    fn mag1(self) -> f64;
    fn ln_abs(self) -> Self::Real;
    fn arg_f64(self) -> f64;
}

macro_rules! real_entry {
    ($($t:ty),*) => {$(
        impl Entry for $t {
            type Real = $t;
            #[inline]
            fn mag1(self) -> f64 {
                Real::to_f64(self).abs()
            }
            fn ln_abs(self) -> $t {
                Real::ln(Real::abs(self))
            }
            fn arg_f64(self) -> f64 {
                if Real::to_f64(self) < 0.0 { std::f64::consts::PI } else { 0.0 }
            }
        }
    )*};
}
real_entry!(f64, Dd, Qd);

impl<T: Real> Entry for Complex<T> {
    type Real = T;
    #[inline]
    fn mag1(self) -> f64 {
        self.re.to_f64().abs() + self.im.to_f64().abs()
    }
    fn ln_abs(self) -> T {
        (self.re * self.re + self.im * self.im).ln() * T::from_f64(0.5)
    }
    fn arg_f64(self) -> f64 {
        cx::arg(self).to_f64()
    }
}

/// LU factorisation with partial pivoting, `P A = L U`, stored in place.
#[derive(Clone, Debug)]
pub struct Lu<E: Entry> {
    n: usize,
    a: Vec<E>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<E: Entry> Lu<E> {
    /// Factor a row-major `n x n` matrix.
    pub fn factor(mut a: Vec<E>, n: usize) -> Result<Self, GskError> {
        assert_eq!(a.len(), n * n, "matrix storage does not match n");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].mag1();
            for i in k + 1..n {
                let v = a[i * n + k].mag1();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(GskError::Singular { column: k });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv = E::one() / a[k * n + k];
            let (top, rest) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..k * n + n];
            for i in 0..n - k - 1 {
                let row = &mut rest[i * n..(i + 1) * n];
                let l = row[k] * inv;
                row[k] = l;
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x = *x - l * u;
                }
            }
        }
        Ok(Lu { n, a, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `ln det A` with the imaginary part accumulated entry by entry (not reduced mod 2 pi).
    pub fn log_det_unwound(&self) -> Complex64 {
        let n = self.n;
        let mut re = E::Real::zero();
        let mut im = 0.0;
        for k in 0..n {
            let d = self.a[k * n + k];
            re += d.ln_abs();
            im += d.arg_f64();
        }
        im += std::f64::consts::PI * (self.swaps % 2) as f64;
        Complex64::new(re.to_f64(), im)
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [E]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<E> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.a[i * n..i * n + i];
            let mut s = x[i];
            for (l, xj) in row.iter().zip(&x[..i]) {
                s = s - *l * *xj;
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = &self.a[i * n + i + 1..(i + 1) * n];
            let mut s = x[i];
            for (u, xj) in row.iter().zip(&x[i + 1..]) {
                s = s - *u * *xj;
            }
            x[i] = s / self.a[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Solve `A^T x = b` in place.
    pub fn solve_transpose(&self, b: &mut [E]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^T = U^T L^T P, so solve U^T y = b, L^T z = y, x = P^T z
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s = s - self.a[j * n + i] * y[j];
            }
            y[i] = s / self.a[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s = s - self.a[j * n + i] * y[j];
            }
            y[i] = s;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = y[k];
        }
    }
}

/// 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

const Z: Complex64 = Complex64::new(0.0, 0.0);
const O: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: O, b: Z, c: Z, d: O };
    pub const ZERO: Mat2 = Mat2 { a: Z, b: Z, c: Z, d: Z };
    pub const SIGMA3: Mat2 = Mat2 { a: O, b: Z, c: Z, d: Complex64::new(-1.0, 0.0) };
    /// sigma^+ = [[0, 1], [0, 0]]
    pub const SIGMA_PLUS: Mat2 = Mat2 { a: Z, b: O, c: Z, d: Z };
    /// sigma^- = [[0, 0], [1, 0]]
    pub const SIGMA_MINUS: Mat2 = Mat2 { a: Z, b: Z, c: O, d: Z };
    /// U = [[1, i], [i, 1]]
    pub const U: Mat2 = Mat2 { a: O, b: I, c: I, d: O };
    /// U^{-1} = (1/2)[[1, -i], [-i, 1]]
    pub const U_INV: Mat2 = Mat2 {
        a: Complex64::new(0.5, 0.0),
        b: Complex64::new(0.0, -0.5),
        c: Complex64::new(0.0, -0.5),
        d: Complex64::new(0.5, 0.0),
    };

    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn diag(x: Complex64, y: Complex64) -> Mat2 {
        Mat2 { a: x, b: Z, c: Z, d: y }
    }

    /// `x^{sigma_3}` = diag(x, 1/x).
    pub fn pow_sigma3(x: Complex64) -> Mat2 {
        Mat2::diag(x, x.inv())
    }

    /// `exp(w sigma_3)`.
    pub fn exp_sigma3(w: Complex64) -> Mat2 {
        Mat2::diag(w.exp(), (-w).exp())
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2 { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det }
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        Mat2 { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    /// Max-entry norm.
    pub fn norm(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn rank(&self, tol: f64) -> usize {
        if self.norm() <= tol {
            0
        } else if self.det().norm() <= tol * self.norm() * self.norm() {
            1
        } else {
            2
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2 { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2 { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: Complex64) -> Mat2 {
        self.scale(s)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{cx::cf, Qd};

    fn test_matrix<T: Real>(n: usize) -> Vec<Complex<T>> {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.5;
                let y = ((i * 3 + j * 5) % 11) as f64 / 11.0 - 0.5;
                a.push(cf::<T>(x + if i == j { 2.0 } else { 0.0 }, y));
            }
        }
        a
    }

    #[test]
    fn solves_reproduce_right_hand_sides() {
        let n = 9;
        let a = test_matrix::<f64>(n);
        let lu = Lu::factor(a.clone(), n).unwrap();
        let b: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let mut x = b.clone();
        lu.solve(&mut x);
        let mut y = b.clone();
        lu.solve_transpose(&mut y);
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            let mut t = Complex64::new(0.0, 0.0);
            for j in 0..n {
                s += a[i * n + j] * x[j];
                t += a[j * n + i] * y[j];
            }
            assert!((s - b[i]).norm() < 1e-12);
            assert!((t - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn log_det_of_permutation_and_diagonal() {
        // [[0, 2], [3, 0]] has det -6
        let a = vec![cf::<f64>(0.0, 0.0), cf(2.0, 0.0), cf(3.0, 0.0), cf(0.0, 0.0)];
        let ld = Lu::factor(a, 2).unwrap().log_det_unwound();
        assert!((ld.re - 6f64.ln()).abs() < 1e-15);
        assert!((ld.im.rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn quad_and_double_log_dets_agree() {
        let n = 12;
        let d = Lu::factor(test_matrix::<f64>(n), n).unwrap().log_det_unwound();
        let q = Lu::factor(test_matrix::<Qd>(n), n).unwrap().log_det_unwound();
        assert!((d - q).norm() < 1e-12);
    }

    #[test]
    fn real_entries_match_complex_path() {
        let n = 10;
        let c = test_matrix::<Dd>(n);
        let r: Vec<Dd> = c.iter().map(|z| z.re).collect();
        let cr: Vec<Complex<Dd>> = r.iter().map(|&x| Complex::new(x, Dd::ZERO)).collect();
        let a = Lu::factor(r, n).unwrap().log_det_unwound();
        let b = Lu::factor(cr, n).unwrap().log_det_unwound();
        assert!((a.re - b.re).abs() < 1e-14);
        let wrap = |x: f64| (x / std::f64::consts::PI).round() as i64 % 2;
        assert_eq!(wrap(a.im).abs(), wrap(b.im).abs());
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = vec![cf::<f64>(1.0, 0.0), cf(2.0, 0.0), cf(2.0, 0.0), cf(4.0, 0.0)];
        assert!(matches!(Lu::factor(a, 2), Err(GskError::Singular { .. })));
    }

    #[test]
    fn mat2_algebra() {
        let m = Mat2::new(
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(3.0, -1.0),
        );
        assert!((m * m.inverse() - Mat2::IDENTITY).norm() < 1e-14);
        assert!((Mat2::U * Mat2::U_INV - Mat2::IDENTITY).norm() < 1e-15);
        assert_eq!(Mat2::SIGMA_PLUS.rank(1e-12), 1);
    }
}
