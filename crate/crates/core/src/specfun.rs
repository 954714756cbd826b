//! Hankel functions of order zero and their derivatives for complex arguments.
//!
//! Small arguments use the Bessel power series in double-double; large ones
//! use the Hankel expansions
//!
//! ```text
//! H1_nu(z) ~ -i (2i/(pi z))^(1/2) e^{iz} e^{-i pi nu/2} sum (i/(2z))^n (nu,n)
//! H2_nu(z) ~  i (-2i/(pi z))^(1/2) e^{-iz} e^{i pi nu/2} sum (-i/(2z))^n (nu,n)
//! ```
//!
//! with `(2i/(pi z))^(1/2) = e^{i pi/4} (2/pi)^(1/2) z^(-1/2)` on the principal
//! root of `z`. These expansions are used as printed only in `Re z >= 0`; the
//! left half-plane is reached through the rotations `z = e^{+-i pi} w`.

use std::sync::LazyLock;

use num_complex::{Complex, Complex64};

use crate::error::{GskError, Result};
use crate::prec::{cx, lift, lower, Dd};

/// Number of terms kept in the asymptotic sums and in the `(nu,n)` table.
pub const N_MAX: usize = 12;
/// Modulus above which the asymptotic expansion replaces the power series.
pub const Z_SWITCH: f64 = 12.0;
/// Cancellation factor above which a result is flagged as inaccurate.
pub const CANCELLATION_LIMIT: f64 = 1e8;

const EULER_GAMMA: Dd = Dd([0.5772156649015329, -4.942915152430645e-18]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HankelKind {
    First,
    Second,
}

impl HankelKind {
    /// The other kind.
    pub fn conjugate(self) -> HankelKind {
        match self {
            HankelKind::First => HankelKind::Second,
            HankelKind::Second => HankelKind::First,
        }
    }

    /// `+1` for the first kind, `-1` for the second.
    pub fn sign(self) -> f64 {
        match self {
            HankelKind::First => 1.0,
            HankelKind::Second => -1.0,
        }
    }
}

impl std::str::FromStr for HankelKind {
    type Err = GskError;
    fn from_str(s: &str) -> Result<HankelKind> {
        match s.trim() {
            "1" | "first" => Ok(HankelKind::First),
            "2" | "second" => Ok(HankelKind::Second),
            other => Err(GskError::InvalidSpec(format!("Hankel kind must be 1 or 2, got '{other}'"))),
        }
    }
}

/// Which algorithm produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Series,
    Asymptotic,
}

impl Regime {
    pub fn for_arg(z: Complex64) -> Regime {
        if z.norm() <= Z_SWITCH {
            Regime::Series
        } else {
            Regime::Asymptotic
        }
    }
}

/// A Hankel value with its cancellation diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HankelValue {
    pub value: Complex64,
    pub regime: Regime,
    /// `(|2A| + |B|) / |2A + B|` when a rotation combined two expansions, else 1.
    pub cancellation: f64,
}

impl HankelValue {
    pub fn is_accurate(&self) -> bool {
        self.cancellation <= CANCELLATION_LIMIT
    }
}

/// `(nu,n) = Gamma(nu + 1/2 + n) / (Gamma(nu + 1/2 - n) n!)` by its ratio recurrence.
fn nu_symbol_general(nu: f64, n: usize) -> f64 {
    let mut v = 1.0;
    for k in 0..n {
        let odd = (2 * k + 1) as f64;
        v *= (4.0 * nu * nu - odd * odd) / (4.0 * (k + 1) as f64);
    }
    v
}

/// Cached `(0,n)` for `n = 0..=N_MAX`.
#[derive(Clone, Debug)]
pub struct NuSymbolTable {
    values: [f64; N_MAX + 1],
}

impl NuSymbolTable {
    pub fn new() -> NuSymbolTable {
        let mut values = [0.0; N_MAX + 1];
        for (n, v) in values.iter_mut().enumerate() {
            *v = nu_symbol_general(0.0, n);
        }
        NuSymbolTable { values }
    }

    pub fn get(&self, n: usize) -> Result<f64> {
        self.values.get(n).copied().ok_or_else(|| {
            GskError::OutOfRange(format!("(0,n) is tabulated for n <= {N_MAX}, got {n}"))
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for NuSymbolTable {
    fn default() -> Self {
        NuSymbolTable::new()
    }
}

static NU_TABLE: LazyLock<NuSymbolTable> = LazyLock::new(NuSymbolTable::new);

/// `(0,n)`.
pub fn nu_symbol(n: usize) -> Result<f64> {
    NU_TABLE.get(n)
}

/// `(a_n, b_n) = (1/(1-2n), 2n/(1-2n))`.
pub fn ab_coefficients(n: usize) -> (f64, f64) {
    let d = 1.0 - 2.0 * n as f64;
    (1.0 / d, 2.0 * n as f64 / d)
}

/// Coefficient of the n-th term of the expansion of `H0` (or of `H0'`).
fn coefficient(n: usize, derivative: bool) -> f64 {
    let c = NU_TABLE.values[n];
    if derivative {
        c * (1.0 + 2.0 * n as f64) / (1.0 - 2.0 * n as f64)
    } else {
        c
    }
}

/// `(2/pi)^(1/2) z^(-1/2)`, principal root.
fn prefactor(z: Complex64) -> Complex64 {
    (2.0 / std::f64::consts::PI).sqrt() / z.sqrt()
}

/// Truncated expansion in `Re z >= 0`. `terms` is `None` for optimal truncation up to `N_MAX`.
fn expansion(kind: HankelKind, derivative: bool, z: Complex64, terms: Option<usize>) -> Complex64 {
    let s = kind.sign();
    let x = Complex64::new(0.0, s) / (2.0 * z);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    let top = terms.unwrap_or(N_MAX);
    for n in 0..=top {
        let t = pw * coefficient(n, derivative);
        if terms.is_none() && t.norm() > last {
            break;
        }
        last = t.norm();
        sum += t;
        pw *= x;
    }
    let rot = Complex64::from_polar(1.0, s * std::f64::consts::FRAC_PI_4);
    let osc = (Complex64::new(0.0, s) * z).exp();
    let front = if derivative {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, -s)
    };
    front * rot * prefactor(z) * osc * sum
}

/// The truncated large-argument expansion of `H0` (or `H0'` when `derivative`)
/// with terms `n = 0..=order`, valid as printed for `Re z >= 0`.
pub fn hankel_asymptotic(kind: HankelKind, derivative: bool, z: Complex64, order: usize) -> Result<Complex64> {
    if order > N_MAX {
        return Err(GskError::OutOfRange(format!("asymptotic order {order} exceeds {N_MAX}")));
    }
    let need = 2.0 * order as f64 + 2.0;
    if z.norm() < need {
        return Err(GskError::OutOfRange(format!(
            "order {order} needs |z| >= {need}, got |z| = {}",
            z.norm()
        )));
    }
    Ok(expansion(kind, derivative, z, Some(order)))
}

/// Asymptotic regime on the whole cut plane. In `Re z < 0` the value is
/// assembled from `w = -z` through the rotation formulas.
fn asymptotic_value(kind: HankelKind, derivative: bool, z: Complex64) -> (Complex64, f64) {
    if z.re >= 0.0 {
        return (expansion(kind, derivative, z, None), 1.0);
    }
    let w = -z;
    let h = |k: HankelKind| expansion(k, derivative, w, None);
    let upper = z.im > 0.0 || (z.im == 0.0 && z.im.is_sign_positive());
    // z = e^{i pi} w when z is on the upper side, z = e^{-i pi} w otherwise;
    // `own` is the kind whose rotation is the sum of two terms
    let own = if upper { HankelKind::Second } else { HankelKind::First };
    let (a, b) = (h(own), h(own.conjugate()));
    if kind == own {
        // H(e^{+-i pi} w) = 2H(w) + H~(w),  H'(e^{+-i pi} w) = -2H'(w) - H~'(w)
        let v = 2.0 * a + b;
        let v = if derivative { -v } else { v };
        let c = (2.0 * a.norm() + b.norm()) / v.norm();
        (v, c)
    } else {
        // H~(e^{+-i pi} w) = -H(w),  H~'(e^{+-i pi} w) = H'(w)
        (if derivative { a } else { -a }, 1.0)
    }
}

type Cd = Complex<Dd>;

/// `J0, Y0, J1, Y1` by power series in double-double.
fn bessel_series(z: Complex64) -> [Cd; 4] {
    let zd: Cd = lift(z);
    let q: Cd = cx::scale(zd * zd, Dd::from_f64(0.25));
    let mq = -q;
    let zero = cx::re(Dd::ZERO);
    let tiny = 1e-34;

    // J0 and the harmonic sum of Y0
    let mut j0 = zero;
    let mut s0 = zero;
    let mut t = cx::re(Dd::ONE);
    let mut harm = Dd::ZERO;
    // J1/(z/2) and the digamma sum of Y1
    let mut j1 = zero;
    let mut s1 = zero;
    let mut t1 = cx::re(Dd::ONE);
    let mut harm1 = Dd::ONE;
    for k in 0..200usize {
        j0 += t;
        if k > 0 {
            // (-1)^{k+1} H_k q^k / (k!)^2
            s0 += cx::scale(t, -harm);
        }
        j1 += t1;
        // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
        let psi = harm + harm1 - EULER_GAMMA - EULER_GAMMA;
        s1 += cx::scale(t1, psi);
        let kk = Dd::from_f64((k + 1) as f64);
        t = cx::scale(t * mq, Dd::ONE / (kk * kk));
        t1 = cx::scale(t1 * mq, Dd::ONE / (kk * (kk + Dd::ONE)));
        harm += Dd::ONE / kk;
        harm1 += Dd::ONE / (kk + Dd::ONE);
        let size = cx::abs(t).to_f64().max(cx::abs(t1).to_f64()) * (k as f64 + 2.0);
        if size < tiny * (1.0 + cx::abs(j0).to_f64()) && k > 2 {
            break;
        }
    }
    let half_z = cx::scale(zd, Dd::from_f64(0.5));
    let two_over_pi = Dd::from_f64(2.0) / Dd::PI;
    // ln(z/2) = ln z - ln 2 keeps the lip selected by a signed-zero imaginary part
    let ln_half = cx::ln(zd) - cx::re(Dd::from_f64(2.0).ln());
    let j1 = half_z * j1;
    let y0 = cx::scale((ln_half + cx::re(EULER_GAMMA)) * j0 + s0, two_over_pi);
    let y1 = cx::scale(cx::re(Dd::from_f64(-1.0)) / zd, two_over_pi)
        + cx::scale(ln_half * j1, two_over_pi)
        - cx::scale(half_z * s1, Dd::ONE / Dd::PI);
    [j0, y0, j1, y1]
}

fn series_value(kind: HankelKind, derivative: bool, z: Complex64) -> Complex64 {
    let [j0, y0, j1, y1] = bessel_series(z);
    let i = cx::i::<Dd>();
    let s = cx::re(Dd::from_f64(kind.sign()));
    let v = if derivative { -(j1 + s * i * y1) } else { j0 + s * i * y0 };
    lower(v)
}

fn check_arg(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(GskError::Domain { what: "Hankel function at its logarithmic singularity", at: z });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GskError::Domain { what: "Hankel function at a non-finite argument", at: z });
    }
    Ok(())
}

/// `H0` or `H0'` by the requested algorithm.
pub fn hankel_h0_with(kind: HankelKind, derivative: bool, z: Complex64, regime: Regime) -> Result<HankelValue> {
    check_arg(z)?;
    Ok(match regime {
        Regime::Series => HankelValue { value: series_value(kind, derivative, z), regime, cancellation: 1.0 },
        Regime::Asymptotic => {
            let (value, cancellation) = asymptotic_value(kind, derivative, z);
            HankelValue { value, regime, cancellation }
        }
    })
}

/// `H0` or `H0'` with the regime chosen by `|z|` against [`Z_SWITCH`].
pub fn hankel_eval(kind: HankelKind, derivative: bool, z: Complex64) -> Result<HankelValue> {
    hankel_h0_with(kind, derivative, z, Regime::for_arg(z))
}

pub fn hankel_h0(kind: HankelKind, z: Complex64) -> Result<Complex64> {
    Ok(hankel_eval(kind, false, z)?.value)
}

/// `H0' = -H1`.
pub fn hankel_h0_prime(kind: HankelKind, z: Complex64) -> Result<Complex64> {
    Ok(hankel_eval(kind, true, z)?.value)
}
