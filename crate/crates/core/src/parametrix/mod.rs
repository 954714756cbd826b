//! Matrix parametrices: the global `M`, the Hankel parametrices at the endpoints,
//! the jump `G_Upsilon` and the leading-order `Upsilon`, `chi`; the arc objects live in [`arc`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GskError, Result};
use crate::linalg::Mat2;
use crate::scalar_rhp::ScalarContext;
use crate::specfun::{ab_coefficients, hankel_h0, hankel_h0_prime, nu_symbol, HankelKind};

pub mod arc;

pub use arc::{arc_global_m, arc_g_phi, arc_n, arc_phi_objects, ArcPhiObjects};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest order accepted by [`ParametrixBundle::g_upsilon_series`].
pub const MAX_SERIES_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    A,
    B,
}

impl std::str::FromStr for Endpoint {
    type Err = GskError;
    fn from_str(s: &str) -> Result<Endpoint> {
        match s.trim() {
            "a" | "A" => Ok(Endpoint::A),
            "b" | "B" => Ok(Endpoint::B),
            other => Err(GskError::InvalidSpec(format!("endpoint must be a or b, got '{other}'"))),
        }
    }
}

/// Interval parametrix data: the scalar context, `m`, the disk radius `delta` and `D_inf`.
#[derive(Clone, Debug)]
pub struct ParametrixBundle {
    pub ctx: ScalarContext,
    pub m: f64,
    pub delta: f64,
    pub d_inf: Complex64,
    h_inf: Complex64,
    u_a: f64,
    u_b: f64,
}

impl ParametrixBundle {
    /// `delta = min(0.2 (b - a), 0.5 r)`.
    pub fn new(ctx: ScalarContext, m: f64) -> Result<ParametrixBundle> {
        let delta = (0.2 * (ctx.b - ctx.a)).min(0.5 * ctx.analyticity_radius);
        ParametrixBundle::with_delta(ctx, m, delta)
    }

    pub fn with_delta(ctx: ScalarContext, m: f64, delta: f64) -> Result<ParametrixBundle> {
        if !(delta > 0.0 && delta < 0.25 * (ctx.b - ctx.a) && delta <= ctx.analyticity_radius) {
            return Err(GskError::InvalidSpec(format!(
                "disk radius {delta} must lie in (0, (b - a)/4) and inside the analyticity radius"
            )));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(GskError::InvalidSpec(format!("m must be positive, got {m}")));
        }
        let u_a = ctx.u(c(ctx.a))?.re;
        let u_b = ctx.u(c(ctx.b))?.re;
        if !(u_a > 0.0 && u_b > 0.0) {
            return Err(GskError::InvalidSpec(format!("u must be positive at the endpoints, got {u_a}, {u_b}")));
        }
        Ok(ParametrixBundle { d_inf: ctx.d_infinity(), h_inf: ctx.h_infinity(), ctx, m, delta, u_a, u_b })
    }

    pub fn endpoint(&self, e: Endpoint) -> f64 {
        match e {
            Endpoint::A => self.ctx.a,
            Endpoint::B => self.ctx.b,
        }
    }

    /// `u(a)` or `u(b)`.
    pub fn u_endpoint(&self, e: Endpoint) -> f64 {
        match e {
            Endpoint::A => self.u_a,
            Endpoint::B => self.u_b,
        }
    }

    fn check_disk(&self, e: Endpoint, l: Complex64) -> Result<()> {
        let d = (l - self.endpoint(e)).norm();
        // the closed disk: G_Upsilon lives on its boundary
        if d > self.delta * (1.0 + 1e-12) {
            return Err(GskError::OutOfRange(format!("{l} is outside the disk of radius {} at {e:?}", self.delta)));
        }
        if d == 0.0 {
            return Err(GskError::Domain { what: "parametrix at the endpoint itself", at: l });
        }
        Ok(())
    }

    fn d_inf_conj(&self, x: Mat2) -> Mat2 {
        let d = Mat2::pow_sigma3(self.d_inf);
        d.inverse() * x * d
    }

    /// `D_inf^{-s3} U^{-1} ((l - a)/(l - b))^{s3/4} U D^{s3}(l)`.
    pub fn global_m(&self, l: Complex64) -> Result<Mat2> {
        let d = self.ctx.d(l)?;
        let rho = (0.25 * ((l - self.ctx.a).ln() - (l - self.ctx.b).ln())).exp();
        Ok(Mat2::pow_sigma3(self.d_inf).inverse() * Mat2::U_INV * Mat2::pow_sigma3(rho) * Mat2::U * Mat2::pow_sigma3(d))
    }

    /// The Hankel variable `w = m sqrt(-zeta_a)` at `a`, `v = m sqrt(zeta_b)` at `b`, principal roots.
    pub fn hankel_arg(&self, e: Endpoint, l: Complex64) -> Result<Complex64> {
        let (za, zb) = self.ctx.zeta(l)?;
        Ok(self.m
            * match e {
                Endpoint::A => (-za).sqrt(),
                Endpoint::B => zb.sqrt(),
            })
    }

    /// `E_a` or `E_b`, analytic in the disk.
    pub fn prefactor_e(&self, e: Endpoint, l: Complex64) -> Result<Mat2> {
        self.check_disk(e, l)?;
        let front = c(PI.sqrt()) * Complex64::from_polar(1.0, 0.25 * PI) / 2.0;
        let g = self.ctx.g.value(l)?;
        let w = self.hankel_arg(e, l)?;
        // [-m^2 zeta_a]^{-s3/4} = w^{-s3/2}, [m^2 zeta_b]^{s3/4} = v^{s3/2}
        let root = match e {
            Endpoint::A => w.sqrt().inv(),
            Endpoint::B => w.sqrt(),
        };
        let half = Mat2::new(c(0.5), -0.5 * I, -0.5 * I, c(0.5));
        Ok((self.global_m(l)? * Mat2::exp_sigma3(0.5 * g) * half * Mat2::pow_sigma3(root)).scale(front))
    }

    /// `P_a^(0)` or `P_b^(0)`.
    pub fn local_p0(&self, e: Endpoint, l: Complex64) -> Result<Mat2> {
        self.check_disk(e, l)?;
        let g = self.ctx.g.value(l)?;
        let w = self.hankel_arg(e, l)?;
        let x = 0.5 * w;
        let h1 = hankel_h0(HankelKind::First, x)?;
        let h2 = hankel_h0(HankelKind::Second, x)?;
        let d1 = hankel_h0_prime(HankelKind::First, x)?;
        let d2 = hankel_h0_prime(HankelKind::Second, x)?;
        Ok(match e {
            Endpoint::A => Mat2::new(w * d2, w * d1, h2, h1) * Mat2::exp_sigma3(0.5 * (I * w - g)),
            // second row [v H1', v H2'], so that each column carries one exponential
            Endpoint::B => Mat2::new(h1, h2, w * d1, w * d2) * Mat2::exp_sigma3(-0.5 * (I * w + g)),
        })
    }

    /// The large-`m` expansion of `P^(0)` truncated after the term `n = order`.
    pub fn local_p0_series(&self, e: Endpoint, l: Complex64, order: usize) -> Result<Mat2> {
        self.check_disk(e, l)?;
        let g = self.ctx.g.value(l)?;
        let w = self.hankel_arg(e, l)?;
        let front = Complex64::from_polar(2.0 / PI.sqrt(), -0.25 * PI);
        let mut sum = Mat2::ZERO;
        for n in 0..=order {
            let (an, bn) = ab_coefficients(n);
            let sg = if n % 2 == 0 { 1.0 } else { -1.0 };
            let x = match e {
                Endpoint::A => Mat2::new(c(sg * an), I * bn, -I * (sg * bn), c(an)),
                Endpoint::B => Mat2::new(c(an), -I * (sg * bn), I * bn, c(sg * an)),
            };
            sum = sum + x.scale(nu_symbol(n)? * (I / w).powu(n as u32));
        }
        let root = match e {
            Endpoint::A => w.sqrt(),
            Endpoint::B => w.sqrt().inv(),
        };
        Ok((Mat2::pow_sigma3(root) * Mat2::new(c(1.0), I, I, c(1.0)) * sum * Mat2::exp_sigma3(-0.5 * g)).scale(front))
    }

    /// `P = E P^(0)`.
    pub fn local_parametrix(&self, e: Endpoint, l: Complex64) -> Result<Mat2> {
        Ok(self.prefactor_e(e, l)? * self.local_p0(e, l)?)
    }

    /// Exact `G_Upsilon = M P^{-1}`.
    pub fn g_upsilon(&self, e: Endpoint, l: Complex64) -> Result<Mat2> {
        Ok(self.global_m(l)? * self.local_parametrix(e, l)?.inverse())
    }

    /// The expansion of `G_Upsilon` in powers of `1/m` through `m^{-order}`, written with `r`, `t`, `u`, `zeta`.
    ///
    /// Odd terms carry one power of `sqrt(-zeta_a)`. The principal root used for the Hankel
    /// variable is `-q u` near `a`, so the odd terms at `a` enter with the sign opposite to the
    /// form written with `sqrt(-zeta_a) = q u`.
    pub fn g_upsilon_series(&self, e: Endpoint, l: Complex64, order: usize) -> Result<Mat2> {
        if order > MAX_SERIES_ORDER {
            return Err(GskError::OutOfRange(format!("series order {order} exceeds {MAX_SERIES_ORDER}")));
        }
        self.check_disk(e, l)?;
        let (a, b, m) = (self.ctx.a, self.ctx.b, self.m);
        let v = self.ctx.beta_r_t(l)?;
        let (r, t) = (v.r, v.t);
        let u = self.ctx.u(l)?;
        let (za, _) = self.ctx.zeta(l)?;
        let mut s = Mat2::IDENTITY;
        for n in 1..=order {
            let (an, bn) = ab_coefficients(n);
            let p = (n / 2) as i32;
            let nu = nu_symbol(n)?;
            let mn = m.powi(n as i32);
            let term = match (e, n % 2) {
                (Endpoint::A, 0) => Mat2::new(an - bn * r, -I * (l - a) * bn * t, -I * (l - b) * bn * t, an + bn * r)
                    .scale(nu / (mn * za.powi(p))),
                (Endpoint::A, _) => Mat2::new(
                    -bn * t / u,
                    -I * (an + bn * r) / ((l - b) * u),
                    I * (an - bn * r) / ((l - a) * u),
                    bn * t / u,
                )
                .scale(-I * nu / (mn * za.powi(p))),
                (Endpoint::B, 0) => {
                    let sg = if p % 2 == 0 { 1.0 } else { -1.0 };
                    Mat2::new(an + bn * r, I * (l - a) * bn * t, I * (l - b) * bn * t, an - bn * r)
                        .scale(sg * nu / (mn * ((l - a) * (l - b)).powi(p) * u.powi(2 * p)))
                }
                (Endpoint::B, _) => {
                    let sg = if p % 2 == 0 { 1.0 } else { -1.0 };
                    Mat2::new(-bn * t, I * (an - bn * r) / (l - b), -I * (an + bn * r) / (l - a), bn * t)
                        .scale(I * sg * nu / (mn * ((l - a) * (l - b)).powi(p) * u.powi(2 * p + 1)))
                }
            };
            s = s + term;
        }
        let d = Mat2::pow_sigma3(self.d_inf);
        Ok(d.inverse() * Mat2::U_INV * s * Mat2::U * d)
    }

    /// Residue of `G_1` at the endpoint, `-+(0,1)(2 r - 1)/u D_inf^{-s3} U^{-1} s^{-+} U D_inf^{s3}`
    /// (upper signs at `b`, lower at `a`, see [`Self::g_upsilon_series`]), with the pole location. `r` at the endpoint is its mean over a small circle.
    pub fn g1_pole_part(&self, e: Endpoint) -> Result<(Mat2, f64)> {
        let x = self.endpoint(e);
        let u = self.u_endpoint(e);
        let rho = 0.25 * self.delta;
        let n = 32;
        let mut r = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let l = x + Complex64::from_polar(rho, 2.0 * PI * (k as f64 + 0.5) / n as f64);
            r += self.ctx.beta_r_t(l)?.r;
        }
        r /= n as f64;
        let (sigma, sign) = match e {
            Endpoint::A => (Mat2::SIGMA_MINUS, 1.0),
            Endpoint::B => (Mat2::SIGMA_PLUS, -1.0),
        };
        let coef = sign * nu_symbol(1)? * (2.0 * r - 1.0) / u;
        Ok((self.d_inf_conj(Mat2::U_INV * sigma * Mat2::U).scale(coef), x))
    }

    /// `I + ((0,1)/m) D_inf^{-s3} U^{-1} {-s^-/((l - a) u(a)) + s^+/((l - b) u(b))} U D_inf^{s3}`,
    /// the residues of [`Self::g1_pole_part`] carried through the clockwise disk boundaries.
    pub fn upsilon_leading(&self, l: Complex64) -> Result<Mat2> {
        let (a, b) = (self.ctx.a, self.ctx.b);
        if (l - a).norm() <= 2.0 * self.delta || (l - b).norm() <= 2.0 * self.delta {
            return Err(GskError::OutOfRange(format!("{l} is within 2 delta of an endpoint")));
        }
        let inner = Mat2::SIGMA_MINUS.scale(-((l - a) * self.u_a).inv()) + Mat2::SIGMA_PLUS.scale(((l - b) * self.u_b).inv());
        let corr = self.d_inf_conj(Mat2::U_INV * inner * Mat2::U).scale(c(nu_symbol(1)? / self.m));
        Ok(Mat2::IDENTITY + corr)
    }

    /// `e^{-m h_inf s3} Upsilon_leading M e^{m h s3}`.
    pub fn chi_leading(&self, l: Complex64) -> Result<Mat2> {
        let ups = self.upsilon_leading(l)?;
        let h = self.ctx.h(l)?;
        Ok(Mat2::exp_sigma3(-self.m * self.h_inf) * ups * self.global_m(l)? * Mat2::exp_sigma3(self.m * h))
    }

    /// The `Xi` gauge `e^{m h_inf s3} chi e^{-m h s3}` of a matrix given at `l`.
    pub fn to_xi_gauge(&self, chi: Mat2, l: Complex64) -> Result<Mat2> {
        let h = self.ctx.h(l)?;
        Ok(Mat2::exp_sigma3(self.m * self.h_inf) * chi * Mat2::exp_sigma3(-self.m * h))
    }

    /// `G_Xi(x) = [[2 e^{-m (h_- - h_+)}, -e^g], [e^{-g}, 0]]` on `(a, b)`.
    pub fn g_xi(&self, x: f64) -> Result<Mat2> {
        let (a, b) = (self.ctx.a, self.ctx.b);
        if !(x > a && x < b) {
            return Err(GskError::OutOfRange(format!("{x} is not inside ({a}, {b})")));
        }
        let gap = ((x - a) * (b - x)).sqrt() * self.ctx.u(c(x))?;
        let g = self.ctx.g.value(c(x))?;
        Ok(Mat2::new(2.0 * (-self.m * gap).exp(), -g.exp(), (-g).exp(), c(0.0)))
    }

    pub fn h_infinity(&self) -> Complex64 {
        self.h_inf
    }
}

pub fn global_m(bundle: &ParametrixBundle, l: Complex64) -> Result<Mat2> {
    bundle.global_m(l)
}

pub fn prefactor_e(bundle: &ParametrixBundle, e: Endpoint, l: Complex64) -> Result<Mat2> {
    bundle.prefactor_e(e, l)
}

pub fn local_p0(bundle: &ParametrixBundle, e: Endpoint, l: Complex64) -> Result<Mat2> {
    bundle.local_p0(e, l)
}

pub fn local_parametrix(bundle: &ParametrixBundle, e: Endpoint, l: Complex64) -> Result<Mat2> {
    bundle.local_parametrix(e, l)
}

pub fn g_upsilon(bundle: &ParametrixBundle, l: Complex64, e: Endpoint) -> Result<Mat2> {
    bundle.g_upsilon(e, l)
}

pub fn g_upsilon_series(bundle: &ParametrixBundle, l: Complex64, e: Endpoint, order: usize) -> Result<Mat2> {
    bundle.g_upsilon_series(e, l, order)
}

pub fn g1_pole_part(bundle: &ParametrixBundle, e: Endpoint) -> Result<(Mat2, f64)> {
    bundle.g1_pole_part(e)
}

pub fn upsilon_leading(bundle: &ParametrixBundle, l: Complex64) -> Result<Mat2> {
    bundle.upsilon_leading(l)
}

pub fn chi_leading(bundle: &ParametrixBundle, l: Complex64) -> Result<Mat2> {
    bundle.chi_leading(l)
}

#[cfg(test)]
mod tests;
