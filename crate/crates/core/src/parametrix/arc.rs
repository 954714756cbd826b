//! Arc objects in the `z`-plane: `N`, the global parametrix, and `Y`, `Phi` built from a numerical `chi`.

use num_complex::Complex64;

use crate::error::{GskError, Result};
use crate::linalg::Mat2;
use crate::operator::{ChiSolution, Support};
use crate::scalar_rhp::{arc_r, sqrt_z2m1, ArcContext};

/// `N(z) = U^{-1} ((z + 1)/(z - 1))^{s3/4} U`.
pub fn arc_n(z: Complex64) -> Result<Mat2> {
    sqrt_z2m1(z)?;
    let rho = (0.25 * ((z + 1.0).ln() - (z - 1.0).ln())).exp();
    Ok(Mat2::U_INV * Mat2::pow_sigma3(rho) * Mat2::U)
}

/// `M(z) = D_inf^{-s3} N(z) D^{s3}(z)` with `D = e^{-t eta}`.
pub fn arc_global_m(actx: &ArcContext, z: Complex64) -> Result<Mat2> {
    let d = (-actx.t * actx.eta(z)?).exp();
    let d_inf = (-actx.t * actx.eta_infinity()).exp();
    Ok(Mat2::pow_sigma3(d_inf).inverse() * arc_n(z)? * Mat2::pow_sigma3(d))
}

/// `G_Phi(x) = [[2 (r_+/r_-)^m, -e^{t phi}], [e^{-t phi}, 0]]` on `(-1, 1)`.
pub fn arc_g_phi(actx: &ArcContext, m: f64, x: f64) -> Result<Mat2> {
    if !(x > -1.0 && x < 1.0) {
        return Err(GskError::OutOfRange(format!("{x} is not inside (-1, 1)")));
    }
    let s = (0.5 * actx.alpha).sin();
    let w = (1.0 - x * x).sqrt() * s;
    let ratio = (1.0 - w) / (1.0 + w);
    let tphi = actx.t * actx.phi_z(Complex64::new(x, 0.0))?;
    Ok(Mat2::new(Complex64::new(2.0 * ratio.powf(m), 0.0), -tphi.exp(), (-tphi).exp(), Complex64::new(0.0, 0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcPhiObjects {
    /// `Y(z) = chi(-1)^{-1} chi(l(z))`, normalised at infinity.
    pub y: Mat2,
    /// `Phi = Y r^{-m s3} kappa^{(m/2) s3}`.
    pub phi: Mat2,
    pub m_arc: Mat2,
}

/// `Y`, `Phi` and the global parametrix at `z` from a numerical arc solution.
pub fn arc_phi_objects(actx: &ArcContext, sol: &ChiSolution, z: Complex64) -> Result<ArcPhiObjects> {
    let spec = sol.spec();
    match spec.support {
        Support::Arc { alpha } if alpha == actx.alpha && spec.t == actx.t && spec.phi == actx.phi => {}
        _ => return Err(GskError::InvalidSpec("the chi solution does not match the arc context".into())),
    }
    // l(infinity) = -1, so Y(-i cot(alpha/2)) = chi(-1)^{-1}
    let y = sol.chi(Complex64::new(-1.0, 0.0))?.inverse() * sol.chi(actx.lambda(z)?)?;
    let m = spec.m;
    let r = arc_r(z, actx.alpha)?;
    let phi = y * Mat2::exp_sigma3(-m * r.ln() + 0.5 * m * actx.kappa.ln());
    Ok(ArcPhiObjects { y, phi, m_arc: arc_global_m(actx, z)? })
}
