//! Fredholm determinants `det(I + V)` of generalised sine kernels
//! `V(l, s) = -(e(l)/e(s) - e(s)/e(l)) / (2 pi i (l - s))` on an interval or an arc of the unit
//! circle, the Riemann–Hilbert objects behind their large-`m` asymptotics, and the closed-form
//! expansions themselves.

pub mod asymptotics;
pub mod checks;
pub mod error;
pub mod exprs;
pub mod linalg;
pub mod operator;
pub mod parametrix;
pub mod prec;
pub mod quad;
pub mod scalar_rhp;
pub mod specfun;

pub use asymptotics::{AsymptoticResult, Constants, CtValue};
pub use checks::{Bound, CheckRow};
pub use error::{GskError, Result};
pub use exprs::AnalyticFn;
pub use linalg::Mat2;
pub use operator::{fredholm_log_det, ArcChart, ChiSolution, DetReport, KernelSpec, PrecisionChoice, Support};
pub use parametrix::{Endpoint, ParametrixBundle};
pub use prec::Precision;
pub use quad::{Contour, Ellipse, QuadRule};
pub use scalar_rhp::{ArcContext, ScalarContext};
pub use specfun::HankelKind;
