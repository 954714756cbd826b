//! Shared fixtures for the criterion benchmarks.

use gsk::{AnalyticFn, KernelSpec, ScalarContext};

pub const P: &str = "x + 0.2*sin(x)";
pub const G: &str = "0.3*cos(x)";

fn f(s: &str) -> AnalyticFn {
    AnalyticFn::parse(s).expect("fixture expressions parse")
}

/// `p = x + 0.2 sin x`, `g = 0.3 cos x` on `[-1, 1]`.
pub fn interval_spec(m: f64) -> KernelSpec {
    KernelSpec::interval(-1.0, 1.0, m, f(P), f(G)).expect("fixture kernel is valid")
}

pub fn interval_context() -> ScalarContext {
    ScalarContext::new(-1.0, 1.0, f(P), f(G), 1.0).expect("fixture kernel is valid")
}

pub fn arc_spec(m: f64) -> KernelSpec {
    KernelSpec::arc(std::f64::consts::FRAC_PI_2, m, f("x"), 0.5).expect("fixture kernel is valid")
}
