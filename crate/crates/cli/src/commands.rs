//! The five subcommands. Each returns the text to emit; failures carry their exit code.

use num_complex::Complex64;
use rayon::prelude::*;

use gsk::asymptotics::{arc_log_det_asym, interval_log_det_asym, pure_sine_log_det};
use gsk::checks::{fit_exponent, identity_suite, scaling_checks, upsilon_error};
use gsk::specfun::{hankel_eval, HankelKind};
use gsk::{fredholm_log_det, ArcContext, GskError, AsymptoticResult, CheckRow, DetReport, KernelSpec, ScalarContext, Support};

use crate::output::{Cell, Table};
use crate::{CliError, KernelKind, RunConfig, Target};

/// Smallest fitted exponent `compare` accepts for `|ln det - expansion|`.
pub const LNDET_MIN_EXPONENT: f64 = 0.8;
/// Smallest fitted exponent `compare` accepts for the `Upsilon_leading` error.
pub const UPSILON_MIN_EXPONENT: f64 = 1.7;

pub const DET_HEADER: [&str; 11] = [
    "m",
    "n_nodes",
    "lndet_re",
    "lndet_im",
    "asym_re",
    "asym_im",
    "residual",
    "m_residual",
    "node_doubling_error",
    "precision",
    "seconds",
];

/// The expansion matching the kernel kind.
pub fn asymptotic(cfg: &RunConfig, spec: &KernelSpec) -> Result<AsymptoticResult, CliError> {
    Ok(match (cfg.kernel, spec.support) {
        (KernelKind::Sine, Support::Interval { a, b }) => pure_sine_log_det(a, b, spec.m)?,
        (KernelKind::Interval, _) => interval_log_det_asym(&ScalarContext::from_spec(spec)?, spec.m)?,
        _ => arc_log_det_asym(&ArcContext::from_spec(spec)?, spec.m)?,
    })
}

/// One report per `m`, computed in parallel and returned in `m_list` order.
pub fn det_reports(cfg: &RunConfig) -> Result<Vec<(DetReport, f64)>, CliError> {
    cfg.m_list
        .par_iter()
        .map(|&m| {
            let start = std::time::Instant::now();
            let spec = cfg.spec(m)?;
            let asym = asymptotic(cfg, &spec)?.formula_value(spec.m);
            let report = fredholm_log_det(&spec, cfg.nodes_for(&spec))?.with_asymptotic(asym);
            Ok((report, start.elapsed().as_secs_f64()))
        })
        .collect()
}

pub fn det_table(reports: &[(DetReport, f64)]) -> Table {
    let mut t = Table::new(DET_HEADER.to_vec());
    for (r, secs) in reports {
        let asym = r.lndet_asymptotic.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let res = r.residual.unwrap_or(f64::NAN);
        t.rows.push(vec![
            Cell::Int(r.m as u64),
            Cell::Int(r.n_nodes as u64),
            Cell::Float(r.lndet_numeric.re),
            Cell::Float(r.lndet_numeric.im),
            Cell::Float(asym.re),
            Cell::Float(asym.im),
            Cell::Float(res),
            Cell::Float(r.m * res),
            Cell::Float(r.node_doubling_error),
            Cell::Text(r.precision.name().into()),
            Cell::Float(*secs),
        ]);
    }
    t
}

pub fn cmd_det(cfg: &RunConfig) -> Result<String, CliError> {
    det_table(&det_reports(cfg)?).render(cfg.format)
}

/// Term breakdown `m^2`, `m`, `ln m`, constant for every `m`, always JSON.
pub fn cmd_asym(cfg: &RunConfig) -> Result<String, CliError> {
    let cx = |z: Complex64| serde_json::json!({ "re": z.re, "im": z.im });
    let rows = cfg
        .m_list
        .iter()
        .map(|&m| {
            let spec = cfg.spec(m)?;
            let a = asymptotic(cfg, &spec)?;
            Ok(serde_json::json!({
                "m": m,
                "m2_coeff": cx(a.leading_m2),
                "m_coeff": cx(a.linear_m),
                "log_m_coeff": a.log_coeff,
                "constant": cx(a.constant),
                "value": cx(a.formula_value(spec.m)),
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(format!("{}\n", serde_json::to_string_pretty(&rows).expect("json values serialise")))
}

/// Residual against `m`, fitted as `C m^-e`; fails below the target's minimum exponent.
pub fn cmd_compare(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    if cfg.m_list.len() < 3 {
        return Err(CliError::Config(format!("compare needs at least 3 m values, got {}", cfg.m_list.len())));
    }
    let (ms, errs, min_e): (Vec<f64>, Vec<f64>, f64) = match cfg.target {
        Target::Lndet => {
            let reports = det_reports(cfg)?;
            let errs = reports.iter().map(|(r, _)| r.residual.unwrap_or(f64::NAN)).collect();
            (reports.iter().map(|(r, _)| r.m).collect(), errs, LNDET_MIN_EXPONENT)
        }
        Target::Upsilon => {
            if cfg.kernel == KernelKind::Arc {
                return Err(CliError::Config("target = upsilon needs an interval kernel".into()));
            }
            let base = cfg.spec(cfg.m_list[0])?;
            let errs = cfg
                .m_list
                .par_iter()
                .map(|&m| Ok(upsilon_error(&base, m as f64)?))
                .collect::<Result<Vec<f64>, CliError>>()?;
            (cfg.m_list.iter().map(|&m| m as f64).collect(), errs, UPSILON_MIN_EXPONENT)
        }
    };
    let e = fit_exponent(&ms, &errs);
    let pass = e >= min_e;
    let mut t = Table::new(vec!["m", "residual", "exponent", "min_exponent", "status"]);
    for (m, r) in ms.iter().zip(&errs) {
        t.rows.push(vec![
            Cell::Int(*m as u64),
            Cell::Float(*r),
            Cell::Float(e),
            Cell::Float(min_e),
            Cell::Text(if pass { "PASS" } else { "FAIL" }.into()),
        ]);
    }
    Ok((t.render(cfg.format)?, pass))
}

/// Identity suite and, with `matrix`, scaling fits between the first `m` and twice it.
pub fn rhp_rows(cfg: &RunConfig, matrix: bool) -> Result<Vec<CheckRow>, CliError> {
    let spec = cfg.spec(cfg.m_list[0])?;
    let mut rows = identity_suite(&spec)?;
    if matrix {
        rows.extend(scaling_checks(&spec, spec.m)?);
    }
    Ok(rows)
}

pub fn rhp_table(rows: &[CheckRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:>12}  {:<22}  status\n", "name", "value", "threshold");
    for r in rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        out += &format!("{:<width$}  {:>12.4e}  {:<22}  {status}\n", r.name, r.value, r.bound.to_string());
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    out += &format!("{} checks, {failed} failed\n", rows.len());
    out
}

/// `H0` or `H0'` of the given kind, 15 significant digits.
pub fn cmd_specfun(kind: &str, z: &str, prime: bool) -> Result<String, CliError> {
    let kind: HankelKind = kind.parse()?;
    let parts: Vec<&str> = z.split(',').map(str::trim).collect();
    let parsed: Option<Vec<f64>> = parts.iter().map(|s| s.parse().ok()).collect();
    let (re, im) = match parsed.as_deref() {
        Some([re, im]) => (*re, *im),
        _ => return Err(CliError::Config(format!("--z expects RE,IM, got '{z}'"))),
    };
    let v = match hankel_eval(kind, prime, Complex64::new(re, im)) {
        Ok(h) => h.value,
        Err(e @ GskError::Domain { .. }) => return Err(CliError::Config(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    Ok(format!("{:.14e} {:.14e}\n", v.re, v.im))
}
