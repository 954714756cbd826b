//! Flat `key = value` run configuration.
//!
//! ```text
//! # generalised kernel on [-1, 1]
//! kernel = interval
//! p = "x + 0.2*sin(x)"
//! g = "0.3*cos(x)"
//! m_list = 8, 16, 32
//! ```
//!
//! Expressions are double-quoted. Lines starting with `#` and blank lines are ignored.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use gsk::{AnalyticFn, ArcChart, KernelSpec, PrecisionChoice};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `p = x`, `g = 0`.
    Sine,
    Interval,
    Arc,
}

impl FromStr for KernelKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<KernelKind, CliError> {
        match s {
            "sine" | "pure_sine" => Ok(KernelKind::Sine),
            "interval" => Ok(KernelKind::Interval),
            "arc" => Ok(KernelKind::Arc),
            _ => Err(CliError::Config(format!("unknown kernel '{s}' (sine, interval, arc)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Format, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown format '{s}' (csv, json)"))),
        }
    }
}

/// What `compare` fits against `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Target {
    /// `|ln det - expansion|`, first order.
    #[default]
    Lndet,
    /// `sup |Xi M^{-1} - Upsilon_leading|`, second order; interval kernels only.
    Upsilon,
}

impl FromStr for Target {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Target, CliError> {
        match s {
            "lndet" => Ok(Target::Lndet),
            "upsilon" => Ok(Target::Upsilon),
            _ => Err(CliError::Config(format!("unknown target '{s}' (lndet, upsilon)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kernel: KernelKind,
    pub a: f64,
    pub b: f64,
    pub p: String,
    pub g: String,
    pub alpha: f64,
    pub phi: String,
    pub t: f64,
    pub m_list: Vec<u32>,
    /// Nyström nodes; chosen from `m` when absent.
    pub n_nodes: Option<usize>,
    pub analyticity_radius: f64,
    pub precision: PrecisionChoice,
    pub arc_chart: ArcChart,
    pub target: Target,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: KernelKind::Sine,
            a: -1.0,
            b: 1.0,
            p: "x".into(),
            g: "0".into(),
            alpha: PI / 2.0,
            phi: "x".into(),
            t: 0.0,
            m_list: vec![8, 16, 32],
            n_nodes: None,
            analyticity_radius: 1.0,
            precision: PrecisionChoice::Auto,
            arc_chart: ArcChart::Angle,
            target: Target::Lndet,
            output: None,
            format: Format::Csv,
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
}

fn quoted(key: &str, v: &str) -> Result<String, CliError> {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .map(str::to_owned)
        .ok_or_else(|| CliError::Config(format!("{key}: expressions must be double-quoted, got {v}")))
}

/// `8, 16, 32`.
pub fn parse_m_list(v: &str) -> Result<Vec<u32>, CliError> {
    v.split(',').map(|s| num("m_list", s.trim())).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "kernel" => self.kernel = v.parse()?,
            "a" => self.a = num(key, v)?,
            "b" => self.b = num(key, v)?,
            "p" => self.p = quoted(key, v)?,
            "g" => self.g = quoted(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "phi" => self.phi = quoted(key, v)?,
            "t" => self.t = num(key, v)?,
            "m_list" => self.m_list = parse_m_list(v)?,
            "n_nodes" => self.n_nodes = Some(num(key, v)?),
            "analyticity_radius" => self.analyticity_radius = num(key, v)?,
            "precision" => self.precision = v.parse().map_err(CliError::Config)?,
            "arc_chart" => {
                self.arc_chart = match v {
                    "angle" => ArcChart::Angle,
                    "moebius" => ArcChart::Moebius,
                    _ => return Err(CliError::Config(format!("unknown arc_chart '{v}' (angle, moebius)"))),
                }
            }
            "target" => self.target = v.parse()?,
            "output" => self.output = Some(PathBuf::from(v.trim_matches('"'))),
            "format" => self.format = v.parse()?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Checks everything that does not need a numerical solve, including the kernel itself.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.m_list.is_empty() {
            return Err(CliError::Config("m_list is empty".into()));
        }
        if self.m_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(format!("m_list must be strictly ascending, got {:?}", self.m_list)));
        }
        if self.kernel == KernelKind::Arc && !(self.alpha > 0.0 && self.alpha < PI) {
            return Err(CliError::Config(format!("alpha out of (0, pi): {}", self.alpha)));
        }
        if self.m_list[0] == 0 {
            return Err(CliError::Config("m must be positive; m = 0 is a degenerate sweep".into()));
        }
        if self.n_nodes.is_some_and(|n| n < 32) {
            return Err(CliError::Config("n_nodes must be at least 32".into()));
        }
        for &m in &self.m_list {
            self.spec(m)?;
        }
        Ok(())
    }

    fn expr(&self, key: &str, src: &str) -> Result<AnalyticFn, CliError> {
        AnalyticFn::parse(src).map_err(|e| CliError::Config(format!("{key}: {e}")))
    }

    /// The kernel at `m`; every failure is a configuration error.
    pub fn spec(&self, m: u32) -> Result<KernelSpec, CliError> {
        let m = m as f64;
        let spec = match self.kernel {
            KernelKind::Sine => KernelSpec::pure_sine(self.a, self.b, m),
            KernelKind::Interval => KernelSpec::interval(self.a, self.b, m, self.expr("p", &self.p)?, self.expr("g", &self.g)?),
            KernelKind::Arc => KernelSpec::arc(self.alpha, m, self.expr("phi", &self.phi)?, self.t),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec
            .with_analyticity_radius(self.analyticity_radius)
            .with_precision(self.precision)
            .with_chart(self.arc_chart))
    }

    /// Nyström nodes at `m`: the configured count, or 200 raised in proportion to `m` times the support size.
    pub fn nodes_for(&self, spec: &KernelSpec) -> usize {
        self.n_nodes.unwrap_or_else(|| ((1.2 * spec.m * spec.scale()).ceil() as usize + 48).max(200))
    }
}
