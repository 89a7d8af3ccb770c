//! Sweep configuration: a flat `key = value` text format.
//!
//! Lines are `key = value`; blank lines and `#` comments are ignored and
//! unknown keys are rejected. Times are given in units of `1/g` (`gt`).
//!
//! Grid values accept
//!
//! * comma lists: `0, 0.1, 0.5`
//! * inclusive linspace `a:b:n`, e.g. `0:pi:41`
//! * angle tokens `pi`, `2pi`, `pi/2`, `3pi/4`, `-pi/8`
//!
//! Ensemble sizes accept comma lists and inclusive ranges `a..b` or `a..b..step`.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::circuit::{Interaction, ModelParams};

use super::ExperimentError;

/// One of the reproducible sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    TraceScan,
    QfiTheta0,
    QfiT1,
    QfiHeatmap,
    QfiScaling,
    CfiMap,
    XzScaling,
    DeviationScan,
    DephasingScan,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::TraceScan,
        Scenario::QfiTheta0,
        Scenario::QfiT1,
        Scenario::QfiHeatmap,
        Scenario::QfiScaling,
        Scenario::CfiMap,
        Scenario::XzScaling,
        Scenario::DeviationScan,
        Scenario::DephasingScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TraceScan => "trace_scan",
            Scenario::QfiTheta0 => "qfi_theta0",
            Scenario::QfiT1 => "qfi_t1",
            Scenario::QfiHeatmap => "qfi_heatmap",
            Scenario::QfiScaling => "qfi_scaling",
            Scenario::CfiMap => "cfi_map",
            Scenario::XzScaling => "xz_scaling",
            Scenario::DeviationScan => "deviation_scan",
            Scenario::DephasingScan => "dephasing_scan",
        }
    }

    /// CSV header for the scenario's data files.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Scenario::TraceScan => &["gT", "F"],
            Scenario::QfiTheta0 => &["N", "theta0", "FQ"],
            Scenario::QfiT1 => &["N", "gt1", "FQ"],
            Scenario::QfiHeatmap => &["theta0", "gt1", "FQ_over_N2"],
            Scenario::QfiScaling => &["N", "point_label", "FQ"],
            Scenario::CfiMap => &["gt1", "gt2", "Fc_over_N2"],
            Scenario::XzScaling => &["N", "g_over_wp", "gt1", "FQ"],
            Scenario::DeviationScan => &["N", "dg_t1", "dwp_t1", "FQ_formula", "FQ_numeric"],
            Scenario::DephasingScan => &["N", "x", "FQ"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown scenario `{s}`")))
    }
}

/// How the second evolution step is realized in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `U(t2) = U(t1)^dagger` exactly.
    Conjugate,
    /// Forward evolution up to the next multiple of the reversal period.
    Period,
}

impl FromStr for Mode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conjugate" => Ok(Mode::Conjugate),
            "period" => Ok(Mode::Period),
            _ => Err(ExperimentError::Config(format!("unknown mode `{s}` (expected period or conjugate)"))),
        }
    }
}

pub fn parse_interaction(s: &str) -> Result<Interaction, ExperimentError> {
    match s {
        "zz" => Ok(Interaction::Zz),
        "xz" => Ok(Interaction::Xz),
        _ => Err(ExperimentError::Config(format!("unknown interaction `{s}` (expected zz or xz)"))),
    }
}

/// Named sample grids. `None` means the scenario default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grids {
    pub n: Option<Vec<usize>>,
    pub theta0: Option<Vec<f64>>,
    pub gt1: Option<Vec<f64>>,
    pub gt2: Option<Vec<f64>>,
    /// Total evolution times for the trace scan.
    pub gt: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub dg_t1: Option<Vec<f64>>,
    pub dwp_t1: Option<Vec<f64>>,
    pub g_over_wp: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub mode: Mode,
    pub grids: Grids,
    /// Phase at which Fisher information is evaluated.
    pub theta: f64,
    pub phi0: f64,
    /// Thermal inverse temperature for point D of the scaling sweep.
    pub beta: f64,
    /// Fixed `gt1` for the `theta0` sweep.
    pub at_gt1: f64,
    /// Fixed `theta0` for the `gt1` sweep.
    pub at_theta0: f64,
    /// Period search window, in units of `1/g`.
    pub window: f64,
    /// Smallest `N` included in quadratic fits.
    pub fit_min_n: usize,
    pub output_path: PathBuf,
}

impl SweepConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            params: ModelParams::default(),
            mode: Mode::Conjugate,
            grids: Grids::default(),
            theta: crate::fisher::DEFAULT_THETA_EVAL,
            phi0: 0.0,
            beta: 1.0,
            at_gt1: PI / 2.0,
            at_theta0: PI / 2.0,
            window: 64.0 * PI,
            fit_min_n: 10,
            output_path: PathBuf::from("out"),
        }
    }

    /// Parses the text format. `scenario` must be present.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let pairs = parse_pairs(text)?;
        let scenario = pairs
            .iter()
            .find(|(k, _)| k == "scenario")
            .ok_or_else(|| ExperimentError::Config("missing `scenario` key".into()))?
            .1
            .parse()?;
        Self::from_pairs(scenario, &pairs)
    }

    /// Parses the text format for a known scenario. A `scenario` key is
    /// optional but must match.
    pub fn parse_for(scenario: Scenario, text: &str) -> Result<Self, ExperimentError> {
        Self::from_pairs(scenario, &parse_pairs(text)?)
    }

    fn from_pairs(scenario: Scenario, pairs: &[(String, String)]) -> Result<Self, ExperimentError> {
        let mut cfg = Self::new(scenario);
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let g = &mut self.grids;
        match key {
            "scenario" => {
                let sc: Scenario = value.parse()?;
                if sc != self.scenario {
                    return Err(ExperimentError::Config(format!(
                        "config is for scenario `{sc}`, but `{}` was requested",
                        self.scenario
                    )));
                }
            }
            "omega_p" => self.params.omega_p = parse_value(key, value)?,
            "omega_a" => self.params.omega_a = parse_value(key, value)?,
            "g" => self.params.g = parse_value(key, value)?,
            "interaction" => self.params.interaction = parse_interaction(value)?,
            "mode" => self.mode = value.parse()?,
            "n" => g.n = Some(parse_sizes(value)?),
            "theta0" => g.theta0 = Some(parse_grid(value)?),
            "gt1" => g.gt1 = Some(parse_grid(value)?),
            "gt2" => g.gt2 = Some(parse_grid(value)?),
            "gT" => g.gt = Some(parse_grid(value)?),
            "x" => g.x = Some(parse_grid(value)?),
            "dg_t1" => g.dg_t1 = Some(parse_grid(value)?),
            "dwp_t1" => g.dwp_t1 = Some(parse_grid(value)?),
            "g_over_wp" => g.g_over_wp = Some(parse_grid(value)?),
            "theta" => self.theta = parse_value(key, value)?,
            "phi0" => self.phi0 = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "at_gt1" => self.at_gt1 = parse_value(key, value)?,
            "at_theta0" => self.at_theta0 = parse_value(key, value)?,
            "window" => self.window = parse_value(key, value)?,
            "fit_min_n" => {
                self.fit_min_n = value
                    .parse()
                    .map_err(|_| ExperimentError::Config(format!("fit_min_n: `{value}` is not an integer")))?
            }
            "out" => self.output_path = PathBuf::from(value),
            _ => return Err(ExperimentError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks the invariants not enforced by parsing.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let p = &self.params;
        ModelParams::new(p.omega_p, p.omega_a, p.g, p.interaction).map_err(|e| ExperimentError::Config(e.to_string()))?;
        if p.g <= 0.0 {
            return Err(ExperimentError::Config(
                "sweeps are parametrized by g*t, so g must be positive".into(),
            ));
        }
        let g = &self.grids;
        let named: [(&str, Option<&Vec<f64>>); 8] = [
            ("theta0", g.theta0.as_ref()),
            ("gt1", g.gt1.as_ref()),
            ("gt2", g.gt2.as_ref()),
            ("gT", g.gt.as_ref()),
            ("x", g.x.as_ref()),
            ("dg_t1", g.dg_t1.as_ref()),
            ("dwp_t1", g.dwp_t1.as_ref()),
            ("g_over_wp", g.g_over_wp.as_ref()),
        ];
        for (name, grid) in named.into_iter() {
            if let Some(v) = grid {
                if v.is_empty() {
                    return Err(ExperimentError::Config(format!("grid `{name}` is empty")));
                }
            }
        }
        for (name, grid) in [("gt1", &g.gt1), ("gt2", &g.gt2), ("gT", &g.gt)] {
            if grid.iter().flatten().any(|&t| t < 0.0) {
                return Err(ExperimentError::Config(format!("grid `{name}` has negative times")));
            }
        }
        if g.x.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(ExperimentError::Config("dephasing rates `x` must lie in [0, 1]".into()));
        }
        if g.g_over_wp.iter().flatten().any(|&r| r <= 0.0) {
            return Err(ExperimentError::Config("`g_over_wp` ratios must be positive".into()));
        }
        if let Some(n) = &g.n {
            if n.is_empty() || n.contains(&0) {
                return Err(ExperimentError::Config("`n` needs positive ensemble sizes".into()));
            }
        }
        for (name, v) in [("theta", self.theta), ("phi0", self.phi0), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(ExperimentError::Config(format!("`{name}` must be finite")));
            }
        }
        if self.window.is_nan() || self.window <= 0.0 {
            return Err(ExperimentError::Config("`window` must be positive".into()));
        }
        Ok(())
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ExperimentError::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_value(key: &str, value: &str) -> Result<f64, ExperimentError> {
    parse_angle(value).map_err(|e| ExperimentError::Config(format!("{key}: {e}")))
}

/// Parses a number or a `pi` expression such as `3pi/4` or `-pi`.
pub fn parse_angle(token: &str) -> Result<f64, String> {
    let t = token.trim();
    let Some((coef, rest)) = t.split_once("pi") else {
        return t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a number"));
    };
    let coef = match coef.trim().trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in `{t}`"))?,
    };
    let denom = match rest.trim() {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.trim().parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("bad divisor in `{t}`"))?,
    };
    Ok(coef * PI / denom)
}

/// Parses a grid: `a:b:n` (inclusive linspace) or a comma list.
pub fn parse_grid(value: &str) -> Result<Vec<f64>, ExperimentError> {
    let bad = |msg: String| ExperimentError::Config(format!("grid `{value}`: {msg}"));
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (parse_angle(a).map_err(bad)?, parse_angle(b).map_err(bad)?);
            let n: usize = n.trim().parse().map_err(|_| bad(format!("`{n}` is not a point count")))?;
            Ok(linspace(a, b, n))
        }
        [_] => value
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_angle(s).map_err(bad))
            .collect(),
        _ => Err(bad("expected `a:b:n` or a comma list".into())),
    }
}

/// Parses ensemble sizes: comma list of `k`, `a..b` or `a..b..step`.
pub fn parse_sizes(value: &str) -> Result<Vec<usize>, ExperimentError> {
    let bad = || ExperimentError::Config(format!("ensemble sizes `{value}` are malformed"));
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let nums: Vec<usize> = item
            .split("..")
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match nums.as_slice() {
            [k] => out.push(*k),
            [a, b] if a <= b => out.extend(*a..=*b),
            [a, b, step] if a <= b && *step > 0 => out.extend((*a..=*b).step_by(*step)),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}
