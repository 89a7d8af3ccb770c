//! Parameter sweeps that produce CSV datasets and a `key=value` summary.
//!
//! Every scenario is a pure function of its [`SweepConfig`]: grid points are
//! evaluated in parallel and gathered in grid order, so reruns write
//! byte-identical files.

mod config;
mod scenarios;
pub mod validation;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::error::Error;

pub use config::{linspace, parse_angle, parse_grid, parse_interaction, parse_sizes, Grids, Mode, Scenario, SweepConfig};
pub use scenarios::run_scenario;

/// Failure of a sweep, split by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical error: {0}")]
    Numerical(#[from] Error),
}

impl ExperimentError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io { .. } => 1,
            ExperimentError::Numerical(_) => 2,
        }
    }
}

/// Least-squares coefficients of `F = a N^2 + b N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub residual_rms: f64,
}

/// Fits `F = a N^2 + b N` (no constant term) through `(N, F)` points.
///
/// Needs at least three distinct `N`.
pub fn fit_quadratic(points: &[(f64, f64)]) -> crate::Result<FitResult> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::RankDeficient(format!(
            "{} distinct N, need at least 3",
            distinct.len()
        )));
    }
    let design = DMatrix::from_fn(points.len(), 2, |r, c| {
        let n = points[r].0;
        if c == 0 {
            n * n
        } else {
            n
        }
    });
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= smax * 1e-14 {
        return Err(Error::RankDeficient("design matrix is singular".into()));
    }
    let coef = svd
        .solve(&rhs, smax * 1e-14)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let residual = &design * &coef - &rhs;
    Ok(FitResult {
        a: coef[0],
        b: coef[1],
        residual_rms: (residual.norm_squared() / points.len() as f64).sqrt(),
    })
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_sig(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

/// One CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// File stem, e.g. `trace_scan_N4`.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Numeric values of column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }
}

/// Ordered `key=value` summary record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_num(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format_sig(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Result of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub datasets: Vec<Dataset>,
    pub summary: Summary,
}

impl ScenarioOutput {
    /// Writes `<name>.csv` for each dataset and `<scenario>_summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        write_outputs(dir, &self.datasets, self.scenario.name(), &self.summary)
    }
}

/// Writes each dataset as `<name>.csv` plus `<stem>_summary.txt`, creating `dir`.
pub(crate) fn write_outputs(
    dir: &Path,
    datasets: &[Dataset],
    stem: &str,
    summary: &Summary,
) -> Result<Vec<PathBuf>, ExperimentError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    for ds in datasets {
        let path = dir.join(format!("{}.csv", ds.name));
        fs::write(&path, ds.to_csv()).map_err(io(&path))?;
        written.push(path);
    }
    let path = dir.join(format!("{stem}_summary.txt"));
    fs::write(&path, summary.render()).map_err(io(&path))?;
    written.push(path);
    Ok(written)
}

/// Runs the scenario and writes its files to `cfg.output_path`.
pub fn run_and_write(cfg: &SweepConfig) -> Result<(ScenarioOutput, Vec<PathBuf>), ExperimentError> {
    let output = run_scenario(cfg)?;
    let files = output.write(&cfg.output_path)?;
    Ok((output, files))
}

/// Formats with 12 significant digits, like C's `%.12g`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
