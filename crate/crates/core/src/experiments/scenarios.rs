use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::circuit::{
    optimal_generator, optimal_settings, reversal_period, Evolution, Interaction, ModelParams, PeriodIntegers,
    Schedule,
};
use crate::error::Error;
use crate::fisher::{
    cfi, output_derivatives, qfi_deviation, qfi_dephased, qfi_general, qfi_sld_oracle, qfi_thermal, CfiMode,
    DeviationSpec, MeasurementBasis,
};
use crate::spin_algebra::{EnsembleDim, PhaseGenerator};
use crate::states::{ancilla_state, dephase_ancilla, polarized_probe, thermal_probe, Polarization, SpectralProbe};

use super::config::{linspace, Mode};
use super::{fit_quadratic, format_sig, Cell, Dataset, ExperimentError, Scenario, ScenarioOutput, Summary, SweepConfig};

type Res<T> = Result<T, ExperimentError>;

/// Evaluates the configured scenario without touching the filesystem.
pub fn run_scenario(cfg: &SweepConfig) -> Res<ScenarioOutput> {
    cfg.validate()?;
    let (datasets, mut summary) = match cfg.scenario {
        Scenario::TraceScan => trace_scan(cfg)?,
        Scenario::QfiTheta0 => qfi_theta0(cfg)?,
        Scenario::QfiT1 => qfi_t1(cfg)?,
        Scenario::QfiHeatmap => qfi_heatmap(cfg)?,
        Scenario::QfiScaling => qfi_scaling(cfg)?,
        Scenario::CfiMap => cfi_map(cfg)?,
        Scenario::XzScaling => xz_scaling(cfg)?,
        Scenario::DeviationScan => deviation_scan(cfg)?,
        Scenario::DephasingScan => dephasing_scan(cfg)?,
    };
    let mut head = Summary::default();
    head.push("scenario", cfg.scenario);
    head.push(
        "interaction",
        match effective_interaction(cfg) {
            Interaction::Zz => "zz",
            Interaction::Xz => "xz",
        },
    );
    head.push(
        "mode",
        match cfg.mode {
            Mode::Conjugate => "conjugate",
            Mode::Period => "period",
        },
    );
    head.push_num("omega_p", cfg.params.omega_p);
    head.push_num("omega_a", cfg.params.omega_a);
    head.push_num("g", cfg.params.g);
    head.push_num("theta", cfg.theta);
    head.push("rows", datasets.iter().map(|d| d.rows.len()).sum::<usize>());
    head.entries.append(&mut summary.entries);
    Ok(ScenarioOutput {
        scenario: cfg.scenario,
        datasets,
        summary: head,
    })
}

fn effective_interaction(cfg: &SweepConfig) -> Interaction {
    match cfg.scenario {
        Scenario::XzScaling => Interaction::Xz,
        _ => cfg.params.interaction,
    }
}

fn dim(n: usize) -> Res<EnsembleDim> {
    Ok(EnsembleDim::new(n)?)
}

fn sizes(cfg: &SweepConfig, default: impl FnOnce() -> Vec<usize>) -> Vec<usize> {
    cfg.grids.n.clone().unwrap_or_else(default)
}

fn single_size(cfg: &SweepConfig, default: usize) -> Res<usize> {
    match cfg.grids.n.as_deref() {
        None => Ok(default),
        Some([n]) => Ok(*n),
        Some(_) => Err(ExperimentError::Config(format!(
            "{} takes a single ensemble size",
            cfg.scenario
        ))),
    }
}

fn grid(g: &Option<Vec<f64>>, default: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
    g.clone().unwrap_or_else(default)
}

fn require_zz(cfg: &SweepConfig) -> Res<()> {
    if cfg.params.interaction != Interaction::Zz {
        return Err(ExperimentError::Config(format!(
            "{} is only defined for the zz interaction",
            cfg.scenario
        )));
    }
    Ok(())
}

fn par_eval<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Res<R> + Sync + Send) -> Res<Vec<R>> {
    items.par_iter().map(f).collect()
}

/// Builds schedules for one `(params, N)` pair according to the sweep mode.
struct Timing {
    period: Option<f64>,
}

impl Timing {
    fn new(cfg: &SweepConfig, params: &ModelParams, dim: EnsembleDim) -> Res<Self> {
        let period = match cfg.mode {
            Mode::Conjugate => None,
            Mode::Period => Some(reversal_period(params, dim, cfg.window / params.g)?.period),
        };
        Ok(Self { period })
    }

    /// In period mode the total time is the first multiple of the period
    /// not shorter than `t1`.
    fn schedule(&self, t1: f64, theta: f64) -> Res<Schedule> {
        Ok(match self.period {
            None => Schedule::conjugate(t1, theta)?,
            Some(p) => {
                let k = (t1 / p).ceil().max(1.0);
                Schedule::period(t1, (k * p).max(t1), theta)?
            }
        })
    }
}

/// Optimal first step and the polarized probe `|j, j>_opt` for it.
fn optimal_probe(params: &ModelParams, dim: EnsembleDim) -> Res<(f64, PhaseGenerator, SpectralProbe)> {
    let t1 = optimal_settings(params, 0).t1;
    let generator = optimal_generator(params, dim, t1);
    let probe = polarized_probe(dim, &generator, Polarization::Up)?;
    Ok((t1, generator, probe))
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn int(n: usize) -> Cell {
    Cell::Int(n as i64)
}

fn argmax<T: Copy>(items: impl IntoIterator<Item = (T, f64)>) -> Option<(T, f64)> {
    items
        .into_iter()
        .fold(None, |best: Option<(T, f64)>, (k, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((k, v)),
        })
}

fn trace_scan(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    const POINTS: usize = 2048;
    let ns = sizes(cfg, || vec![4, 11]);
    let gts = grid(&cfg.grids.gt, || {
        (1..=POINTS).map(|k| 4.0 * PI * k as f64 / POINTS as f64).collect()
    });
    let params = cfg.params;
    let mut datasets = Vec::new();
    let mut summary = Summary::default();
    summary.push("grid_points", gts.len());
    for &n in &ns {
        let d = dim(n)?;
        let evolution = Evolution::new(&params, d);
        let values: Vec<f64> = gts.par_iter().map(|gt| evolution.normalized_trace(gt / params.g)).collect();
        let peaks: Vec<String> = gts
            .iter()
            .zip(&values)
            .filter(|(_, f)| **f >= 1.0 - 1e-9)
            .map(|(gt, _)| format_sig(*gt))
            .collect();
        let key = format!("N{n}");
        summary.push_num(format!("{key}_max_F"), values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        summary.push(format!("{key}_peaks_gT"), if peaks.is_empty() { "none".into() } else { peaks.join(";") });
        match reversal_period(&params, d, cfg.window / params.g) {
            Ok(sol) => {
                summary.push_num(format!("{key}_period_gT"), sol.period * params.g);
                summary.push(
                    format!("{key}_period_integers"),
                    match sol.integers {
                        Some(PeriodIntegers::ZzEven { n1, n2, n3 }) => format!("n1={n1};n2={n2};n3={n3}"),
                        Some(PeriodIntegers::ZzOdd { n1, n2, n4 }) => format!("n1={n1};n2={n2};n4={n4}"),
                        Some(PeriodIntegers::Xz { n5, n6 }) => format!("n5={n5};n6={n6}"),
                        None => "none".into(),
                    },
                );
            }
            Err(Error::NoPeriod { .. }) => summary.push(format!("{key}_period_gT"), "none"),
            Err(e) => return Err(e.into()),
        }
        datasets.push(Dataset {
            name: format!("trace_scan_N{n}"),
            columns: Scenario::TraceScan.columns().to_vec(),
            rows: gts.iter().zip(values).map(|(gt, f)| vec![num(*gt), num(f)]).collect(),
        });
    }
    Ok((datasets, summary))
}

/// QFI of the polarized optimal probe at `(theta0, gt1)`.
fn polarized_qfi(cfg: &SweepConfig, n: usize, points: &[(f64, f64)]) -> Res<Vec<f64>> {
    let params = cfg.params;
    let d = dim(n)?;
    let (_, _, probe) = optimal_probe(&params, d)?;
    let timing = Timing::new(cfg, &params, d)?;
    par_eval(points, |&(theta0, gt1)| {
        let sched = timing.schedule(gt1 / params.g, cfg.theta)?;
        let ancilla = ancilla_state(theta0, cfg.phi0);
        Ok(qfi_general(&probe, &ancilla, &params, &sched)?.value)
    })
}

fn qfi_theta0(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    let ns = sizes(cfg, || (2..=20).collect());
    let thetas = grid(&cfg.grids.theta0, || linspace(0.0, PI, 91));
    let mut rows = Vec::new();
    let mut summary = Summary::default();
    summary.push_num("gt1", cfg.at_gt1);
    for &n in &ns {
        let points: Vec<(f64, f64)> = thetas.iter().map(|&t| (t, cfg.at_gt1)).collect();
        let values = polarized_qfi(cfg, n, &points)?;
        if let Some((t, v)) = argmax(thetas.iter().copied().zip(values.iter().copied())) {
            summary.push_num(format!("N{n}_max_FQ"), v);
            summary.push_num(format!("N{n}_argmax_theta0"), t);
        }
        rows.extend(thetas.iter().zip(values).map(|(t, f)| vec![int(n), num(*t), num(f)]));
    }
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn qfi_t1(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    let ns = sizes(cfg, || (2..=20).collect());
    let gt1s = grid(&cfg.grids.gt1, || linspace(0.0, PI, 91));
    let mut rows = Vec::new();
    let mut summary = Summary::default();
    summary.push_num("theta0", cfg.at_theta0);
    for &n in &ns {
        let points: Vec<(f64, f64)> = gt1s.iter().map(|&t| (cfg.at_theta0, t)).collect();
        let values = polarized_qfi(cfg, n, &points)?;
        if let Some((t, v)) = argmax(gt1s.iter().copied().zip(values.iter().copied())) {
            summary.push_num(format!("N{n}_max_FQ"), v);
            summary.push_num(format!("N{n}_argmax_gt1"), t);
        }
        rows.extend(gt1s.iter().zip(values).map(|(t, f)| vec![int(n), num(*t), num(f)]));
    }
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn qfi_heatmap(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    let n = single_size(cfg, 4)?;
    let thetas = grid(&cfg.grids.theta0, || linspace(0.0, PI, 41));
    let gt1s = grid(&cfg.grids.gt1, || linspace(0.0, PI, 41));
    let points: Vec<(f64, f64)> = thetas.iter().flat_map(|&a| gt1s.iter().map(move |&b| (a, b))).collect();
    let n2 = (n * n) as f64;
    let values: Vec<f64> = polarized_qfi(cfg, n, &points)?.into_iter().map(|f| f / n2).collect();
    let mut summary = Summary::default();
    summary.push("N", n);
    summary.push("theta0_points", thetas.len());
    summary.push("gt1_points", gt1s.len());
    if let Some(((t0, t1), v)) = argmax(points.iter().copied().zip(values.iter().copied())) {
        summary.push_num("max_FQ_over_N2", v);
        summary.push_num("argmax_theta0", t0);
        summary.push_num("argmax_gt1", t1);
    }
    let rows = points.iter().zip(values).map(|((a, b), v)| vec![num(*a), num(*b), num(v)]).collect();
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn qfi_scaling(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    if cfg.beta.is_nan() || cfg.beta <= 0.0 {
        return Err(ExperimentError::Config("qfi_scaling needs beta > 0 for the large-N form".into()));
    }
    let ns = sizes(cfg, || (2..=20).collect());
    // (label, theta0, gt1) for the polarized probe
    let polarized = [("A", FRAC_PI_2, FRAC_PI_2), ("B", FRAC_PI_2, 0.75 * PI), ("C", PI / 8.0, FRAC_PI_2)];
    let labels = ["A", "B", "C", "D", "D_largeN"];
    let params = cfg.params;

    let per_n = par_eval(&ns, |&n| {
        let d = dim(n)?;
        let (_, generator, probe) = optimal_probe(&params, d)?;
        let timing = Timing::new(cfg, &params, d)?;
        let mut vals = Vec::with_capacity(labels.len());
        for (_, theta0, gt1) in polarized {
            let sched = timing.schedule(gt1 / params.g, cfg.theta)?;
            vals.push(qfi_general(&probe, &ancilla_state(theta0, cfg.phi0), &params, &sched)?.value);
        }
        let thermal = thermal_probe(d, &generator, cfg.beta)?;
        let sched = timing.schedule(FRAC_PI_2 / params.g, cfg.theta)?;
        vals.push(qfi_general(&thermal, &ancilla_state(FRAC_PI_2, cfg.phi0), &params, &sched)?.value);
        vals.push(qfi_thermal(d, cfg.beta)?.1.value);
        Ok(vals)
    })?;

    let mut rows = Vec::new();
    for (&n, vals) in ns.iter().zip(&per_n) {
        for (label, v) in labels.iter().zip(vals) {
            rows.push(vec![int(n), Cell::Text(label.to_string()), num(*v)]);
        }
    }
    let mut summary = Summary::default();
    summary.push_num("beta", cfg.beta);
    let max_dev_a = ns
        .iter()
        .zip(&per_n)
        .map(|(&n, v)| (v[0] / (n * n) as f64 - 1.0).abs())
        .fold(0.0, f64::max);
    summary.push_num("A_max_abs_dev_FQ_over_N2", max_dev_a);
    for (k, label) in labels.iter().enumerate() {
        let pts: Vec<(f64, f64)> = ns.iter().zip(&per_n).map(|(&n, v)| (n as f64, v[k])).collect();
        push_fit(&mut summary, &format!("fit_{label}"), &pts);
    }
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn push_fit(summary: &mut Summary, key: &str, pts: &[(f64, f64)]) {
    match fit_quadratic(pts) {
        Ok(fit) => {
            summary.push_num(format!("{key}_a"), fit.a);
            summary.push_num(format!("{key}_b"), fit.b);
            summary.push_num(format!("{key}_rms"), fit.residual_rms);
        }
        Err(_) => summary.push(key, "skipped"),
    }
}

fn cfi_map(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    let n = single_size(cfg, 5)?;
    let gt1s = grid(&cfg.grids.gt1, || linspace(0.0, 2.0 * PI, 65));
    let gt2s = grid(&cfg.grids.gt2, || linspace(0.0, 2.0 * PI, 65));
    let params = cfg.params;
    let d = dim(n)?;
    let (_, _, probe) = optimal_probe(&params, d)?;
    let ancilla = ancilla_state(FRAC_PI_2, cfg.phi0);
    let points: Vec<(f64, f64)> = gt1s.iter().flat_map(|&a| gt2s.iter().map(move |&b| (a, b))).collect();
    let n2 = (n * n) as f64;
    let values = par_eval(&points, |&(gt1, gt2)| {
        let sched = Schedule::steps(gt1 / params.g, gt2 / params.g, cfg.theta)?;
        let f = cfi(&probe, &ancilla, &params, &sched, &MeasurementBasis::AncillaOnly, CfiMode::Analytic)?;
        Ok(f.value / n2)
    })?;
    let mut summary = Summary::default();
    summary.push("N", n);
    summary.push("basis", "ancilla");
    if let Some(((a, b), v)) = argmax(points.iter().copied().zip(values.iter().copied())) {
        summary.push_num("max_Fc_over_N2", v);
        summary.push_num("argmax_gt1", a);
        summary.push_num("argmax_gt2", b);
    }
    let rows = points.iter().zip(values).map(|((a, b), v)| vec![num(*a), num(*b), num(v)]).collect();
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn xz_scaling(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    let ns = sizes(cfg, || (2..=100).collect());
    let ratios = grid(&cfg.grids.g_over_wp, || vec![1.0, 0.3, 0.1]);
    let g = cfg.params.g;
    let tasks: Vec<(f64, usize)> = ratios.iter().flat_map(|&r| ns.iter().map(move |&n| (r, n))).collect();
    let values = par_eval(&tasks, |&(ratio, n)| {
        let wp = g / ratio;
        let params = ModelParams::xz(wp, wp, g)?;
        let d = dim(n)?;
        let (t1, _, probe) = optimal_probe(&params, d)?;
        let sched = Timing::new(cfg, &params, d)?.schedule(t1, cfg.theta)?;
        let f = qfi_general(&probe, &ancilla_state(FRAC_PI_2, cfg.phi0), &params, &sched)?;
        Ok((g * t1, f.value))
    })?;

    let mut summary = Summary::default();
    summary.push("fit_min_n", cfg.fit_min_n);
    for &ratio in &ratios {
        let key = format!("ratio_{}", format_sig(ratio));
        let params = ModelParams::xz(g / ratio, g / ratio, g)?;
        let settings = optimal_settings(&params, 0);
        summary.push(format!("{key}_status"), format!("{:?}", settings.status));
        let bch = crate::circuit::bch_coefficients(&params, settings.t1)?;
        summary.push_num(format!("{key}_cx2"), bch.cx * bch.cx);
        let rows: Vec<(usize, f64)> = tasks
            .iter()
            .zip(&values)
            .filter(|((r, _), _)| *r == ratio)
            .map(|((_, n), (_, f))| (*n, *f))
            .collect();
        let max_dev = rows
            .iter()
            .map(|(n, f)| (f / (n * n) as f64 - 1.0).abs())
            .fold(0.0, f64::max);
        summary.push_num(format!("{key}_max_rel_dev_from_N2"), max_dev);
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|(n, _)| *n >= cfg.fit_min_n)
            .map(|(n, f)| (*n as f64, *f))
            .collect();
        push_fit(&mut summary, &format!("{key}_fit"), &pts);
    }
    let rows = tasks
        .iter()
        .zip(values)
        .map(|((r, n), (gt1, f))| vec![int(*n), num(*r), num(gt1), num(f)])
        .collect();
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn deviation_scan(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    require_zz(cfg)?;
    let ns = sizes(cfg, || vec![4, 20]);
    let deltas = || vec![0.0, 0.005, 0.01, 0.02];
    let dgs = grid(&cfg.grids.dg_t1, deltas);
    let dwps = grid(&cfg.grids.dwp_t1, deltas);
    let params = cfg.params;
    let mut tasks: Vec<(usize, f64, f64)> = Vec::new();
    for &n in &ns {
        for &a in &dgs {
            tasks.extend(dwps.iter().map(|&b| (n, a, b)));
        }
    }
    let values = par_eval(&tasks, |&(n, dg_t1, dwp_t1)| {
        let d = dim(n)?;
        let (t1, _, probe) = optimal_probe(&params, d)?;
        let spec = DeviationSpec {
            dg: dg_t1 / t1,
            d_omega_p: dwp_t1 / t1,
        };
        let perturbed = params.with_deviation(spec.dg, spec.d_omega_p)?;
        let sched = Timing::new(cfg, &perturbed, d)?.schedule(t1, cfg.theta)?;
        let numeric = qfi_general(&probe, &ancilla_state(FRAC_PI_2, cfg.phi0), &perturbed, &sched)?.value;
        Ok((qfi_deviation(d, &spec, t1).value, numeric))
    })?;
    let mut summary = Summary::default();
    let gap = values.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    summary.push_num("max_abs_gap", gap);
    let rows = tasks
        .iter()
        .zip(values)
        .map(|((n, a, b), (formula, numeric))| vec![int(*n), num(*a), num(*b), num(formula), num(numeric)])
        .collect();
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn dephasing_scan(cfg: &SweepConfig) -> Res<(Vec<Dataset>, Summary)> {
    require_zz(cfg)?;
    let ns = sizes(cfg, || (2..=20).collect());
    let xs = grid(&cfg.grids.x, || linspace(0.0, 1.0, 11));
    let params = cfg.params;
    let tasks: Vec<(usize, f64)> = ns.iter().flat_map(|&n| xs.iter().map(move |&x| (n, x))).collect();
    let values = par_eval(&tasks, |&(n, x)| {
        let d = dim(n)?;
        let (t1, generator, probe) = optimal_probe(&params, d)?;
        let closed = qfi_dephased(&probe, FRAC_PI_2, x, &generator)?.value;
        let ancilla = dephase_ancilla(&ancilla_state(FRAC_PI_2, cfg.phi0), x)?;
        let sched = Timing::new(cfg, &params, d)?.schedule(t1, cfg.theta)?;
        let out = output_derivatives(&probe, &ancilla, &params, &sched);
        let sld = qfi_sld_oracle(&out.rho, &out.d_rho)?.value;
        Ok((closed, sld))
    })?;
    let mut summary = Summary::default();
    let law = tasks
        .iter()
        .zip(&values)
        .map(|((n, x), (f, _))| (f - (1.0 - x).powi(2) * (n * n) as f64).abs())
        .fold(0.0, f64::max);
    let sld = values.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    summary.push_num("max_abs_dev_from_law", law);
    summary.push_num("max_abs_gap_sld", sld);
    let rows = tasks
        .iter()
        .zip(values)
        .map(|((n, x), (f, _))| vec![int(*n), num(*x), num(f)])
        .collect();
    Ok((vec![dataset(cfg.scenario, rows)], summary))
}

fn dataset(scenario: Scenario, rows: Vec<Vec<Cell>>) -> Dataset {
    Dataset {
        name: scenario.name().to_string(),
        columns: scenario.columns().to_vec(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SweepConfig;

    fn cfg(text: &str) -> SweepConfig {
        SweepConfig::parse(text).unwrap()
    }

    #[test]
    fn trace_scan_peaks_for_even_ensemble() {
        let out = run_scenario(&cfg("scenario = trace_scan\nn = 4\n")).unwrap();
        assert_eq!(out.datasets[0].rows.len(), 2048);
        let peaks = out.summary.get("N4_peaks_gT").unwrap();
        let peaks: Vec<f64> = peaks.split(';').map(|p| p.parse().unwrap()).collect();
        assert_eq!(peaks.len(), 4);
        for (k, p) in peaks.iter().enumerate() {
            assert!((p - (k + 1) as f64 * PI).abs() < 1e-9);
        }
        assert_eq!(out.summary.get("N4_period_integers"), Some("n1=1;n2=1;n3=3"));
    }

    #[test]
    fn heatmap_peak_at_optimum() {
        let out = run_scenario(&cfg("scenario = qfi_heatmap\ntheta0 = 0:pi:9\ngt1 = 0:pi:9\n")).unwrap();
        assert_eq!(out.datasets[0].rows.len(), 81);
        assert!((out.summary.get_f64("max_FQ_over_N2").unwrap() - 1.0).abs() < 1e-9);
        assert!((out.summary.get_f64("argmax_theta0").unwrap() - FRAC_PI_2).abs() < 1e-9);
        assert!((out.summary.get_f64("argmax_gt1").unwrap() - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn heatmap_rejects_many_sizes() {
        assert!(matches!(
            run_scenario(&cfg("scenario = qfi_heatmap\nn = 2,3\n")),
            Err(ExperimentError::Config(_))
        ));
    }

    #[test]
    fn scaling_point_a_is_heisenberg_in_both_modes() {
        for mode in ["conjugate", "period"] {
            let out = run_scenario(&cfg(&format!("scenario = qfi_scaling\nn = 2..6\nmode = {mode}\n"))).unwrap();
            assert_eq!(out.datasets[0].rows.len(), 5 * 5);
            assert!(out.summary.get_f64("A_max_abs_dev_FQ_over_N2").unwrap() < 1e-8);
        }
    }

    #[test]
    fn dephasing_rejects_xz() {
        let r = run_scenario(&cfg("scenario = dephasing_scan\ninteraction = xz\nn = 2\n"));
        assert!(matches!(r, Err(ExperimentError::Config(_))));
    }

    #[test]
    fn period_mode_without_period_is_numerical() {
        let text = "scenario = qfi_t1\nn = 3\nmode = period\nomega_p = 1.4142135623730951\nomega_a = 3.3166247903554\nwindow = 20\ngt1 = pi/2\n";
        let err = run_scenario(&cfg(text)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rows_match_grid_product() {
        let out = run_scenario(&cfg("scenario = deviation_scan\nn = 4\ndg_t1 = 0,0.01\ndwp_t1 = 0,0.01,0.02\n")).unwrap();
        assert_eq!(out.datasets[0].rows.len(), 6);
        let out = run_scenario(&cfg("scenario = dephasing_scan\nn = 2..4\nx = 0,0.5\n")).unwrap();
        assert_eq!(out.datasets[0].rows.len(), 6);
        assert!(out.summary.get_f64("max_abs_dev_from_law").unwrap() < 1e-10);
        assert!(out.summary.get_f64("max_abs_gap_sld").unwrap() < 1e-8);
    }
}
