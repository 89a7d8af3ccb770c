use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;

use ancilla_metrology::experiments::{run_and_write, run_scenario, ExperimentError, Scenario, SweepConfig};

fn config(text: &str) -> SweepConfig {
    SweepConfig::parse(text).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("scenario = qfi_t1\nn = 2..5\ngt1 = 0:pi:13\n");
    cfg.output_path = dir.path().join("a");
    let (_, first) = run_and_write(&cfg).unwrap();
    cfg.output_path = dir.path().join("b");
    let (_, second) = run_and_write(&cfg).unwrap();
    assert_eq!(first.len(), 2);
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{}", a.display());
    }
    let csv = fs::read_to_string(dir.path().join("a/qfi_t1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,gt1,FQ"));
    assert_eq!(lines.count(), 4 * 13);
    let summary = fs::read_to_string(dir.path().join("a/qfi_t1_summary.txt")).unwrap();
    assert!(summary.starts_with("scenario=qfi_t1\n"));
    assert!(summary.contains("rows=52\n"));
}

#[test]
fn row_counts_follow_grid_products() {
    let cases = [
        ("scenario = qfi_theta0\nn = 2,3\ntheta0 = 0:pi:7\n", 14),
        ("scenario = qfi_heatmap\nn = 3\ntheta0 = 0:pi:5\ngt1 = 0:pi:3\n", 15),
        ("scenario = qfi_scaling\nn = 2..4\n", 15),
        ("scenario = cfi_map\ngt1 = 0:2pi:5\ngt2 = 0:2pi:4\n", 20),
        ("scenario = xz_scaling\nn = 2..5\ng_over_wp = 1,0.1\n", 8),
        ("scenario = deviation_scan\nn = 4\ndg_t1 = 0,0.01\ndwp_t1 = 0.01\n", 2),
        ("scenario = dephasing_scan\nn = 4,5\nx = 0:1:3\n", 6),
        ("scenario = trace_scan\nn = 2,3\ngT = 0:pi:9\n", 18),
    ];
    for (text, rows) in cases {
        let out = run_scenario(&config(text)).unwrap();
        let total: usize = out.datasets.iter().map(|d| d.rows.len()).sum();
        assert_eq!(total, rows, "{text}");
        for ds in &out.datasets {
            assert_eq!(ds.columns, out.scenario.columns());
        }
    }
}

#[test]
fn trace_scan_default_grid_peaks() {
    let out = run_scenario(&config("scenario = trace_scan\n")).unwrap();
    assert_eq!(out.datasets.len(), 2);
    assert_eq!(out.datasets[0].name, "trace_scan_N4");
    assert_eq!(out.datasets[0].rows.len(), 2048);
    let even: Vec<f64> = out.summary.get("N4_peaks_gT").unwrap().split(';').map(|s| s.parse().unwrap()).collect();
    assert_eq!(even.len(), 4);
    let odd: Vec<f64> = out.summary.get("N11_peaks_gT").unwrap().split(';').map(|s| s.parse().unwrap()).collect();
    assert_eq!(odd.len(), 2);
    assert!((odd[0] - 2.0 * PI).abs() < 1e-9 && (odd[1] - 4.0 * PI).abs() < 1e-9);
    assert_eq!(out.summary.get("N11_period_integers"), Some("n1=2;n2=2;n4=5"));
    let f = out.datasets[0].column("F").unwrap();
    assert!(f.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
}

#[test]
fn heatmap_default_grid_peaks_at_point_a() {
    let out = run_scenario(&config("scenario = qfi_heatmap\n")).unwrap();
    assert_eq!(out.datasets[0].rows.len(), 41 * 41);
    assert!((out.summary.get_f64("max_FQ_over_N2").unwrap() - 1.0).abs() < 1e-9);
    assert!((out.summary.get_f64("argmax_theta0").unwrap() - FRAC_PI_2).abs() < 1e-9);
    assert!((out.summary.get_f64("argmax_gt1").unwrap() - FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn xz_scaling_peak_for_equal_frequencies() {
    let out = run_scenario(&config("scenario = xz_scaling\nn = 2..40\ng_over_wp = 1\n")).unwrap();
    let ds = &out.datasets[0];
    let n = ds.column("N").unwrap();
    let f = ds.column("FQ").unwrap();
    for (n, f) in n.iter().zip(f) {
        assert!((f / (n * n) - 1.0).abs() < 1e-6);
    }
    let gt1 = ds.column("gt1").unwrap();
    assert!(gt1.iter().all(|t| (t - PI / 2f64.sqrt()).abs() < 1e-9));
    assert_eq!(out.summary.get("ratio_1_status"), Some("Optimal"));
}

#[test]
fn xz_weak_coupling_fit() {
    let out = run_scenario(&config("scenario = xz_scaling\nn = 10..100..10\ng_over_wp = 0.1\n")).unwrap();
    let a = out.summary.get_f64("ratio_0.1_fit_a").unwrap();
    let b = out.summary.get_f64("ratio_0.1_fit_b").unwrap();
    let cx2 = out.summary.get_f64("ratio_0.1_cx2").unwrap();
    assert!((a - 0.04).abs() <= 0.01, "a = {a}");
    assert!((b - 0.96).abs() <= 0.05, "b = {b}");
    assert!((a - cx2).abs() < 0.005);
    assert_eq!(out.summary.get("ratio_0.1_status"), Some("SubOptimal"));
}

#[test]
fn scaling_rows_for_point_a() {
    let out = run_scenario(&config("scenario = qfi_scaling\n")).unwrap();
    let ds = &out.datasets[0];
    let mut seen = 0;
    for row in &ds.rows {
        if row[1] == ancilla_metrology::experiments::Cell::Text("A".into()) {
            let n = row[0].as_f64().unwrap();
            assert!((row[2].as_f64().unwrap() / (n * n) - 1.0).abs() < 1e-8);
            seen += 1;
        }
    }
    assert_eq!(seen, 19);
}

#[test]
fn cfi_map_reaches_heisenberg_limit() {
    let out = run_scenario(&config("scenario = cfi_map\ngt1 = pi/2\ngt2 = 0:2pi:9\n")).unwrap();
    let ds = &out.datasets[0];
    let gt2 = ds.column("gt2").unwrap();
    let fc = ds.column("Fc_over_N2").unwrap();
    for (t, v) in gt2.iter().zip(fc) {
        // gt2 = pi/2 (sigma_z twist) and gt2 = 3pi/2 (odd-N reversal) both saturate
        if (t - FRAC_PI_2).abs() < 1e-9 || (t - 1.5 * PI).abs() < 1e-9 {
            assert!((v - 1.0).abs() < 1e-8, "gt2 = {t}: {v}");
        }
        assert!(v <= 1.0 + 1e-8);
    }
}

#[test]
fn deviation_and_dephasing_summaries() {
    let out = run_scenario(&config("scenario = deviation_scan\n")).unwrap();
    assert_eq!(out.datasets[0].rows.len(), 2 * 4 * 4);
    assert!(out.summary.get_f64("max_abs_gap").unwrap() < 1e-3);
    let out = run_scenario(&config("scenario = dephasing_scan\nn = 4,20\nx = 0,0.1,0.5,0.9\n")).unwrap();
    assert!(out.summary.get_f64("max_abs_dev_from_law").unwrap() < 1e-10);
    assert!(out.summary.get_f64("max_abs_gap_sld").unwrap() < 1e-8);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut cfg = config("scenario = dephasing_scan\nn = 2\nx = 0\n");
    cfg.output_path = blocker.join("sub");
    let err = run_and_write(&cfg).unwrap_err();
    assert!(matches!(err, ExperimentError::Io { .. }));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn scenario_names_round_trip() {
    for sc in Scenario::ALL {
        assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
    }
}
