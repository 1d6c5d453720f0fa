//! Harness-level integration tests: reproducibility, file-format round trips,
//! and the failure plumbing behind the CLI exit codes.

use chemcomp::config::load_config;
use chemcomp::io::{parse_series_csv, series_csv, sweep_csv};
use chemcomp::scenario::{run_scenario, RunError};
use chemcomp::sweep::sweep_epsilon;

fn tmp(name: &str) -> String {
    std::path::Path::new(env!("CARGO_TARGET_TMPDIR"))
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn short_pattern_cfg(dir: &str) -> String {
    format!(
        "[scenario]\nname = pattern-1d\n[grid]\nn = 100\n[time]\ndt = 0.05\nt_end = 5\n\
         snapshots = 5\n[output]\ndir = {dir}\n"
    )
}

#[test]
fn shipped_sample_configs_all_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let text = std::fs::read_to_string(&path).unwrap();
            load_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert_eq!(count, 6, "one sample per scenario preset");
}

#[test]
fn reruns_are_bit_identical() {
    let d1 = tmp("det-1");
    let d2 = tmp("det-2");
    run_scenario(&load_config(&short_pattern_cfg(&d1)).unwrap()).unwrap();
    run_scenario(&load_config(&short_pattern_cfg(&d2)).unwrap()).unwrap();
    for file in ["series.csv", "snapshot_t5.csv", "summary.txt"] {
        let a = std::fs::read(format!("{d1}/{file}")).unwrap();
        let b = std::fs::read(format!("{d2}/{file}")).unwrap();
        assert_eq!(a, b, "{file} differs between identical reruns");
    }
}

#[test]
fn series_csv_round_trips_through_its_own_reader() {
    let dir = tmp("roundtrip");
    let cfg = load_config(&format!(
        "[scenario]\nname = traveling-wave\n[grid]\nn = 200\n[time]\ndt = 0.05\nt_end = 2\n\
         [output]\ndir = {dir}\n"
    ))
    .unwrap();
    let artifacts = run_scenario(&cfg).unwrap();
    let text = std::fs::read_to_string(&artifacts.series_path).unwrap();
    let (rows, ode) = parse_series_csv(&text).unwrap();
    assert!(ode.is_none());
    assert_eq!(rows.len(), artifacts.output.series.rows().len());
    for (parsed, original) in rows.iter().zip(artifacts.output.series.rows()) {
        assert_eq!(parsed, original, "row survives the round trip bit-exactly");
    }
    // and re-rendering reproduces the bytes
    let mut series = chemcomp_core::diagnostics::TimeSeries::new();
    for r in rows {
        series.push(r);
    }
    assert_eq!(series_csv(&series, None), text);
}

#[test]
fn amplitude_series_carries_the_ode_column() {
    let dir = tmp("ode-column");
    let cfg = load_config(&format!(
        "[scenario]\nname = amplitude-verify\n[grid]\nn = 100\n[time]\nt_end = 1\n\
         [output]\ndir = {dir}\n"
    ))
    .unwrap();
    let artifacts = run_scenario(&cfg).unwrap();
    let text = std::fs::read_to_string(&artifacts.series_path).unwrap();
    assert!(text.starts_with(
        "t,mass_u,mass_v,amp_u,amp_v,min_u,min_v,max_u,max_v,front_u,front_v,A_ode"
    ));
    let (rows, ode) = parse_series_csv(&text).unwrap();
    let ode = ode.expect("amplitude runs carry the ODE overlay");
    assert_eq!(ode.len(), rows.len());
    assert!((ode[0] - 1e-2).abs() < 1e-12);
}

#[test]
fn failed_sweep_rows_are_recorded_not_fatal() {
    let dir = tmp("sweep-partial");
    let cfg = load_config(&format!(
        "[scenario]\nname = amplitude-verify\n[grid]\nn = 100\n[time]\nt_end = 2\n\
         [output]\ndir = {dir}\n"
    ))
    .unwrap();
    // eps = -10 drives chi negative, which the coefficient validation rejects
    let rows = sweep_epsilon(&cfg, &[0.02, -10.0]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].outcome.is_ok());
    assert!(rows[1].outcome.is_err(), "expected the invalid run to fail: {:?}", rows[1].outcome);
    let table = sweep_csv(&rows);
    assert!(table.lines().count() == 3);
    assert!(table.contains("error"));
}

/// The segregated steady state far above threshold: clusters of u and v
/// alternate with spacing L / k* set by the critical mode (k* = 9 at L = 30).
#[test]
fn pattern_run_selects_the_critical_wavelength() {
    let dir = tmp("pattern-period");
    let cfg = load_config(&format!(
        "[scenario]\nname = pattern-1d\n[time]\nsnapshots = 200\n[output]\ndir = {dir}\n"
    ))
    .unwrap();
    let artifacts = run_scenario(&cfg).unwrap();
    let snap = &artifacts.output.snapshots[0];
    let grid = snap.grid();

    let peaks = |data: &[f64]| -> Vec<f64> {
        let max = data.iter().fold(0.0f64, |m, &x| m.max(x));
        (1..data.len() - 1)
            .filter(|&i| data[i] > data[i - 1] && data[i] >= data[i + 1] && data[i] >= 0.5 * max)
            .map(|i| grid.center(i))
            .collect()
    };
    let pu = peaks(snap.u.as_slice());
    let pv = peaks(snap.v.as_slice());
    assert!(pu.len() >= 3 && pv.len() >= 3, "expected a periodic pattern");

    // merged cluster spacing ~ 2L/(2 k*) = 30/9
    let mut merged: Vec<f64> = pu.iter().chain(pv.iter()).copied().collect();
    merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let spacings: Vec<f64> = merged.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let expected = 30.0 / 9.0;
    assert!(
        (mean - expected).abs() <= 0.15 * expected,
        "mean cluster spacing {mean:.2} vs {expected:.2}"
    );
    // the final state is far from constant
    assert!(artifacts.summary.final_amp_u > 0.3);
}

/// Strong competition with a much more sensitive v: the a < 1 hypothesis of
/// the no-extinction property fails and v is driven out.
#[test]
fn strong_competition_wipes_out_the_sensitive_species() {
    let dir = tmp("exclusion");
    let cfg = load_config(&format!(
        "[scenario]\nname = front-propagation\n[params]\na = 2\nchi1 = 10\nchi2 = 100\n\
         [time]\nt_end = 50\n[output]\ndir = {dir}\n"
    ))
    .unwrap();
    let artifacts = run_scenario(&cfg).unwrap();
    let rows = artifacts.output.series.rows();
    let mass_v_peak = rows.iter().map(|r| r.mass_v).fold(0.0f64, f64::max);
    let last = rows.last().unwrap();
    assert!(mass_v_peak > 5.0, "v first grows into the open domain");
    assert!(last.mass_v < 0.01, "v mass should collapse, got {}", last.mass_v);
    assert!(last.mass_u > 90.0, "u should take the domain, got {}", last.mass_u);
}

#[test]
fn numerical_failures_are_distinguished_from_setup_failures() {
    // undershoot => numerical (CLI exit 2)
    let dir = tmp("undershoot");
    let cfg = load_config(&format!(
        "[scenario]\nname = gaussian-2d\n[grid]\nn = 40\n[time]\ndt = 0.2\nt_end = 10\n\
         [output]\ndir = {dir}\n"
    ))
    .unwrap();
    match run_scenario(&cfg) {
        Err(RunError::Numerical(_)) => {}
        other => panic!("expected a numerical failure, got {other:?}"),
    }

    // oversized perturbation => setup (CLI exit 1)
    let cfg = load_config(&format!(
        "[scenario]\nname = amplitude-verify\n[grid]\nn = 64\n[initial]\nkind = mode-perturbation\na0 = 0.99\n\
         [output]\ndir = {}\n",
        tmp("setup-fail")
    ))
    .unwrap();
    match run_scenario(&cfg) {
        Err(RunError::Setup(_)) => {}
        other => panic!("expected a setup failure, got {other:?}"),
    }
}
