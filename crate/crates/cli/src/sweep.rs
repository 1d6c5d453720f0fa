//! The epsilon sweep: one near-onset simulation per requested distance to
//! threshold, run concurrently, each paired with the saturated amplitude the
//! amplitude equation predicts.

use chemcomp_core::amplitude::{steady_amplitude, AmplitudeCoefficients};
use chemcomp_core::diagnostics::{monitors, MonitorReport};
use chemcomp_core::stepper::simulate;
use chemcomp_core::Grid;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::scenario::{make_initial, RunError};

/// One sweep entry: the measured plateau amplitude (value at `t_end`) or the
/// failure that prevented it, plus the predicted saturated amplitude and the
/// boundedness monitors of the completed run.
#[derive(Debug)]
pub struct SweepRow {
    pub eps: f64,
    pub outcome: Result<f64, String>,
    pub predicted: f64,
    pub monitors: Option<MonitorReport>,
}

/// Run the sweep off an amplitude-verify base configuration. Per-run
/// failures are recorded in their row; the sweep continues.
pub fn sweep_epsilon(base: &ScenarioConfig, eps_list: &[f64]) -> Result<Vec<SweepRow>, RunError> {
    if base.kind != ScenarioKind::AmplitudeVerify {
        return Err(RunError::Setup(
            "the sweep needs an amplitude-verify base configuration".into(),
        ));
    }
    let coeffs = AmplitudeCoefficients::compute(base.params.a1, base.params.length)?;

    let mut rows: Vec<Option<SweepRow>> = eps_list.iter().map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &eps in eps_list {
            let coeffs = &coeffs;
            handles.push(scope.spawn(move || {
                let mut cfg = base.clone();
                cfg.eps = Some(eps);
                cfg.params.chi1 = coeffs.chi_star + eps;
                cfg.params.chi2 = coeffs.chi_star + eps;
                let predicted = steady_amplitude(coeffs, eps).unwrap_or(f64::NAN);
                let (outcome, report) = match run_one(&cfg) {
                    Ok((amp, report)) => (Ok(amp), Some(report)),
                    Err(msg) => (Err(msg), None),
                };
                SweepRow {
                    eps,
                    outcome,
                    predicted,
                    monitors: report,
                }
            }));
        }
        for (slot, handle) in rows.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("sweep worker panicked"));
        }
    });
    Ok(rows.into_iter().map(|r| r.expect("joined")).collect())
}

fn run_one(cfg: &ScenarioConfig) -> Result<(f64, MonitorReport), String> {
    let grid = Grid::build(cfg.params.length, cfg.n, cfg.params.dim).map_err(|e| e.to_string())?;
    let (u0, v0) = make_initial(cfg, grid).map_err(|e| e.to_string())?;
    let out = simulate(&cfg.params, u0, v0, &cfg.scheme).map_err(|e| e.to_string())?;
    let report = monitors(&out.series, &cfg.params, cfg.scheme.tol_neg);
    Ok((
        out.series.rows().last().expect("non-empty series").amp_u,
        report,
    ))
}
