//! Scenario setup and execution: initial data builders, the run driver, and
//! the run summary written next to the CSV outputs.

use std::fmt;
use std::path::PathBuf;

use chemcomp_core::amplitude::{solve_amplitude_ode, AmplitudeCoefficients};
use chemcomp_core::diagnostics::{monitors, wave_speed, MonitorReport};
use chemcomp_core::stability::{self, ModeIndex};
use chemcomp_core::stepper::{lf_smearing_warning, simulate, SimOutput};
use chemcomp_core::{coexistence_state, CoreError, Dim, Field, Grid, Params};
use thiserror::Error;

use crate::config::{InitialCondition, ScenarioConfig, ScenarioKind};
use crate::io;

#[derive(Debug, Error)]
pub enum RunError {
    /// Inconsistent scenario setup (configuration-class failure).
    #[error("{0}")]
    Setup(String),
    /// Solver failure (undershoot, no convergence, singular system).
    #[error("{0}")]
    Numerical(CoreError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Undershoot { .. }
            | CoreError::NoConvergence { .. }
            | CoreError::SingularSystem { .. } => RunError::Numerical(e),
            other => RunError::Setup(other.to_string()),
        }
    }
}

/// xorshift64* noise stream; deterministic for a given seed so reruns are
/// bit-identical.
struct Noise {
    state: u64,
}

impl Noise {
    fn new(seed: u64) -> Noise {
        Noise {
            state: seed.wrapping_mul(0x9e3779b97f4a7c15) | 1,
        }
    }

    /// Uniform in [-1, 1).
    fn next(&mut self) -> f64 {
        self.state ^= self.state << 13;
        self.state ^= self.state >> 7;
        self.state ^= self.state << 17;
        let unit = (self.state.wrapping_mul(0x2545f4914f6cdd1d) >> 11) as f64 / (1u64 << 53) as f64;
        2.0 * unit - 1.0
    }
}

/// Critical mode of the symmetric problem, used by the perturbation data.
fn critical_mode(params: &Params) -> Result<ModeIndex, RunError> {
    if params.a1 != params.a2 {
        return Err(RunError::Setup(
            "mode perturbations need symmetric competition (a1 = a2)".into(),
        ));
    }
    let (_, critical) = stability::chi_star(params.a1, params.length, params.dim)?;
    Ok(critical[0])
}

/// Build `(u0, v0)` for a scenario on its grid.
pub fn make_initial(cfg: &ScenarioConfig, grid: Grid) -> Result<(Field, Field), RunError> {
    let params = &cfg.params;
    let (mut u, mut v) = match cfg.initial {
        InitialCondition::ModePerturbation { a0 } => {
            let (ubar, vbar) = coexistence_state(params)?;
            if a0 >= ubar.min(vbar) {
                return Err(RunError::Setup(format!(
                    "perturbation amplitude {a0} makes a density non-positive (coexistence at {ubar:.4})"
                )));
            }
            let l = params.length;
            match critical_mode(params)? {
                ModeIndex::OneD(k) => {
                    let w = k as f64 * std::f64::consts::PI / l;
                    (
                        Field::project_1d(grid, |x| ubar + a0 * (w * x).cos()),
                        Field::project_1d(grid, |x| vbar - a0 * (w * x).cos()),
                    )
                }
                ModeIndex::TwoD(k, j) => {
                    let wk = k as f64 * std::f64::consts::PI / l;
                    let wj = j as f64 * std::f64::consts::PI / l;
                    (
                        Field::project_2d(grid, |x, y| ubar + a0 * (wk * x).cos() * (wj * y).cos()),
                        Field::project_2d(grid, |x, y| vbar - a0 * (wk * x).cos() * (wj * y).cos()),
                    )
                }
            }
        }
        InitialCondition::Segregated { s1, s2 } => {
            let l = params.length;
            let hu = 1.0 / (l - s2);
            let hv = 1.0 / s1;
            (
                Field::project_1d(grid, move |x| if x >= s2 { hu } else { 0.0 }),
                Field::project_1d(grid, move |x| if x <= s1 { hv } else { 0.0 }),
            )
        }
        InitialCondition::NestedIndicator { i1, i2 } => {
            let hu = 1.0 / (i1.1 - i1.0);
            let hv = 1.0 / (i2.1 - i2.0);
            (
                Field::project_1d(grid, move |x| if x >= i1.0 && x <= i1.1 { hu } else { 0.0 }),
                Field::project_1d(grid, move |x| if x >= i2.0 && x <= i2.1 { hv } else { 0.0 }),
            )
        }
        InitialCondition::Gaussian { sigma1_sq, sigma2_sq } => {
            let c = params.length / 2.0;
            let bell = move |s2: f64| {
                move |x: f64, y: f64| {
                    let r2 = (x - c) * (x - c) + (y - c) * (y - c);
                    (-r2 / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2)
                }
            };
            (
                Field::project_2d(grid, bell(sigma1_sq)),
                Field::project_2d(grid, bell(sigma2_sq)),
            )
        }
        InitialCondition::Constant { u, v } => (Field::constant(grid, u), Field::constant(grid, v)),
    };

    if cfg.noise > 0.0 {
        let mut gen = Noise::new(cfg.seed);
        for x in u.as_mut_slice() {
            *x += cfg.noise * gen.next();
        }
        for x in v.as_mut_slice() {
            *x += cfg.noise * gen.next();
        }
        if u.min() < 0.0 || v.min() < 0.0 {
            return Err(RunError::Setup(
                "noise amplitude drives the initial data negative".into(),
            ));
        }
    }
    Ok((u, v))
}

/// Everything a finished scenario reports, echoed to `summary.txt`.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenario: &'static str,
    pub steps: usize,
    pub final_t: f64,
    pub monitors: MonitorReport,
    pub final_mass_u: f64,
    pub final_mass_v: f64,
    pub final_amp_u: f64,
    pub final_amp_v: f64,
    /// Least-squares front speed of `u` over the trailing window, when the
    /// front is defined long enough to fit.
    pub wave_speed: Option<(f64, f64)>,
    /// Saturated amplitude predicted by the amplitude equation
    /// (amplitude-verify runs only).
    pub predicted_amplitude: Option<f64>,
    pub min_dominance_margin: f64,
    pub warnings: Vec<String>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario = {}", self.scenario)?;
        writeln!(f, "steps = {}", self.steps)?;
        writeln!(f, "final_t = {}", self.final_t)?;
        writeln!(f, "mass_bound_ok = {}", self.monitors.mass_bound_ok)?;
        writeln!(f, "positivity_ok = {}", self.monitors.positivity_ok)?;
        writeln!(f, "mass_peak = {}", self.monitors.mass_peak)?;
        if let Some(fl) = self.monitors.extinction_floor_u {
            writeln!(f, "extinction_floor_u = {fl}")?;
        }
        if let Some(fl) = self.monitors.extinction_floor_v {
            writeln!(f, "extinction_floor_v = {fl}")?;
        }
        writeln!(f, "final_mass_u = {}", self.final_mass_u)?;
        writeln!(f, "final_mass_v = {}", self.final_mass_v)?;
        writeln!(f, "final_amp_u = {}", self.final_amp_u)?;
        writeln!(f, "final_amp_v = {}", self.final_amp_v)?;
        if let Some((speed, resid)) = self.wave_speed {
            writeln!(f, "wave_speed = {speed}")?;
            writeln!(f, "wave_speed_fit_residual = {resid}")?;
        }
        if let Some(a) = self.predicted_amplitude {
            writeln!(f, "predicted_amplitude = {a}")?;
        }
        writeln!(f, "min_dominance_margin = {}", self.min_dominance_margin)?;
        for w in &self.warnings {
            writeln!(f, "warning = {w}")?;
        }
        Ok(())
    }
}

/// Paths and summary of a finished run.
#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub series_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub summary: RunSummary,
    pub output: SimOutput,
}

/// Default wave-speed fit window: trailing quarter of the samples, after the
/// early transient.
const FIT_WINDOW: f64 = 0.25;

/// How close (in cells) a front may come to the boundary before the bounded
/// domain stops approximating the infinite line.
const BOUNDARY_MARGIN_CELLS: f64 = 10.0;

/// Run a scenario end to end and write `series.csv`, snapshots, and
/// `summary.txt` into its output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts, RunError> {
    let grid = Grid::build(cfg.params.length, cfg.n, cfg.params.dim)?;
    let (u0, v0) = make_initial(cfg, grid)?;

    let mut warnings = Vec::new();
    if let Some(w) = lf_smearing_warning(&cfg.scheme, grid, &cfg.params) {
        warnings.push(w);
    }

    let output = simulate(&cfg.params, u0, v0, &cfg.scheme)?;

    // amplitude-equation overlay for the near-onset experiment
    let mut a_ode_column: Option<Vec<f64>> = None;
    let mut predicted_amplitude = None;
    if cfg.kind == ScenarioKind::AmplitudeVerify {
        if let (Some(eps), InitialCondition::ModePerturbation { a0 }) = (cfg.eps, &cfg.initial) {
            let coeffs = AmplitudeCoefficients::compute(cfg.params.a1, cfg.params.length)?;
            let ode = solve_amplitude_ode(&coeffs, eps, *a0, cfg.scheme.t_end, 1e-3);
            a_ode_column = Some(
                output
                    .series
                    .rows()
                    .iter()
                    .map(|r| sample_series(&ode, r.t))
                    .collect(),
            );
            predicted_amplitude = Some(chemcomp_core::amplitude::steady_amplitude(&coeffs, eps)?);
        }
    }

    let speed = if cfg.params.dim == Dim::One {
        let samples = output.series.front_samples(0);
        wave_speed(&samples, FIT_WINDOW).ok()
    } else {
        None
    };

    if cfg.kind == ScenarioKind::TravelingWave {
        let margin = BOUNDARY_MARGIN_CELLS * grid.dx();
        let near_edge = output.series.rows().iter().any(|r| {
            r.front_u.is_some_and(|p| p < margin || p > cfg.params.length - margin)
                || r.front_v.is_some_and(|p| p < margin || p > cfg.params.length - margin)
        });
        if near_edge {
            warnings.push(format!(
                "a front came within {BOUNDARY_MARGIN_CELLS} cells of the boundary; \
                 the bounded domain no longer approximates the infinite line"
            ));
        }
    }
    if output.min_dominance_margin <= 0.0 {
        warnings.push(format!(
            "implicit systems lost strict diagonal dominance (min margin {:.3e}); \
             consider a smaller dt or finer grid",
            output.min_dominance_margin
        ));
    }

    let report = monitors(&output.series, &cfg.params, cfg.scheme.tol_neg);
    let last = output.series.rows().last().expect("non-empty series");
    let summary = RunSummary {
        scenario: cfg.kind.name(),
        steps: output.steps,
        final_t: output.final_state.t,
        monitors: report,
        final_mass_u: last.mass_u,
        final_mass_v: last.mass_v,
        final_amp_u: last.amp_u,
        final_amp_v: last.amp_v,
        wave_speed: speed,
        predicted_amplitude,
        min_dominance_margin: output.min_dominance_margin,
        warnings,
    };

    let series_path = cfg.out_dir.join("series.csv");
    io::write_file(&series_path, &io::series_csv(&output.series, a_ode_column.as_deref()))?;
    let mut snapshot_paths = Vec::new();
    for snap in &output.snapshots {
        let label = format!("{:.6}", snap.t);
        let label = label.trim_end_matches('0').trim_end_matches('.');
        let path = cfg.out_dir.join(format!("snapshot_t{label}.csv"));
        io::write_file(&path, &io::snapshot_csv(snap))?;
        snapshot_paths.push(path);
    }
    io::write_file(&cfg.out_dir.join("summary.txt"), &summary.to_string())?;

    Ok(RunArtifacts {
        out_dir: cfg.out_dir.clone(),
        series_path,
        snapshot_paths,
        summary,
        output,
    })
}

/// Linear interpolation of an ODE trace at time `t`.
fn sample_series(trace: &[(f64, f64)], t: f64) -> f64 {
    match trace.binary_search_by(|(tt, _)| tt.partial_cmp(&t).expect("finite times")) {
        Ok(i) => trace[i].1,
        Err(0) => trace[0].1,
        Err(i) if i >= trace.len() => trace[trace.len() - 1].1,
        Err(i) => {
            let (t0, a0) = trace[i - 1];
            let (t1, a1) = trace[i];
            a0 + (a1 - a0) * (t - t0) / (t1 - t0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;

    #[test]
    fn perturbation_initial_data_matches_the_closed_form() {
        let cfg = load_config("[scenario]\nname = amplitude-verify\n[grid]\nn = 16\n").unwrap();
        let grid = Grid::build(2.0, 16, Dim::One).unwrap();
        let (u, v) = make_initial(&cfg, grid).unwrap();
        let ubar = 5.0 / 6.0;
        for i in 0..16 {
            let x = grid.center(i);
            let expect = ubar + 0.01 * (std::f64::consts::PI * x / 2.0).cos();
            assert!((u.as_slice()[i] - expect).abs() < 1e-15);
            assert!((v.as_slice()[i] - (2.0 * ubar - expect)).abs() < 1e-15);
        }
    }

    #[test]
    fn segregated_blocks_have_unit_mass() {
        let cfg = load_config("[scenario]\nname = traveling-wave\n[grid]\nn = 500\n").unwrap();
        let grid = Grid::build(100.0, 500, Dim::One).unwrap();
        let (u, v) = make_initial(&cfg, grid).unwrap();
        // u lives on [90, 100] at height 0.1, v on [0, 10] at height 0.1
        for i in 0..500 {
            let x = grid.center(i);
            let expect_u = if x >= 90.0 { 0.1 } else { 0.0 };
            let expect_v = if x <= 10.0 { 0.1 } else { 0.0 };
            assert_eq!(u.as_slice()[i], expect_u, "x = {x}");
            assert_eq!(v.as_slice()[i], expect_v, "x = {x}");
        }
        assert!((u.mass() - 1.0).abs() <= grid.dx());
        assert!((v.mass() - 1.0).abs() <= grid.dx());
    }

    #[test]
    fn gaussian_data_is_centered_with_unit_mass() {
        let cfg = load_config("[scenario]\nname = gaussian-2d\n[grid]\nn = 100\n").unwrap();
        let grid = Grid::build(30.0, 100, Dim::Two).unwrap();
        let (u, v) = make_initial(&cfg, grid).unwrap();
        // peak at the center cell, mass ~ 1
        let peak_u = 1.0 / (2.0 * std::f64::consts::PI * 0.25);
        let c = 100 / 2;
        assert!(u.at(c, c) > 0.8 * peak_u);
        assert!((u.mass() - 1.0).abs() < 0.02);
        assert!((v.mass() - 1.0).abs() < 0.02);
        let com_x: f64 = (0..100)
            .map(|ix| grid.center(ix) * (0..100).map(|iy| v.at(ix, iy)).sum::<f64>())
            .sum::<f64>()
            * grid.cell_volume()
            / v.mass();
        assert!((com_x - 15.0).abs() < 0.1);
    }

    #[test]
    fn oversized_perturbation_is_rejected() {
        let cfg = load_config(
            "[scenario]\nname = amplitude-verify\n[initial]\nkind = mode-perturbation\na0 = 0.9\n",
        )
        .unwrap();
        let grid = Grid::build(2.0, 16, Dim::One).unwrap();
        assert!(matches!(make_initial(&cfg, grid), Err(RunError::Setup(_))));
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let text = "[scenario]\nname = pattern-1d\n[grid]\nn = 32\n[initial]\nkind = mode-perturbation\na0 = 0.01\nnoise = 1e-3\nseed = 7\n";
        let cfg = load_config(text).unwrap();
        let grid = Grid::build(30.0, 32, Dim::One).unwrap();
        let (u1, _) = make_initial(&cfg, grid).unwrap();
        let (u2, _) = make_initial(&cfg, grid).unwrap();
        assert_eq!(u1.as_slice(), u2.as_slice());
        let mut cfg2 = cfg.clone();
        cfg2.seed = 8;
        let (u3, _) = make_initial(&cfg2, grid).unwrap();
        assert_ne!(u1.as_slice(), u3.as_slice());
    }
}
