//! Per-step observables: masses, sup-norm amplitudes, extrema, front
//! positions, wave speeds, and the boundedness/extinction monitors.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::{Field, State};
use crate::math;
use crate::params::{Dim, Params};

/// Discrete mass `sum(rho) * |C|`.
pub fn mass(field: &Field) -> f64 {
    field.mass()
}

/// Sup-norm distance to a reference level: `max_i |rho_i - reference|`.
pub fn linf_amplitude(field: &Field, reference: f64) -> f64 {
    field
        .as_slice()
        .iter()
        .fold(0.0f64, |m, &x| m.max(math::abs(x - reference)))
}

/// Position of the outermost crossing of `level * max(rho)` in a 1D field,
/// linearly interpolated between cell centers.
///
/// The tracked side follows the bulk of the profile: when the maximum sits in
/// the right half of the domain the leading (left) edge is tracked, otherwise
/// the trailing (right) edge. Returns `None` when the field never crosses the
/// level (e.g. constants) or the field is 2D.
pub fn front_position(field: &Field, level: f64) -> Option<f64> {
    let grid = field.grid();
    if grid.dim() != Dim::One {
        return None;
    }
    let data = field.as_slice();
    let max = field.max();
    if max.is_nan() || max <= 0.0 {
        return None;
    }
    let threshold = level * max;
    let argmax = data
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite field"))
        .map(|(i, _)| i)?;
    let n = data.len();
    let dx = grid.dx();

    if grid.center(argmax) >= 0.5 * grid.length() {
        // mass on the right: first upward crossing from the left
        for i in 0..n - 1 {
            if data[i] < threshold && data[i + 1] >= threshold {
                let frac = (threshold - data[i]) / (data[i + 1] - data[i]);
                return Some(grid.center(i) + frac * dx);
            }
        }
    } else {
        // mass on the left: first downward crossing from the right
        for i in (0..n - 1).rev() {
            if data[i] >= threshold && data[i + 1] < threshold {
                let frac = (data[i] - threshold) / (data[i] - data[i + 1]);
                return Some(grid.center(i) + frac * dx);
            }
        }
    }
    None
}

/// Least-squares front speed over the final `window` fraction of samples.
///
/// Returns the fitted slope and the largest absolute fit residual. Needs at
/// least 5 samples inside the window.
pub fn wave_speed(samples: &[(f64, f64)], window: f64) -> Result<(f64, f64)> {
    assert!(window > 0.0 && window <= 1.0, "window is a fraction");
    let take = math::ceil(samples.len() as f64 * window) as usize;
    let tail = &samples[samples.len() - take.min(samples.len())..];
    if tail.len() < 5 {
        return Err(CoreError::InsufficientSamples {
            needed: 5,
            got: tail.len(),
        });
    }
    let n = tail.len() as f64;
    let (st, sp) = tail
        .iter()
        .fold((0.0, 0.0), |(st, sp), &(t, p)| (st + t, sp + p));
    let (tbar, pbar) = (st / n, sp / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(t, p) in tail {
        num += (t - tbar) * (p - pbar);
        den += (t - tbar) * (t - tbar);
    }
    if den == 0.0 {
        return Err(CoreError::InsufficientSamples {
            needed: 5,
            got: tail.len(),
        });
    }
    let slope = num / den;
    let intercept = pbar - slope * tbar;
    let residual = tail
        .iter()
        .fold(0.0f64, |m, &(t, p)| m.max(math::abs(p - (intercept + slope * t))));
    Ok((slope, residual))
}

/// One record of the per-step time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub amp_u: f64,
    pub amp_v: f64,
    pub min_u: f64,
    pub min_v: f64,
    pub max_u: f64,
    pub max_v: f64,
    pub front_u: Option<f64>,
    pub front_v: Option<f64>,
}

impl SeriesRow {
    /// Measure a state; `amp_ref` carries the reference levels for the
    /// amplitude columns (the coexistence state when it exists).
    pub fn from_state(state: &State, amp_ref: (f64, f64), front_level: f64) -> SeriesRow {
        SeriesRow {
            t: state.t,
            mass_u: mass(&state.u),
            mass_v: mass(&state.v),
            amp_u: linf_amplitude(&state.u, amp_ref.0),
            amp_v: linf_amplitude(&state.v, amp_ref.1),
            min_u: state.u.min(),
            min_v: state.v.min(),
            max_u: state.u.max(),
            max_v: state.v.max(),
            front_u: front_position(&state.u, front_level),
            front_v: front_position(&state.v, front_level),
        }
    }
}

/// Time series of per-step records: one row per step plus the initial state,
/// times strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    rows: Vec<SeriesRow>,
}

impl TimeSeries {
    pub fn new() -> Self {
        TimeSeries::default()
    }

    pub fn push(&mut self, row: SeriesRow) {
        if let Some(last) = self.rows.last() {
            assert!(row.t > last.t, "series times must strictly increase");
        }
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[SeriesRow] {
        &self.rows
    }

    /// Front samples `(t, position)` of one species, skipping rows where the
    /// front is undefined. `species` is 0 for u, 1 for v.
    pub fn front_samples(&self, species: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| {
                let f = if species == 0 { r.front_u } else { r.front_v };
                f.map(|p| (r.t, p))
            })
            .collect()
    }
}

/// Outcome of the theorem monitors over one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    /// Total mass stayed below `mass_u(0) + mass_v(0) + 2 |domain| + 1e-8`.
    pub mass_bound_ok: bool,
    /// Largest total mass seen, for reporting.
    pub mass_peak: f64,
    /// Densities never dropped below `-tol_neg`.
    pub positivity_ok: bool,
    /// `min_{t >= 1} mass(t) / min(mass(1), 1)` per species; `None` when the
    /// run ends before `t = 1`. The theoretical floor constant is not
    /// computable, so the empirical floor is reported instead of asserted.
    pub extinction_floor_u: Option<f64>,
    pub extinction_floor_v: Option<f64>,
}

const MASS_BOUND_SLACK: f64 = 1e-8;

/// Evaluate the boundedness and no-extinction monitors on a completed series.
pub fn monitors(series: &TimeSeries, params: &Params, tol_neg: f64) -> MonitorReport {
    let rows = series.rows();
    assert!(!rows.is_empty(), "monitors need at least the initial row");
    let domain = match params.dim {
        Dim::One => params.length,
        Dim::Two => params.length * params.length,
    };
    let bound = rows[0].mass_u + rows[0].mass_v + 2.0 * domain + MASS_BOUND_SLACK;

    let mut mass_peak = 0.0f64;
    let mut positivity_ok = true;
    for r in rows {
        mass_peak = mass_peak.max(r.mass_u + r.mass_v);
        if r.min_u < -tol_neg || r.min_v < -tol_neg {
            positivity_ok = false;
        }
    }

    let floor = |pick: fn(&SeriesRow) -> f64| -> Option<f64> {
        let at_one = rows.iter().find(|r| r.t >= 1.0)?;
        let reference = pick(at_one).min(1.0);
        let min_after = rows
            .iter()
            .filter(|r| r.t >= 1.0)
            .map(pick)
            .fold(f64::INFINITY, f64::min);
        Some(min_after / reference)
    };

    MonitorReport {
        mass_bound_ok: mass_peak <= bound,
        mass_peak,
        positivity_ok,
        extinction_floor_u: floor(|r| r.mass_u),
        extinction_floor_v: floor(|r| r.mass_v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn mass_of_constant() {
        let g = Grid::build(3.0, 12, Dim::One).unwrap();
        let f = Field::constant(g, 2.5);
        assert!((mass(&f) - 7.5).abs() < 1e-12);
    }

    #[test]
    fn amplitude_is_zero_only_at_reference() {
        let g = Grid::build(2.0, 8, Dim::One).unwrap();
        let f = Field::constant(g, 5.0 / 6.0);
        assert_eq!(linf_amplitude(&f, 5.0 / 6.0), 0.0);
        assert!(linf_amplitude(&f, 0.5) > 0.0);
    }

    #[test]
    fn step_profile_front_at_midpoint() {
        let g = Grid::build(10.0, 100, Dim::One).unwrap();
        let f = Field::project_1d(g, |x| if x < 5.0 { 1.0 } else { 0.0 });
        let front = front_position(&f, 0.5).unwrap();
        assert!((front - 5.0).abs() <= g.dx());
    }

    #[test]
    fn front_translates_with_the_profile() {
        // A bump vanishing well inside the domain keeps the maximum (and so
        // the tracking level) identical after a grid-aligned shift.
        let g = Grid::build(40.0, 400, Dim::One).unwrap();
        let profile = |x: f64| (-(x - 12.0) * (x - 12.0)).exp();
        let f = Field::project_1d(g, profile);
        let shifted = Field::project_1d(g, |x| profile(x - 3.0));
        let p0 = front_position(&f, 0.5).unwrap();
        let p1 = front_position(&shifted, 0.5).unwrap();
        assert!((p1 - p0 - 3.0).abs() < 1e-9);
    }

    #[test]
    fn constant_field_has_no_front() {
        let g = Grid::build(10.0, 50, Dim::One).unwrap();
        assert_eq!(front_position(&Field::constant(g, 1.0), 0.5), None);
    }

    #[test]
    fn wave_speed_recovers_linear_motion() {
        let samples: Vec<(f64, f64)> = (0..40)
            .map(|i| (i as f64, 10.0 - 0.3 * i as f64))
            .collect();
        let (speed, residual) = wave_speed(&samples, 0.25).unwrap();
        assert!((speed - -0.3).abs() < 1e-12);
        assert!(residual < 1e-12);
    }

    #[test]
    fn wave_speed_needs_enough_samples() {
        let samples = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
        assert!(matches!(
            wave_speed(&samples, 1.0),
            Err(CoreError::InsufficientSamples { .. })
        ));
    }
}
