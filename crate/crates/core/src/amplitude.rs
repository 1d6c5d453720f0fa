//! Weakly nonlinear machinery near the instability threshold on an interval.
//!
//! Just above threshold (`chi = chi* + eps`, `0 < eps << 1`) the critical
//! mode's amplitude `A(t)` obeys the cubic ODE
//!
//! ```text
//! dA/dt = eps lambda2 A + lambda1 A^3
//! ```
//!
//! whose coefficients are closed-form functions of `(a, L)` through the
//! critical wavenumber `w = k* pi / L` and its double `w2 = 2 w`:
//!
//! ```text
//! c1      = chi* w^2/(1+w^2) + (a-1)/2         (= (1-a)/2 + (1+a) w^2)
//! c2      = c1 / (chi* ubar w2^2/(1+w2^2) + w2^2 + 1)
//! lambda1 = chi* ((a-1-c2) w^2 / (2(1+w^2)) - c2 w w2 / (2(1+w2^2))) - (c2 + a - 1)
//! lambda2 = ubar w^2/(1+w^2)
//! ```
//!
//! `lambda2 > 0` always; whenever `lambda1 < 0` the bifurcation is a
//! supercritical pitchfork with saturated amplitude `sqrt(eps lambda2 / -lambda1)`,
//! and the dynamical solution is approximated to leading order by
//! `(u, v) = (ubar, vbar) + A(t) cos(w x) (1, -1)`.
//!
//! ```
//! use chemcomp_core::amplitude::{steady_amplitude, AmplitudeCoefficients};
//!
//! let coeffs = AmplitudeCoefficients::compute(0.2, 2.0)?;
//! assert_eq!(coeffs.k_star, 1);
//! assert!(coeffs.lambda1 < 0.0); // supercritical
//! let plateau = steady_amplitude(&coeffs, 0.05)?;
//! assert!((plateau - 0.1350).abs() < 1e-4);
//! # Ok::<(), chemcomp_core::CoreError>(())
//! ```

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::math;
use crate::params::Dim;
use crate::stability::{chi_star, ModeIndex};

/// Default fixed step of the classical 4th-order amplitude-ODE integrator.
pub const DEFAULT_ODE_DT: f64 = 1e-3;

/// Closed-form coefficients of the amplitude equation at `(a, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeCoefficients {
    pub a: f64,
    pub length: f64,
    /// Critical mode index.
    pub k_star: usize,
    /// Critical wavenumber `k* pi / L` and its double.
    pub w: f64,
    pub w2: f64,
    pub chi_star: f64,
    pub c1: f64,
    pub c2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl AmplitudeCoefficients {
    /// Evaluate the coefficient formulas; errs on a two-mode tie, where the
    /// single-mode derivation does not apply.
    pub fn compute(a: f64, length: f64) -> Result<Self> {
        let (star, critical) = chi_star(a, length, Dim::One)?;
        if critical.len() != 1 {
            return Err(CoreError::AmbiguousMode { chi_star: star });
        }
        let k_star = match critical[0] {
            ModeIndex::OneD(k) => k,
            ModeIndex::TwoD(..) => unreachable!("1D scan"),
        };
        let w = k_star as f64 * core::f64::consts::PI / length;
        let w2 = 2.0 * w;
        let (ws, w2s) = (w * w, w2 * w2);
        let ubar = 1.0 / (1.0 + a);

        let c1 = star * ws / (1.0 + ws) + (a - 1.0) / 2.0;
        let c1_alt = (1.0 - a) / 2.0 + (1.0 + a) * ws;
        assert!(
            math::abs(c1 - c1_alt) <= 1e-12 * math::abs(c1),
            "threshold identity violated: {c1} vs {c1_alt}"
        );
        let c2 = c1 / (star * ubar * w2s / (1.0 + w2s) + w2s + 1.0);
        let lambda1 = star * ((a - 1.0 - c2) * ws / (2.0 * (1.0 + ws)) - c2 * w * w2 / (2.0 * (1.0 + w2s)))
            - (c2 + a - 1.0);
        let lambda2 = ubar * ws / (1.0 + ws);

        debug_assert!(c1 > 0.0 && c2 > 0.0 && lambda2 > 0.0);
        Ok(AmplitudeCoefficients {
            a,
            length,
            k_star,
            w,
            w2,
            chi_star: star,
            c1,
            c2,
            lambda1,
            lambda2,
        })
    }

    fn rhs(&self, eps: f64, amp: f64) -> f64 {
        eps * self.lambda2 * amp + self.lambda1 * amp * amp * amp
    }
}

/// Integrate the amplitude ODE from `A(0) = a0` to `t_end` with the classical
/// 4th-order fixed-step method; returns `(t, A)` samples at every step.
pub fn solve_amplitude_ode(
    coeffs: &AmplitudeCoefficients,
    eps: f64,
    a0: f64,
    t_end: f64,
    dt_ode: f64,
) -> Vec<(f64, f64)> {
    assert!(dt_ode > 0.0 && t_end >= 0.0);
    let steps = math::round(t_end / dt_ode) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut amp = a0;
    out.push((0.0, amp));
    for n in 1..=steps {
        let k1 = coeffs.rhs(eps, amp);
        let k2 = coeffs.rhs(eps, amp + 0.5 * dt_ode * k1);
        let k3 = coeffs.rhs(eps, amp + 0.5 * dt_ode * k2);
        let k4 = coeffs.rhs(eps, amp + dt_ode * k3);
        amp += dt_ode / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((n as f64 * dt_ode, amp));
    }
    out
}

/// Saturated amplitude of the supercritical branch: `0` for `eps <= 0`,
/// `sqrt(eps lambda2 / -lambda1)` for `eps > 0`; errs when `lambda1 >= 0`.
pub fn steady_amplitude(coeffs: &AmplitudeCoefficients, eps: f64) -> Result<f64> {
    if coeffs.lambda1 >= 0.0 {
        return Err(CoreError::Subcritical {
            lambda1: coeffs.lambda1,
        });
    }
    if eps <= 0.0 {
        return Ok(0.0);
    }
    Ok(math::sqrt(eps * coeffs.lambda2 / -coeffs.lambda1))
}

/// Leading-order reconstruction
/// `(u, v) = (ubar, vbar) + amplitude cos(w x) (1, -1)` on the grid; errs when
/// the amplitude makes either density non-positive.
pub fn reconstruct_solution(
    coeffs: &AmplitudeCoefficients,
    amplitude: f64,
    grid: Grid,
) -> Result<(Field, Field)> {
    assert_eq!(grid.dim(), Dim::One, "the reconstruction lives on an interval");
    let ubar = 1.0 / (1.0 + coeffs.a);
    let w = coeffs.w;
    let u = Field::project_1d(grid, |x| ubar + amplitude * math::cos(w * x));
    let v = Field::project_1d(grid, |x| ubar - amplitude * math::cos(w * x));
    if u.min() <= 0.0 || v.min() <= 0.0 {
        return Err(CoreError::AmplitudeTooLarge { amplitude });
    }
    Ok((u, v))
}

/// One `(a, L)` sample of the pitchfork-sign scan. Tie points (two critical
/// modes) are flagged with `None` and excluded from the sign summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchforkPoint {
    pub a: f64,
    pub length: f64,
    pub k_star: Option<usize>,
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchforkScan {
    pub points: Vec<PitchforkPoint>,
    pub tie_points: usize,
}

impl PitchforkScan {
    /// True when `lambda1 < 0` at every non-tie sample.
    pub fn all_supercritical(&self) -> bool {
        self.points
            .iter()
            .filter_map(|p| p.lambda1)
            .all(|l1| l1 < 0.0)
    }
}

/// Evaluate `lambda1` on an `na x nl` grid over `[a_lo, a_hi] x [l_lo, l_hi]`.
pub fn pitchfork_scan(
    a_range: (f64, f64),
    l_range: (f64, f64),
    na: usize,
    nl: usize,
) -> Result<PitchforkScan> {
    assert!(na >= 1 && nl >= 1);
    let sample = |lo: f64, hi: f64, count: usize, i: usize| {
        if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    };
    let mut points = Vec::with_capacity(na * nl);
    let mut tie_points = 0;
    for ia in 0..na {
        let a = sample(a_range.0, a_range.1, na, ia);
        for il in 0..nl {
            let length = sample(l_range.0, l_range.1, nl, il);
            match AmplitudeCoefficients::compute(a, length) {
                Ok(c) => points.push(PitchforkPoint {
                    a,
                    length,
                    k_star: Some(c.k_star),
                    lambda1: Some(c.lambda1),
                }),
                Err(CoreError::AmbiguousMode { .. }) => {
                    tie_points += 1;
                    points.push(PitchforkPoint {
                        a,
                        length,
                        k_star: None,
                        lambda1: None,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(PitchforkScan { points, tie_points })
}
