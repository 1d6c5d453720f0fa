//! Linear stability of the constant coexistence state for symmetric
//! coefficients (`d1 = d2 = b1 = b2 = 1`, `a1 = a2 = a`, `chi1 = chi2 = chi`).
//!
//! Perturbations along the Neumann eigenfunction with eigenvalue `lambda`
//! evolve by the 2x2 mode Jacobian
//!
//! ```text
//! J = [ -lambda - ubar,                     -chi ubar lambda/(1+lambda) - a ubar ]
//!     [ -chi ubar lambda/(1+lambda) - a ubar,                   -lambda - ubar   ]
//! ```
//!
//! whose eigenvalues are `c + d` along `(1, 1)` (always negative) and
//! `c - d` along `(1, -1)`, which changes sign at the per-mode threshold
//!
//! ```text
//! chi*_k = (1 + lambda)(lambda (a+1) + 1 - a) / lambda
//!        = 2 + (1-a)/lambda + lambda (1+a).
//! ```
//!
//! The critical threshold `chi*` is the minimum of `chi*_k` over the discrete
//! Neumann spectrum; `chi*_k` is convex in `lambda` with real minimizer
//! `lambda_opt = sqrt((1-a)/(1+a))`, which bounds the scan.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::math;
use crate::params::{Dim, Params};

/// Relative tolerance under which two per-mode thresholds count as a tie.
const TIE_REL_TOL: f64 = 1e-12;

/// Neumann eigenvalue of the interval `[0, L]`: `lambda_k = (k pi / L)^2`.
pub fn neumann_eigenvalue_1d(k: usize, length: f64) -> f64 {
    let w = k as f64 * core::f64::consts::PI / length;
    w * w
}

/// Neumann eigenvalue of the square `[0, L]^2`:
/// `lambda_{k,j} = (k pi / L)^2 + (j pi / L)^2`.
pub fn neumann_eigenvalue_2d(k: usize, j: usize, length: f64) -> f64 {
    neumann_eigenvalue_1d(k, length) + neumann_eigenvalue_1d(j, length)
}

/// A Neumann mode index: `k` on the interval, `(k, j)` on the square.
///
/// On the square, `(k, j)` and `(j, k)` are mirror images of each other, so
/// modes are canonicalized to `k >= j` and reported once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeIndex {
    OneD(usize),
    TwoD(usize, usize),
}

impl ModeIndex {
    pub fn lambda(&self, length: f64) -> f64 {
        match *self {
            ModeIndex::OneD(k) => neumann_eigenvalue_1d(k, length),
            ModeIndex::TwoD(k, j) => neumann_eigenvalue_2d(k, j, length),
        }
    }
}

/// The 2x2 Jacobian of one Neumann mode and its eigenvalues.
///
/// `eig_sum = c + d` belongs to the eigenvector `(1, 1)` and is negative for
/// every `chi > 0`; `eig_diff = c - d` belongs to `(1, -1)` and is the
/// eigenvalue that crosses zero at the mode threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeJacobian {
    pub matrix: [[f64; 2]; 2],
    pub eig_sum: f64,
    pub eig_diff: f64,
}

/// Mode Jacobian for symmetric coefficients with competition `a` at Neumann
/// eigenvalue `lambda` and chemotaxis strength `chi`.
pub fn mode_jacobian(a: f64, lambda: f64, chi: f64) -> ModeJacobian {
    let ubar = 1.0 / (1.0 + a);
    let c = -lambda - ubar;
    let d = -chi * ubar * lambda / (1.0 + lambda) - a * ubar;
    ModeJacobian {
        matrix: [[c, d], [d, c]],
        eig_sum: c + d,
        eig_diff: c - d,
    }
}

/// [`mode_jacobian`] guarded by the symmetric-coefficient requirement.
pub fn mode_jacobian_for(params: &Params, lambda: f64, chi: f64) -> Result<ModeJacobian> {
    if !params.is_symmetric() {
        return Err(CoreError::NonSymmetric);
    }
    Ok(mode_jacobian(params.a1, lambda, chi))
}

/// Per-mode destabilization threshold
/// `chi*_k = 2 + (1-a)/lambda + lambda (1+a)`; needs `lambda > 0` (the
/// constant mode has no threshold).
pub fn chi_star_k(a: f64, lambda: f64) -> f64 {
    assert!(lambda > 0.0, "the constant mode has no threshold");
    2.0 + (1.0 - a) / lambda + lambda * (1.0 + a)
}

/// Real minimizer of `chi*` over `lambda`: `sqrt((1-a)/(1+a))`. The integer
/// scan only needs to reach past this point.
pub fn lambda_opt(a: f64) -> f64 {
    math::sqrt((1.0 - a) / (1.0 + a))
}

fn check_analysis_inputs(a: f64, length: f64) -> Result<()> {
    if a.is_nan() || a <= 0.0 || a >= 1.0 {
        return Err(CoreError::InvalidParams(
            "stability analysis needs 0 < a < 1",
        ));
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(CoreError::InvalidParams("L must be finite and > 0"));
    }
    Ok(())
}

/// Largest `lambda` whose threshold does not exceed `bound`: the upper root
/// of `(1+a) lambda^2 + (2 - bound) lambda + (1-a) = 0`. Convexity makes
/// every mode beyond it irrelevant both to the minimum and to instability at
/// any `chi <= bound`.
fn lambda_cap(a: f64, bound: f64) -> f64 {
    let b = bound - 2.0;
    let disc = b * b - 4.0 * (1.0 - a * a);
    debug_assert!(disc >= 0.0, "bound below the real minimum of chi*");
    (b + math::sqrt(disc.max(0.0))) / (2.0 * (1.0 + a))
}

/// Every Neumann mode (canonical form, `lambda > 0`) with `lambda <= cap`,
/// sorted by `lambda`.
fn enumerate_modes(length: f64, dim: Dim, cap: f64) -> Vec<ModeIndex> {
    let kmax = (length * math::sqrt(cap) / core::f64::consts::PI) as usize + 1;
    let mut modes = Vec::new();
    match dim {
        Dim::One => {
            for k in 1..=kmax {
                if neumann_eigenvalue_1d(k, length) <= cap {
                    modes.push(ModeIndex::OneD(k));
                }
            }
        }
        Dim::Two => {
            for k in 1..=kmax {
                for j in 0..=k {
                    if neumann_eigenvalue_2d(k, j, length) <= cap {
                        modes.push(ModeIndex::TwoD(k, j));
                    }
                }
            }
        }
    }
    modes.sort_by(|m1, m2| {
        m1.lambda(length)
            .partial_cmp(&m2.lambda(length))
            .expect("finite eigenvalues")
    });
    modes
}

/// A mode with an eigenvalue no larger than `lambda_opt` always exists below
/// the cap, so seed the cap with the threshold of the nearest axis mode.
fn seed_bound(a: f64, length: f64) -> f64 {
    let k_near = math::round(length * math::sqrt(lambda_opt(a)) / core::f64::consts::PI) as usize;
    let k_near = k_near.max(1);
    (1..=k_near + 1)
        .map(|k| chi_star_k(a, neumann_eigenvalue_1d(k, length)))
        .fold(f64::INFINITY, f64::min)
}

/// The critical threshold `chi* = inf_k chi*_k` and the mode(s) attaining it
/// (two on a tie, within `1e-12` relative).
pub fn chi_star(a: f64, length: f64, dim: Dim) -> Result<(f64, Vec<ModeIndex>)> {
    check_analysis_inputs(a, length)?;
    let cap = lambda_cap(a, seed_bound(a, length) * (1.0 + 1e-9));
    let modes = enumerate_modes(length, dim, cap);
    debug_assert!(!modes.is_empty());

    let mut best = f64::INFINITY;
    for m in &modes {
        best = best.min(chi_star_k(a, m.lambda(length)));
    }
    let critical: Vec<ModeIndex> = modes
        .iter()
        .copied()
        .filter(|m| chi_star_k(a, m.lambda(length)) <= best * (1.0 + TIE_REL_TOL))
        .collect();
    Ok((best, critical))
}

/// Growth rate of the critical mode at `chi = chi* + eps`:
/// `sigma = eps ubar w^2 / (1 + w^2)` with `w` the critical wavenumber.
/// Errs when two modes tie (the single-mode derivation does not apply).
pub fn growth_rate_sigma(eps: f64, a: f64, length: f64) -> Result<f64> {
    let (chi, critical) = chi_star(a, length, Dim::One)?;
    if critical.len() != 1 {
        return Err(CoreError::AmbiguousMode { chi_star: chi });
    }
    let lambda = critical[0].lambda(length);
    let ubar = 1.0 / (1.0 + a);
    Ok(eps * ubar * lambda / (1.0 + lambda))
}

/// One row of a [`StabilityReport`]: a mode, its eigenvalue and threshold,
/// and the Jacobian eigenvalues at the report's evaluation `chi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEntry {
    pub mode: ModeIndex,
    pub lambda: f64,
    pub chi_star_k: f64,
    pub eig_sum: f64,
    pub eig_diff: f64,
}

/// Verdict at the queried `chi`.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Stable,
    Unstable { growing: Vec<ModeIndex> },
}

/// Full linear-stability analysis at `(a, L)`: per-mode thresholds, the
/// critical threshold and mode(s), and, when `query_chi` is given, the
/// classification there. Mode eigenvalues are evaluated at `query_chi` when
/// present, else at `chi*`. The constant mode is omitted: its eigenvalues
/// `-ubar (1 +- a)` are negative for every `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub a: f64,
    pub length: f64,
    pub dim: Dim,
    pub query_chi: Option<f64>,
    pub chi_star: f64,
    pub critical: Vec<ModeIndex>,
    pub modes: Vec<ModeEntry>,
    pub classification: Option<Classification>,
}

pub fn analyze(a: f64, length: f64, dim: Dim, query_chi: Option<f64>) -> Result<StabilityReport> {
    check_analysis_inputs(a, length)?;
    if let Some(chi) = query_chi {
        if chi.is_nan() || chi <= 0.0 {
            return Err(CoreError::InvalidParams("query chi must be > 0"));
        }
    }
    let (star, critical) = chi_star(a, length, dim)?;

    // Cover both the minimum and, when classifying, every mode that could be
    // unstable at the queried chi.
    let bound = query_chi.unwrap_or(star).max(star) * (1.0 + 1e-9);
    let cap = lambda_cap(a, bound.max(seed_bound(a, length) * (1.0 + 1e-9)));
    let eval_chi = query_chi.unwrap_or(star);

    let modes: Vec<ModeEntry> = enumerate_modes(length, dim, cap)
        .into_iter()
        .map(|mode| {
            let lambda = mode.lambda(length);
            let jac = mode_jacobian(a, lambda, eval_chi);
            ModeEntry {
                mode,
                lambda,
                chi_star_k: chi_star_k(a, lambda),
                eig_sum: jac.eig_sum,
                eig_diff: jac.eig_diff,
            }
        })
        .collect();

    let classification = query_chi.map(|_| {
        let growing: Vec<ModeIndex> = modes
            .iter()
            .filter(|e| e.eig_diff > 0.0)
            .map(|e| e.mode)
            .collect();
        if growing.is_empty() {
            Classification::Stable
        } else {
            Classification::Unstable { growing }
        }
    });

    Ok(StabilityReport {
        a,
        length,
        dim,
        query_chi,
        chi_star: star,
        critical,
        modes,
        classification,
    })
}
