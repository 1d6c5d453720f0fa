//! Solver core for a two-species Lotka–Volterra competition system in which
//! both populations are repelled by a chemical emitted by the other species.
//!
//! The densities `u` and `v` evolve by
//!
//! ```text
//! du/dt = d1 Lap(u) + chi1 div(u grad(c[v])) + b1 u (1 - u - a1 v)
//! dv/dt = d2 Lap(v) + chi2 div(v grad(c[u])) + b2 v (1 - v - a2 u)
//! ```
//!
//! on an interval `[0, L]` or square `[0, L]^2` with no-flux boundaries, the
//! chemicals slaved through the screened Poisson problem `c - Lap(c) = rho`.
//!
//! The crate provides:
//!
//! * a cell-centered finite-volume discretization advanced by a semi-implicit
//!   scheme (implicit Lax–Friedrichs drift flux, linearized reaction, direct
//!   tridiagonal solve in 1D, imperfect-factorization ADI in 2D) — [`stepper`];
//! * the screened-Poisson solvers behind `c[rho]` — [`helmholtz`];
//! * linear stability of the constant coexistence state for symmetric
//!   coefficients: per-mode thresholds, the critical threshold `chi*` and the
//!   unstable growth rate — [`stability`];
//! * the weakly nonlinear amplitude machinery near onset: coefficient
//!   formulas, the cubic amplitude ODE, its equilibria and the pitchfork-sign
//!   scan — [`amplitude`];
//! * per-step observables (masses, amplitudes, fronts, theorem monitors) —
//!   [`diagnostics`].
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! instead of the default `std` feature in that configuration. All I/O and
//! the command line live in the companion `chemcomp` crate.
//!
//! ```
//! use chemcomp_core::stepper::{simulate, SchemeConfig};
//! use chemcomp_core::{coexistence_state, Dim, Field, Grid, Params};
//!
//! // a short run just above the instability threshold on [0, 2]
//! let (a, length) = (0.2, 2.0);
//! let (chi_star, _) = chemcomp_core::stability::chi_star(a, length, Dim::One)?;
//! let params = Params::symmetric(a, chi_star + 0.05, length, Dim::One);
//! let (ubar, vbar) = coexistence_state(&params)?;
//!
//! let grid = Grid::build(length, 100, Dim::One)?;
//! let w = std::f64::consts::PI / length;
//! let u0 = Field::project_1d(grid, |x| ubar + 1e-2 * (w * x).cos());
//! let v0 = Field::project_1d(grid, |x| vbar - 1e-2 * (w * x).cos());
//!
//! let out = simulate(&params, u0, v0, &SchemeConfig::new(0.05, 5.0))?;
//! assert_eq!(out.steps, 100);
//! // the critical mode grows just above threshold
//! let rows = out.series.rows();
//! assert!(rows.last().unwrap().amp_u > rows[0].amp_u);
//! # Ok::<(), chemcomp_core::CoreError>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("chemcomp-core needs either the `std` feature or the `libm` feature");

pub mod amplitude;
pub mod diagnostics;
mod error;
pub mod field;
pub mod grid;
pub mod helmholtz;
mod math;
pub mod params;
pub mod stability;
pub mod stepper;
pub mod tridiag;

pub use error::{CoreError, Result};
pub use field::{Field, State};
pub use grid::Grid;
pub use params::{coexistence_state, Dim, Params};
