//! Screened Poisson solvers: `c - Lap(c) = rho` with homogeneous Neumann
//! boundaries on the cell-centered grid.
//!
//! The Laplacian uses the standard central difference stencil with mirror
//! ghost cells (`c_0 = c_1`, `c_{n+1} = c_n`), which keeps the operator
//! symmetric and makes every row sum to one, so the discrete mass identity
//! `sum(c) = sum(rho)` holds exactly. 1D systems are solved directly by the
//! Thomas algorithm; 2D systems by conjugate gradients on the SPD operator.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::math;
use crate::params::Dim;
use crate::tridiag::{thomas_solve, Dominance, TridiagonalSystem};

/// Default relative-residual tolerance of the 2D iterative solve; small
/// enough that the elliptic error is negligible against the O(dx + dt)
/// scheme error.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative bound on the discrete mass gap `|sum(c) - sum(rho)|` demanded of
/// the iterative path on top of the residual tolerance.
const MASS_GAP_TOL: f64 = 1e-12;

/// Solve for the chemical on either grid kind; `tol` only affects 2D.
pub fn chemical(rho: &Field, tol: f64) -> Result<Field> {
    chemical_from(rho, tol, None)
}

/// [`chemical`] with an optional warm start for the 2D path.
pub fn chemical_from(rho: &Field, tol: f64, guess: Option<&Field>) -> Result<Field> {
    match rho.grid().dim() {
        Dim::One => solve_1d(rho),
        Dim::Two => solve_2d_from(rho, tol, guess),
    }
}

/// Direct 1D solve of `(I - Dxx) c = rho`.
pub fn solve_1d(rho: &Field) -> Result<Field> {
    let grid = rho.grid();
    assert_eq!(grid.dim(), Dim::One, "solve_1d needs a 1D field");
    let n = grid.n();
    let nu = 1.0 / (grid.dx() * grid.dx());

    let mut diag = vec![1.0 + 2.0 * nu; n];
    diag[0] = 1.0 + nu;
    diag[n - 1] = 1.0 + nu;
    let sys = TridiagonalSystem::new(
        vec![-nu; n],
        diag,
        vec![-nu; n],
        rho.as_slice().to_vec(),
    );
    debug_assert_eq!(sys.dominance(), Dominance::Strict);
    let c = thomas_solve(&sys)?;
    Ok(Field::from_vec(grid, c))
}

/// Matrix-vector product of the 2D operator `I - Dxx - Dyy` with mirror
/// ghost closure on all four sides. Interior rows run branch-free; the
/// boundary closure drops the missing face couplings.
fn apply_2d(n: usize, nu: f64, x: &[f64], out: &mut [f64]) {
    assert!(x.len() == n * n && out.len() == n * n);
    for iy in 0..n {
        let row = &x[iy * n..(iy + 1) * n];
        let out_row = &mut out[iy * n..(iy + 1) * n];
        // a mirrored ghost neighbor contributes x[i] - x[i] = 0, so feeding
        // the row itself in place of a missing neighbor is exact
        let above = if iy + 1 < n {
            &x[(iy + 1) * n..(iy + 2) * n]
        } else {
            row
        };
        let below = if iy > 0 {
            &x[(iy - 1) * n..iy * n]
        } else {
            row
        };
        let diag = 1.0 + 4.0 * nu;
        out_row[0] = row[0] * (diag - nu) - nu * (row[1] + above[0] + below[0]);
        for ix in 1..n - 1 {
            out_row[ix] =
                row[ix] * diag - nu * (row[ix - 1] + row[ix + 1] + above[ix] + below[ix]);
        }
        out_row[n - 1] = row[n - 1] * (diag - nu) - nu * (row[n - 2] + above[n - 1] + below[n - 1]);
    }
}

/// Iterative 2D solve of `(I - Dxx - Dyy) c = rho` by conjugate gradients.
///
/// Stops when the relative residual drops below `tol` *and* the discrete mass
/// gap is below `1e-12` relative; errs with [`CoreError::NoConvergence`] when
/// the iteration cap `10 * n^2` is exhausted.
pub fn solve_2d(rho: &Field, tol: f64) -> Result<Field> {
    solve_2d_from(rho, tol, None)
}

/// [`solve_2d`] warm-started from a previous solution; the time steppers pass
/// the chemical of the preceding step, which cuts the iteration count sharply
/// on slowly evolving fields. The convergence contract is unchanged.
pub fn solve_2d_from(rho: &Field, tol: f64, guess: Option<&Field>) -> Result<Field> {
    let grid = rho.grid();
    assert_eq!(grid.dim(), Dim::Two, "solve_2d needs a 2D field");
    assert!(tol > 0.0, "tolerance must be positive");
    let n = grid.n();
    let cells = n * n;
    let nu = 1.0 / (grid.dx() * grid.dx());
    let b = rho.as_slice();

    let b_norm2 = b.iter().map(|x| x * x).sum::<f64>();
    if b_norm2 == 0.0 {
        return Ok(Field::constant(grid, 0.0));
    }
    let b_abs_sum = b.iter().map(|x| math::abs(*x)).sum::<f64>();
    let resid_target2 = tol * tol * b_norm2;
    let mass_target = MASS_GAP_TOL * b_abs_sum;

    let (mut x, mut r) = match guess {
        Some(g) => {
            assert_eq!(g.grid(), grid, "guess must live on the same grid");
            let x = g.as_slice().to_vec();
            let mut ax = vec![0.0; cells];
            apply_2d(n, nu, &x, &mut ax);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            (x, r)
        }
        None => (vec![0.0; cells], b.to_vec()),
    };
    let mut p = r.clone();
    let mut ap = vec![0.0; cells];

    let mut rr = r.iter().map(|x| x * x).sum::<f64>();
    let r_sum0 = r.iter().sum::<f64>();
    if rr <= resid_target2 && math::abs(r_sum0) <= mass_target {
        return Ok(Field::from_vec(grid, x));
    }
    let cap = 10 * cells;
    for _ in 0..cap {
        apply_2d(n, nu, &p, &mut ap);
        let pap = p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        let alpha = rr / pap;
        let mut r_sum = 0.0;
        for i in 0..cells {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            r_sum += r[i];
        }
        let rr_next = r.iter().map(|x| x * x).sum::<f64>();
        if rr_next <= resid_target2 && math::abs(r_sum) <= mass_target {
            return Ok(Field::from_vec(grid, x));
        }
        let beta = rr_next / rr;
        for i in 0..cells {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    Err(CoreError::NoConvergence {
        iterations: cap,
        residual: math::sqrt(rr / b_norm2),
    })
}

/// Exact eigenvalue of the discrete 1D Laplacian (mirror Neumann closure) on
/// the cosine mode with wavenumber `w`: `mu = 4 sin^2(w dx / 2) / dx^2`.
/// The discrete solution of a cosine right-hand side is the same cosine
/// scaled by `1 / (1 + mu)` (plus `1 / (1 + mu_x + mu_y)` in 2D).
pub fn discrete_mode_eigenvalue(w: f64, dx: f64) -> f64 {
    let s = math::sin(0.5 * w * dx);
    4.0 * s * s / (dx * dx)
}
