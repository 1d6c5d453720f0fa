//! Tridiagonal systems and the Thomas algorithm.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::math;

/// Relative pivot threshold below which the forward sweep is declared singular.
const PIVOT_TOL: f64 = 1e-14;

/// Row-wise diagonal dominance of an assembled system, recorded at assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `|diag| > |sub| + |sup|` on every row.
    Strict,
    /// `|diag| >= |sub| + |sup|` on every row, with equality somewhere.
    Weak,
    /// At least one row violates dominance.
    None,
}

/// A tridiagonal system `A x = rhs` with diagonals `sub`, `diag`, `sup`, all
/// of length `n` (`sub[0]` and `sup[n-1]` are unused).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Self {
        let n = diag.len();
        assert!(n >= 1, "empty system");
        assert!(
            sub.len() == n && sup.len() == n && rhs.len() == n,
            "all diagonals and the rhs must have equal length"
        );
        TridiagonalSystem { sub, diag, sup, rhs }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Smallest row margin `|diag| - |sub| - |sup|`; positive means strictly
    /// diagonally dominant.
    pub fn dominance_margin(&self) -> f64 {
        let n = self.len();
        let mut margin = f64::INFINITY;
        for i in 0..n {
            let mut off = 0.0;
            if i > 0 {
                off += math::abs(self.sub[i]);
            }
            if i + 1 < n {
                off += math::abs(self.sup[i]);
            }
            margin = margin.min(math::abs(self.diag[i]) - off);
        }
        margin
    }

    pub fn dominance(&self) -> Dominance {
        let m = self.dominance_margin();
        if m > 0.0 {
            Dominance::Strict
        } else if m == 0.0 {
            Dominance::Weak
        } else {
            Dominance::None
        }
    }
}

/// Solve `A x = rhs` by forward elimination and back substitution.
///
/// Fails with [`CoreError::SingularSystem`] when a pivot falls below
/// `1e-14 * max|diag|`. For the strictly diagonally dominant systems
/// assembled in this crate the residual stays near machine precision.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    thomas_on(&sys.sub, &sys.diag, &sys.sup, &sys.rhs)
}

/// Thomas algorithm on bare diagonals; `thomas_solve` and the per-line ADI
/// sweeps share this.
pub(crate) fn thomas_on(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let pivot_floor = PIVOT_TOL * diag.iter().fold(0.0f64, |m, &d| m.max(math::abs(d)));

    let mut c_star = Vec::with_capacity(n);
    let mut d_star = Vec::with_capacity(n);

    let mut pivot = diag[0];
    if math::abs(pivot) <= pivot_floor {
        return Err(CoreError::SingularSystem { row: 0, pivot });
    }
    c_star.push(sup[0] / pivot);
    d_star.push(rhs[0] / pivot);

    for i in 1..n {
        pivot = diag[i] - sub[i] * c_star[i - 1];
        if math::abs(pivot) <= pivot_floor {
            return Err(CoreError::SingularSystem { row: i, pivot });
        }
        c_star.push(sup[i] / pivot);
        d_star.push((rhs[i] - sub[i] * d_star[i - 1]) / pivot);
    }

    let mut x = d_star;
    for i in (0..n - 1).rev() {
        x[i] -= c_star[i] * x[i + 1];
    }
    Ok(x)
}
