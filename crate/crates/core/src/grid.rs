//! Uniform cell-centered meshes on `[0, L]` and `[0, L]^2`.

use crate::error::{CoreError, Result};
use crate::params::Dim;

/// A uniform cell-centered grid: `n` cells per axis of width `dx = L / n`,
/// centers `x_i = (i + 1/2) dx`, faces `x_{i +- 1/2}` on the cell boundaries.
/// 2D grids are square (`n x n`, `dy = dx`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: Dim,
    n: usize,
    dx: f64,
    length: f64,
}

impl Grid {
    /// `n >= 2` cells per axis on a domain of edge length `L > 0`.
    pub fn build(length: f64, n: usize, dim: Dim) -> Result<Grid> {
        if n < 2 {
            return Err(CoreError::InvalidGrid("need at least 2 cells per axis"));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(CoreError::InvalidGrid("domain length must be finite and > 0"));
        }
        Ok(Grid {
            dim,
            n,
            dx: length / n as f64,
            length,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Cells per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of cells (`n` in 1D, `n^2` in 2D).
    pub fn num_cells(&self) -> usize {
        match self.dim {
            Dim::One => self.n,
            Dim::Two => self.n * self.n,
        }
    }

    /// Cell measure `dx` (1D) or `dx * dy` (2D).
    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            Dim::One => self.dx,
            Dim::Two => self.dx * self.dx,
        }
    }

    /// Center coordinate along one axis, `x_i = (i + 1/2) dx`.
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// Face coordinate along one axis, `x_{i - 1/2} = i dx`; `face(0) = 0`
    /// and `face(n) = L` are the domain boundary.
    pub fn face(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Flat index of cell `(ix, iy)` in a 2D field (x fastest).
    pub fn index2(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.n && iy < self.n);
        iy * self.n + ix
    }
}
