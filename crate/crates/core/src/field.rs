//! Cell-average fields and the coupled solver state.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::Grid;
use crate::helmholtz;
use crate::params::Dim;

/// Per-cell averages of one density on a [`Grid`].
///
/// Cell averages are approximated by midpoint evaluation when a field is
/// projected from a pointwise function; cells straddling a discontinuity
/// take the value at their center.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<f64>,
}

impl Field {
    pub fn constant(grid: Grid, value: f64) -> Field {
        Field {
            grid,
            data: vec![value; grid.num_cells()],
        }
    }

    /// Wrap raw per-cell data; the length must match the grid.
    pub fn from_vec(grid: Grid, data: Vec<f64>) -> Field {
        assert_eq!(data.len(), grid.num_cells(), "field length must match grid");
        Field { grid, data }
    }

    /// Midpoint projection of a pointwise function on a 1D grid.
    pub fn project_1d(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        assert_eq!(grid.dim(), Dim::One, "project_1d needs a 1D grid");
        let data = (0..grid.n()).map(|i| f(grid.center(i))).collect();
        Field { grid, data }
    }

    /// Midpoint projection of a pointwise function on a 2D grid.
    pub fn project_2d(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(grid.dim(), Dim::Two, "project_2d needs a 2D grid");
        let n = grid.n();
        let mut data = Vec::with_capacity(n * n);
        for iy in 0..n {
            let y = grid.center(iy);
            for ix in 0..n {
                data.push(f(grid.center(ix), y));
            }
        }
        Field { grid, data }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Value at cell `(ix, iy)` of a 2D field.
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[self.grid.index2(ix, iy)]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
    }

    /// Discrete mass `sum(rho) * |C|`.
    pub fn mass(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

impl core::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

/// The coupled solver state at one time: both densities and their chemicals.
///
/// The chemicals are kept consistent with the densities through the screened
/// Poisson solve; [`State::new`] computes them and the time steppers refresh
/// them after each full step.
#[derive(Debug, Clone)]
pub struct State {
    pub u: Field,
    pub v: Field,
    /// Chemical emitted by `u` (repels `v`).
    pub cu: Field,
    /// Chemical emitted by `v` (repels `u`).
    pub cv: Field,
    pub t: f64,
}

impl State {
    /// Build a consistent state at `t = 0` by solving for both chemicals.
    pub fn new(u: Field, v: Field, elliptic_tol: f64) -> Result<State> {
        assert_eq!(u.grid(), v.grid(), "u and v must share a grid");
        let cu = helmholtz::chemical(&u, elliptic_tol)?;
        let cv = helmholtz::chemical(&v, elliptic_tol)?;
        Ok(State {
            u,
            v,
            cu,
            cv,
            t: 0.0,
        })
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Dim;

    #[test]
    fn projection_of_constant_is_exact() {
        let g = Grid::build(7.0, 13, Dim::One).unwrap();
        let f = Field::project_1d(g, |_| 3.0);
        assert!(f.as_slice().iter().all(|&x| x == 3.0));
    }

    #[test]
    fn cosine_projection_samples_cell_centers() {
        let g = Grid::build(2.0, 4, Dim::One).unwrap();
        let l = g.length();
        let f = Field::project_1d(g, |x| (core::f64::consts::PI * x / l).cos());
        // centers 0.25, 0.75, 1.25, 1.75 give cos(pi/L * x) = cos(0.125 pi), ...
        for (i, &v) in f.as_slice().iter().enumerate() {
            let expect = (core::f64::consts::PI * (0.125 + 0.25 * i as f64)).cos();
            assert!((v - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn indicator_projection_keeps_unit_mass_up_to_dx() {
        // 1_{[45,55]} / 10 on [0, 100]: 0.1 on cells centered inside, 0 outside.
        let g = Grid::build(100.0, 1000, Dim::One).unwrap();
        let f = Field::project_1d(g, |x| if (45.0..=55.0).contains(&x) { 0.1 } else { 0.0 });
        for (i, &v) in f.as_slice().iter().enumerate() {
            let x = g.center(i);
            if x > 45.0 && x < 55.0 {
                assert_eq!(v, 0.1);
            } else if !(45.0..=55.0).contains(&x) {
                assert_eq!(v, 0.0);
            }
        }
        assert!((f.mass() - 1.0).abs() <= g.dx());
    }

    #[test]
    fn midpoint_mass_converges_at_second_order() {
        // mass(project(f)) approaches the exact integral like dx^2
        let f = |x: f64| (0.7 * x).sin() + 1.5;
        let exact = (1.5 * 4.0) + (1.0 - (0.7f64 * 4.0).cos()) / 0.7; // over [0, 4]
        let err = |n: usize| {
            let g = Grid::build(4.0, n, Dim::One).unwrap();
            (Field::project_1d(g, f).mass() - exact).abs()
        };
        let ratio = err(50) / err(100);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn state_keeps_chemicals_consistent() {
        let g = Grid::build(2.0, 16, Dim::One).unwrap();
        let u = Field::constant(g, 0.75);
        let v = Field::constant(g, 0.25);
        let s = State::new(u, v, 1e-10).unwrap();
        // Constants are exact solutions of c - Lap(c) = rho.
        assert!(s.cu.as_slice().iter().all(|&c| (c - 0.75).abs() < 1e-12));
        assert!(s.cv.as_slice().iter().all(|&c| (c - 0.25).abs() < 1e-12));
        assert!((s.cu.mass() - s.u.mass()).abs() < 1e-10);
    }
}
