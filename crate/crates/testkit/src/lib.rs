//! Dense reference solvers used as independent oracles by the test suites.
//!
//! Everything here recomputes the discrete systems from the update equations
//! with plain dense matrices and LU factorization, deliberately sharing no
//! code with the production solvers: the tridiagonal/ADI paths in
//! `chemcomp-core` are checked against these on small grids.

/// Solve `A x = b` for a dense row-major `n x n` matrix by LU factorization
/// with partial pivoting. Panics on a (numerically) singular matrix; the
/// oracle systems are well conditioned by construction.
pub fn lu_solve(a: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let (best, best_val) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        assert!(best_val > 1e-300, "singular oracle matrix at column {col}");
        if best != col {
            for k in 0..n {
                m.swap(col * n + k, best * n + k);
            }
            x.swap(col, best);
            perm.swap(col, best);
        }
        let pivot = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[row * n + col] = 0.0;
            for k in col + 1..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in row + 1..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    x
}

/// Dense `y = A x`.
pub fn mat_vec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|r| (0..n).map(|c| a[r * n + c] * x[c]).sum())
        .collect()
}

/// Dense `C = A B`.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for k in 0..n {
            let v = a[r * n + k];
            if v == 0.0 {
                continue;
            }
            for c in 0..n {
                out[r * n + c] += v * b[k * n + c];
            }
        }
    }
    out
}

/// Expand tridiagonal arrays into a dense matrix.
pub fn dense_from_tridiag(sub: &[f64], diag: &[f64], sup: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = diag[i];
        if i > 0 {
            a[i * n + i - 1] = sub[i];
        }
        if i + 1 < n {
            a[i * n + i + 1] = sup[i];
        }
    }
    a
}

/// Centered gradient at cell centers with mirror ghosts, 1D.
pub fn gradient_1d(c: &[f64], dx: f64) -> Vec<f64> {
    let n = c.len();
    (0..n)
        .map(|i| {
            let right = c[(i + 1).min(n - 1)];
            let left = c[i.saturating_sub(1)];
            (right - left) / (2.0 * dx)
        })
        .collect()
}

/// Centered x-gradient on an `n x n` field (x fastest), mirror ghosts.
pub fn gradient_x(c: &[f64], n: usize, dx: f64) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let right = c[iy * n + (ix + 1).min(n - 1)];
            let left = c[iy * n + ix.saturating_sub(1)];
            g[iy * n + ix] = (right - left) / (2.0 * dx);
        }
    }
    g
}

/// Centered y-gradient on an `n x n` field (x fastest), mirror ghosts.
pub fn gradient_y(c: &[f64], n: usize, dx: f64) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let up = c[(iy + 1).min(n - 1) * n + ix];
            let down = c[iy.saturating_sub(1) * n + ix];
            g[iy * n + ix] = (up - down) / (2.0 * dx);
        }
    }
    g
}

/// Dense solve of the 1D screened Poisson problem `(I - Dxx) c = rho`.
pub fn dense_helmholtz_1d(rho: &[f64], dx: f64) -> Vec<f64> {
    let n = rho.len();
    let nu = 1.0 / (dx * dx);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = 1.0;
        if i > 0 {
            a[i * n + i] += nu;
            a[i * n + i - 1] -= nu;
        }
        if i + 1 < n {
            a[i * n + i] += nu;
            a[i * n + i + 1] -= nu;
        }
    }
    lu_solve(&a, n, rho)
}

/// Dense solve of the 2D screened Poisson problem on an `n x n` grid.
pub fn dense_helmholtz_2d(rho: &[f64], n: usize, dx: f64) -> Vec<f64> {
    let cells = n * n;
    let nu = 1.0 / (dx * dx);
    let mut a = vec![0.0; cells * cells];
    for iy in 0..n {
        for ix in 0..n {
            let i = iy * n + ix;
            a[i * cells + i] = 1.0;
            let mut link = |j: usize| {
                a[i * cells + i] += nu;
                a[i * cells + j] -= nu;
            };
            if ix > 0 {
                link(i - 1);
            }
            if ix + 1 < n {
                link(i + 1);
            }
            if iy > 0 {
                link(i - n);
            }
            if iy + 1 < n {
                link(i + n);
            }
        }
    }
    lu_solve(&a, cells, rho)
}

/// Per-species coefficients of one update.
#[derive(Debug, Clone, Copy)]
pub struct SpeciesCoeffs {
    pub d: f64,
    pub chi: f64,
    pub b: f64,
    pub a: f64,
}

fn reaction(rho: f64, other: f64, co: SpeciesCoeffs) -> (f64, f64) {
    let f = co.b * rho * (1.0 - rho - co.a * other);
    let fp = co.b * (1.0 - 2.0 * rho - co.a * other);
    (f, fp)
}

/// Add the x-direction operator `-dt * (d Dxx - Dx)` of one species to a dense
/// matrix, acting on the line of cells `line[0..len]` (flat indices into the
/// unknown vector of size `dim`), with drift velocities `w` on that line.
/// `kappa = dx / (2 dt)` is the flux dissipation coefficient; boundary faces
/// carry zero flux and the diffusive stencil is mirrored there.
#[allow(clippy::too_many_arguments)]
fn add_line_operator(
    a: &mut [f64],
    dim: usize,
    line: &[usize],
    w: &[f64],
    d: f64,
    dx: f64,
    dt: f64,
) {
    let len = line.len();
    let nu = d / (dx * dx);
    let kappa = dx / (2.0 * dt);
    for s in 0..len - 1 {
        let (i, j) = (line[s], line[s + 1]);
        // diffusive flux through the interior face between i and j
        a[i * dim + i] += dt * nu;
        a[i * dim + j] -= dt * nu;
        a[j * dim + j] += dt * nu;
        a[j * dim + i] -= dt * nu;
        // Lax-Friedrichs drift flux eta = (w_i/2 + kappa) rho_i + (w_j/2 - kappa) rho_j
        let al = 0.5 * w[s] + kappa;
        let ar = 0.5 * w[s + 1] - kappa;
        a[i * dim + i] += dt * al / dx;
        a[i * dim + j] += dt * ar / dx;
        a[j * dim + i] -= dt * al / dx;
        a[j * dim + j] -= dt * ar / dx;
    }
}

/// One dense 1D step of a single species: assemble
/// `(I - dt (A_x + f')) rho_new = rho + dt f - dt f' rho` and LU-solve it.
/// `partner_chemical` is the chemical the species is repelled by, at time n.
pub fn dense_step_1d(
    rho: &[f64],
    other: &[f64],
    partner_chemical: &[f64],
    co: SpeciesCoeffs,
    dx: f64,
    dt: f64,
) -> Vec<f64> {
    let n = rho.len();
    let g = gradient_1d(partner_chemical, dx);
    let w: Vec<f64> = g.iter().map(|gi| -co.chi * gi).collect();
    let line: Vec<usize> = (0..n).collect();

    let mut a = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let (f, fp) = reaction(rho[i], other[i], co);
        a[i * n + i] = 1.0 - dt * fp;
        rhs[i] = rho[i] + dt * f - dt * fp * rho[i];
    }
    add_line_operator(&mut a, n, &line, &w, co.d, dx, dt);
    lu_solve(&a, n, &rhs)
}

fn assemble_2d_parts(
    rho: &[f64],
    other: &[f64],
    partner_chemical: &[f64],
    n: usize,
    co: SpeciesCoeffs,
    dx: f64,
    dt: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let cells = n * n;
    let gx = gradient_x(partner_chemical, n, dx);
    let gy = gradient_y(partner_chemical, n, dx);
    let wx: Vec<f64> = gx.iter().map(|g| -co.chi * g).collect();
    let wy: Vec<f64> = gy.iter().map(|g| -co.chi * g).collect();

    // -dt * A_x and -dt * A_y as dense matrices (zero diagonal base).
    let mut ax = vec![0.0; cells * cells];
    let mut ay = vec![0.0; cells * cells];
    for iy in 0..n {
        let line: Vec<usize> = (0..n).map(|ix| iy * n + ix).collect();
        let wline: Vec<f64> = line.iter().map(|&i| wx[i]).collect();
        add_line_operator(&mut ax, cells, &line, &wline, co.d, dx, dt);
    }
    for ix in 0..n {
        let line: Vec<usize> = (0..n).map(|iy| iy * n + ix).collect();
        let wline: Vec<f64> = line.iter().map(|&i| wy[i]).collect();
        add_line_operator(&mut ay, cells, &line, &wline, co.d, dx, dt);
    }

    let mut fprime = vec![0.0; cells];
    let mut rhs = vec![0.0; cells];
    for i in 0..cells {
        let (f, fp) = reaction(rho[i], other[i], co);
        fprime[i] = fp;
        rhs[i] = rho[i] + dt * f - dt * fp * rho[i];
    }
    (ax, ay, fprime, rhs)
}

/// One dense 2D step of a single species from the unfactored system
/// `(I - dt (A_x + A_y + f')) rho_new = rhs`.
pub fn dense_step_2d_unfactored(
    rho: &[f64],
    other: &[f64],
    partner_chemical: &[f64],
    n: usize,
    co: SpeciesCoeffs,
    dx: f64,
    dt: f64,
) -> Vec<f64> {
    let cells = n * n;
    let (ax, ay, fprime, rhs) = assemble_2d_parts(rho, other, partner_chemical, n, co, dx, dt);
    let mut m = vec![0.0; cells * cells];
    for i in 0..cells {
        m[i * cells + i] = 1.0 - dt * fprime[i];
    }
    for k in 0..cells * cells {
        m[k] += ax[k] + ay[k];
    }
    lu_solve(&m, cells, &rhs)
}

/// One dense 2D step of a single species from the factored system
/// `(I - dt (A_x + f')) (I - dt A_y) rho_new = rhs`,
/// which the production ADI sweeps solve exactly (the reaction linearization
/// rides entirely in the x-factor).
pub fn dense_step_2d_factored(
    rho: &[f64],
    other: &[f64],
    partner_chemical: &[f64],
    n: usize,
    co: SpeciesCoeffs,
    dx: f64,
    dt: f64,
) -> Vec<f64> {
    let cells = n * n;
    let (ax, ay, fprime, rhs) = assemble_2d_parts(rho, other, partner_chemical, n, co, dx, dt);
    let mut mx = ax;
    let mut my = ay;
    for i in 0..cells {
        mx[i * cells + i] += 1.0 - dt * fprime[i];
        my[i * cells + i] += 1.0;
    }
    let product = mat_mul(&mx, &my, cells);
    lu_solve(&product, cells, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_recovers_known_solution() {
        // 3x3 with known inverse action.
        let a = vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let x_true = vec![1.0, -2.0, 3.0];
        let b = mat_vec(&a, 3, &x_true);
        let x = lu_solve(&a, 3, &b);
        for i in 0..3 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_handles_pivoting() {
        let a = vec![0.0, 1.0, 1.0, 0.0];
        let x = lu_solve(&a, 2, &[2.0, 3.0]);
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn gradients_mirror_at_boundaries() {
        let c: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let g = gradient_1d(&c, 1.0);
        assert_eq!(g, vec![0.5, 1.0, 1.0, 1.0, 0.5]);
    }
}
