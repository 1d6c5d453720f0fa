//! Screened-Poisson solves checked against dense LU oracles, manufactured
//! solutions, and the structural identities (mass, maximum principle,
//! linearity).

use chemcomp_core::helmholtz::{solve_1d, solve_2d};
use chemcomp_core::tridiag::{thomas_solve, TridiagonalSystem};
use chemcomp_core::{Dim, Field, Grid};
use chemcomp_testkit as oracle;
use proptest::prelude::*;

#[test]
fn thomas_matches_dense_lu_on_random_dominant_systems() {
    // deterministic xorshift so failures are reproducible
    let mut s = 0x9e3779b97f4a7c15u64;
    let mut rng = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..50 {
        let n = 8;
        let sub: Vec<f64> = (0..n).map(|_| rng() - 0.5).collect();
        let sup: Vec<f64> = (0..n).map(|_| rng() - 0.5).collect();
        let diag: Vec<f64> = (0..n).map(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += sub[i].abs();
            }
            if i + 1 < n {
                off += sup[i].abs();
            }
            off + 0.5 + rng()
        })
        .collect();
        let rhs: Vec<f64> = (0..n).map(|_| 2.0 * rng() - 1.0).collect();

        let x = thomas_solve(&TridiagonalSystem::new(
            sub.clone(),
            diag.clone(),
            sup.clone(),
            rhs.clone(),
        ))
        .unwrap();
        let dense = oracle::dense_from_tridiag(&sub, &diag, &sup);
        let x_ref = oracle::lu_solve(&dense, n, &rhs);
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() < 1e-12, "row {i}");
        }
        // residual contract
        let ax = oracle::mat_vec(&dense, n, &x);
        let rhs_scale = rhs.iter().fold(0.0f64, |m, &r| m.max(r.abs()));
        for i in 0..n {
            assert!((ax[i] - rhs[i]).abs() <= 1e-12 * rhs_scale.max(1.0));
        }
    }
}

#[test]
fn solve_2d_matches_dense_lu_on_a_small_grid() {
    let g = Grid::build(2.0, 8, Dim::Two).unwrap();
    let rho = Field::project_2d(g, |x, y| 0.3 + (1.3 * x).sin().abs() + 0.5 * (0.7 * y).cos().abs());
    let c = solve_2d(&rho, 1e-12).unwrap();
    let c_ref = oracle::dense_helmholtz_2d(rho.as_slice(), 8, g.dx());
    for (i, (got, want)) in c.as_slice().iter().zip(&c_ref).enumerate() {
        assert!((got - want).abs() < 1e-9, "cell {i}");
    }
}

#[test]
fn solve_1d_matches_dense_lu() {
    let g = Grid::build(5.0, 8, Dim::One).unwrap();
    let rho = Field::project_1d(g, |x| 1.0 + (x * 0.9).sin());
    let c = solve_1d(&rho).unwrap();
    let c_ref = oracle::dense_helmholtz_1d(rho.as_slice(), g.dx());
    for (got, want) in c.as_slice().iter().zip(&c_ref) {
        assert!((got - want).abs() < 1e-12);
    }
}

/// Manufactured Neumann-compatible solution: error against the continuum
/// drops by ~4x when dx halves.
#[test]
fn second_order_convergence_1d() {
    let l = 2.0;
    let w1 = std::f64::consts::PI / l;
    let w3 = 3.0 * std::f64::consts::PI / l;
    let exact = |x: f64| (w1 * x).cos() + 0.3 * (w3 * x).cos();
    let rhs = move |x: f64| (1.0 + w1 * w1) * (w1 * x).cos() + 0.3 * (1.0 + w3 * w3) * (w3 * x).cos();
    let err = |n: usize| {
        let g = Grid::build(l, n, Dim::One).unwrap();
        let c = solve_1d(&Field::project_1d(g, rhs)).unwrap();
        (0..n)
            .map(|i| (c.as_slice()[i] - exact(g.center(i))).abs())
            .fold(0.0f64, f64::max)
    };
    let ratio = err(64) / err(128);
    assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
}

#[test]
fn second_order_convergence_2d() {
    let l = 2.0;
    let wx = std::f64::consts::PI / l;
    let wy = 2.0 * std::f64::consts::PI / l;
    let exact = move |x: f64, y: f64| (wx * x).cos() * (wy * y).cos() + 0.5 * (wx * y).cos();
    let rhs = move |x: f64, y: f64| {
        (1.0 + wx * wx + wy * wy) * (wx * x).cos() * (wy * y).cos()
            + 0.5 * (1.0 + wx * wx) * (wx * y).cos()
    };
    let err = |n: usize| {
        let g = Grid::build(l, n, Dim::Two).unwrap();
        let c = solve_2d(&Field::project_2d(g, rhs), 1e-12).unwrap();
        let mut e = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                e = e.max((c.at(ix, iy) - exact(g.center(ix), g.center(iy))).abs());
            }
        }
        e
    };
    let ratio = err(16) / err(32);
    assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Mass identity and maximum principle for non-negative inputs, 1D.
    #[test]
    fn mass_and_max_principle_1d(values in prop::collection::vec(0.0f64..4.0, 16..48)) {
        let n = values.len();
        let g = Grid::build(3.0, n, Dim::One).unwrap();
        let rho = Field::from_vec(g, values);
        let c = solve_1d(&rho).unwrap();
        let scale = rho.mass().abs().max(1.0);
        prop_assert!((c.mass() - rho.mass()).abs() <= 1e-10 * scale);
        prop_assert!(c.min() >= -1e-12 * rho.max().max(1.0));
        prop_assert!(c.max() <= rho.max() * (1.0 + 1e-12) + 1e-12);
    }

    /// Linearity of the 2D solve: c[a r1 + b r2] = a c[r1] + b c[r2].
    #[test]
    fn linearity_2d(seed in 0u64..1000, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let n = 10usize;
        let g = Grid::build(2.0, n, Dim::Two).unwrap();
        let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut rng = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let r1 = Field::from_vec(g, (0..n * n).map(|_| rng()).collect());
        let r2 = Field::from_vec(g, (0..n * n).map(|_| rng()).collect());
        let combo = Field::from_vec(
            g,
            (0..n * n).map(|i| alpha * r1.as_slice()[i] + beta * r2.as_slice()[i]).collect(),
        );
        let c1 = solve_2d(&r1, 1e-12).unwrap();
        let c2 = solve_2d(&r2, 1e-12).unwrap();
        let cc = solve_2d(&combo, 1e-12).unwrap();
        for i in 0..n * n {
            let lin = alpha * c1.as_slice()[i] + beta * c2.as_slice()[i];
            prop_assert!((cc.as_slice()[i] - lin).abs() < 1e-9);
        }
    }
}
