//! The amplitude ODE against its exact Bernoulli solution, the pitchfork-sign
//! scan, and the growth-rate link between the analysis and the simulation.

use chemcomp_core::amplitude::{pitchfork_scan, solve_amplitude_ode, AmplitudeCoefficients};
use chemcomp_core::stability::growth_rate_sigma;
use chemcomp_core::stepper::{simulate, SchemeConfig};
use chemcomp_core::{Dim, Field, Grid, Params};

/// Exact solution of `A' = s A + l1 A^3`: logistic dynamics in `A^2`.
fn bernoulli_solution(s: f64, l1: f64, a0: f64, t: f64) -> f64 {
    if s == 0.0 {
        return a0 / (1.0 - 2.0 * l1 * a0 * a0 * t).sqrt();
    }
    let b0 = a0 * a0;
    let e = (2.0 * s * t).exp();
    (s * b0 * e / (s + l1 * b0 * (1.0 - e))).sqrt()
}

#[test]
fn integrator_tracks_the_exact_solution() {
    let c = AmplitudeCoefficients::compute(0.2, 2.0).unwrap();
    let eps = 0.05;
    let series = solve_amplitude_ode(&c, eps, 1e-2, 200.0, 1e-3);
    let mut worst = 0.0f64;
    for &(t, a) in series.iter().step_by(100) {
        let exact = bernoulli_solution(eps * c.lambda2, c.lambda1, 1e-2, t);
        worst = worst.max((a - exact).abs());
    }
    assert!(worst <= 1e-8, "max |numeric - exact| = {worst:e}");
}

#[test]
fn scan_is_supercritical_on_the_reference_window() {
    let scan = pitchfork_scan((0.05, 0.95), (0.2, 4.0), 21, 21).unwrap();
    assert_eq!(scan.points.len(), 441);
    for p in &scan.points {
        if let Some(l1) = p.lambda1 {
            assert!(l1 < 0.0, "lambda1 = {l1} at a = {}, L = {}", p.a, p.length);
        }
    }
    assert!(scan.all_supercritical());
}

/// The early-time log-slope of the simulated amplitude matches the predicted
/// growth rate within 15% just above threshold.
#[test]
fn simulated_growth_rate_matches_sigma() {
    let (a, l, eps, a0) = (0.2, 2.0, 0.05, 1e-2);
    let coeffs = AmplitudeCoefficients::compute(a, l).unwrap();
    let sigma = growth_rate_sigma(eps, a, l).unwrap();
    let params = Params::symmetric(a, coeffs.chi_star + eps, l, Dim::One);

    let n = 800;
    let g = Grid::build(l, n, Dim::One).unwrap();
    let ubar = 1.0 / (1.0 + a);
    let u0 = Field::project_1d(g, |x| ubar + a0 * (coeffs.w * x).cos());
    let v0 = Field::project_1d(g, |x| ubar - a0 * (coeffs.w * x).cos());
    let cfg = SchemeConfig::new(0.01, 60.0);
    let out = simulate(&params, u0, v0, &cfg).unwrap();

    // fit log A over the clean exponential window [2 a0, A_inf / 4]
    let a_inf = (eps * coeffs.lambda2 / -coeffs.lambda1).sqrt();
    let pts: Vec<(f64, f64)> = out
        .series
        .rows()
        .iter()
        .filter(|r| r.amp_u > 2.0 * a0 && r.amp_u < a_inf / 4.0)
        .map(|r| (r.t, r.amp_u.ln()))
        .collect();
    assert!(pts.len() > 100, "window too small: {}", pts.len());
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (tb, yb) = (st / m, sy / m);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in &pts {
        num += (t - tb) * (y - yb);
        den += (t - tb) * (t - tb);
    }
    let slope = num / den;
    let rel = (slope - sigma).abs() / sigma;
    assert!(rel <= 0.15, "slope {slope:.5} vs sigma {sigma:.5} ({rel:.1}% off)");
}
