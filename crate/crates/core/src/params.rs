//! Model coefficients and the constant coexistence state.

use crate::error::{CoreError, Result};

/// Spatial dimension of the domain: an interval `[0, L]` or a square `[0, L]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// All model coefficients plus the domain size.
///
/// `chi1` acts on `u` through the gradient of `c[v]` and `chi2` on `v` through
/// the gradient of `c[u]`; positive values are repulsive (drift velocity
/// `-chi grad c`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Diffusion coefficients, `> 0`.
    pub d1: f64,
    pub d2: f64,
    /// Chemotactic sensitivities, `>= 0`.
    pub chi1: f64,
    pub chi2: f64,
    /// Competition coefficients, `> 0`.
    pub a1: f64,
    pub a2: f64,
    /// Growth rates, `> 0`.
    pub b1: f64,
    pub b2: f64,
    /// Domain edge length, `> 0`.
    pub length: f64,
    pub dim: Dim,
}

impl Params {
    /// Symmetric coefficient set `d1 = d2 = b1 = b2 = 1`, `a1 = a2 = a`,
    /// `chi1 = chi2 = chi`, the configuration the stability and amplitude
    /// analysis is derived for.
    pub fn symmetric(a: f64, chi: f64, length: f64, dim: Dim) -> Self {
        Params {
            d1: 1.0,
            d2: 1.0,
            chi1: chi,
            chi2: chi,
            a1: a,
            a2: a,
            b1: 1.0,
            b2: 1.0,
            length,
            dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            self.d1,
            self.d2,
            self.a1,
            self.a2,
            self.b1,
            self.b2,
            self.length,
        ];
        if pos.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(CoreError::InvalidParams(
                "d1, d2, a1, a2, b1, b2 and L must be finite and > 0",
            ));
        }
        if self.chi1.is_nan() || self.chi1 < 0.0 || self.chi2.is_nan() || self.chi2 < 0.0 {
            return Err(CoreError::InvalidParams("chi1, chi2 must be >= 0"));
        }
        Ok(())
    }

    /// True iff the coefficients are in the symmetric configuration required
    /// by the stability and amplitude modules.
    pub fn is_symmetric(&self) -> bool {
        self.d1 == 1.0
            && self.d2 == 1.0
            && self.b1 == 1.0
            && self.b2 == 1.0
            && self.a1 == self.a2
            && self.chi1 == self.chi2
    }
}

/// The positive constant steady state
/// `(ubar, vbar) = ((1 - a1)/(1 - a1 a2), (1 - a2)/(1 - a1 a2))`.
///
/// Errors with [`CoreError::DegenerateCompetition`] when `a1 a2 = 1` and with
/// [`CoreError::NoCoexistence`] when either component is non-positive
/// (the `0 < a1 < 1 < a2` exclusion regime or its mirror).
pub fn coexistence_state(params: &Params) -> Result<(f64, f64)> {
    let denom = 1.0 - params.a1 * params.a2;
    if denom == 0.0 {
        return Err(CoreError::DegenerateCompetition);
    }
    let ubar = (1.0 - params.a1) / denom;
    let vbar = (1.0 - params.a2) / denom;
    if ubar <= 0.0 || vbar <= 0.0 {
        return Err(CoreError::NoCoexistence {
            a1: params.a1,
            a2: params.a2,
        });
    }
    Ok((ubar, vbar))
}
