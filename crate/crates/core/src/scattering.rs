//! Wronskians and the connection coefficients `C11, C12, C21, C22`.
//!
//! Sign conventions: `W[f, g] = f'g - fg'`, so that `W[f1+, f1-] = 2iλ` and
//! `W[f2+, f2-] = 2λβ`. The coefficients are normalised so that for `q = 0`
//! `C11 = -(1 - iβ)/2` and `C12 = -(1 + iβ)/2`, the constants they tend to as
//! `|λ| → ∞`. With this normalisation the glued solutions are
//! `f2+ = -(C11 f1+ + C12 f1-)` on `x ≥ 0` and `f1+ = -(C22 f2+ + C21 f2-)` on
//! `x < 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::VTable;
use crate::error::{Error, Result};
use crate::limits;
use crate::solutions::{FundamentalSystem, Solution, SolutionSample};
use crate::POLE_TOL;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `f'g - fg'` for two samples taken at the same `(x, λ)`.
pub fn wronskian(f: &SolutionSample, g: &SolutionSample) -> Complex64 {
    f.derivative * g.value - f.value * g.derivative
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoefficients {
    pub lam: Complex64,
    pub c11: Complex64,
    pub c12: Complex64,
    pub c21: Complex64,
    pub c22: Complex64,
}

/// Evaluates all four coefficients at `λ` from the native solutions at `x = 0`.
///
/// `C22` and `C21` are derived from `C11(-λ)` and `C12(λ)`; the direct
/// Wronskian forms agree with them and are checked in the tests.
pub fn connection_coefficients(
    v: &VTable,
    beta: f64,
    lam: Complex64,
) -> Result<ConnectionCoefficients> {
    if lam.norm() < POLE_TOL {
        return Err(Error::ZeroWavenumber(lam.norm()));
    }
    let sys = FundamentalSystem::new(v, beta, lam);
    coefficients_from_system(&sys)
}

pub(crate) fn coefficients_from_system(sys: &FundamentalSystem) -> Result<ConnectionCoefficients> {
    let lam = sys.lam();
    let beta = sys.beta();
    let zero = Complex64::new(0.0, 0.0);
    let at0 = |k: Solution| -> Result<SolutionSample> { Ok(sys.native(k, zero)?.sample()) };
    let f1p = at0(Solution::F1Plus)?;
    let f1m = at0(Solution::F1Minus)?;
    let f2p = at0(Solution::F2Plus)?;
    let f2m = at0(Solution::F2Minus)?;

    let two_i_lam = 2.0 * I * lam;
    let c11 = -wronskian(&f2p, &f1m) / two_i_lam;
    let c12 = -wronskian(&f1p, &f2p) / two_i_lam;
    // C11(-λ) with λ → -λ swapping the branches
    let c11_reflected = wronskian(&f2m, &f1p) / two_i_lam;
    Ok(ConnectionCoefficients {
        lam,
        c11,
        c12,
        c22: I / beta * c11_reflected,
        c21: -I / beta * c12,
    })
}

/// `C11(λ)` alone.
pub fn c11(v: &VTable, beta: f64, lam: Complex64) -> Result<Complex64> {
    Ok(connection_coefficients(v, beta, lam)?.c11)
}

/// `C12(λ)` alone. Only needs `f1+` and `f2+`, so it is defined at `λ = n/2`.
pub fn c12(v: &VTable, beta: f64, lam: Complex64) -> Result<Complex64> {
    if lam.norm() < POLE_TOL {
        return Err(Error::ZeroWavenumber(lam.norm()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let sys = FundamentalSystem::new(v, beta, lam);
    let f1p = sys.native(Solution::F1Plus, zero)?.sample();
    let f2p = sys.native(Solution::F2Plus, zero)?.sample();
    Ok(-wronskian(&f1p, &f2p) / (2.0 * I * lam))
}

/// `V_nn` recovered from the pole of `C11` at `λ = n/2`:
/// `V_nn = -lim_{λ→n/2} (n - 2λ) C11(λ) / C12(λ)`.
///
/// The limit is approached along `λ = n/2 + 10^{-k}(1+i)/√2`, `k = 2..=6`, and
/// Richardson-extrapolated. Fails with
/// [`Error::ExtrapolationDivergence`] when the estimates do not settle, which
/// happens when `C12` vanishes at `n/2`.
pub fn c11_pole_strength(v: &VTable, beta: f64, n: usize) -> Result<Complex64> {
    if n == 0 || n > v.order() {
        return Err(Error::InvalidInput(format!(
            "pole index {n} outside 1..={}",
            v.order()
        )));
    }
    limits::pole_strength(n, |l| c11(v, beta, l), |l| c12(v, beta, l))
}
