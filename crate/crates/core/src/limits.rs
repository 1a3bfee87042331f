//! Polynomial (Richardson/Neville) extrapolation of sampled limits.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Steps `ε_k = 10^{-k}`, `k = 2..=6`, used for all half-integer limits.
pub const LIMIT_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=6;

/// Relative stabilisation required between the last two extrapolants.
pub const LIMIT_RTOL: f64 = 1e-6;

/// Absolute floor for the stabilisation test, for limits that are zero.
pub const LIMIT_ATOL: f64 = 1e-12;

/// Unit direction `(1+i)/√2`, the diagonal ray into the first quadrant.
pub fn diagonal() -> Complex64 {
    Complex64::new(1.0, 1.0) / std::f64::consts::SQRT_2
}

/// Neville extrapolation to `t = 0` from samples `(t_k, g(t_k))`.
///
/// Returns the successive diagonal extrapolants; the last one uses every
/// sample.
pub fn neville_to_zero(samples: &[(f64, Complex64)]) -> Vec<Complex64> {
    let mut table: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let mut diag = Vec::with_capacity(samples.len());
    if let Some(first) = table.first() {
        diag.push(*first);
    }
    // table[i] holds P_{i-level..i}(0) after each level
    for level in 1..samples.len() {
        for i in (level..samples.len()).rev() {
            let t_hi = samples[i].0;
            let t_lo = samples[i - level].0;
            table[i] = (t_hi * table[i - 1] - t_lo * table[i]) / (t_hi - t_lo);
        }
        diag.push(table[level]);
    }
    diag
}

/// Extrapolates `g(ε)` to `ε → 0` over `ε = 10^{-k}`, `k = 2..=6`, and checks
/// that the last two extrapolants agree.
///
/// `label` is reported in [`Error::ExtrapolationDivergence`].
pub fn limit_at_zero<F>(label: usize, mut g: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut samples = Vec::new();
    for k in LIMIT_EXPONENTS {
        let t = 10f64.powi(-k);
        samples.push((t, g(t)?));
    }
    let diag = neville_to_zero(&samples);
    let last = diag[diag.len() - 1];
    let prev = diag[diag.len() - 2];
    let change = (last - prev).norm();
    if !last.is_finite() || change > LIMIT_RTOL * last.norm() + LIMIT_ATOL {
        return Err(Error::ExtrapolationDivergence {
            n: label,
            estimate: last,
            change,
        });
    }
    Ok(last)
}

/// `V_nn` from coefficient evaluators: `-lim_{λ→n/2} (n - 2λ) C11(λ)/C12(λ)`,
/// approached along the diagonal into the first quadrant.
pub fn pole_strength<A, B>(n: usize, c11: A, c12: B) -> Result<Complex64>
where
    A: Fn(Complex64) -> Result<Complex64>,
    B: Fn(Complex64) -> Result<Complex64>,
{
    let centre = Complex64::new(n as f64 / 2.0, 0.0);
    let dir = diagonal();
    limit_at_zero(n, |t| {
        let lam = centre + dir * t;
        Ok(-(n as f64 - 2.0 * lam) * c11(lam)? / c12(lam)?)
    })
}
