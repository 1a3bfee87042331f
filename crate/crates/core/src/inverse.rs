//! Reconstruction of `β` and `q_n` from spectral data.
//!
//! The steps are: pole strengths of `C11` at `λ = n/2` give the diagonal
//! `V[n][n]`; the diagonal determines the whole table; column sums of the
//! table give `q_n`; and `β` comes from the coefficient values at an
//! eigenvalue, or from the asymptote of `C12` when there are no eigenvalues.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{
    diagonal_to_vtable, forward_vtable, vtable_to_potential, FourierPotential, VTable,
};
use crate::contour::{Rect, ZeroSearchOptions};
use crate::error::{Error, Result};
use crate::limits::{self, neville_to_zero};
use crate::spectrum::{find_eigenvalues_with, Coefficients, Eigenvalue, Sector, TableCoefficients};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest accepted `|Im β|` of an estimate.
pub const BETA_IMAG_TOL: f64 = 1e-6;

/// Radii `250·2^k` of the far-field points used by the asymptotic β estimate.
pub const FAR_FIELD_RADII: [f64; 5] = [250.0, 500.0, 1000.0, 2000.0, 4000.0];

/// Eigenvalue as it appears in spectral data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lam: Complex64,
    pub sector: Sector,
    pub multiplicity: usize,
}

impl From<&Eigenvalue> for SpectralPoint {
    fn from(e: &Eigenvalue) -> Self {
        Self {
            lam: e.lam,
            sector: e.sector,
            multiplicity: e.multiplicity,
        }
    }
}

/// Eigenvalues together with evaluators for `C11` and `C12`.
pub trait SpectralDataProvider: Coefficients {
    fn eigenvalues(&self) -> &[SpectralPoint];
}

/// Spectral data computed directly from a potential.
#[derive(Debug, Clone)]
pub struct AnalyticProvider {
    table: VTable,
    beta: f64,
    eigenvalues: Vec<SpectralPoint>,
}

impl AnalyticProvider {
    /// Builds the table at `order` and searches `rect` (sector coordinates)
    /// in `S0` and `S3`. The zeros in `S2` and `S1` are the negatives of
    /// these, since the sector coefficients there are the same functions at
    /// `-λ`.
    pub fn new(
        p: &FourierPotential,
        order: usize,
        rect: &Rect,
        opts: &ZeroSearchOptions,
    ) -> Result<Self> {
        let table = forward_vtable(p, order);
        let coeffs = TableCoefficients::new(&table, p.beta());
        let found: Vec<Vec<Eigenvalue>> = [Sector::S0, Sector::S3]
            .par_iter()
            .map(|&s| find_eigenvalues_with(&coeffs, s, rect, opts))
            .collect::<Result<_>>()?;
        let mut eigenvalues = Vec::new();
        for e in found.iter().flatten() {
            eigenvalues.push(SpectralPoint::from(e));
            eigenvalues.push(SpectralPoint {
                lam: -e.lam,
                sector: e.sector.opposite(),
                multiplicity: e.multiplicity,
            });
        }
        sort_points(&mut eigenvalues);
        Ok(Self {
            table,
            beta: p.beta(),
            eigenvalues,
        })
    }

    /// Provider with a given eigenvalue list, skipping the search.
    pub fn with_eigenvalues(table: VTable, beta: f64, eigenvalues: Vec<SpectralPoint>) -> Self {
        Self {
            table,
            beta,
            eigenvalues,
        }
    }

    pub fn table(&self) -> &VTable {
        &self.table
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Coefficients for AnalyticProvider {
    fn c11(&self, lam: Complex64) -> Result<Complex64> {
        TableCoefficients::new(&self.table, self.beta).c11(lam)
    }

    fn c12(&self, lam: Complex64) -> Result<Complex64> {
        TableCoefficients::new(&self.table, self.beta).c12(lam)
    }
}

impl SpectralDataProvider for AnalyticProvider {
    fn eigenvalues(&self) -> &[SpectralPoint] {
        &self.eigenvalues
    }
}

pub(crate) fn sort_points(points: &mut [SpectralPoint]) {
    points.sort_by(|a, b| {
        a.lam
            .re
            .total_cmp(&b.lam.re)
            .then_with(|| a.lam.im.total_cmp(&b.lam.im))
    });
}

/// One tabulated value of the coefficient functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub lam: Complex64,
    pub c11: Complex64,
    pub c12: Complex64,
}

/// Radius around a query within which samples are used.
pub const SAMPLE_RADIUS: f64 = 0.1;
/// Fewest samples a local fit accepts.
pub const MIN_SAMPLES: usize = 4;
/// Most samples used by a local fit.
pub const MAX_SAMPLES: usize = 8;

/// Spectral data from tabulated coefficient values.
///
/// Each evaluation fits `(a + bz)/(1 + cz)`, `z = λ - λ_query`, by least
/// squares to the nearest samples within [`SAMPLE_RADIUS`], and returns `a`.
/// A sample exactly at the query is returned as is.
#[derive(Debug, Clone)]
pub struct SampledProvider {
    samples: Vec<Sample>,
    eigenvalues: Vec<SpectralPoint>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

fn bucket(lam: Complex64) -> (i64, i64) {
    (
        (lam.re / SAMPLE_RADIUS).floor() as i64,
        (lam.im / SAMPLE_RADIUS).floor() as i64,
    )
}

impl SampledProvider {
    pub fn new(samples: Vec<Sample>, eigenvalues: Vec<SpectralPoint>) -> Result<Self> {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, s) in samples.iter().enumerate() {
            if !(s.lam.is_finite() && s.c11.is_finite() && s.c12.is_finite()) {
                return Err(Error::Schema(format!("sample {k} is not finite")));
            }
            buckets.entry(bucket(s.lam)).or_default().push(k);
        }
        Ok(Self {
            samples,
            eigenvalues,
            buckets,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    fn neighbours(&self, lam: Complex64) -> Vec<(f64, usize)> {
        let (bx, by) = bucket(lam);
        let mut near = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(bx + dx, by + dy)) {
                    for &k in ids {
                        let d = (self.samples[k].lam - lam).norm();
                        if d <= SAMPLE_RADIUS {
                            near.push((d, k));
                        }
                    }
                }
            }
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        near.truncate(MAX_SAMPLES);
        near
    }

    fn interpolate(
        &self,
        lam: Complex64,
        pick: impl Fn(&Sample) -> Complex64,
    ) -> Result<Complex64> {
        let near = self.neighbours(lam);
        if let Some(&(d, k)) = near.first() {
            if d == 0.0 {
                return Ok(pick(&self.samples[k]));
            }
        }
        if near.len() < MIN_SAMPLES {
            return Err(Error::InsufficientSamples {
                lam,
                found: near.len(),
                needed: MIN_SAMPLES,
                radius: SAMPLE_RADIUS,
            });
        }
        // scale z to unit size for conditioning
        let scale = near.last().map(|n| n.0).unwrap_or(1.0);
        let rows = near.len();
        let mut a = DMatrix::<Complex64>::zeros(rows, 3);
        let mut rhs = DVector::<Complex64>::zeros(rows);
        for (r, &(_, k)) in near.iter().enumerate() {
            let z = (self.samples[k].lam - lam) / scale;
            let f = pick(&self.samples[k]);
            a[(r, 0)] = Complex64::new(1.0, 0.0);
            a[(r, 1)] = z;
            a[(r, 2)] = -z * f;
            rhs[r] = f;
        }
        let svd = a.svd(true, true);
        let x = svd
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::InvalidInput(format!("local fit failed: {e}")))?;
        if !x[0].is_finite() {
            return Err(Error::InvalidInput(format!(
                "local fit at λ = {lam} is singular"
            )));
        }
        Ok(x[0])
    }
}

impl Coefficients for SampledProvider {
    fn c11(&self, lam: Complex64) -> Result<Complex64> {
        self.interpolate(lam, |s| s.c11)
    }

    fn c12(&self, lam: Complex64) -> Result<Complex64> {
        self.interpolate(lam, |s| s.c12)
    }
}

impl SpectralDataProvider for SampledProvider {
    fn eigenvalues(&self) -> &[SpectralPoint] {
        &self.eigenvalues
    }
}

/// `V[n][n]` for `n = 1..=n_max` from the pole strengths of `C11`. Each entry
/// fails independently.
pub fn recover_diagonal<P: SpectralDataProvider + ?Sized>(
    provider: &P,
    n_max: usize,
) -> Vec<Result<Complex64>> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| limits::pole_strength(n, |l| provider.c11(l), |l| provider.c12(l)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMethod {
    Eigenvalues,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub method: BetaMethod,
    /// Imaginary part of the averaged estimate before it was discarded.
    pub imaginary_part: f64,
    /// Largest deviation of a single estimate from the average.
    pub spread: f64,
}

/// `β` from the eigenvalues: `iC11(λ)C11(-λ)` at zeros of `C12` (`S0`, `S2`)
/// and `-iC12(λ)C12(-λ)` at zeros of `C11` (`S1`, `S3`).
pub fn beta_from_eigenvalues<P: SpectralDataProvider + ?Sized>(
    provider: &P,
) -> Result<BetaEstimate> {
    let points = provider.eigenvalues();
    if points.is_empty() {
        return Err(Error::NoData);
    }
    let estimates: Vec<Complex64> = points
        .iter()
        .map(|e| -> Result<Complex64> {
            let lam = e.lam;
            Ok(match e.sector.index() {
                0 | 2 => I * provider.c11(lam)? * provider.c11(-lam)?,
                _ => -I * provider.c12(lam)? * provider.c12(-lam)?,
            })
        })
        .collect::<Result<_>>()?;
    finish_estimate(&estimates, BetaMethod::Eigenvalues)
}

/// `β = i(2C12(Λ) + 1)` extrapolated in `1/|Λ|` from `Λ = R e^{iπ/4}`,
/// `R` in [`FAR_FIELD_RADII`].
pub fn beta_from_asymptotics<P: Coefficients + ?Sized>(provider: &P) -> Result<BetaEstimate> {
    let dir = limits::diagonal();
    let samples: Vec<(f64, Complex64)> = FAR_FIELD_RADII
        .iter()
        .map(|&r| Ok((1.0 / r, I * (2.0 * provider.c12(dir * r)? + 1.0))))
        .collect::<Result<_>>()?;
    let diag = neville_to_zero(&samples);
    let est = diag[diag.len() - 1];
    let mut out = finish_estimate(&[est], BetaMethod::Asymptotic)?;
    out.spread = (est - diag[diag.len() - 2]).norm();
    Ok(out)
}

fn finish_estimate(estimates: &[Complex64], method: BetaMethod) -> Result<BetaEstimate> {
    let mean = estimates.iter().sum::<Complex64>() / estimates.len() as f64;
    if !mean.is_finite() || mean.im.abs() >= BETA_IMAG_TOL {
        return Err(Error::NonRealBeta(mean));
    }
    if mean.re <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "estimated β = {} is not positive",
            mean.re
        )));
    }
    let spread = estimates
        .iter()
        .map(|e| (e - mean).norm())
        .fold(0.0, f64::max);
    Ok(BetaEstimate {
        beta: mean.re,
        method,
        imaginary_part: mean.im,
        spread,
    })
}

/// `β` from the eigenvalues when there are any, otherwise from the
/// asymptote of `C12`.
pub fn recover_beta<P: SpectralDataProvider + ?Sized>(provider: &P) -> Result<BetaEstimate> {
    match beta_from_eigenvalues(provider) {
        Err(Error::NoData) => beta_from_asymptotics(provider).map_err(|e| match e {
            Error::InsufficientSamples { .. } => Error::NoData,
            other => other,
        }),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicDiagnostic {
    pub n: usize,
    pub diagonal: Option<Complex64>,
    /// Set when the pole-strength limit did not settle; the harmonic is then
    /// taken from a zero diagonal entry.
    pub below_resolution: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub harmonics: Vec<HarmonicDiagnostic>,
    /// Largest residual of the row recurrence of the rebuilt table.
    pub row_recurrence_residual: f64,
    /// Largest residual of the column sums against the recovered `q`.
    pub column_sum_residual: f64,
    pub beta: BetaEstimate,
    /// `|β_eigen - β_asymptotic|` when both estimates are available.
    pub beta_cross_check: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub beta: f64,
    /// `q_1, …, q_{n_max}`.
    pub q: Vec<Complex64>,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    pub fn potential(&self) -> Result<FourierPotential> {
        FourierPotential::new(self.beta, self.q.clone())
    }
}

/// Full reconstruction of `(β, q_1..q_{n_max})`; the table is rebuilt at
/// `order ≥ n_max`.
pub fn reconstruct<P: SpectralDataProvider + ?Sized>(
    provider: &P,
    n_max: usize,
    order: usize,
) -> Result<ReconstructionResult> {
    if n_max == 0 || n_max > order {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ n_max ≤ order, got n_max = {n_max}, order = {order}"
        )));
    }
    let recovered = recover_diagonal(provider, n_max);
    let mut diag = Vec::with_capacity(n_max);
    let mut harmonics = Vec::with_capacity(n_max);
    for (k, r) in recovered.into_iter().enumerate() {
        let n = k + 1;
        match r {
            Ok(d) => {
                diag.push(d);
                harmonics.push(HarmonicDiagnostic {
                    n,
                    diagonal: Some(d),
                    below_resolution: false,
                    message: None,
                });
            }
            Err(Error::ExtrapolationDivergence { .. }) | Err(Error::InsufficientSamples { .. }) => {
                let msg = r.unwrap_err().to_string();
                diag.push(Complex64::new(0.0, 0.0));
                harmonics.push(HarmonicDiagnostic {
                    n,
                    diagonal: None,
                    below_resolution: true,
                    message: Some(msg),
                });
            }
            Err(e) => return Err(e),
        }
    }

    let beta = recover_beta(provider)?;
    let beta_cross_check = match beta.method {
        BetaMethod::Eigenvalues => beta_from_asymptotics(provider)
            .ok()
            .map(|b| (b.beta - beta.beta).abs()),
        BetaMethod::Asymptotic => None,
    };

    let table = diagonal_to_vtable(&diag, order);
    let full_q = vtable_to_potential(&table);
    let q = full_q[..n_max].to_vec();

    // consistency of the part of the table fixed by the recovered diagonal
    let head = diagonal_to_vtable(&diag, n_max);
    let head_potential = FourierPotential::new(beta.beta, vtable_to_potential(&head))?;
    let diagnostics = Diagnostics {
        harmonics,
        row_recurrence_residual: head.row_recurrence_residual(&head_potential),
        column_sum_residual: head.column_sum_residual(&head_potential),
        beta,
        beta_cross_check,
    };
    Ok(ReconstructionResult {
        beta: beta.beta,
        q,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::DEFAULT_BOX;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn analytic(beta: f64, q: Vec<Complex64>) -> AnalyticProvider {
        let p = FourierPotential::new(beta, q).unwrap();
        AnalyticProvider::new(&p, 30, &DEFAULT_BOX, &Default::default()).unwrap()
    }

    #[test]
    fn free_data_gives_zero_diagonal() {
        let prov = analytic(1.0, vec![]);
        assert!(prov.eigenvalues().is_empty());
        for d in recover_diagonal(&prov, 4) {
            assert!(d.unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn single_harmonic_diagonal() {
        let prov = analytic(1.0, vec![c(1.0, 0.0)]);
        let d: Vec<Complex64> = recover_diagonal(&prov, 3)
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        assert!(close(d[0], c(-1.0, 0.0), 1e-8));
        assert!(close(d[1], c(-0.5, 0.0), 1e-8));
        assert!(close(d[2], c(-1.0 / 12.0, 0.0), 1e-8));
    }

    #[test]
    fn free_beta_via_asymptotics() {
        let prov = analytic(2.0, vec![]);
        let b = recover_beta(&prov).unwrap();
        assert_eq!(b.method, BetaMethod::Asymptotic);
        assert!((b.beta - 2.0).abs() < 1e-12);
    }

    struct Synthetic {
        beta: f64,
        points: Vec<SpectralPoint>,
    }

    impl Coefficients for Synthetic {
        fn c11(&self, lam: Complex64) -> Result<Complex64> {
            // C11(λ)C11(-λ) = -iβ for every λ
            Ok((-I * self.beta).sqrt() * (0.3 * lam).exp())
        }
        fn c12(&self, lam: Complex64) -> Result<Complex64> {
            Ok(lam - c(1.0, 1.0))
        }
    }

    impl SpectralDataProvider for Synthetic {
        fn eigenvalues(&self) -> &[SpectralPoint] {
            &self.points
        }
    }

    #[test]
    fn synthetic_eigenvalue_gives_exact_beta() {
        let s = Synthetic {
            beta: 1.7,
            points: vec![SpectralPoint {
                lam: c(1.0, 1.0),
                sector: Sector::S0,
                multiplicity: 1,
            }],
        };
        let b = recover_beta(&s).unwrap();
        assert_eq!(b.method, BetaMethod::Eigenvalues);
        assert!((b.beta - 1.7).abs() < 1e-14);
    }

    #[test]
    fn non_real_beta_is_rejected() {
        struct Bad;
        impl Coefficients for Bad {
            fn c11(&self, _: Complex64) -> Result<Complex64> {
                Ok(c(0.0, 0.0))
            }
            fn c12(&self, _: Complex64) -> Result<Complex64> {
                Ok(c(-0.5, -0.5))
            }
        }
        impl SpectralDataProvider for Bad {
            fn eigenvalues(&self) -> &[SpectralPoint] {
                &[]
            }
        }
        // i(2C12 + 1) = i(-i) = 1 is fine; shift C12 off the real line
        assert!((recover_beta(&Bad).unwrap().beta - 1.0).abs() < 1e-15);
        struct Worse;
        impl Coefficients for Worse {
            fn c11(&self, _: Complex64) -> Result<Complex64> {
                Ok(c(0.0, 0.0))
            }
            fn c12(&self, _: Complex64) -> Result<Complex64> {
                Ok(c(-0.4, -0.5))
            }
        }
        impl SpectralDataProvider for Worse {
            fn eigenvalues(&self) -> &[SpectralPoint] {
                &[]
            }
        }
        assert!(matches!(recover_beta(&Worse), Err(Error::NonRealBeta(_))));
    }

    #[test]
    fn empty_samples() {
        let s = SampledProvider::new(vec![], vec![]).unwrap();
        assert!(matches!(
            s.c12(c(1.0, 1.0)),
            Err(Error::InsufficientSamples { found: 0, .. })
        ));
        assert!(matches!(recover_beta(&s), Err(Error::NoData)));
    }

    #[test]
    fn rational_samples_are_reproduced() {
        // exactly of the fitted form, so the fit is exact up to roundoff
        let f = |l: Complex64| (c(0.5, 0.2) + c(1.0, -0.3) * l) / (1.0 + c(0.1, 0.4) * l);
        let mut samples = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                let lam = c(1.0 + 0.05 * i as f64, 1.0 + 0.05 * j as f64);
                samples.push(Sample {
                    lam,
                    c11: f(lam),
                    c12: f(lam),
                });
            }
        }
        let s = SampledProvider::new(samples, vec![]).unwrap();
        let q = c(1.333, 1.517);
        assert!(close(s.c12(q).unwrap(), f(q), 1e-12));
        assert_eq!(s.c11(c(1.05, 1.1)).unwrap(), f(c(1.05, 1.1)));
    }

    #[test]
    fn reconstructs_free_operator() {
        let prov = analytic(1.5, vec![]);
        let r = reconstruct(&prov, 3, 30).unwrap();
        assert!((r.beta - 1.5).abs() < 1e-10);
        assert!(r.q.iter().all(|q| q.norm() < 1e-10));
    }

    #[test]
    fn reconstructs_single_harmonic() {
        let prov = analytic(1.0, vec![c(1.0, 0.0)]);
        let r = reconstruct(&prov, 3, 30).unwrap();
        assert!((r.beta - 1.0).abs() < 1e-6);
        assert!(close(r.q[0], c(1.0, 0.0), 1e-6));
        assert!(r.q[1].norm() < 1e-6 && r.q[2].norm() < 1e-6);
        assert!(r.diagnostics.row_recurrence_residual < 1e-9);
    }

    #[test]
    fn rejects_bad_orders() {
        let prov = analytic(1.0, vec![]);
        assert!(reconstruct(&prov, 0, 30).is_err());
        assert!(reconstruct(&prov, 31, 30).is_err());
    }
}
