//! Sectors, eigenvalues, spectral singularities and resolvent kernels.
//!
//! The plane is split into the open quadrants `S_k = {kπ/2 < arg λ < (k+1)π/2}`.
//! In each sector the resolvent is built from the pair of solutions that
//! decay on the respective half-lines, and its eigenvalues are the zeros of
//! one coefficient function:
//!
//! | sector | kernel pair      | coefficient |
//! |--------|------------------|-------------|
//! | `S0`   | `(f1+, f2+)`     | `C12(λ)`    |
//! | `S1`   | `(f1+, f2-)`     | `C11(-λ)`   |
//! | `S2`   | `(f1-, f2-)`     | `C12(-λ)`   |
//! | `S3`   | `(f1-, f2+)`     | `C11(λ)`    |

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::VTable;
use crate::contour::{find_zeros, Rect, ZeroSearchOptions};
use crate::error::{Error, Result};
use crate::scattering::{self, wronskian};
use crate::solutions::{FundamentalSystem, Solution};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this modulus of the sector coefficient λ counts as an eigenvalue.
pub const SPECTRUM_TOL: f64 = 1e-8;

/// Smallest distance from the axes allowed for an eigenvalue search box.
pub const AXIS_MARGIN: f64 = 0.1;

/// Default search box in sector coordinates.
pub const DEFAULT_BOX: Rect = Rect {
    re_min: 0.1,
    re_max: 10.0,
    im_min: 0.1,
    im_max: 10.0,
};

pub const CONTINUOUS_SPECTRUM: &str = "axes Re λ = 0 and Im λ = 0";

/// Open quadrant `S_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Sector(u8);

impl Sector {
    pub const S0: Sector = Sector(0);
    pub const S1: Sector = Sector(1);
    pub const S2: Sector = Sector(2);
    pub const S3: Sector = Sector(3);
    pub const ALL: [Sector; 4] = [Self::S0, Self::S1, Self::S2, Self::S3];

    pub fn new(k: u8) -> Result<Self> {
        if k < 4 {
            Ok(Sector(k))
        } else {
            Err(Error::InvalidInput(format!(
                "sector index {k} outside 0..=3"
            )))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Sector containing `λ`, or `None` on the axes.
    pub fn of(lam: Complex64) -> Option<Self> {
        match (lam.re.partial_cmp(&0.0)?, lam.im.partial_cmp(&0.0)?) {
            (std::cmp::Ordering::Greater, std::cmp::Ordering::Greater) => Some(Self::S0),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Greater) => Some(Self::S1),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Less) => Some(Self::S2),
            (std::cmp::Ordering::Greater, std::cmp::Ordering::Less) => Some(Self::S3),
            _ => None,
        }
    }

    /// `i^k`, which maps the first quadrant onto this sector.
    pub fn rotation(self) -> Complex64 {
        I.powu(self.0 as u32)
    }

    /// λ for the point `z` given in sector coordinates.
    pub fn to_plane(self, z: Complex64) -> Complex64 {
        self.rotation() * z
    }

    pub fn from_plane(self, lam: Complex64) -> Complex64 {
        lam / self.rotation()
    }

    /// The opposite sector, `S_{k+2}`.
    pub fn opposite(self) -> Self {
        Sector((self.0 + 2) % 4)
    }

    /// Solutions used for the resolvent: `(decaying on x ≥ 0, decaying on x < 0)`.
    pub fn kernel_pair(self) -> (Solution, Solution) {
        match self.0 {
            0 => (Solution::F1Plus, Solution::F2Plus),
            1 => (Solution::F1Plus, Solution::F2Minus),
            2 => (Solution::F1Minus, Solution::F2Minus),
            _ => (Solution::F1Minus, Solution::F2Plus),
        }
    }
}

impl TryFrom<u8> for Sector {
    type Error = Error;
    fn try_from(k: u8) -> Result<Self> {
        Sector::new(k)
    }
}

impl From<Sector> for u8 {
    fn from(s: Sector) -> u8 {
        s.0
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

/// Source of the coefficient functions `C11(λ)` and `C12(λ)`.
pub trait Coefficients: Sync {
    fn c11(&self, lam: Complex64) -> Result<Complex64>;
    fn c12(&self, lam: Complex64) -> Result<Complex64>;

    /// The function whose zeros are the eigenvalues in `sector`.
    fn sector_coefficient(&self, sector: Sector, lam: Complex64) -> Result<Complex64> {
        match sector.index() {
            0 => self.c12(lam),
            1 => self.c11(-lam),
            2 => self.c12(-lam),
            _ => self.c11(lam),
        }
    }
}

/// Coefficients computed from a table and `β`.
#[derive(Debug, Clone, Copy)]
pub struct TableCoefficients<'a> {
    pub table: &'a VTable,
    pub beta: f64,
}

impl<'a> TableCoefficients<'a> {
    pub fn new(table: &'a VTable, beta: f64) -> Self {
        Self { table, beta }
    }
}

impl Coefficients for TableCoefficients<'_> {
    fn c11(&self, lam: Complex64) -> Result<Complex64> {
        scattering::c11(self.table, self.beta, lam)
    }

    fn c12(&self, lam: Complex64) -> Result<Complex64> {
        scattering::c12(self.table, self.beta, lam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lam: Complex64,
    pub sector: Sector,
    pub multiplicity: usize,
    /// Sector coefficient at the polished root.
    pub coefficient_value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Real,
    Imaginary,
}

/// Candidate spectral singularity `n/2` or `in/(2β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub axis: Axis,
    pub n: i64,
    pub lam: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Eigenvalue>,
    pub singularities: Vec<Singularity>,
    pub continuous_spectrum: String,
}

/// Real candidates `n/2` and imaginary candidates `in/(2β)` for
/// `1 ≤ |n| ≤ n_max`, each list in increasing `n`.
pub fn spectral_singularities(beta: f64, n_max: usize) -> Vec<Singularity> {
    let ns: Vec<i64> = (-(n_max as i64)..=n_max as i64)
        .filter(|&n| n != 0)
        .collect();
    let real = ns.iter().map(|&n| Singularity {
        axis: Axis::Real,
        n,
        lam: Complex64::new(n as f64 / 2.0, 0.0),
    });
    let imag = ns.iter().map(|&n| Singularity {
        axis: Axis::Imaginary,
        n,
        lam: Complex64::new(0.0, n as f64 / (2.0 * beta)),
    });
    real.chain(imag).collect()
}

fn check_box(rect: &Rect) -> Result<()> {
    if rect.re_min < AXIS_MARGIN || rect.im_min < AXIS_MARGIN {
        return Err(Error::InvalidInput(format!(
            "search box {rect:?} must stay {AXIS_MARGIN} away from the axes"
        )));
    }
    Ok(())
}

/// Zeros of the sector coefficient inside `rect`, given in sector
/// coordinates (`λ = i^k z`), sorted by `(Re λ, Im λ)`.
pub fn find_eigenvalues_with<C: Coefficients + ?Sized>(
    coeffs: &C,
    sector: Sector,
    rect: &Rect,
    opts: &ZeroSearchOptions,
) -> Result<Vec<Eigenvalue>> {
    check_box(rect)?;
    let f = |z: Complex64| coeffs.sector_coefficient(sector, sector.to_plane(z));
    let mut out: Vec<Eigenvalue> = find_zeros(&f, rect, opts)?
        .into_iter()
        .map(|zero| Eigenvalue {
            lam: sector.to_plane(zero.z),
            sector,
            multiplicity: zero.multiplicity,
            coefficient_value: zero.value,
        })
        .collect();
    out.sort_by(|a, b| {
        a.lam
            .re
            .total_cmp(&b.lam.re)
            .then_with(|| a.lam.im.total_cmp(&b.lam.im))
    });
    Ok(out)
}

/// Eigenvalues of the operator built from `v` and `β` inside `rect`
/// (sector coordinates). `tol` is the Newton stopping tolerance.
pub fn find_eigenvalues(
    v: &VTable,
    beta: f64,
    sector: Sector,
    rect: &Rect,
    tol: f64,
) -> Result<Vec<Eigenvalue>> {
    let opts = ZeroSearchOptions {
        tol,
        ..Default::default()
    };
    find_eigenvalues_with(&TableCoefficients::new(v, beta), sector, rect, &opts)
}

/// Eigenvalues in all four sectors over the same box, plus singularities.
pub fn spectrum_report<C: Coefficients + ?Sized>(
    coeffs: &C,
    beta: f64,
    n_max: usize,
    rect: &Rect,
    opts: &ZeroSearchOptions,
) -> Result<SpectrumReport> {
    let per_sector: Vec<Vec<Eigenvalue>> = Sector::ALL
        .par_iter()
        .map(|&s| find_eigenvalues_with(coeffs, s, rect, opts))
        .collect::<Result<_>>()?;
    Ok(SpectrumReport {
        eigenvalues: per_sector.into_iter().flatten().collect(),
        singularities: spectral_singularities(beta, n_max),
        continuous_spectrum: CONTINUOUS_SPECTRUM.to_string(),
    })
}

/// Kernel of the sector formula evaluated at `λ`, regardless of which sector
/// `λ` lies in: `a(max(x,t)) b(min(x,t)) / W[a, b]` with `(a, b)` the
/// sector's kernel pair, both continued across `x = 0`.
pub fn sector_kernel(
    v: &VTable,
    beta: f64,
    sector: Sector,
    lam: Complex64,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let sys = FundamentalSystem::new(v, beta, lam);
    kernel_from_system(&sys, sector, x, t)
}

fn kernel_from_system(
    sys: &FundamentalSystem,
    sector: Sector,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let (a, b) = sector.kernel_pair();
    let (hi, lo) = if x >= t { (x, t) } else { (t, x) };
    let w = wronskian(
        &sys.extended(a, 0.0)?.sample(),
        &sys.extended(b, 0.0)?.sample(),
    );
    Ok(sys.extended(a, hi)?.value * sys.extended(b, lo)?.value / w)
}

/// Resolvent kernel `R(x, t, λ)` for `λ` in an open sector.
///
/// `R` is symmetric in `(x, t)`, continuous, and its `x`-derivative jumps by
/// `+1` across `x = t`, so that `∫ R(x,t) (Lφ)(x) dx = -φ(t)` for
/// `L = -d²/dx² + q - λ²ρ`.
pub fn resolvent_kernel(
    v: &VTable,
    beta: f64,
    lam: Complex64,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let sector = Sector::of(lam)
        .ok_or_else(|| Error::InvalidInput(format!("λ = {lam} lies on the continuous spectrum")))?;
    let coef = TableCoefficients::new(v, beta).sector_coefficient(sector, lam)?;
    if coef.norm() < SPECTRUM_TOL {
        return Err(Error::NearSpectrum {
            lam,
            value: coef.norm(),
        });
    }
    sector_kernel(v, beta, sector, lam, x, t)
}

/// Closed-form residue kernel at a singularity candidate:
/// `(2/(in)) V[n][n] f(x) f(t)` with `f = f1+(·, n/2)` on the real axis and
/// `f = f2+(·, in/(2β))` on the imaginary axis.
pub fn resolvent_residue(
    v: &VTable,
    beta: f64,
    n: usize,
    axis: Axis,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    if n == 0 || n > v.order() {
        return Err(Error::InvalidInput(format!(
            "residue index {n} outside 1..={}",
            v.order()
        )));
    }
    let vnn = v.get(n, n);
    if vnn == Complex64::new(0.0, 0.0) {
        return Ok(vnn);
    }
    let h = n as f64 / 2.0;
    let (lam, kind) = match axis {
        Axis::Real => (Complex64::new(h, 0.0), Solution::F1Plus),
        Axis::Imaginary => (Complex64::new(0.0, h / beta), Solution::F2Plus),
    };
    let sys = FundamentalSystem::new(v, beta, lam);
    let fx = sys.extended(kind, x)?.value;
    let ft = sys.extended(kind, t)?.value;
    Ok(2.0 / (I * n as f64) * vnn * fx * ft)
}
