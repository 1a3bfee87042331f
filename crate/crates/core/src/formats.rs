//! File formats.
//!
//! Potential:
//!
//! ```text
//! {"beta": 1.0, "q": [[re, im], ...]}          // q[i] holds q_{i+1}
//! ```
//!
//! Spectral data:
//!
//! ```text
//! {"eigenvalues": [{"re": .., "im": .., "sector": k, "multiplicity": m}, ...],
//!  "samples":     [{"re": .., "im": .., "c11": [re, im], "c12": [re, im]}, ...],
//!  "meta":        {"beta_hint": null | β, "n_max": .., "A": ..}}
//! ```
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`. Complex numbers elsewhere (spectrum reports, reconstructions) are
//! `[re, im]` pairs.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::FourierPotential;
use crate::error::{Error, Result};
use crate::inverse::{sort_points, Sample, SampledProvider, SpectralPoint};
use crate::spectrum::Sector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub beta: f64,
    pub q: Vec<[f64; 2]>,
}

impl From<&FourierPotential> for PotentialFile {
    fn from(p: &FourierPotential) -> Self {
        Self {
            beta: p.beta(),
            q: p.harmonics().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<PotentialFile> for FourierPotential {
    type Error = Error;
    fn try_from(f: PotentialFile) -> Result<Self> {
        let q = f.q.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        FourierPotential::new(f.beta, q).map_err(|e| Error::Schema(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenvalueRecord {
    pub re: f64,
    pub im: f64,
    pub sector: u8,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub re: f64,
    pub im: f64,
    pub c11: [f64; 2],
    pub c12: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default)]
    pub beta_hint: Option<f64>,
    pub n_max: usize,
    #[serde(rename = "A")]
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDataFile {
    pub eigenvalues: Vec<EigenvalueRecord>,
    pub samples: Vec<SampleRecord>,
    pub meta: Meta,
}

impl SpectralDataFile {
    pub fn new(eigenvalues: &[SpectralPoint], samples: &[Sample], meta: Meta) -> Self {
        Self {
            eigenvalues: eigenvalues
                .iter()
                .map(|e| EigenvalueRecord {
                    re: e.lam.re,
                    im: e.lam.im,
                    sector: e.sector.index(),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            samples: samples
                .iter()
                .map(|s| SampleRecord {
                    re: s.lam.re,
                    im: s.lam.im,
                    c11: [s.c11.re, s.c11.im],
                    c12: [s.c12.re, s.c12.im],
                })
                .collect(),
            meta,
        }
    }

    /// Checks the invariants a parsed file must satisfy beyond its shape.
    pub fn validate(&self) -> Result<()> {
        let m = &self.meta;
        if m.n_max == 0 || m.n_max > m.order {
            return Err(Error::Schema(format!(
                "meta needs 1 ≤ n_max ≤ A, got n_max = {}, A = {}",
                m.n_max, m.order
            )));
        }
        if let Some(b) = m.beta_hint {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Schema(format!(
                    "beta_hint {b} is not a positive number"
                )));
            }
        }
        for (k, e) in self.eigenvalues.iter().enumerate() {
            let lam = Complex64::new(e.re, e.im);
            let sector = Sector::new(e.sector).map_err(|err| Error::Schema(err.to_string()))?;
            if Sector::of(lam) != Some(sector) {
                return Err(Error::Schema(format!(
                    "eigenvalue {k} at {lam} does not lie in sector {}",
                    e.sector
                )));
            }
            if e.multiplicity == 0 {
                return Err(Error::Schema(format!("eigenvalue {k} has multiplicity 0")));
            }
        }
        Ok(())
    }

    pub fn eigenvalue_points(&self) -> Result<Vec<SpectralPoint>> {
        self.validate()?;
        let mut pts: Vec<SpectralPoint> = self
            .eigenvalues
            .iter()
            .map(|e| {
                Ok(SpectralPoint {
                    lam: Complex64::new(e.re, e.im),
                    sector: Sector::new(e.sector)?,
                    multiplicity: e.multiplicity,
                })
            })
            .collect::<Result<_>>()?;
        sort_points(&mut pts);
        Ok(pts)
    }

    pub fn samples(&self) -> Vec<Sample> {
        self.samples
            .iter()
            .map(|s| Sample {
                lam: Complex64::new(s.re, s.im),
                c11: Complex64::new(s.c11[0], s.c11[1]),
                c12: Complex64::new(s.c12[0], s.c12[1]),
            })
            .collect()
    }

    /// Provider interpolating the samples.
    pub fn provider(&self) -> Result<SampledProvider> {
        SampledProvider::new(self.samples(), self.eigenvalue_points()?)
    }
}

/// Parses JSON text, reporting shape errors as [`Error::Schema`].
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_potential(path: &Path) -> Result<FourierPotential> {
    let text = std::fs::read_to_string(path)?;
    from_json::<PotentialFile>(&text)?.try_into()
}

pub fn read_spectral_data(path: &Path) -> Result<SpectralDataFile> {
    let text = std::fs::read_to_string(path)?;
    let file: SpectralDataFile = from_json(&text)?;
    file.validate()?;
    Ok(file)
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
