//! Forward and inverse spectral analysis for the indefinite Sturm–Liouville
//! problem
//!
//! ```text
//! -y''(x) + q(x) y(x) = λ² ρ(x) y(x),   q(x) = Σ_{n≥1} q_n e^{inx},
//! ρ(x) = 1 for x ≥ 0,  ρ(x) = -β² for x < 0.
//! ```
//!
//! The forward direction goes potential → coefficient table ([`coeffs`]) →
//! fundamental solutions ([`solutions`]) → connection coefficients
//! ([`scattering`]) → eigenvalues, singularities and resolvent kernels
//! ([`spectrum`]). The inverse direction ([`inverse`]) recovers `β` and the
//! Fourier coefficients `q_n` from the eigenvalues together with the
//! coefficient functions `C11(λ)` and `C12(λ)`.
//!
//! ```
//! use num_complex::Complex64;
//! use spectral_sl::coeffs::{forward_vtable, FourierPotential};
//! use spectral_sl::scattering::connection_coefficients;
//!
//! let p = FourierPotential::new(1.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
//! let table = forward_vtable(&p, 30);
//! let c = connection_coefficients(&table, p.beta(), Complex64::new(2.0, 2.0)).unwrap();
//! assert!(c.c11.is_finite() && c.c12.is_finite());
//! ```

pub mod cli;
pub mod coeffs;
pub mod contour;
pub mod error;
pub mod formats;
pub mod inverse;
pub mod limits;
pub mod scattering;
pub mod solutions;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default truncation order of the coefficient table.
pub const DEFAULT_ORDER: usize = 30;

/// Distance to a pole of the series representation below which evaluation
/// is refused.
pub const POLE_TOL: f64 = 1e-6;
