//! C ABI for `spectral-sl`.
//!
//! An operator is created from `β` and the harmonics `q_1..q_N` and handed out
//! as an opaque `SslOperator*`. Every function returns an [`SslStatus`]; on
//! failure a description is available from [`ssl_last_error_message`] on the
//! same thread until the next call. Results go through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spectral_sl::coeffs::{forward_vtable, FourierPotential, VTable};
use spectral_sl::contour::{Rect, ZeroSearchOptions};
use spectral_sl::inverse::{reconstruct, AnalyticProvider};
use spectral_sl::scattering::connection_coefficients;
use spectral_sl::solutions::{FundamentalSystem, Solution};
use spectral_sl::spectrum::{find_eigenvalues, resolvent_kernel, Sector, DEFAULT_BOX};
use spectral_sl::{Complex64, Error};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    PoleProximity = 3,
    ZeroWavenumber = 4,
    ExtrapolationDivergence = 5,
    ContourThroughZero = 6,
    BudgetExceeded = 7,
    NearSpectrum = 8,
    NonRealBeta = 9,
    NoData = 10,
    InsufficientSamples = 11,
    Schema = 12,
    Io = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

impl From<&Error> for SslStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::PoleProximity { .. } => SslStatus::PoleProximity,
            Error::ZeroWavenumber(_) => SslStatus::ZeroWavenumber,
            Error::ExtrapolationDivergence { .. } => SslStatus::ExtrapolationDivergence,
            Error::ContourThroughZero(_) => SslStatus::ContourThroughZero,
            Error::BudgetExceeded(_) => SslStatus::BudgetExceeded,
            Error::NearSpectrum { .. } => SslStatus::NearSpectrum,
            Error::NonRealBeta(_) => SslStatus::NonRealBeta,
            Error::NoData => SslStatus::NoData,
            Error::InsufficientSamples { .. } => SslStatus::InsufficientSamples,
            Error::InvalidInput(_) => SslStatus::InvalidInput,
            Error::Schema(_) => SslStatus::Schema,
            Error::Io(_) => SslStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SslComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for SslComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<SslComplex> for Complex64 {
    fn from(c: SslComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Value, derivative and truncation bound of a solution at one point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SslSolutionSample {
    pub value: SslComplex,
    pub derivative: SslComplex,
    pub truncation_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SslConnection {
    pub c11: SslComplex,
    pub c12: SslComplex,
    pub c21: SslComplex,
    pub c22: SslComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SslEigenvalue {
    pub lam: SslComplex,
    /// Sector index 0..=3.
    pub sector: u8,
    pub multiplicity: usize,
}

/// Solution selector for [`ssl_eval_solution`].
pub const SSL_F1_PLUS: u32 = 0;
pub const SSL_F1_MINUS: u32 = 1;
pub const SSL_F2_PLUS: u32 = 2;
pub const SSL_F2_MINUS: u32 = 3;

/// Opaque operator handle.
pub struct SslOperator {
    potential: FourierPotential,
    table: VTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> SslStatus {
    set_error(&e.to_string());
    SslStatus::from(&e)
}

fn guard(f: impl FnOnce() -> SslStatus) -> SslStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SslStatus::Panic
        }
    }
}

fn null(what: &str) -> SslStatus {
    set_error(&format!("{what} is null"));
    SslStatus::NullPointer
}

/// Message describing the last failure on this thread; empty after a
/// successful call. The pointer stays valid until the next call on the same
/// thread.
#[no_mangle]
pub extern "C" fn ssl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates an operator from `β > 0`, `len` harmonics `q[0] = q_1, …` and the
/// table order `order ≥ 1`.
///
/// # Safety
/// `q` must point to `len` values (or may be null when `len == 0`); `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_operator_new(
    beta: f64,
    q: *const SslComplex,
    len: usize,
    order: usize,
    out: *mut *mut SslOperator,
) -> SslStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if q.is_null() && len > 0 {
            return null("q");
        }
        if order == 0 {
            return fail(Error::InvalidInput("order must be at least 1".into()));
        }
        let harmonics: Vec<Complex64> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(q, len)
                .iter()
                .map(|&c| c.into())
                .collect()
        };
        let potential = match FourierPotential::new(beta, harmonics) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let table = forward_vtable(&potential, order);
        *out = Box::into_raw(Box::new(SslOperator { potential, table }));
        SslStatus::Ok
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must come from [`ssl_operator_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ssl_operator_free(op: *mut SslOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_operator_order(op: *const SslOperator, out: *mut usize) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), out.is_null()) else {
            return null("argument");
        };
        *out = op.table.order();
        SslStatus::Ok
    })
}

/// `V[n][α]` for `1 ≤ n ≤ α ≤ order`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_vtable_entry(
    op: *const SslOperator,
    n: usize,
    alpha: usize,
    out: *mut SslComplex,
) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), out.is_null()) else {
            return null("argument");
        };
        if n == 0 || n > alpha || alpha > op.table.order() {
            return fail(Error::InvalidInput(format!(
                "entry ({n}, {alpha}) outside the table of order {}",
                op.table.order()
            )));
        }
        *out = op.table.get(n, alpha).into();
        SslStatus::Ok
    })
}

/// One of `f1+`, `f1-`, `f2+`, `f2-` (see the `SSL_F*` constants), continued
/// across `x = 0`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_eval_solution(
    op: *const SslOperator,
    which: u32,
    lam: SslComplex,
    x: f64,
    out: *mut SslSolutionSample,
) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), out.is_null()) else {
            return null("argument");
        };
        let kind = match which {
            SSL_F1_PLUS => Solution::F1Plus,
            SSL_F1_MINUS => Solution::F1Minus,
            SSL_F2_PLUS => Solution::F2Plus,
            SSL_F2_MINUS => Solution::F2Minus,
            _ => return fail(Error::InvalidInput(format!("unknown solution {which}"))),
        };
        if !x.is_finite() {
            return fail(Error::InvalidInput(format!("x = {x} is not finite")));
        }
        let sys = FundamentalSystem::new(&op.table, op.potential.beta(), lam.into());
        match sys.extended(kind, x) {
            Ok(jet) => {
                let s = jet.sample();
                *out = SslSolutionSample {
                    value: s.value.into(),
                    derivative: s.derivative.into(),
                    truncation_error: s.truncation_error,
                };
                SslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `C11, C12, C21, C22` at `λ`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_connection_coefficients(
    op: *const SslOperator,
    lam: SslComplex,
    out: *mut SslConnection,
) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), out.is_null()) else {
            return null("argument");
        };
        match connection_coefficients(&op.table, op.potential.beta(), lam.into()) {
            Ok(c) => {
                *out = SslConnection {
                    c11: c.c11.into(),
                    c12: c.c12.into(),
                    c21: c.c21.into(),
                    c22: c.c22.into(),
                };
                SslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Eigenvalues in `sector` (0..=3) inside the box given in sector
/// coordinates. All of them are counted in `*count`; at most `capacity` are
/// written to `buf`, and [`SslStatus::BufferTooSmall`] is returned when that
/// is not enough. `buf` may be null when `capacity == 0`.
///
/// # Safety
/// `op` must be a live handle, `buf` must have room for `capacity` values and
/// `count` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ssl_find_eigenvalues(
    op: *const SslOperator,
    sector: u8,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    tol: f64,
    buf: *mut SslEigenvalue,
    capacity: usize,
    count: *mut usize,
) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), count.is_null()) else {
            return null("argument");
        };
        if buf.is_null() && capacity > 0 {
            return null("buf");
        }
        let found = Sector::new(sector)
            .and_then(|s| Ok((s, Rect::new(re_min, re_max, im_min, im_max)?)))
            .and_then(|(s, r)| find_eigenvalues(&op.table, op.potential.beta(), s, &r, tol));
        let found = match found {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        *count = found.len();
        for (k, e) in found.iter().take(capacity).enumerate() {
            *buf.add(k) = SslEigenvalue {
                lam: e.lam.into(),
                sector: e.sector.index(),
                multiplicity: e.multiplicity,
            };
        }
        if found.len() > capacity {
            set_error(&format!("{} eigenvalues, room for {capacity}", found.len()));
            return SslStatus::BufferTooSmall;
        }
        SslStatus::Ok
    })
}

/// Resolvent kernel `R(x, t, λ)` for `λ` off the axes and the spectrum.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssl_resolvent_kernel(
    op: *const SslOperator,
    lam: SslComplex,
    x: f64,
    t: f64,
    out: *mut SslComplex,
) -> SslStatus {
    guard(|| {
        let (Some(op), false) = (op.as_ref(), out.is_null()) else {
            return null("argument");
        };
        match resolvent_kernel(&op.table, op.potential.beta(), lam.into(), x, t) {
            Ok(r) => {
                *out = r.into();
                SslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the inverse procedure on the operator's own spectral data and writes
/// the recovered `β` and `q_1..q_{n_max}` (`q_out` needs room for `n_max`
/// values).
///
/// # Safety
/// `op` must be a live handle, `beta_out` writable and `q_out` must have
/// room for `n_max` values.
#[no_mangle]
pub unsafe extern "C" fn ssl_reconstruct(
    op: *const SslOperator,
    n_max: usize,
    beta_out: *mut f64,
    q_out: *mut SslComplex,
) -> SslStatus {
    guard(|| {
        let Some(op) = op.as_ref() else {
            return null("op");
        };
        if beta_out.is_null() || q_out.is_null() {
            return null("output");
        }
        let result = AnalyticProvider::new(
            &op.potential,
            op.table.order(),
            &DEFAULT_BOX,
            &ZeroSearchOptions::default(),
        )
        .and_then(|prov| reconstruct(&prov, n_max, op.table.order()));
        match result {
            Ok(r) => {
                *beta_out = r.beta;
                for (k, q) in r.q.iter().enumerate() {
                    *q_out.add(k) = (*q).into();
                }
                SslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ssl_status_name(status: SslStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        SslStatus::Ok => b"ok\0",
        SslStatus::NullPointer => b"null pointer\0",
        SslStatus::InvalidInput => b"invalid input\0",
        SslStatus::PoleProximity => b"pole proximity\0",
        SslStatus::ZeroWavenumber => b"zero wavenumber\0",
        SslStatus::ExtrapolationDivergence => b"extrapolation divergence\0",
        SslStatus::ContourThroughZero => b"contour through zero\0",
        SslStatus::BudgetExceeded => b"budget exceeded\0",
        SslStatus::NearSpectrum => b"near spectrum\0",
        SslStatus::NonRealBeta => b"non-real beta\0",
        SslStatus::NoData => b"no data\0",
        SslStatus::InsufficientSamples => b"insufficient samples\0",
        SslStatus::Schema => b"schema\0",
        SslStatus::Io => b"io\0",
        SslStatus::BufferTooSmall => b"buffer too small\0",
        SslStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}
