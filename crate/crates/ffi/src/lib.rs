//! C ABI over `jacobi-spectra`.
//!
//! Instances and spectra are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every entry point returns a
//! [`PjStatus`]; on failure a message is kept per thread and can be copied
//! out with [`pj_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jacobi_spectra::bands::Spectrum;
use jacobi_spectra::{
    band_edges_by_bisection, band_structure, check_estimates, discriminant, dispersion, Error, InequalityId,
    PeriodicJacobi,
};

/// Status code returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInstance = 3,
    OutOfRange = 4,
    NoConvergence = 5,
    RootCountMismatch = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Inequality identifiers, in the order used by [`PjEstimates`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PjInequality {
    Rad = 0,
    Mes = 1,
    Mes1 = 2,
    Est = 3,
    Est2 = 4,
    Est4 = 5,
    Estb = 6,
    Estc = 7,
}

pub const PJ_INEQUALITY_COUNT: usize = 8;

/// Opaque instance handle.
pub struct PjInstance(PeriodicJacobi);

/// Opaque band structure handle.
pub struct PjSpectrum(Spectrum);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PjSummary {
    pub period: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub radius_r: f64,
    pub band_measure: f64,
    pub gap_measure: f64,
}

/// Right-hand sides and slacks indexed by [`PjInequality`]. Bit `i` of
/// `violated_mask` is set when inequality `i` fails at the tolerance used.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PjEstimates {
    pub rhs: [f64; PJ_INEQUALITY_COUNT],
    pub slack: [f64; PJ_INEQUALITY_COUNT],
    pub violated_mask: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: PjStatus, msg: impl Into<String>) -> PjStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> PjStatus {
    match e {
        Error::LengthMismatch { .. }
        | Error::PeriodTooSmall(_)
        | Error::NonPositiveCoupling { .. }
        | Error::NonFinite { .. }
        | Error::Json(_) => PjStatus::InvalidInstance,
        Error::NoConvergence { .. } => PjStatus::NoConvergence,
        Error::RootCountMismatch { .. } => PjStatus::RootCountMismatch,
        Error::BandIndexOutOfRange { .. } | Error::MomentumOutOfRange(_) | Error::IndexOutOfRange { .. } => {
            PjStatus::OutOfRange
        }
        _ => PjStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), PjStatus>) -> PjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PjStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PjStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

trait Check<T> {
    fn check(self) -> Result<T, PjStatus>;
}

impl<T> Check<T> for jacobi_spectra::Result<T> {
    fn check(self) -> Result<T, PjStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, PjStatus> {
    p.as_ref().ok_or_else(|| fail(PjStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, PjStatus> {
    p.as_mut().ok_or_else(|| fail(PjStatus::NullPointer, format!("{name} is null")))
}

unsafe fn fill(out: *mut f64, len: usize, values: &[f64]) -> Result<(), PjStatus> {
    if len < values.len() {
        return Err(fail(
            PjStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", values.len()),
        ));
    }
    if out.is_null() {
        return Err(fail(PjStatus::NullPointer, "out is null"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn inequality_index(id: InequalityId) -> usize {
    InequalityId::ALL.iter().position(|x| *x == id).expect("listed")
}

/// Creates an instance from `p` couplings `a` and `p` diagonal entries `b`.
///
/// # Safety
/// `a` and `b` must point to `p` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_instance_new(
    a: *const f64,
    b: *const f64,
    p: usize,
    out: *mut *mut PjInstance,
) -> PjStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if a.is_null() || b.is_null() {
            return Err(fail(PjStatus::NullPointer, "a or b is null"));
        }
        let a = std::slice::from_raw_parts(a, p).to_vec();
        let b = std::slice::from_raw_parts(b, p).to_vec();
        let j = PeriodicJacobi::new(a, b).check()?;
        *out = Box::into_raw(Box::new(PjInstance(j)));
        Ok(())
    })
}

/// Creates an instance from a NUL-terminated JSON text `{"a": [...], "b": [...]}`.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_instance_from_json(json: *const c_char, out: *mut *mut PjInstance) -> PjStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(fail(PjStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(PjStatus::InvalidArgument, "json is not UTF-8"))?;
        let j = PeriodicJacobi::from_json(text).check()?;
        *out = Box::into_raw(Box::new(PjInstance(j)));
        Ok(())
    })
}

/// Member `c` of the weak-bond family of period `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_theorem1_instance(p: usize, c: f64, out: *mut *mut PjInstance) -> PjStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let j = jacobi_spectra::theorem1_instance(p, c).check()?;
        *out = Box::into_raw(Box::new(PjInstance(j)));
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pj_instance_free(inst: *mut PjInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_instance_period(inst: *const PjInstance, out: *mut usize) -> PjStatus {
    guard(|| {
        *out_ptr(out, "out")? = deref(inst, "inst")?.0.period();
        Ok(())
    })
}

/// `Delta(lambda)`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_discriminant(inst: *const PjInstance, lambda: f64, out: *mut f64) -> PjStatus {
    guard(|| {
        let j = &deref(inst, "inst")?.0;
        if !lambda.is_finite() {
            return Err(fail(PjStatus::InvalidArgument, "lambda is not finite"));
        }
        *out_ptr(out, "out")? = discriminant(j, lambda);
        Ok(())
    })
}

/// `lambda_band(k)` for `band` in `1..=p` and `k` in `[0, pi]`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_dispersion(
    inst: *const PjInstance,
    band: usize,
    k: f64,
    out: *mut f64,
) -> PjStatus {
    guard(|| {
        let j = &deref(inst, "inst")?.0;
        *out_ptr(out, "out")? = dispersion(j, band, k).check()?;
        Ok(())
    })
}

/// The `2p` band edges from the bisection route, ascending.
///
/// # Safety
/// `inst` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pj_band_edges_by_bisection(
    inst: *const PjInstance,
    out: *mut f64,
    len: usize,
) -> PjStatus {
    guard(|| {
        let edges = band_edges_by_bisection(&deref(inst, "inst")?.0).check()?;
        fill(out, len, &edges)
    })
}

/// Computes the band structure from the Floquet eigenvalues.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_band_structure(inst: *const PjInstance, out: *mut *mut PjSpectrum) -> PjStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = band_structure(&deref(inst, "inst")?.0).check()?;
        *out = Box::into_raw(Box::new(PjSpectrum(s)));
        Ok(())
    })
}

/// Releases a spectrum. Null is ignored.
///
/// # Safety
/// `spec` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pj_spectrum_free(spec: *mut PjSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_spectrum_summary(spec: *const PjSpectrum, out: *mut PjSummary) -> PjStatus {
    guard(|| {
        let s = &deref(spec, "spec")?.0;
        let m = &s.summary;
        *out_ptr(out, "out")? = PjSummary {
            period: s.period(),
            lambda_min: m.lambda_min,
            lambda_max: m.lambda_max,
            radius_r: m.radius_r,
            band_measure: m.band_measure,
            gap_measure: m.gap_measure,
        };
        Ok(())
    })
}

/// The `2p` merged edges `lo_1, hi_1, ..., lo_p, hi_p`.
///
/// # Safety
/// `spec` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pj_spectrum_edges(spec: *const PjSpectrum, out: *mut f64, len: usize) -> PjStatus {
    guard(|| fill(out, len, &deref(spec, "spec")?.0.edges()))
}

/// The `p - 1` gap lengths, ascending in position.
///
/// # Safety
/// `spec` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pj_spectrum_gap_lengths(
    spec: *const PjSpectrum,
    out: *mut f64,
    len: usize,
) -> PjStatus {
    guard(|| {
        let lengths: Vec<f64> = deref(spec, "spec")?.0.gaps.iter().map(|g| g.length).collect();
        fill(out, len, &lengths)
    })
}

/// Evaluates every inequality on `inst` with relative tolerance `rel_tol`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_check_estimates(
    inst: *const PjInstance,
    rel_tol: f64,
    out: *mut PjEstimates,
) -> PjStatus {
    guard(|| {
        let j = &deref(inst, "inst")?.0;
        if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
            return Err(fail(PjStatus::InvalidArgument, "rel_tol must be finite and nonnegative"));
        }
        let s = band_structure(j).check()?;
        let report = check_estimates(j, &s, rel_tol);
        let mut e = PjEstimates::default();
        for c in &report.checks {
            let i = inequality_index(c.id);
            e.rhs[i] = c.rhs;
            e.slack[i] = c.slack;
            if !c.holds {
                e.violated_mask |= 1 << i;
            }
        }
        *out_ptr(out, "out")? = e;
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns its full length in
/// bytes, excluding the terminator. Empty after a successful call.
///
/// # Safety
/// `buf` must hold `len` bytes, or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn pj_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
