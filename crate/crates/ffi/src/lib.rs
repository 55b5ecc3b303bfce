//! C ABI over the `gelfond` library.
//!
//! Every fallible call returns a [`GelfondStatus`] and writes its result through an
//! out-pointer. The message of the most recent failure on the calling thread is
//! available from [`gelfond_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gelfond::error::Error;
use gelfond::pipeline::{build_schedule, error_budget, find_nu0, violations, ParameterSchedule, Rational};

/// Result codes shared by every function of this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GelfondStatus {
    Ok = 0,
    InvalidArgument = 1,
    GuardExceeded = 2,
    PropertyViolation = 3,
    Infeasible = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque parameter schedule; create with [`gelfond_schedule_new`], release with
/// [`gelfond_schedule_free`].
pub struct GelfondSchedule {
    inner: ParameterSchedule,
}

/// Integer fields readable through [`gelfond_schedule_get`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GelfondScheduleField {
    Nu = 0,
    Lambda = 1,
    Rho = 2,
    U = 3,
    Tau = 4,
    Zeta = 5,
    Omega = 6,
    Eta0 = 7,
    Eta1 = 8,
    Kappa = 9,
    Delta = 10,
    BigL = 11,
    C = 12,
    Mu = 13,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GelfondStatus {
    match e {
        Error::GuardExceeded(_) => GelfondStatus::GuardExceeded,
        Error::PropertyViolation(_) => GelfondStatus::PropertyViolation,
        Error::Infeasible(_) => GelfondStatus::Infeasible,
        _ => GelfondStatus::InvalidArgument,
    }
}

/// Runs `f`, writing its value to `out`; errors and panics become status codes.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> gelfond::Result<T>) -> GelfondStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return GelfondStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: `out` is non-null and the caller guarantees it is writable.
            unsafe { out.write(v) };
            GelfondStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            GelfondStatus::Panic
        }
    }
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to `len`) and
/// returns the full message length without the terminator; 0 when there is none.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: caller guarantees `len` writable bytes at `buf`; `n < len`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Base-`q` digit sum of `n`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_digit_sum(n: u64, q: u64, out: *mut u64) -> GelfondStatus {
    guarded(out, || gelfond::digits::digit_sum(&n, q))
}

/// `t(n³)`, the Thue–Morse symbol of the cube of `n`.
#[no_mangle]
pub extern "C" fn gelfond_thue_morse_cube(n: u64) -> u8 {
    gelfond::digits::thue_morse_along(gelfond::digits::Poly::Cube, n)
}

/// `#{n < x : t(n³) = 0}`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_count_cube_zeros(x: u64, out: *mut u64) -> GelfondStatus {
    guarded(out, || {
        if x > 1 << 40 {
            return Err(Error::GuardExceeded("x above 2^40".into()));
        }
        Ok(gelfond::digits::count_tm_cube_zeros(x))
    })
}

/// `S₀(ν, ξ)` as real and imaginary parts in `out[0]`, `out[1]`.
///
/// # Safety
/// `out` must be NULL or valid for writing two doubles.
#[no_mangle]
pub unsafe extern "C" fn gelfond_s0(nu: u32, xi: f64, out: *mut [f64; 2]) -> GelfondStatus {
    guarded(out, || gelfond::correlations::s0(nu, xi).map(|z| [z.re, z.im]))
}

/// `‖t‖_{U^Q(ℤ/2^ρℤ)}^{2^Q}`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_gowers_norm(rho: u32, q: u32, out: *mut f64) -> GelfondStatus {
    guarded(out, || gelfond::correlations::gowers_norm(rho, q))
}

/// Builds the schedule for driver `nu` and `Ξ = xi_num/xi_den`.
///
/// # Safety
/// `out` must be NULL or valid for writes. The handle written there is owned by the
/// caller and must be released with [`gelfond_schedule_free`].
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_new(
    nu: u64,
    xi_num: u64,
    xi_den: u64,
    out: *mut *mut GelfondSchedule,
) -> GelfondStatus {
    guarded(out, || {
        let s = build_schedule(nu, Rational::new(xi_num, xi_den)?)?;
        Ok(Box::into_raw(Box::new(GelfondSchedule { inner: s })))
    })
}

/// Releases a schedule; NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or a pointer from [`gelfond_schedule_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_free(handle: *mut GelfondSchedule) {
    if !handle.is_null() {
        // SAFETY: the caller passes ownership of a pointer created by `Box::into_raw`.
        drop(unsafe { Box::from_raw(handle) });
    }
}

fn with_schedule<T>(
    handle: *const GelfondSchedule,
    out: *mut T,
    f: impl FnOnce(&ParameterSchedule) -> gelfond::Result<T>,
) -> GelfondStatus {
    if handle.is_null() {
        set_error("null schedule handle".into());
        return GelfondStatus::NullPointer;
    }
    // SAFETY: non-null handles come from `gelfond_schedule_new` per the callers' contract.
    let s = unsafe { &(*handle).inner };
    guarded(out, || f(s))
}

/// Reads one integer field; `BigL` fails with `GELFOND_STATUS_INFEASIBLE` when undefined.
///
/// # Safety
/// `handle` must be a live schedule and `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_get(
    handle: *const GelfondSchedule,
    field: GelfondScheduleField,
    out: *mut u64,
) -> GelfondStatus {
    with_schedule(handle, out, |s| {
        use GelfondScheduleField as F;
        Ok(match field {
            F::Nu => s.nu,
            F::Lambda => s.lambda,
            F::Rho => s.rho,
            F::U => s.u,
            F::Tau => s.tau,
            F::Zeta => s.zeta,
            F::Omega => s.omega,
            F::Eta0 => s.eta0,
            F::Eta1 => s.eta1,
            F::Kappa => s.kappa,
            F::Delta => s.delta,
            F::BigL => s.big_l.ok_or_else(|| Error::Infeasible("L undefined for kappa = 0".into()))?,
            F::C => s.c,
            F::Mu => s.mu,
        })
    })
}

/// Number of violated structural constraints; 0 means the audit passes.
///
/// # Safety
/// `handle` must be a live schedule and `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_violations(handle: *const GelfondSchedule, out: *mut usize) -> GelfondStatus {
    with_schedule(handle, out, |s| Ok(violations(s).len()))
}

/// Least passing driver for the schedule's `Ξ`; 0 when none exists up to `10¹²`.
///
/// # Safety
/// `handle` must be a live schedule and `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_nu0(handle: *const GelfondSchedule, out: *mut u64) -> GelfondStatus {
    with_schedule(handle, out, |s| Ok(find_nu0(s.xi, s.split_constant).unwrap_or(0)))
}

/// `log₂ E_term` for `term` in `0..=14`; NaN for the data-dependent `E₁₁`.
///
/// # Safety
/// `handle` must be a live schedule and `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gelfond_schedule_budget_log2(
    handle: *const GelfondSchedule,
    term: u32,
    out: *mut f64,
) -> GelfondStatus {
    with_schedule(handle, out, |s| {
        let b = error_budget(s)?;
        let t =
            b.terms.get(term as usize).ok_or_else(|| Error::InvalidArgument(format!("term {term} outside 0..=14")))?;
        Ok(t.log2.unwrap_or(f64::NAN))
    })
}
