//! C interface to the kernel basis, RKHS means, and the GDP mechanism.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible function returns an [`RgdpStatus`]; on failure the
//! message is available from [`rgdp_last_error_message`] on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use radial_gdp::gdp::{self, GdpParams};
use radial_gdp::{CircleGrid, CurveSample, Error, KernelEigenbasis, NoiseSeed, PeriodicKernelParams, RkhsMean};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgdpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numerical = 3,
    Alignment = 4,
    Io = 5,
    Parse = 6,
    Config = 7,
    BufferTooSmall = 8,
    Internal = 9,
    Panic = 10,
}

/// Eigenbasis of the periodic kernel on an `m`-point grid.
pub struct RgdpBasis {
    inner: Arc<KernelEigenbasis>,
}

/// Penalized mean of a curve sample.
pub struct RgdpMean {
    inner: RkhsMean,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> RgdpStatus {
    match e {
        Error::Domain(_) => RgdpStatus::Domain,
        Error::Numerical(_) => RgdpStatus::Numerical,
        Error::Alignment(_) => RgdpStatus::Alignment,
        Error::Internal(_) => RgdpStatus::Internal,
        Error::Config(_) => RgdpStatus::Config,
        Error::Parse { .. } => RgdpStatus::Parse,
        Error::File { .. } | Error::Io(_) => RgdpStatus::Io,
    }
}

struct Failure(RgdpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RgdpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RgdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RgdpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            RgdpStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < src.len() {
        return Err(Failure(
            RgdpStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn rgdp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the eigenbasis of `exp(-(d/rho)^alpha)` on `m` grid points.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_basis_new(m: usize, rho: f64, alpha: f64, out: *mut *mut RgdpBasis) -> RgdpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let params = PeriodicKernelParams::new(rho, alpha)?;
        let basis = KernelEigenbasis::periodic(CircleGrid::new(m)?, &params)?;
        let handle = Box::new(RgdpBasis { inner: Arc::new(basis) });
        write_out(out, Box::into_raw(handle))
    })
}

/// # Safety
/// `basis` must come from [`rgdp_basis_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rgdp_basis_free(basis: *mut RgdpBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Number of retained modes, or 0 for a null handle.
///
/// # Safety
/// `basis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rgdp_basis_num_modes(basis: *const RgdpBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.num_modes())
}

/// Copies the operator eigenvalues, in decreasing order, into `out`.
///
/// # Safety
/// `basis` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_basis_eigenvalues(basis: *const RgdpBasis, out: *mut f64, len: usize) -> RgdpStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        copy_out(b.inner.eigenvalues(), out, len)
    })
}

/// Penalized mean of `n` curves stored row-major in `curves` (`n * m` values).
///
/// # Safety
/// `basis` must be a live handle, `curves` valid for `n * m` reads where
/// `m` is the grid size of `basis`, and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_rkhs_mean_new(
    basis: *const RgdpBasis,
    curves: *const f64,
    n: usize,
    phi: f64,
    out: *mut *mut RgdpMean,
) -> RgdpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        let grid = *b.inner.grid();
        let m = grid.len();
        let total = n
            .checked_mul(m)
            .ok_or_else(|| Failure(RgdpStatus::Domain, "n * m overflows".into()))?;
        let data = slice(curves, total, "curves")?;
        let sample = CurveSample::new(grid, data.chunks(m).map(<[f64]>::to_vec).collect())?;
        let mean = radial_gdp::rkhs_mean(&sample, &b.inner, phi)?;
        write_out(out, Box::into_raw(Box::new(RgdpMean { inner: mean })))
    })
}

/// # Safety
/// `mean` must come from [`rgdp_rkhs_mean_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rgdp_rkhs_mean_free(mean: *mut RgdpMean) {
    if !mean.is_null() {
        drop(Box::from_raw(mean));
    }
}

/// Copies the `m` grid values of the mean into `out`.
///
/// # Safety
/// `mean` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_rkhs_mean_values(mean: *const RgdpMean, out: *mut f64, len: usize) -> RgdpStatus {
    guard(|| {
        let h = mean.as_ref().ok_or_else(|| null("mean"))?;
        copy_out(h.inner.values(), out, len)
    })
}

/// RKHS norm of the mean.
///
/// # Safety
/// `mean` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_rkhs_mean_norm(mean: *const RgdpMean, out: *mut f64) -> RgdpStatus {
    guard(|| {
        let h = mean.as_ref().ok_or_else(|| null("mean"))?;
        write_out(out, h.inner.rkhs_norm())
    })
}

/// `2 tau / (n sqrt(phi))`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_sensitivity_bound(tau: f64, n: usize, phi: f64, out: *mut f64) -> RgdpStatus {
    guard(|| write_out(out, gdp::sensitivity_bound(tau, n, phi)?))
}

/// Noise scale `delta_bound / mu`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_calibrate_sigma(delta_bound: f64, mu: f64, out: *mut f64) -> RgdpStatus {
    guard(|| write_out(out, gdp::calibrate_sigma(delta_bound, mu)?.sigma()))
}

/// Releases `mean + sigma Z` with `sigma = delta_bound / mu`, using the
/// noise stream `(master_seed, stream)`. Writes `m` values to `out`.
///
/// # Safety
/// `mean` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_sanitize(
    mean: *const RgdpMean,
    delta_bound: f64,
    mu: f64,
    master_seed: u64,
    stream: u64,
    out: *mut f64,
    len: usize,
) -> RgdpStatus {
    guard(|| {
        let h = mean.as_ref().ok_or_else(|| null("mean"))?;
        let params: GdpParams = gdp::calibrate_sigma(delta_bound, mu)?;
        let release = gdp::sanitize(&h.inner, &params, NoiseSeed::new(master_seed, stream));
        copy_out(&release.values, out, len)
    })
}

/// `sqrt(sum mu_i^2)` over `len` budgets.
///
/// # Safety
/// `mus` must be valid for `len` reads and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_compose(mus: *const f64, len: usize, out: *mut f64) -> RgdpStatus {
    guard(|| write_out(out, gdp::compose(slice(mus, len, "budgets")?)?))
}

/// Smallest `delta` such that a `mu`-GDP mechanism is `(epsilon, delta)`-DP.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_gdp_to_dp_delta(mu: f64, epsilon: f64, out: *mut f64) -> RgdpStatus {
    guard(|| write_out(out, gdp::gdp_to_dp_delta(mu, epsilon)?))
}

/// `Phi(Phi^-1(1 - alpha) - mu)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rgdp_gaussian_tradeoff(mu: f64, alpha: f64, out: *mut f64) -> RgdpStatus {
    guard(|| write_out(out, gdp::gaussian_tradeoff(mu, alpha)?))
}
