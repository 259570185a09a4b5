//! C ABI for the shiftlab numerical laboratory.
//!
//! Objects cross the boundary as opaque handles allocated by this library
//! and released through the matching `_free` function. Every fallible call
//! returns a [`ShiftlabStatus`]; outputs land in caller-provided pointers.
//! The generated header lives at `include/shiftlab.h`.

use libc::c_char;
use num_complex::Complex64;

use shiftlab::density::ShiftDensity;
use shiftlab::distance::{tv_marginal, MarginalQuad, MixtureLaw};
use shiftlab::fourier::FourierSeries;
use shiftlab::model::{generate_dataset, loglik_curve, Dataset};
use shiftlab::prior::smallball_probability_smc;
use shiftlab::rng;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericError = 3,
    BudgetExceeded = 4,
}

/// Opaque truncated Fourier series handle.
pub struct ShiftlabSeries {
    inner: FourierSeries,
}

/// Opaque shift-density handle.
pub struct ShiftlabDensity {
    inner: ShiftDensity,
}

/// Opaque dataset handle.
pub struct ShiftlabDataset {
    inner: Dataset,
}

fn status_of(e: &shiftlab::Error) -> ShiftlabStatus {
    match e {
        shiftlab::Error::BudgetExhausted(_) => ShiftlabStatus::BudgetExceeded,
        shiftlab::Error::Config(_) | shiftlab::Error::Precondition(_) => {
            ShiftlabStatus::InvalidArgument
        }
        _ => ShiftlabStatus::NumericError,
    }
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn shiftlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Allocate a zero series with the given cutoff.
#[no_mangle]
pub extern "C" fn shiftlab_series_new(cutoff: usize) -> *mut ShiftlabSeries {
    Box::into_raw(Box::new(ShiftlabSeries {
        inner: FourierSeries::zeros(cutoff),
    }))
}

/// # Safety
/// `handle` must come from a `shiftlab_series_*` constructor and not have
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_free(handle: *mut ShiftlabSeries) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Set the coefficient at frequency `l`.
///
/// # Safety
/// `handle` must be a live series handle.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_set(
    handle: *mut ShiftlabSeries,
    l: i64,
    re: f64,
    im: f64,
) -> ShiftlabStatus {
    let Some(series) = handle.as_mut() else {
        return ShiftlabStatus::NullPointer;
    };
    if l.unsigned_abs() as usize > series.inner.cutoff() {
        return ShiftlabStatus::InvalidArgument;
    }
    *series.inner.coeff_mut(l) = Complex64::new(re, im);
    series.inner.refresh_identifiable();
    ShiftlabStatus::Ok
}

/// Read the coefficient at frequency `l` (zero outside the band).
///
/// # Safety
/// `handle` must be live; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_get(
    handle: *const ShiftlabSeries,
    l: i64,
    re: *mut f64,
    im: *mut f64,
) -> ShiftlabStatus {
    let Some(series) = handle.as_ref() else {
        return ShiftlabStatus::NullPointer;
    };
    if re.is_null() || im.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    let c = series.inner.coeff(l);
    *re = c.re;
    *im = c.im;
    ShiftlabStatus::Ok
}

/// New series rotated by the circular shift `phi`.
///
/// # Safety
/// `handle` must be live.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_shift(
    handle: *const ShiftlabSeries,
    phi: f64,
) -> *mut ShiftlabSeries {
    match handle.as_ref() {
        Some(series) => Box::into_raw(Box::new(ShiftlabSeries {
            inner: series.inner.shift_action(phi),
        })),
        None => std::ptr::null_mut(),
    }
}

/// L2 distance between two series.
///
/// # Safety
/// Both handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_l2_distance(
    a: *const ShiftlabSeries,
    b: *const ShiftlabSeries,
    out: *mut f64,
) -> ShiftlabStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    *out = a.inner.l2_distance(&b.inner);
    ShiftlabStatus::Ok
}

/// L2, H1 and Sobolev-s norms.
///
/// # Safety
/// `handle` live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_series_norms(
    handle: *const ShiftlabSeries,
    s: f64,
    l2: *mut f64,
    h1: *mut f64,
    sobolev: *mut f64,
) -> ShiftlabStatus {
    let Some(series) = handle.as_ref() else {
        return ShiftlabStatus::NullPointer;
    };
    if l2.is_null() || h1.is_null() || sobolev.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    let n = series.inner.norms(s);
    *l2 = n.l2;
    *h1 = n.h1;
    *sobolev = n.sobolev_s;
    ShiftlabStatus::Ok
}

/// Uniform density on `grid_len` points.
#[no_mangle]
pub extern "C" fn shiftlab_density_uniform(grid_len: usize) -> *mut ShiftlabDensity {
    if grid_len < 2 {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(ShiftlabDensity {
        inner: ShiftDensity::uniform(grid_len),
    }))
}

/// Density from nonnegative grid values (normalized internally). Returns
/// null when the values are not a valid density.
///
/// # Safety
/// `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_density_from_values(
    values: *const f64,
    len: usize,
) -> *mut ShiftlabDensity {
    if values.is_null() {
        return std::ptr::null_mut();
    }
    let slice = std::slice::from_raw_parts(values, len);
    match ShiftDensity::from_values(slice.to_vec()) {
        Ok(inner) => Box::into_raw(Box::new(ShiftlabDensity { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `handle` must come from a density constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_density_free(handle: *mut ShiftlabDensity) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Density value at a point of the circle.
///
/// # Safety
/// `handle` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_density_value_at(
    handle: *const ShiftlabDensity,
    tau: f64,
    out: *mut f64,
) -> ShiftlabStatus {
    let Some(g) = handle.as_ref() else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    *out = g.inner.value_at(tau);
    ShiftlabStatus::Ok
}

/// Sobolev seminorm of the density.
///
/// # Safety
/// `handle` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_density_sobolev(
    handle: *const ShiftlabDensity,
    nu: f64,
    out: *mut f64,
) -> ShiftlabStatus {
    let Some(g) = handle.as_ref() else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    *out = g.inner.sobolev_seminorm(nu);
    ShiftlabStatus::Ok
}

/// Wasserstein-1 distance between densities on the same grid.
///
/// # Safety
/// Both handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_w1_distance(
    a: *const ShiftlabDensity,
    b: *const ShiftlabDensity,
    out: *mut f64,
) -> ShiftlabStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    if a.inner.grid_len() != b.inner.grid_len() {
        return ShiftlabStatus::InvalidArgument;
    }
    *out = shiftlab::distance::w1_distance(&a.inner, &b.inner);
    ShiftlabStatus::Ok
}

/// Generate a synthetic dataset from the truth `(f0, g0)`.
///
/// # Safety
/// Both handles live.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_dataset_generate(
    f0: *const ShiftlabSeries,
    g0: *const ShiftlabDensity,
    n: usize,
    cutoff: usize,
    seed: u64,
) -> *mut ShiftlabDataset {
    let (Some(f0), Some(g0)) = (f0.as_ref(), g0.as_ref()) else {
        return std::ptr::null_mut();
    };
    match generate_dataset(&f0.inner, &g0.inner, n, cutoff, seed) {
        Ok(inner) => Box::into_raw(Box::new(ShiftlabDataset { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// # Safety
/// `handle` must come from `shiftlab_dataset_generate` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_dataset_free(handle: *mut ShiftlabDataset) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of curves.
///
/// # Safety
/// `handle` live.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_dataset_len(handle: *const ShiftlabDataset) -> usize {
    handle.as_ref().map_or(0, |d| d.inner.len())
}

/// Total log likelihood of the dataset under `(f, g)` with `quad` mixture
/// nodes.
///
/// # Safety
/// All handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_dataset_loglik(
    data: *const ShiftlabDataset,
    f: *const ShiftlabSeries,
    g: *const ShiftlabDensity,
    quad: usize,
    out: *mut f64,
) -> ShiftlabStatus {
    let (Some(d), Some(f), Some(g)) = (data.as_ref(), f.as_ref(), g.as_ref()) else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    let mut total = 0.0;
    for curve in &d.inner.curves {
        match loglik_curve(curve, &f.inner, &g.inner, quad) {
            Ok(ll) => total += ll,
            Err(e) => return status_of(&e),
        }
    }
    *out = total;
    ShiftlabStatus::Ok
}

/// `A_n(a) = 2 pi I_n(a)` by the ascending series.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_bessel_a(n: u32, a: f64, out: *mut f64) -> ShiftlabStatus {
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    match shiftlab::bessel::bessel_a(n, a) {
        Ok(v) => {
            *out = v;
            ShiftlabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Identifiability weight integral `I_n(theta1)`.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_lower_bound_integral(
    n: u32,
    theta1: f64,
    out: *mut f64,
) -> ShiftlabStatus {
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    match shiftlab::identifiability::lower_bound_integral(n, theta1) {
        Ok(v) => {
            *out = v;
            ShiftlabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Marginal total variation at frequency `k` between the laws `(fa, ga)`
/// and `(fb, gb)`, by the default polar quadrature.
///
/// # Safety
/// All handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_tv_marginal(
    k: i64,
    fa: *const ShiftlabSeries,
    ga: *const ShiftlabDensity,
    fb: *const ShiftlabSeries,
    gb: *const ShiftlabDensity,
    out: *mut f64,
) -> ShiftlabStatus {
    let (Some(fa), Some(ga), Some(fb), Some(gb)) =
        (fa.as_ref(), ga.as_ref(), fb.as_ref(), gb.as_ref())
    else {
        return ShiftlabStatus::NullPointer;
    };
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    let a = MixtureLaw::new(fa.inner.clone(), ga.inner.clone());
    let b = MixtureLaw::new(fb.inner.clone(), gb.inner.clone());
    *out = tv_marginal(k, &a, &b, MarginalQuad::default()).value;
    ShiftlabStatus::Ok
}

/// Sequential Monte Carlo estimate of the bridge small-ball probability
/// `P(sup |B| <= eps)`.
///
/// # Safety
/// `p_hat` and `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_smallball_bridge(
    eps: f64,
    reps: usize,
    grid_len: usize,
    seed: u64,
    p_hat: *mut f64,
    stderr: *mut f64,
) -> ShiftlabStatus {
    if p_hat.is_null() || stderr.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    let mut rng = rng::substream(seed, "ffi-smallball", 0);
    match smallball_probability_smc(eps, reps, grid_len, &mut rng) {
        Ok(est) => {
            *p_hat = est.p_hat;
            *stderr = est.stderr;
            ShiftlabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The Fano information bound `alpha/2 (1 - (beta + log 2)/log r)`.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftlab_fano_bound(
    alpha: f64,
    beta: f64,
    r: usize,
    out: *mut f64,
) -> ShiftlabStatus {
    if out.is_null() {
        return ShiftlabStatus::NullPointer;
    }
    if r < 2 {
        return ShiftlabStatus::InvalidArgument;
    }
    *out = shiftlab::fano::fano_bound(alpha, beta, r);
    ShiftlabStatus::Ok
}
