//! C ABI over `ldlab`.
//!
//! Measures and partitions are opaque handles created by `ld_*_new`
//! functions and released with the matching `ld_*_free`. Fallible calls
//! return an [`LdStatus`] and write results through out-pointers; the
//! message of the most recent failure on the calling thread is available
//! from [`ld_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ldlab::divergences::{j_divergence, kl};
use ldlab::ldp_lab::exact_ball_probability_binary;
use ldlab::measures::{project, tv_distance, DiscreteMeasure, Partition};
use ldlab::projections::{big_f, big_f_inv, rate_i1, rate_i3, reverse_projection};
use ldlab::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    Degenerate = 4,
    Convergence = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque finite probability measure on [0, 1].
pub struct LdMeasure(DiscreteMeasure);

/// Opaque partition of [0, 1] by interior cut points.
pub struct LdPartition(Partition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LdStatus {
    match e {
        Error::Infeasible { .. } => LdStatus::Infeasible,
        Error::Degenerate(_) => LdStatus::Degenerate,
        Error::Convergence { .. } => LdStatus::Convergence,
        _ => LdStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), LdStatus>) -> LdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            LdStatus::Panic
        }
    }
}

fn lib<T>(r: ldlab::Result<T>) -> Result<T, LdStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> LdStatus {
    set_error("null pointer argument".into());
    LdStatus::NullPointer
}

unsafe fn values<'a>(p: *const f64, len: usize) -> Result<&'a [f64], LdStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, LdStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn measure<'a>(p: *const LdMeasure) -> Result<&'a DiscreteMeasure, LdStatus> {
    p.as_ref().map(|m| &m.0).ok_or_else(null)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ld_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a measure from `len` strictly increasing support points in
/// [0, 1] and masses summing to one.
///
/// # Safety
/// `support` and `mass` must point to `len` readable doubles; `out_measure`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_measure_new(
    support: *const f64,
    mass: *const f64,
    len: usize,
    out_measure: *mut *mut LdMeasure,
) -> LdStatus {
    guard(|| {
        let slot = out(out_measure)?;
        let (s, m) = (values(support, len)?, values(mass, len)?);
        let dm = lib(DiscreteMeasure::new(s.to_vec(), m.to_vec()))?;
        *slot = Box::into_raw(Box::new(LdMeasure(dm)));
        Ok(())
    })
}

/// Creates the `n`-point midpoint grid with equal masses.
///
/// # Safety
/// `out_measure` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_measure_uniform_grid(n: usize, out_measure: *mut *mut LdMeasure) -> LdStatus {
    guard(|| {
        let slot = out(out_measure)?;
        let dm = lib(DiscreteMeasure::uniform_grid(n))?;
        *slot = Box::into_raw(Box::new(LdMeasure(dm)));
        Ok(())
    })
}

/// Releases a measure; NULL is ignored.
///
/// # Safety
/// `m` must come from an `ld_measure_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ld_measure_free(m: *mut LdMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of atoms, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ld_measure_len(m: *const LdMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.0.len())
}

/// Mean of the measure.
///
/// # Safety
/// `m` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_measure_mean(m: *const LdMeasure, out_value: *mut f64) -> LdStatus {
    guard(|| {
        *out(out_value)? = measure(m)?.mean();
        Ok(())
    })
}

/// Creates a partition from `len` increasing interior cut points.
///
/// # Safety
/// `cuts` must point to `len` doubles; `out_partition` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_partition_new(
    cuts: *const f64,
    len: usize,
    out_partition: *mut *mut LdPartition,
) -> LdStatus {
    guard(|| {
        let slot = out(out_partition)?;
        let p = lib(Partition::new(values(cuts, len)?.to_vec()))?;
        *slot = Box::into_raw(Box::new(LdPartition(p)));
        Ok(())
    })
}

/// Releases a partition; NULL is ignored.
///
/// # Safety
/// `p` must come from [`ld_partition_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ld_partition_free(p: *mut LdPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the cell probabilities of `m` on `p` into `out_cells`, which has
/// room for `capacity` doubles. `out_len` receives the number of cells,
/// also when the buffer is too small.
///
/// # Safety
/// Handles must be live; `out_cells` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ld_project(
    m: *const LdMeasure,
    p: *const LdPartition,
    out_cells: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> LdStatus {
    guard(|| {
        let part = &p.as_ref().ok_or_else(null)?.0;
        let len = out(out_len)?;
        *len = part.cells();
        if capacity < part.cells() {
            set_error(format!("{} cells do not fit in a buffer of {capacity}", part.cells()));
            return Err(LdStatus::BufferTooSmall);
        }
        if out_cells.is_null() {
            return Err(null());
        }
        let cells = project(measure(m)?, part);
        slice::from_raw_parts_mut(out_cells, cells.len()).copy_from_slice(cells.coords());
        Ok(())
    })
}

unsafe fn binary_op(
    a: *const LdMeasure,
    b: *const LdMeasure,
    out_value: *mut f64,
    f: fn(&DiscreteMeasure, &DiscreteMeasure) -> ldlab::Result<f64>,
) -> LdStatus {
    guard(|| {
        let slot = out(out_value)?;
        *slot = lib(f(measure(a)?, measure(b)?))?;
        Ok(())
    })
}

/// Relative entropy `H(a|b)`; may be `+inf`.
///
/// # Safety
/// Handles must be live and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_kl(a: *const LdMeasure, b: *const LdMeasure, out_value: *mut f64) -> LdStatus {
    binary_op(a, b, out_value, kl)
}

/// J-divergence `-2 log Σ √(a b)`; may be `+inf`.
///
/// # Safety
/// Handles must be live and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_j_divergence(a: *const LdMeasure, b: *const LdMeasure, out_value: *mut f64) -> LdStatus {
    binary_op(a, b, out_value, j_divergence)
}

/// Total variation as the L1 distance `Σ |a - b|`.
///
/// # Safety
/// Handles must be live and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_tv_distance(a: *const LdMeasure, b: *const LdMeasure, out_value: *mut f64) -> LdStatus {
    binary_op(a, b, out_value, tv_distance)
}

/// `F(λ) = e^λ/(e^λ - 1) - 1/λ`.
#[no_mangle]
pub extern "C" fn ld_big_f(lambda: f64) -> f64 {
    big_f(lambda)
}

/// Inverse of [`ld_big_f`] on (0, 1).
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_big_f_inv(u: f64, out_value: *mut f64) -> LdStatus {
    guard(|| {
        *out(out_value)? = lib(big_f_inv(u))?;
        Ok(())
    })
}

/// Closed-form rate `I1(u)` for the uniform base; `+inf` outside (0, 1).
#[no_mangle]
pub extern "C" fn ld_rate_i1(u: f64) -> f64 {
    rate_i1(u)
}

/// Forward rate `inf { H(μ|base) : mean μ = u }`; `+inf` outside the hull.
///
/// # Safety
/// `base` must be live and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_rate_i3(u: f64, base: *const LdMeasure, out_value: *mut f64) -> LdStatus {
    guard(|| {
        let slot = out(out_value)?;
        *slot = lib(rate_i3(u, measure(base)?))?;
        Ok(())
    })
}

/// Reverse projection `μ = base/(λ1 + λ2 x)` minimizing `H(base|μ)` at
/// mean `u`. Any of the out-pointers may be NULL.
///
/// # Safety
/// `base` must be live; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_reverse_projection(
    base: *const LdMeasure,
    u: f64,
    out_lambda1: *mut f64,
    out_lambda2: *mut f64,
    out_value: *mut f64,
) -> LdStatus {
    guard(|| {
        let s = lib(reverse_projection(measure(base)?, u))?;
        for (p, v) in [(out_lambda1, s.lambda1), (out_lambda2, s.lambda2), (out_value, s.value)] {
            if let Some(slot) = p.as_mut() {
                *slot = v;
            }
        }
        Ok(())
    })
}

/// Exact probability that the first cell of the projected flat-Dirichlet
/// weighted measure lies within `delta/2` of `target_q`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_exact_ball_probability_binary(
    base_p: f64,
    target_q: f64,
    delta: f64,
    n: usize,
    out_value: *mut f64,
) -> LdStatus {
    guard(|| {
        *out(out_value)? = lib(exact_ball_probability_binary(base_p, target_q, delta, n))?;
        Ok(())
    })
}
