//! C interface to the unit-root toolkit.
//!
//! Models are opaque handles created by [`urml_model_load`] and released
//! with [`urml_model_free`]. Every fallible function returns a
//! [`UrmlStatus`]; on failure [`urml_last_error`] describes the problem
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use unitroot_ml::harness::{model_threshold, score_series, DEFAULT_SCORING_POLICY};
use unitroot_ml::learners::ModelDocument;
use unitroot_ml::sim::{simulate_series, DgpSpec};
use unitroot_ml::urtests::{compute_statistic, DetSpec, TestId};
use unitroot_ml::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrmlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericalError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque trained model.
pub struct UrmlModel {
    doc: ModelDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UrmlStatus {
    match e.exit_code() {
        2 => UrmlStatus::InvalidArgument,
        4 => UrmlStatus::NumericalError,
        _ => UrmlStatus::DataError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), UrmlStatus>) -> UrmlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UrmlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            UrmlStatus::Panic
        }
    }
}

fn fail(e: Error) -> UrmlStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> UrmlStatus {
    set_error(&format!("{what} is null"));
    UrmlStatus::NullPointer
}

/// # Safety
/// `p` must be null or point to `n` readable doubles.
unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], UrmlStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message for the last failure on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn urml_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn urml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load a model file written by the `unitroot` tool.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn urml_model_load(path: *const c_char, out: *mut *mut UrmlModel) -> UrmlStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = CStr::from_ptr(path).to_str().map_err(|_| {
            set_error("path is not UTF-8");
            UrmlStatus::InvalidArgument
        })?;
        let doc = ModelDocument::load(Path::new(p)).map_err(fail)?;
        *out = Box::into_raw(Box::new(UrmlModel { doc }));
        Ok(())
    })
}

/// Release a model; null is ignored.
///
/// # Safety
/// `model` must come from [`urml_model_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn urml_model_free(model: *mut UrmlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of features the model expects.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn urml_model_n_features(model: *const UrmlModel) -> usize {
    model.as_ref().map_or(0, |m| m.doc.feature_names.len())
}

/// Unit-root probability of one feature row.
///
/// # Safety
/// `features` must point to `n` doubles; `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urml_model_predict(
    model: *const UrmlModel,
    features: *const f64,
    n: usize,
    out: *mut f64,
) -> UrmlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let row = slice(features, n, "features")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if n != m.doc.feature_names.len() {
            set_error(&format!("expected {} features, got {n}", m.doc.feature_names.len()));
            return Err(UrmlStatus::InvalidArgument);
        }
        *out = m.doc.predict(row).map_err(fail)?.probability_positive;
        Ok(())
    })
}

/// Decision threshold for a cost ratio c(e2)/c(e1).
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urml_model_threshold(model: *const UrmlModel, cost_ratio: f64, out: *mut f64) -> UrmlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = model_threshold(&m.doc, cost_ratio).map_err(fail)?;
        Ok(())
    })
}

/// Score a raw series: features are computed here. `out_unit_root` is set
/// to 1 when the series is classified as a unit root at `cost_ratio`.
///
/// # Safety
/// `values` must point to `n` doubles; the pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn urml_score_series(
    model: *const UrmlModel,
    values: *const f64,
    n: usize,
    log_transform: bool,
    cost_ratio: f64,
    out_probability: *mut f64,
    out_unit_root: *mut i32,
) -> UrmlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let y = slice(values, n, "values")?;
        if out_probability.is_null() || out_unit_root.is_null() {
            return Err(null("output pointer"));
        }
        let r = score_series(&m.doc, "series", y, log_transform, &[cost_ratio], &DEFAULT_SCORING_POLICY)
            .map_err(fail)?;
        *out_probability = r.probability;
        *out_unit_root = i32::from(r.decisions[0].label.is_unit_root());
        Ok(())
    })
}

/// One classical statistic. `test` indexes ADF, PP, KPSS, PGFF, Breitung,
/// ERS-d, ERS-p, Schmidt-Phillips, Zivot-Andrews (0..=8); `det` is 0 for
/// no deterministic terms, 1 for a constant, 2 for constant and trend.
/// `out_reject` is set to 1 when the null is rejected at 5%.
///
/// # Safety
/// `values` must point to `n` doubles; the pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn urml_test_statistic(
    test: u32,
    det: u32,
    values: *const f64,
    n: usize,
    out_statistic: *mut f64,
    out_reject: *mut i32,
) -> UrmlStatus {
    guard(|| {
        let y = slice(values, n, "values")?;
        if out_statistic.is_null() || out_reject.is_null() {
            return Err(null("output pointer"));
        }
        let t = *TestId::ALL.get(test as usize).ok_or_else(|| {
            set_error(&format!("unknown test index {test}"));
            UrmlStatus::InvalidArgument
        })?;
        let d = match det {
            0 => DetSpec::None,
            1 => DetSpec::Constant,
            2 => DetSpec::ConstantAndTrend,
            _ => {
                set_error(&format!("unknown deterministic specification {det}"));
                return Err(UrmlStatus::InvalidArgument);
            }
        };
        let r = compute_statistic(t, y, d).map_err(fail)?;
        *out_statistic = r.statistic;
        *out_reject = i32::from(r.reject_null_5pct);
        Ok(())
    })
}

/// Simulate `y_t = phi y_{t-1} + e_t` with standard normal shocks into
/// `out` (capacity `cap`, at least `n_periods`).
///
/// # Safety
/// `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn urml_simulate_ar1(phi: f64, n_periods: usize, seed: u64, out: *mut f64, cap: usize) -> UrmlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if cap < n_periods {
            set_error(&format!("buffer holds {cap} values, {n_periods} needed"));
            return Err(UrmlStatus::BufferTooSmall);
        }
        let s = simulate_series(&DgpSpec::plain(phi, n_periods, seed)).map_err(fail)?;
        std::slice::from_raw_parts_mut(out, n_periods).copy_from_slice(&s.values);
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_matches_the_library() {
        let mut y = vec![0.0; 200];
        assert_eq!(unsafe { urml_simulate_ar1(0.5, 200, 3, y.as_mut_ptr(), y.len()) }, UrmlStatus::Ok);
        let (mut s, mut r) = (0.0, 0);
        let st = unsafe { urml_test_statistic(0, 1, y.as_ptr(), y.len(), &mut s, &mut r) };
        assert_eq!(st, UrmlStatus::Ok);
        let lib = compute_statistic(TestId::Adf, &y, DetSpec::Constant).unwrap();
        assert_eq!(s, lib.statistic);
        assert_eq!(r, 1);
    }

    #[test]
    fn errors_are_codes_with_messages() {
        let y = [1.0; 10];
        let (mut s, mut r) = (0.0, 0);
        let st = unsafe { urml_test_statistic(0, 1, y.as_ptr(), y.len(), &mut s, &mut r) };
        assert_eq!(st, UrmlStatus::DataError);
        let msg = unsafe { CStr::from_ptr(urml_last_error()) }.to_str().unwrap().to_string();
        assert!(!msg.is_empty());
        assert_eq!(unsafe { urml_test_statistic(99, 1, y.as_ptr(), 10, &mut s, &mut r) }, UrmlStatus::InvalidArgument);
        assert_eq!(unsafe { urml_test_statistic(0, 1, ptr::null(), 10, &mut s, &mut r) }, UrmlStatus::NullPointer);
        let mut small = [0.0; 5];
        assert_eq!(unsafe { urml_simulate_ar1(0.5, 10, 1, small.as_mut_ptr(), 5) }, UrmlStatus::BufferTooSmall);
        let mut m = ptr::null_mut();
        let bad = CString::new("/nonexistent/model.json").unwrap();
        assert_eq!(unsafe { urml_model_load(bad.as_ptr(), &mut m) }, UrmlStatus::DataError);
        assert!(m.is_null());
        unsafe { urml_model_free(ptr::null_mut()) };
    }
}
