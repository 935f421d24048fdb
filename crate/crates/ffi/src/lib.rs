//! C interface to `outerspine`.
//!
//! Roses are opaque `OspRose` handles created by `osp_rose_new` or
//! `osp_rose_standard` and released with `osp_rose_free`. Every fallible
//! call returns an `OspStatus`; on failure a message is available from
//! `osp_last_error` until the next call on the same thread. Strings returned
//! by the library are released with `osp_string_free`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use outerspine::complexes::{contractibility_pipeline, Verdict};
use outerspine::folds::fold_to_rose;
use outerspine::free_words::ConjugacyClass;
use outerspine::marked_graphs::{compare_norm, roses_equal, Rose};
use outerspine::whitehead::whitehead_reduce;
use outerspine::{Error, Limits};

/// Opaque marked rose.
pub struct OspRose(Rose);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed word or JSON, bad rank, not an automorphism.
    InvalidInput = 3,
    /// A norm comparison was not decided within the class-length cutoff.
    Undetermined = 4,
    /// A retraction step failed its hypotheses.
    PipelineDefect = 5,
    /// Any other internal consistency failure.
    Defect = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OspVerdict {
    EmptyComplex = 0,
    Contractible = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OspStatus {
    match e {
        Error::UndeterminedComparison(_) => OspStatus::Undetermined,
        Error::PipelineDefect(_) => OspStatus::PipelineDefect,
        e if e.is_defect() => OspStatus::Defect,
        _ => OspStatus::InvalidInput,
    }
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), OspStatus>) -> OspStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OspStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside outerspine".into());
            OspStatus::Panic
        }
    }
}

fn lib<T>(r: outerspine::Result<T>) -> Result<T, OspStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, OspStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(OspStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8".into());
        OspStatus::InvalidUtf8
    })
}

unsafe fn rose_arg<'a>(p: *const OspRose) -> Result<&'a Rose, OspStatus> {
    match p.as_ref() {
        Some(r) => Ok(&r.0),
        None => {
            set_error("null rose handle".into());
            Err(OspStatus::NullPointer)
        }
    }
}

fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, OspStatus> {
    // SAFETY: the caller passes a valid, writable pointer or null.
    match unsafe { p.as_mut() } {
        Some(r) => Ok(r),
        None => {
            set_error("null output pointer".into());
            Err(OspStatus::NullPointer)
        }
    }
}

fn limits(lmax: usize) -> Limits {
    if lmax == 0 {
        Limits::from_env()
    } else {
        Limits::default().with_lmax(lmax)
    }
}

/// Message of the last failure on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn osp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// The rose sending petal `i` to `images[i]`, written with `a..z` and
/// capitals for inverses.
///
/// # Safety
/// `images` must point to `n` valid C strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_new(n: usize, images: *const *const c_char, out: *mut *mut OspRose) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        if images.is_null() {
            set_error("null image array".into());
            return Err(OspStatus::NullPointer);
        }
        let words = (0..n)
            .map(|i| str_arg(*images.add(i)))
            .collect::<Result<Vec<&str>, _>>()?;
        let rose = lib(Rose::from_images(n, &words))?;
        *out = Box::into_raw(Box::new(OspRose(rose)));
        Ok(())
    })
}

/// Parses `{"n": .., "phi": [..]}`.
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_from_json(json: *const c_char, out: *mut *mut OspRose) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        let rose = lib(Rose::parse_json(str_arg(json)?))?;
        *out = Box::into_raw(Box::new(OspRose(rose)));
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_standard(n: usize, out: *mut *mut OspRose) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        if n < 2 {
            return lib(Err(Error::RankTooSmall(n)));
        }
        *out = Box::into_raw(Box::new(OspRose(Rose::standard(n))));
        Ok(())
    })
}

/// # Safety
/// `rose` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_free(rose: *mut OspRose) {
    if !rose.is_null() {
        drop(Box::from_raw(rose));
    }
}

/// # Safety
/// `rose` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_rank(rose: *const OspRose) -> usize {
    rose.as_ref().map_or(0, |r| r.0.rank())
}

/// JSON text of the rose; release with `osp_string_free`.
///
/// # Safety
/// `rose` must be a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_rose_to_json(rose: *const OspRose, out: *mut *mut c_char) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        let text = serde_json::to_string(&rose_arg(rose)?.to_json()).expect("serializable");
        *out = CString::new(text).expect("no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn osp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Length of the tight loop representing the conjugacy class of `word`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn osp_translation_length(
    rose: *const OspRose,
    word: *const c_char,
    out: *mut usize,
) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        let rose = rose_arg(rose)?;
        let class = lib(ConjugacyClass::parse(str_arg(word)?, rose.rank()))?;
        *out = rose.translation_length(&class);
        Ok(())
    })
}

/// Whether the two roses are the same vertex of the spine.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn osp_roses_equal(a: *const OspRose, b: *const OspRose, out: *mut bool) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        let (a, b) = (rose_arg(a)?, rose_arg(b)?);
        if a.rank() != b.rank() {
            set_error("ranks differ".into());
            return Err(OspStatus::InvalidInput);
        }
        *out = roses_equal(a, b);
        Ok(())
    })
}

/// Writes -1, 0 or 1 as the norm of `a` is smaller, equal or larger. `lmax`
/// of 0 uses the default cutoff.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn osp_compare_norm(
    a: *const OspRose,
    b: *const OspRose,
    lmax: usize,
    out: *mut i32,
) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        let (a, b) = (rose_arg(a)?, rose_arg(b)?);
        if a.rank() != b.rank() {
            set_error("ranks differ".into());
            return Err(OspStatus::InvalidInput);
        }
        *out = match lib(compare_norm(a, b, &limits(lmax)))? {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        Ok(())
    })
}

/// Number of folds taking the rose to the standard one.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn osp_fold_count(rose: *const OspRose, out: *mut usize) -> OspStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = lib(fold_to_rose(rose_arg(rose)?))?.moves.len();
        Ok(())
    })
}

/// Norm descent; writes the minimal rose reached and the step count.
///
/// # Safety
/// Pointers must be valid; `out_rose` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn osp_reduce(
    rose: *const OspRose,
    lmax: usize,
    out_rose: *mut *mut OspRose,
    out_steps: *mut usize,
) -> OspStatus {
    guard(|| {
        let out_rose = out_arg(out_rose)?;
        let out_steps = out_arg(out_steps)?;
        let (end, steps) = lib(whitehead_reduce(rose_arg(rose)?, &limits(lmax)))?;
        *out_steps = steps.len();
        *out_rose = Box::into_raw(Box::new(OspRose(end)));
        Ok(())
    })
}

/// Retracts the reductive part of the star of the rose; writes the verdict
/// and the number of retraction steps.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn osp_contractibility(
    rose: *const OspRose,
    lmax: usize,
    out_verdict: *mut OspVerdict,
    out_steps: *mut usize,
) -> OspStatus {
    guard(|| {
        let out_verdict = out_arg(out_verdict)?;
        let out_steps = out_arg(out_steps)?;
        let (verdict, trace) = lib(contractibility_pipeline(rose_arg(rose)?, &limits(lmax)))?;
        *out_verdict = match verdict {
            Verdict::EmptyComplex => OspVerdict::EmptyComplex,
            Verdict::Contractible => OspVerdict::Contractible,
        };
        *out_steps = trace.steps.len();
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::UndeterminedComparison(12)), OspStatus::Undetermined);
        assert_eq!(
            status_of(&Error::PipelineDefect(String::new())),
            OspStatus::PipelineDefect
        );
        assert_eq!(status_of(&Error::NoMatching), OspStatus::Defect);
        assert_eq!(status_of(&Error::IdentityWord), OspStatus::InvalidInput);
    }

    #[test]
    fn null_output_is_reported() {
        let s = unsafe { osp_rose_standard(2, ptr::null_mut()) };
        assert_eq!(s, OspStatus::NullPointer);
        assert!(!osp_last_error().is_null());
    }
}
