//! C ABI for the femtv library.
//!
//! All functions return a [`FemtvStatus`] code (except the accessors that
//! return plain values) and communicate results through out-pointers.
//! Heap-allocated results are owned by the library and must be released
//! with the matching `_free` function. On any non-`Ok` status a
//! human-readable message is stored in a thread-local slot readable via
//! [`femtv_last_error`]. Handles are opaque; never dereference them.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;

use femtv::experiments::{dims, relations_at};
use femtv::evaluator::eval_symbol;
use femtv::modint::wieferich_scan;
use femtv::relgen::RelationSystem;
use femtv::wordalg::Family;
use femtv::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FemtvStatus {
    /// Success.
    FemtvOk = 0,
    /// A required pointer argument was null.
    FemtvNullPointer = 1,
    /// A string argument was not valid UTF-8.
    FemtvUtf8 = 2,
    /// A symbol, family, or range failed to parse.
    FemtvParse = 3,
    /// Arguments were well-formed but outside the mathematical domain
    /// (composite modulus, prime too small for the weight, ...).
    FemtvDomain = 4,
    /// The provided output buffer was too small.
    FemtvBufferTooSmall = 5,
    /// Internal failure (a panic was caught at the boundary).
    FemtvInternal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend_from_slice(msg.as_bytes());
    });
}

fn status_of(err: &Error) -> FemtvStatus {
    match err {
        Error::SymbolParse { .. } => FemtvStatus::FemtvParse,
        _ => FemtvStatus::FemtvDomain,
    }
}

fn fail(err: &Error) -> FemtvStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Run `f` with panics converted to `FemtvInternal`.
fn guarded(f: impl FnOnce() -> FemtvStatus) -> FemtvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            FemtvStatus::FemtvInternal
        }
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FemtvStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(FemtvStatus::FemtvNullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        FemtvStatus::FemtvUtf8
    })
}

fn parse_family(name: &str) -> Result<Family, FemtvStatus> {
    match name.to_ascii_uppercase().as_str() {
        "ES" => Ok(Family::Es),
        "T" => Ok(Family::T),
        "S" => Ok(Family::S),
        "AT" => Ok(Family::At),
        other => {
            set_error(&format!("unknown family `{other}` (expected ES, T, S, or AT)"));
            Err(FemtvStatus::FemtvParse)
        }
    }
}

/// Copy the last error message for this thread into `buf` (NUL-terminated,
/// truncated to `cap` bytes). Returns the full message length in bytes,
/// excluding the NUL; 0 means no error has been recorded.
///
/// # Safety
/// `buf` must be null or point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn femtv_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn femtv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Evaluate a canonical symbol (e.g. `"T:1,1,1"`, `"ES:-1,2"`) at an odd
/// prime and store the residue in `*out`.
///
/// # Safety
/// `symbol` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn femtv_eval(
    symbol: *const c_char,
    prime: u64,
    out: *mut u64,
) -> FemtvStatus {
    let sym = match read_str(symbol) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        set_error("null output pointer");
        return FemtvStatus::FemtvNullPointer;
    }
    guarded(|| match eval_symbol(prime, sym) {
        Ok(r) => {
            *out = r.value;
            FemtvStatus::FemtvOk
        }
        Err(e) => fail(&e),
    })
}

/// Opaque handle to a generated relation system.
pub struct FemtvRelations {
    sys: RelationSystem,
}

/// Generate the relation system for a family (`"ES"`, `"T"`, `"S"`, or
/// `"AT"`) at a weight and store a handle in `*out`. Free with
/// [`femtv_relations_free`].
///
/// # Safety
/// `family` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn femtv_relations_new(
    family: *const c_char,
    weight: u32,
    out: *mut *mut FemtvRelations,
) -> FemtvStatus {
    let fam = match read_str(family).and_then(|s| parse_family(s)) {
        Ok(f) => f,
        Err(st) => return st,
    };
    if out.is_null() {
        set_error("null output pointer");
        return FemtvStatus::FemtvNullPointer;
    }
    guarded(|| {
        let sys = relations_at(fam, weight);
        *out = Box::into_raw(Box::new(FemtvRelations { sys }));
        FemtvStatus::FemtvOk
    })
}

/// Number of relations behind a handle; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle from [`femtv_relations_new`].
#[no_mangle]
pub unsafe extern "C" fn femtv_relations_count(r: *const FemtvRelations) -> usize {
    if r.is_null() {
        return 0;
    }
    (*r).sys.relations.len()
}

/// Export a relation system as a NUL-terminated text table (one relation
/// per line). Returns null for a null handle. Free with
/// [`femtv_string_free`].
///
/// # Safety
/// `r` must be null or a live handle from [`femtv_relations_new`].
#[no_mangle]
pub unsafe extern "C" fn femtv_relations_export(r: *const FemtvRelations) -> *mut c_char {
    if r.is_null() {
        return std::ptr::null_mut();
    }
    let text = (*r).sys.export();
    // export lines never contain interior NULs
    CString::new(text).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Release a relation-system handle. Null is a no-op.
///
/// # Safety
/// `r` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn femtv_relations_free(r: *mut FemtvRelations) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by a `femtv_*` function; it must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn femtv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dimension bounds for a family and weight over the admissible primes in
/// `[prime_lo, prime_hi]`: the value-matrix lower bound goes to `*lower`,
/// the certified upper bound to `*upper`.
///
/// # Safety
/// `family` must be a valid NUL-terminated string; `lower` and `upper`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn femtv_dims(
    family: *const c_char,
    weight: u32,
    prime_lo: u64,
    prime_hi: u64,
    lower: *mut u64,
    upper: *mut u64,
) -> FemtvStatus {
    let fam = match read_str(family).and_then(|s| parse_family(s)) {
        Ok(f) => f,
        Err(st) => return st,
    };
    if lower.is_null() || upper.is_null() {
        set_error("null output pointer");
        return FemtvStatus::FemtvNullPointer;
    }
    guarded(|| match dims(fam, weight, prime_lo, prime_hi, None) {
        Ok(rep) => {
            *lower = rep.lower as u64;
            *upper = rep.upper as u64;
            FemtvStatus::FemtvOk
        }
        Err(e) => fail(&e),
    })
}

/// Scan odd primes `p <= limit` with `p = residue (mod modulus)` for
/// `2^(p-1) = 1 (mod p^2)`. Hits are written to `out` (capacity `cap`);
/// `*written` receives the hit count. Returns `FemtvBufferTooSmall` when
/// more hits exist than fit (`*written` still holds the total).
///
/// # Safety
/// `out` must point to at least `cap` writable `u64`s; `written` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn femtv_wieferich(
    limit: u64,
    modulus: u64,
    residue: u64,
    out: *mut u64,
    cap: usize,
    written: *mut usize,
) -> FemtvStatus {
    if out.is_null() || written.is_null() {
        set_error("null output pointer");
        return FemtvStatus::FemtvNullPointer;
    }
    guarded(|| match wieferich_scan(limit, modulus, residue) {
        Ok(hits) => {
            *written = hits.len();
            let n = hits.len().min(cap);
            std::ptr::copy_nonoverlapping(hits.as_ptr(), out, n);
            if hits.len() > cap {
                set_error("output buffer too small for all hits");
                FemtvStatus::FemtvBufferTooSmall
            } else {
                FemtvStatus::FemtvOk
            }
        }
        Err(e) => fail(&e),
    })
}
