//! C ABI over the `smc` library.
//!
//! Models live behind the opaque [`SmcModel`] handle. Every fallible call
//! returns an [`SmcStatus`]; on failure, [`smc_last_error`] yields the message
//! for the calling thread. Exact values come back as heap strings such as
//! `"1/16"` which the caller releases with [`smc_string_free`].

use smc::eg3::{self, BoundaryPoint};
use smc::martin::{self, DefaultWeights};
use smc::rational;
use smc::smc as chain;
use smc::spectral;
use smc::words::Word;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed model text, word or boundary point.
    Parse = 3,
    /// The mathematics refused: non-transience, missing root, bad arguments.
    Domain = 4,
    /// A caller-provided buffer is shorter than required.
    BufferTooSmall = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Opaque model handle.
pub struct SmcModel(chain::SmcModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SmcStatus, String);

type Outcome<T> = Result<T, Failure>;

fn parse_failure(name: &str, message: String) -> Failure {
    let status = match name {
        "ParseError" | "SyntaxError" | "UnknownLetter" | "ProbabilitySumError" | "InvalidWeight" | "InvalidWord"
        | "InvalidLambda" | "StreamPresence" => SmcStatus::Parse,
        _ => SmcStatus::Domain,
    };
    Failure(status, message)
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                parse_failure(e.name(), e.to_string())
            }
        }
    )*};
}
failure_from!(
    chain::ModelError,
    smc::words::WordError,
    martin::MartinError,
    spectral::SpectralError,
    eg3::Eg3Error
);

fn guard(body: impl FnOnce() -> Outcome<()>) -> SmcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SmcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SmcStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(SmcStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(SmcStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn model<'a>(h: *const SmcModel) -> Outcome<&'a chain::SmcModel> {
    h.as_ref().map(|m| &m.0).ok_or_else(|| Failure(SmcStatus::NullPointer, "null model handle".into()))
}

unsafe fn word(m: &chain::SmcModel, p: *const c_char) -> Outcome<Word> {
    Ok(m.parse_word(text(p)?)?)
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(SmcStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    let c = CString::new(s).map_err(|_| Failure(SmcStatus::Internal, "result contains a nul byte".into()))?;
    if out.is_null() {
        return Err(Failure(SmcStatus::NullPointer, "null output pointer".into()));
    }
    out.write(c.into_raw());
    Ok(())
}

fn root(m: &chain::SmcModel) -> Outcome<smc::words::Letter> {
    m.effective_root().ok_or_else(|| Failure(SmcStatus::Domain, "MissingRoot: the model has no unique root".into()))
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn smc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn smc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a built-in model by name (`eg1` .. `eg5`, `test-harmonic`).
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smc_model_preset(name: *const c_char, out: *mut *mut SmcModel) -> SmcStatus {
    guard(|| {
        let m = chain::preset(text(name)?)?;
        put(out, Box::into_raw(Box::new(SmcModel(m))))
    })
}

/// Parses a model from config text.
///
/// # Safety
/// `config` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smc_model_parse(config: *const c_char, out: *mut *mut SmcModel) -> SmcStatus {
    guard(|| {
        let m = chain::parse_model(text(config)?)?;
        put(out, Box::into_raw(Box::new(SmcModel(m))))
    })
}

/// Destroys a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a live handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn smc_model_free(model: *mut SmcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of letters in the model alphabet, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn smc_model_alphabet_len(model: *const SmcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.alphabet().len())
}

/// One-step transition probability `P(w, v)` as an exact string.
///
/// # Safety
/// Pointers must be valid; free `*out` with [`smc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn smc_transition_prob(
    model: *const SmcModel,
    w: *const c_char,
    v: *const c_char,
    out: *mut *mut c_char,
) -> SmcStatus {
    guard(|| {
        let m = self::model(model)?;
        let p = chain::transition_prob(m, &word(m, w)?, &word(m, v)?);
        put_string(out, rational::format(&p))
    })
}

/// Green's function `G(x, y)` as an exact string.
///
/// # Safety
/// Pointers must be valid; free `*out` with [`smc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn smc_green(
    model: *const SmcModel,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> SmcStatus {
    guard(|| {
        let m = self::model(model)?;
        let g = martin::green(m, &word(m, x)?, &word(m, y)?)?;
        put_string(out, rational::format(&g))
    })
}

/// Martin kernel `K(z, x)` relative to the model root, as an exact string.
///
/// # Safety
/// Pointers must be valid; free `*out` with [`smc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn smc_kernel(
    model: *const SmcModel,
    z: *const c_char,
    x: *const c_char,
    out: *mut *mut c_char,
) -> SmcStatus {
    guard(|| {
        let m = self::model(model)?;
        let k = martin::kernel(m, &word(m, z)?, &word(m, x)?, root(m)?)?;
        put_string(out, rational::format(&k))
    })
}

/// Martin metric between two words with the default weights, as an exact string.
///
/// # Safety
/// Pointers must be valid; free `*out` with [`smc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn smc_theta(
    model: *const SmcModel,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> SmcStatus {
    guard(|| {
        let m = self::model(model)?;
        let t = martin::theta(m, &word(m, x)?, &word(m, y)?, &DefaultWeights, root(m)?)?;
        put_string(out, rational::format(&t))
    })
}

/// Perron eigenvalue and normalized letter frequencies. `freqs` must hold
/// `len >= smc_model_alphabet_len(model)` doubles.
///
/// # Safety
/// `freqs` must point to `len` writable doubles and `eigenvalue` be writable.
#[no_mangle]
pub unsafe extern "C" fn smc_frequencies(
    model: *const SmcModel,
    eigenvalue: *mut f64,
    freqs: *mut f64,
    len: usize,
) -> SmcStatus {
    guard(|| {
        let m = self::model(model)?;
        let p = spectral::perron_frequencies(&spectral::frequency_matrix(m))?;
        if freqs.is_null() {
            return Err(Failure(SmcStatus::NullPointer, "null frequency buffer".into()));
        }
        if len < p.vector.len() {
            return Err(Failure(
                SmcStatus::BufferTooSmall,
                format!("need {} entries, got {len}", p.vector.len()),
            ));
        }
        std::slice::from_raw_parts_mut(freqs, p.vector.len()).copy_from_slice(&p.vector);
        put(eigenvalue, p.eigenvalue)
    })
}

unsafe fn point(p: *const c_char) -> Outcome<BoundaryPoint> {
    Ok(BoundaryPoint::parse(text(p)?)?)
}

/// Boundary metric of the b/c example between points written `lambda,L,R`.
///
/// # Safety
/// Strings must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smc_eg3_rho(xi: *const c_char, eta: *const c_char, out: *mut f64) -> SmcStatus {
    guard(|| put(out, eg3::rho(&point(xi)?, &point(eta)?)?))
}

/// Euclidean image `(lambda, y, z)` of a boundary point, written to `out[0..3]`.
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smc_eg3_psi(xi: *const c_char, terms: usize, out: *mut f64) -> SmcStatus {
    guard(|| {
        let p = eg3::psi(&point(xi)?, terms)?.point;
        if out.is_null() {
            return Err(Failure(SmcStatus::NullPointer, "null output pointer".into()));
        }
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&[p.lambda, p.y, p.z]);
        Ok(())
    })
}

/// Deterministic random point cloud as CSV text.
///
/// # Safety
/// `out` must be writable; free `*out` with [`smc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn smc_eg3_cloud(samples: usize, terms: usize, seed: u64, out: *mut *mut c_char) -> SmcStatus {
    guard(|| put_string(out, eg3::generate_cloud(samples, terms, seed)?))
}
