//! C ABI over `emuchain`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an [`EmuStatus`]
//! and leaves a message for [`emu_last_error`] on the calling thread.
//! Panics are caught at the boundary and reported as `EMU_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use emuchain::constructions::VirusChain;
use emuchain::emulation::{emulation_complexity, ComputerSet};
use emuchain::export::distribution_csv;
use emuchain::format::{self, UniverseFile};
use emuchain::markov::{
    classify, exact_survival, never_return_estimate, stationary_exact, ChainClass,
};
use emuchain::{BitString, Error, Period, StateId};

/// A loaded universe file with its named sets.
pub struct EmuUniverse {
    file: UniverseFile,
    universe: Arc<emuchain::Universe>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmuStatus {
    Ok = 0,
    Parse = 1,
    Validation = 2,
    Domain = 3,
    Contract = 4,
    Resource = 5,
    NoConvergence = 6,
    Internal = 7,
    Io = 8,
    NullPointer = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmuChainClass {
    PositiveRecurrentFinite = 0,
    PeriodicFinite = 1,
    Reducible = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EmuVirusEstimate {
    pub horizon: u64,
    pub samples: u64,
    pub survivors: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The exact product, rounded to the nearest double.
    pub exact: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EmuStatus {
    match e {
        Error::Parse { .. } => EmuStatus::Parse,
        Error::Validation(_) => EmuStatus::Validation,
        Error::Domain(_) => EmuStatus::Domain,
        Error::Contract(_) => EmuStatus::Contract,
        Error::Resource(_) => EmuStatus::Resource,
        Error::NoConvergence { .. } => EmuStatus::NoConvergence,
        Error::Internal(_) => EmuStatus::Internal,
        Error::Io(_) => EmuStatus::Io,
    }
}

struct Fail(EmuStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EmuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EmuStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside emuchain");
            EmuStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(EmuStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(EmuStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(u: *const EmuUniverse) -> Result<&'a EmuUniverse, Fail> {
    u.as_ref().ok_or_else(|| null("universe handle"))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("library text has no nul").into_raw()
}

unsafe fn set_of(u: &EmuUniverse, name: *const c_char) -> Result<ComputerSet, Fail> {
    let name = if name.is_null() {
        "all"
    } else {
        text(name, "set name")?
    };
    Ok(ComputerSet::new(
        Arc::clone(&u.universe),
        u.file.set(name)?,
    )?)
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn emu_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a universe file from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emu_universe_load(
    json: *const c_char,
    out: *mut *mut EmuUniverse,
) -> EmuStatus {
    guard(|| {
        let file = format::load(text(json, "json")?)?;
        let universe = Arc::new(file.universe.clone());
        let h = Box::into_raw(Box::new(EmuUniverse { file, universe }));
        put(out, h, "out").inspect_err(|_| drop(Box::from_raw(h)))
    })
}

/// # Safety
/// `u` must come from [`emu_universe_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn emu_universe_free(u: *mut EmuUniverse) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emu_universe_state_count(
    u: *const EmuUniverse,
    out: *mut usize,
) -> EmuStatus {
    guard(|| put(out, handle(u)?.universe.len(), "out"))
}

/// Canonical JSON rendering; free the result with [`emu_string_free`].
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emu_universe_serialize(
    u: *const EmuUniverse,
    out: *mut *mut c_char,
) -> EmuStatus {
    guard(|| {
        put(
            out,
            owned_string(format::serialize(&handle(u)?.file)),
            "out",
        )
    })
}

/// Output of computer `state` on `bits` (`"0101"`, empty for ε) as a token:
/// bits, `eps` or `undef`. Free the result with [`emu_string_free`].
///
/// # Safety
/// `u` must be a live handle, `bits` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emu_evaluate(
    u: *const EmuUniverse,
    state: usize,
    bits: *const c_char,
    out: *mut *mut c_char,
) -> EmuStatus {
    guard(|| {
        let u = handle(u)?;
        let x: BitString = text(bits, "bits")?.parse()?;
        let o = u.universe.evaluate(StateId(state), &x)?;
        put(out, owned_string(o.token()), "out")
    })
}

/// Exact stationary vector of a named set (null means `all`) as CSV: a
/// header of member ids and one `p/q` row. Free with [`emu_string_free`].
///
/// # Safety
/// `u` must be a live handle, `set` null or nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emu_stationary(
    u: *const EmuUniverse,
    set: *const c_char,
    out: *mut *mut c_char,
) -> EmuStatus {
    guard(|| {
        let phi = set_of(handle(u)?, set)?;
        let pi = stationary_exact(&phi)?;
        put(
            out,
            owned_string(distribution_csv(&pi.members, &pi.values, false)),
            "out",
        )
    })
}

/// Chain class and period of a named set; the period is 0 when infinite.
///
/// # Safety
/// `u` must be a live handle, `set` null or nul-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn emu_classify(
    u: *const EmuUniverse,
    set: *const c_char,
    class: *mut EmuChainClass,
    period: *mut u64,
) -> EmuStatus {
    guard(|| {
        let phi = set_of(handle(u)?, set)?;
        let r = classify(&phi);
        let c = match r.class {
            ChainClass::PositiveRecurrentFinite => EmuChainClass::PositiveRecurrentFinite,
            ChainClass::PeriodicFinite => EmuChainClass::PeriodicFinite,
            ChainClass::Reducible => EmuChainClass::Reducible,
        };
        let p = match r.period {
            Period::Finite(d) => d,
            Period::Infinite => 0,
        };
        put(class, c, "class")?;
        put(period, p, "period")
    })
}

/// Shortest input length taking computer `c` to `d`, or -1 when `d` is
/// unreachable.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emu_complexity(
    u: *const EmuUniverse,
    c: usize,
    d: usize,
    out: *mut i64,
) -> EmuStatus {
    guard(|| {
        let k = emulation_complexity(&handle(u)?.universe, StateId(c), StateId(d))?;
        put(out, k.length().map_or(-1, |l| l as i64), "out")
    })
}

/// Seeded never-return estimate on the virus chain with `max_index`
/// machines up to `horizon`. The result does not depend on `workers`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emu_virus_estimate(
    max_index: usize,
    horizon: usize,
    samples: usize,
    seed: u64,
    workers: usize,
    out: *mut EmuVirusEstimate,
) -> EmuStatus {
    guard(|| {
        let chain = VirusChain::new(max_index)?;
        let e = never_return_estimate(&chain, horizon, samples, seed, workers)?;
        put(
            out,
            EmuVirusEstimate {
                horizon: e.horizon as u64,
                samples: e.samples as u64,
                survivors: e.survivors as u64,
                estimate: e.estimate,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                exact: exact_survival(e.horizon).to_f64(),
            },
            "out",
        )
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn emu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
