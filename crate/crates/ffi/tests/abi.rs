use std::ffi::{CStr, CString};
use std::ptr;

use emuchain_ffi::*;

const TWO_STATE: &str = r#"{"version":1,"states":[{"id":0,"out":"0","t0":0,"t1":1},{"id":1,"out":"1","t0":0,"t1":0}],"sets":{}}"#;

const TWO_CYCLE: &str = r#"{"version":1,"states":[{"id":0,"out":"0","t0":1,"t1":1},{"id":1,"out":"1","t0":0,"t1":0}],"sets":{"pair":[0,1]}}"#;

fn load(json: &str) -> *mut EmuUniverse {
    let text = CString::new(json).unwrap();
    let mut u = ptr::null_mut();
    assert_eq!(
        unsafe { emu_universe_load(text.as_ptr(), &mut u) },
        EmuStatus::Ok
    );
    assert!(!u.is_null());
    u
}

fn take(s: *mut std::ffi::c_char) -> String {
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { emu_string_free(s) };
    owned
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(emu_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn stationary_of_two_state() {
    let u = load(TWO_STATE);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { emu_stationary(u, ptr::null(), &mut out) },
        EmuStatus::Ok
    );
    assert_eq!(take(out), "0,1\n2/3,1/3\n");
    let mut n = 0;
    assert_eq!(
        unsafe { emu_universe_state_count(u, &mut n) },
        EmuStatus::Ok
    );
    assert_eq!(n, 2);
    unsafe { emu_universe_free(u) };
}

#[test]
fn evaluate_and_complexity() {
    let u = load(TWO_STATE);
    let mut out = ptr::null_mut();
    let bits = CString::new("01").unwrap();
    assert_eq!(
        unsafe { emu_evaluate(u, 0, bits.as_ptr(), &mut out) },
        EmuStatus::Ok
    );
    assert_eq!(take(out), "1");
    let empty = CString::new("").unwrap();
    assert_eq!(
        unsafe { emu_evaluate(u, 1, empty.as_ptr(), &mut out) },
        EmuStatus::Ok
    );
    assert_eq!(take(out), "1");
    let mut k = 0;
    assert_eq!(unsafe { emu_complexity(u, 0, 1, &mut k) }, EmuStatus::Ok);
    assert_eq!(k, 1);
    assert_eq!(
        unsafe { emu_complexity(u, 0, 7, &mut k) },
        EmuStatus::Domain
    );
    assert!(!last_error().is_empty());
    unsafe { emu_universe_free(u) };
}

#[test]
fn classify_periodic_pair() {
    let u = load(TWO_CYCLE);
    let set = CString::new("pair").unwrap();
    let mut class = EmuChainClass::Reducible;
    let mut period = 0;
    assert_eq!(
        unsafe { emu_classify(u, set.as_ptr(), &mut class, &mut period) },
        EmuStatus::Ok
    );
    assert_eq!((class, period), (EmuChainClass::PeriodicFinite, 2));
    let missing = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { emu_classify(u, missing.as_ptr(), &mut class, &mut period) },
        EmuStatus::Domain
    );
    unsafe { emu_universe_free(u) };
}

#[test]
fn serialize_round_trips() {
    let u = load(TWO_STATE);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { emu_universe_serialize(u, &mut out) },
        EmuStatus::Ok
    );
    let text = take(out);
    let v = load(&text);
    assert_eq!(
        unsafe { emu_universe_serialize(v, &mut out) },
        EmuStatus::Ok
    );
    assert_eq!(take(out), text);
    unsafe {
        emu_universe_free(u);
        emu_universe_free(v);
    }
}

#[test]
fn errors_are_codes_not_crashes() {
    let mut u = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(
        unsafe { emu_universe_load(bad.as_ptr(), &mut u) },
        EmuStatus::Parse
    );
    assert!(last_error().contains("parse"));
    assert_eq!(
        unsafe { emu_universe_load(ptr::null(), &mut u) },
        EmuStatus::NullPointer
    );
    let mut n = 0;
    assert_eq!(
        unsafe { emu_universe_state_count(ptr::null(), &mut n) },
        EmuStatus::NullPointer
    );
    unsafe {
        emu_universe_free(ptr::null_mut());
        emu_string_free(ptr::null_mut());
    }
}

#[test]
fn virus_estimate_is_seeded() {
    let mut a = EmuVirusEstimate::default();
    let mut b = EmuVirusEstimate::default();
    assert_eq!(
        unsafe { emu_virus_estimate(20, 20, 20_000, 7, 1, &mut a) },
        EmuStatus::Ok
    );
    assert_eq!(
        unsafe { emu_virus_estimate(20, 20, 20_000, 7, 4, &mut b) },
        EmuStatus::Ok
    );
    assert_eq!(a, b);
    assert!((a.exact - 0.288_788_6).abs() < 1e-6);
    assert!(a.ci_low <= a.exact && a.exact <= a.ci_high);
    assert_eq!(
        unsafe { emu_virus_estimate(1, 1, 10, 0, 1, &mut a) },
        EmuStatus::Domain
    );
}

#[test]
fn header_is_generated_and_parses_as_c() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/emuchain.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "emu_universe_load",
        "emu_stationary",
        "emu_virus_estimate",
        "EMU_STATUS_PANIC",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    if let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    {
        assert!(status.success());
    }
}
