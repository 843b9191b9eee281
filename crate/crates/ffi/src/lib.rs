//! C interface to the induction engine.
//!
//! Instances and configurations are opaque handles created and released
//! through this API. Every fallible call returns an [`IlpStatus`]; on
//! failure a message is available from [`ilp_last_error`] on the same
//! thread. Strings returned through out-parameters are owned by the caller
//! and must be released with [`ilp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use ilp_core::driver::{Driver, DriverConfig, Profile};
use ilp_core::instance::{parse_instance, InstanceFile};
use ilp_core::rule::Language;
use ilp_core::solver::Solver;
use ilp_core::space::asp::{emit_encoding, generate_space_asp};
use ilp_core::space::native::{enumerate_with, NativeOptions};
use ilp_core::space::Backend;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Solver = 5,
    NoHypothesis = 6,
    Panic = 7,
}

/// A parsed instance.
pub struct IlpInstance {
    inner: InstanceFile,
}

/// Driver and space settings.
pub struct IlpConfig {
    inner: DriverConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: IlpStatus, msg: impl Into<String>) -> IlpStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`IlpStatus::Panic`].
fn guard(f: impl FnOnce() -> IlpStatus) -> IlpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(IlpStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IlpStatus> {
    if p.is_null() {
        return Err(fail(IlpStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(IlpStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> IlpStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            IlpStatus::Ok
        }
        Err(_) => fail(IlpStatus::Panic, "output contains a NUL byte"),
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ilp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ilp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses instance text into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ilp_instance_parse(
    text: *const c_char,
    out: *mut *mut IlpInstance,
) -> IlpStatus {
    guard(|| {
        if out.is_null() {
            return fail(IlpStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(IlpInstance { inner }));
                IlpStatus::Ok
            }
            Err(e) => fail(IlpStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must come from [`ilp_instance_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ilp_instance_free(inst: *mut IlpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of examples, 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ilp_instance_example_count(inst: *const IlpInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.examples.len())
}

/// Number of test traces, 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ilp_instance_test_count(inst: *const IlpInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.tests.len())
}

/// A configuration with the competition defaults.
#[no_mangle]
pub extern "C" fn ilp_config_new() -> *mut IlpConfig {
    Box::into_raw(Box::new(IlpConfig {
        inner: DriverConfig::profile(Profile::Competition),
    }))
}

/// # Safety
/// `cfg` must come from [`ilp_config_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ilp_config_free(cfg: *mut IlpConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets a setting by name: any space parameter (`maxvars`,
/// `cost_negbodyliteral`, ...), `climit_min`, `climit_max` (0 for none),
/// `time_limit_ms` (0 for none), `backend` (0 ASP, 1 native) or
/// `invention` (0 or 1).
///
/// # Safety
/// `cfg` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ilp_config_set(
    cfg: *mut IlpConfig,
    name: *const c_char,
    value: i64,
) -> IlpStatus {
    guard(|| {
        let Some(cfg) = cfg.as_mut() else {
            return fail(IlpStatus::NullPointer, "null config");
        };
        let name = match str_arg(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let c = &mut cfg.inner;
        match name {
            "climit_min" if value >= 1 => c.climit_min = value,
            "climit_max" if value >= 0 => c.climit_max = (value > 0).then_some(value),
            "time_limit_ms" if value >= 0 => {
                c.time_limit = (value > 0).then(|| Duration::from_millis(value as u64))
            }
            "backend" if value == 0 || value == 1 => {
                c.backend = if value == 0 {
                    Backend::Asp
                } else {
                    Backend::Native
                }
            }
            "invention" if value == 0 || value == 1 => c.invention = value == 1,
            "climit_min" | "climit_max" | "time_limit_ms" | "backend" | "invention" => {
                return fail(
                    IlpStatus::InvalidArgument,
                    format!("invalid value {value} for {name}"),
                )
            }
            _ => {
                if let Err(e) = c.params.set(name, value) {
                    return fail(IlpStatus::InvalidArgument, e.to_string());
                }
            }
        }
        IlpStatus::Ok
    })
}

unsafe fn handles<'a>(
    inst: *const IlpInstance,
    cfg: *const IlpConfig,
    out: *mut *mut c_char,
) -> Result<(&'a InstanceFile, &'a DriverConfig), IlpStatus> {
    if out.is_null() {
        return Err(fail(IlpStatus::NullPointer, "null output pointer"));
    }
    *out = ptr::null_mut();
    let inst = inst
        .as_ref()
        .ok_or_else(|| fail(IlpStatus::NullPointer, "null instance"))?;
    let cfg = cfg
        .as_ref()
        .ok_or_else(|| fail(IlpStatus::NullPointer, "null config"))?;
    if let Err(e) = cfg.inner.params.validate() {
        return Err(fail(IlpStatus::InvalidArgument, e.to_string()));
    }
    Ok((&inst.inner, &cfg.inner))
}

/// The hypothesis space of the instance's bias at `climit`, as
/// `cost<TAB>rule` lines.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ilp_hypspace(
    inst: *const IlpInstance,
    cfg: *const IlpConfig,
    climit: i64,
    out: *mut *mut c_char,
) -> IlpStatus {
    guard(|| {
        let (inst, cfg) = match handles(inst, cfg, out) {
            Ok(h) => h,
            Err(s) => return s,
        };
        if climit < 1 {
            return fail(IlpStatus::InvalidArgument, "climit must be at least 1");
        }
        let lang = Language::new(inst.bias(), cfg.params.limits);
        let space = match cfg.backend {
            Backend::Native => enumerate_with(
                &lang,
                &cfg.params.costs,
                climit,
                NativeOptions {
                    invention: cfg.invention,
                    prune: true,
                },
            ),
            Backend::Asp => {
                match generate_space_asp(
                    &lang,
                    &cfg.params.costs,
                    climit,
                    cfg.invention,
                    &Solver::from_env(),
                    None,
                ) {
                    Ok(s) => s,
                    Err(e) => return fail(IlpStatus::Solver, e.to_string()),
                }
            }
        };
        put_string(out, space.listing())
    })
}

/// The standalone generation program for the instance's bias.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ilp_encode(
    inst: *const IlpInstance,
    cfg: *const IlpConfig,
    climit: i64,
    out: *mut *mut c_char,
) -> IlpStatus {
    guard(|| {
        let (inst, cfg) = match handles(inst, cfg, out) {
            Ok(h) => h,
            Err(s) => return s,
        };
        match emit_encoding(
            &inst.bias(),
            &cfg.params.limits,
            &cfg.params.costs,
            climit,
            cfg.invention,
        ) {
            Ok(b) => put_string(out, b.standalone()),
            Err(e) => fail(IlpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Runs the learning loop and returns every emitted `#attempt` block.
/// [`IlpStatus::NoHypothesis`] when no attempt was emitted.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ilp_solve(
    inst: *const IlpInstance,
    cfg: *const IlpConfig,
    out: *mut *mut c_char,
) -> IlpStatus {
    guard(|| {
        let (inst, cfg) = match handles(inst, cfg, out) {
            Ok(h) => h,
            Err(s) => return s,
        };
        let mut attempts = Vec::new();
        let outcome = Driver::new(inst, cfg.clone(), Solver::from_env()).run(&mut attempts);
        if outcome.attempts.is_empty() {
            return fail(IlpStatus::NoHypothesis, "no attempt was emitted");
        }
        put_string(out, String::from_utf8_lossy(&attempts).into_owned())
    })
}
