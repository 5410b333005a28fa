//! C interface to `netmod`.
//!
//! Modules are handed out as opaque `NetmodModule` pointers and must be
//! released with `netmod_module_free`. Strings returned through out
//! parameters are owned by the caller and released with
//! `netmod_string_free`. Every function returns a `NetmodStatus`; on failure
//! `netmod_last_error` describes the problem until the next call on the
//! same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use netmod::io::{parse_module, serialize_module, to_dot, DotStyle};
use netmod::{canonical_form, compose, is_isomorphic, NetModule};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetmodStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ComposeError = 4,
    InvalidModule = 5,
    InvalidArgument = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetmodDotStyle {
    System = 0,
    Run = 1,
}

/// Opaque module handle.
pub struct NetmodModule {
    name: String,
    module: NetModule,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Outcome = Result<(), (NetmodStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> NetmodStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NetmodStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NetmodStatus::Panic
        }
    }
}

unsafe fn module_ref<'a>(m: *const NetmodModule) -> Result<&'a NetmodModule, (NetmodStatus, String)> {
    m.as_ref().ok_or((NetmodStatus::NullPointer, "module handle is null".into()))
}

unsafe fn text_arg<'a>(s: *const c_char) -> Result<&'a str, (NetmodStatus, String)> {
    if s.is_null() {
        return Err((NetmodStatus::NullPointer, "text is null".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (NetmodStatus::InvalidUtf8, e.to_string()))
}

fn out_check<T>(out: *mut T) -> Outcome {
    if out.is_null() {
        Err((NetmodStatus::NullPointer, "out pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Outcome {
    let c = CString::new(s).map_err(|e| (NetmodStatus::InvalidArgument, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn give_module(out: *mut *mut NetmodModule, name: String, module: NetModule) {
    // SAFETY: callers checked `out` for null.
    unsafe { *out = Box::into_raw(Box::new(NetmodModule { name, module })) };
}

/// Parses `.netmod` text. On success `*out` receives a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_parse(text: *const c_char, out: *mut *mut NetmodModule) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = ptr::null_mut();
        let t = text_arg(text)?;
        let d = parse_module(t).map_err(|e| (NetmodStatus::ParseError, e.to_string()))?;
        give_module(out, d.name, d.module);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_free(m: *mut NetmodModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `*out = a ∘ b`.
///
/// # Safety
/// `a` and `b` must be live handles, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_compose(
    a: *const NetmodModule,
    b: *const NetmodModule,
    out: *mut *mut NetmodModule,
) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = ptr::null_mut();
        let (a, b) = (module_ref(a)?, module_ref(b)?);
        let c = compose(&a.module, &b.module).map_err(|e| (NetmodStatus::ComposeError, e.to_string()))?;
        give_module(out, format!("{}_{}", a.name, b.name), c);
        Ok(())
    })
}

/// `*out` is 1 when the modules are isomorphic, else 0.
///
/// # Safety
/// `a` and `b` must be live handles, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_is_isomorphic(
    a: *const NetmodModule,
    b: *const NetmodModule,
    out: *mut i32,
) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        let (a, b) = (module_ref(a)?, module_ref(b)?);
        *out = is_isomorphic(&a.module, &b.module) as i32;
        Ok(())
    })
}

/// Checks the structural rules; failures come back as `InvalidModule`.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_validate(m: *const NetmodModule) -> NetmodStatus {
    guard(|| {
        let m = module_ref(m)?;
        m.module.validate().map_err(|v| {
            let msg = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
            (NetmodStatus::InvalidModule, msg)
        })
    })
}

/// Element count (places plus transitions).
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_len(m: *const NetmodModule, out: *mut usize) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = module_ref(m)?.module.len();
        Ok(())
    })
}

/// `.netmod` text of the module.
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_serialize(m: *const NetmodModule, out: *mut *mut c_char) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = ptr::null_mut();
        let m = module_ref(m)?;
        let s = serialize_module(&m.name, &m.module).map_err(|e| (NetmodStatus::InvalidModule, e.to_string()))?;
        give_string(out, s)
    })
}

/// Graphviz text of the module.
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_module_to_dot(
    m: *const NetmodModule,
    style: NetmodDotStyle,
    out: *mut *mut c_char,
) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = ptr::null_mut();
        let m = module_ref(m)?;
        let style = match style {
            NetmodDotStyle::System => DotStyle::System,
            NetmodDotStyle::Run => DotStyle::Run,
        };
        let s = to_dot(&m.name, &m.module, style).map_err(|e| (NetmodStatus::InvalidModule, e.to_string()))?;
        give_string(out, s)
    })
}

/// Canonical form as lowercase hex. Equal strings mean isomorphic modules.
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn netmod_canonical_form(m: *const NetmodModule, out: *mut *mut c_char) -> NetmodStatus {
    guard(|| {
        out_check(out)?;
        *out = ptr::null_mut();
        let m = module_ref(m)?;
        let f = canonical_form(&m.module).map_err(|e| (NetmodStatus::InvalidModule, e.to_string()))?;
        let hex: String = f.as_bytes().iter().map(|b| format!("{b:02x}")).collect();
        give_string(out, hex)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn netmod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn netmod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
