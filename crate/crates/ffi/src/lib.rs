//! C ABI over the registry and the trusty code functions.
//!
//! Every function returns an [`FpStatus`]; on failure a message is kept in
//! thread-local storage and can be read with [`fp_last_error`]. Strings
//! handed out by the library are owned by the caller and must be released
//! with [`fp_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fpub::nanopub::{temp_iri, NanopubError, Nanopublication};
use fpub::registry::{self, GraphFormat, Registry, RegistryError};
use fpub::trusty::ArtifactCode;

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input is not well-formed TriG.
    Syntax = 3,
    /// The nanopublication breaks a structural rule.
    ValidationFailed = 4,
    /// The artifact code does not match the content, or there is none.
    VerifyFailed = 5,
    NotFound = 6,
    /// A parameter, IRI or query argument was rejected.
    InvalidParameter = 7,
    /// A workflow rule was broken.
    Workflow = 8,
    Io = 9,
    /// An internal error; the store handle should be closed.
    Panic = 10,
}

/// An open store. Safe to share between threads.
pub struct FpStore {
    registry: Registry,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FpStatus, String);

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        let status = match &e {
            RegistryError::Io(_) => FpStatus::Io,
            RegistryError::Syntax(_) => FpStatus::Syntax,
            RegistryError::ValidationFailed(_) | RegistryError::Nanopub(_) => FpStatus::ValidationFailed,
            RegistryError::VerifyFailed => FpStatus::VerifyFailed,
            RegistryError::NotFound(_) | RegistryError::UnknownQuery(_) => FpStatus::NotFound,
            RegistryError::UnboundParameter(_) | RegistryError::InvalidParameter(..) => FpStatus::InvalidParameter,
            RegistryError::Workflow(_) => FpStatus::Workflow,
        };
        Failure(status, e.to_string())
    }
}

impl From<NanopubError> for Failure {
    fn from(e: NanopubError) -> Self {
        match e {
            NanopubError::Rdf(e) => RegistryError::Syntax(e).into(),
            e => Failure(FpStatus::ValidationFailed, e.to_string()),
        }
    }
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|l| *l.borrow_mut() = Some(msg));
}

/// Runs `f`, recording any failure or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FpStatus {
    LAST_ERROR.with(|l| *l.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            FpStatus::Panic
        }
    }
}

unsafe fn arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FpStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FpStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn store<'a>(s: *const FpStore) -> Result<&'a FpStore, Failure> {
    s.as_ref().ok_or_else(|| Failure(FpStatus::NullArgument, "store is null".into()))
}

unsafe fn put(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FpStatus::NullArgument, "output pointer is null".into()));
    }
    let c =
        CString::new(value).map_err(|_| Failure(FpStatus::InvalidParameter, "result contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn code(s: &str) -> Result<ArtifactCode, Failure> {
    let iri = Registry::resolve(s)?;
    ArtifactCode::from_iri(&iri)
        .ok_or_else(|| Failure(FpStatus::InvalidParameter, format!("not an artifact code: {s}")))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|l| l.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens or creates the store at `path`.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_store_open(path: *const c_char, out: *mut *mut FpStore) -> FpStatus {
    guard(|| {
        let path = arg(path, "path")?;
        if out.is_null() {
            return Err(Failure(FpStatus::NullArgument, "output pointer is null".into()));
        }
        let registry = Registry::open(path)?;
        *out = Box::into_raw(Box::new(FpStore { registry }));
        Ok(())
    })
}

/// Closes a store. Null is ignored.
///
/// # Safety
/// `store` must come from [`fp_store_open`] and not have been closed.
#[no_mangle]
pub unsafe extern "C" fn fp_store_close(store: *mut FpStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Publishes TriG text. A draft under the temporary IRI is finalized
/// first; a finalized nanopublication is stored byte for byte. Writes the
/// artifact code to `out_code`.
///
/// # Safety
/// Pointers must be valid; `out_code` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_publish(
    store: *const FpStore,
    trig: *const c_char,
    out_code: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let text = arg(trig, "trig")?;
        let np = Nanopublication::parse_trig(text)?;
        let code = if np.iri() == &temp_iri() {
            let (fin, _) = np.finalize()?;
            s.registry.publish(&fin)?
        } else {
            s.registry.publish_trig(text)?
        };
        put(out_code, code.to_string())
    })
}

/// The published TriG of `code` (an artifact code or its IRI).
///
/// # Safety
/// Pointers must be valid; `out_trig` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_fetch(
    store: *const FpStore,
    code: *const c_char,
    out_trig: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let code = self::code(arg(code, "code")?)?;
        put(out_trig, s.registry.fetch_trig(&code)?)
    })
}

/// Thread status (`draft`, `submitted`, `under-review`, `revised`,
/// `decided`) of a submission or formalization.
///
/// # Safety
/// Pointers must be valid; `out_status` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_status(
    store: *const FpStore,
    target: *const c_char,
    out_status: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let iri = Registry::resolve(arg(target, "target")?)?;
        let (_, status) = s.registry.status(&iri)?;
        put(out_status, status.to_string())
    })
}

/// Per-type counts for a venue as JSON.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_stats(
    store: *const FpStore,
    venue: *const c_char,
    out_json: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let venue = Registry::resolve(arg(venue, "venue")?)?;
        put(out_json, serde_json::to_string(&s.registry.stats(&venue)).expect("serializable"))
    })
}

/// The venue's thread graph as `dot` or `json`.
///
/// # Safety
/// Pointers must be valid; `out` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_graph(
    store: *const FpStore,
    venue: *const c_char,
    format: *const c_char,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let venue = Registry::resolve(arg(venue, "venue")?)?;
        let format: GraphFormat =
            arg(format, "format")?.parse().map_err(|e: String| Failure(FpStatus::InvalidParameter, e))?;
        put(out, s.registry.export_graph(&venue).render(format))
    })
}

/// Runs a named query. `params_json` is a JSON object of string values, or
/// null for none. The result is JSON with `columns` and `rows`.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_query(
    store: *const FpStore,
    name: *const c_char,
    params_json: *const c_char,
    out_json: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        let name = arg(name, "name")?;
        let params: BTreeMap<String, String> = if params_json.is_null() {
            BTreeMap::new()
        } else {
            serde_json::from_str(arg(params_json, "params_json")?)
                .map_err(|e| Failure(FpStatus::InvalidParameter, format!("params_json: {e}")))?
        };
        let result = s.registry.run_query(name, &params)?;
        put(out_json, serde_json::to_string(&result).expect("serializable"))
    })
}

/// Link-integrity findings over the whole store as a JSON array.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_store_integrity(store: *const FpStore, out_json: *mut *mut c_char) -> FpStatus {
    guard(|| {
        let s = self::store(store)?;
        put(out_json, serde_json::to_string(&s.registry.integrity()).expect("serializable"))
    })
}

/// Checks a finalized nanopublication: well-formed, valid, and its artifact
/// code matches. Writes the code on success.
///
/// # Safety
/// Pointers must be valid; `out_code` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn fp_verify(trig: *const c_char, out_code: *mut *mut c_char) -> FpStatus {
    guard(|| {
        let (code, _) = registry::check(arg(trig, "trig")?)?;
        put(out_code, code.to_string())
    })
}

/// Finalizes a draft under the temporary IRI, writing the final TriG and
/// its artifact code.
///
/// # Safety
/// Pointers must be valid; both outputs receive strings to free.
#[no_mangle]
pub unsafe extern "C" fn fp_finalize(
    trig: *const c_char,
    out_trig: *mut *mut c_char,
    out_code: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let np = Nanopublication::parse_trig(arg(trig, "trig")?)?;
        if out_trig.is_null() || out_code.is_null() {
            return Err(Failure(FpStatus::NullArgument, "output pointer is null".into()));
        }
        let (fin, code) = np.finalize()?;
        put(out_trig, fin.to_trig())?;
        put(out_code, code.to_string())
    })
}
