//! C ABI over `ovoid-core`.
//!
//! Every fallible function returns an [`OvoidStatus`]; on failure the
//! message is available from [`ovoid_last_error`] on the same thread.
//! Handles are opaque and released with their `_free` function. Strings
//! returned through `char **` are owned by the caller and released with
//! [`ovoid_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use ovoid_core::error::{Error, ErrorKind};
use ovoid_core::gf::{Fe, FieldCtx};
use ovoid_core::gq::{is_maximal, GqCache, PartialOvoid};
use ovoid_core::models::{Model, ModelKind, PartialOvoidFile};
use ovoid_core::pipeline::{self, PipelineConfig};
use ovoid_core::redei::residue_set;
use ovoid_core::search::{
    canonical_qplus, search_antipode_paired, search_maximal, SearchConfig, SearchMode, SearchResult,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OvoidStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Field = 3,
    Geometry = 4,
    Model = 5,
    NotPartialOvoid = 6,
    Redei = 7,
    Config = 8,
    Unsupported = 9,
    Reference = 10,
    Io = 11,
    /// A search ended without a set (exhausted or out of time).
    NotFound = 12,
    Panic = 13,
}

impl From<ErrorKind> for OvoidStatus {
    fn from(k: ErrorKind) -> Self {
        match k {
            ErrorKind::Field => OvoidStatus::Field,
            ErrorKind::Geometry => OvoidStatus::Geometry,
            ErrorKind::Model => OvoidStatus::Model,
            ErrorKind::NotPartialOvoid => OvoidStatus::NotPartialOvoid,
            ErrorKind::Redei => OvoidStatus::Redei,
            ErrorKind::Config => OvoidStatus::Config,
            ErrorKind::Unsupported => OvoidStatus::Unsupported,
            ErrorKind::Reference => OvoidStatus::Reference,
            ErrorKind::Io => OvoidStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OvoidModelKind {
    Q4 = 0,
    T2 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OvoidSearchMode {
    /// Point-level exact search.
    Exact = 0,
    /// Antipodal pairs off the section `X0 = 0`; Q(4,q) only.
    Pairs = 1,
    /// Seeded random greedy completion.
    Random = 2,
}

/// Search parameters; see [`ovoid_search_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct OvoidSearchOptions {
    /// 0 means q^2 - 1.
    pub target: usize,
    pub mode: OvoidSearchMode,
    pub seed: u64,
    /// 0 uses all cores, 1 runs inline.
    pub threads: usize,
    /// Seconds; zero or negative means unbounded.
    pub budget_secs: f64,
}

pub struct OvoidField {
    inner: Arc<FieldCtx>,
}

pub struct OvoidModel {
    inner: Model,
}

pub struct OvoidPartialOvoid {
    inner: PartialOvoid,
    num_points: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(OvoidStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e.kind().into(), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(OvoidStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, mapping errors and panics to a status.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> OvoidStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OvoidStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OvoidStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    // SAFETY: the caller passes a pointer obtained from this library or null
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null, caller-provided storage for one T
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn write_json<S: serde::Serialize>(out: *mut *mut c_char, value: &S) -> Result<(), Fail> {
    let text = serde_json::to_string(value).map_err(Error::from)?;
    let c = CString::new(text).map_err(|e| Fail(OvoidStatus::Io, e.to_string()))?;
    unsafe { write_out(out, c.into_raw()) }
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ovoid_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ovoid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// GF(q) for an odd prime power `q`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_new(q: u32, out: *mut *mut OvoidField) -> OvoidStatus {
    guard(|| {
        let inner = Arc::new(FieldCtx::of_order(q)?);
        unsafe { write_out(out, Box::into_raw(Box::new(OvoidField { inner }))) }
    })
}

/// # Safety
/// `field` must come from [`ovoid_field_new`] (or be null).
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_free(field: *mut OvoidField) {
    if !field.is_null() {
        drop(unsafe { Box::from_raw(field) });
    }
}

/// Field order, or 0 for a null handle.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_order(field: *const OvoidField) -> u32 {
    unsafe { field.as_ref() }.map_or(0, |f| f.inner.q())
}

#[derive(Clone, Copy)]
enum FieldOp {
    Add,
    Mul,
    Div,
}

unsafe fn field_op(field: *const OvoidField, op: FieldOp, a: u32, b: u32, out: *mut u32) -> OvoidStatus {
    guard(|| {
        let f = &unsafe { as_ref(field, "field") }?.inner;
        let (a, b) = (f.elem(a)?, f.elem(b)?);
        let r: Fe = match op {
            FieldOp::Add => f.add(a, b),
            FieldOp::Mul => f.mul(a, b),
            FieldOp::Div => f.div(a, b)?,
        };
        unsafe { write_out(out, r.value()) }
    })
}

/// Sum of two encoded elements.
///
/// # Safety
/// `field` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_add(field: *const OvoidField, a: u32, b: u32, out: *mut u32) -> OvoidStatus {
    unsafe { field_op(field, FieldOp::Add, a, b, out) }
}

/// Product of two encoded elements.
///
/// # Safety
/// As [`ovoid_field_add`].
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_mul(field: *const OvoidField, a: u32, b: u32, out: *mut u32) -> OvoidStatus {
    unsafe { field_op(field, FieldOp::Mul, a, b, out) }
}

/// Quotient; division by zero fails with `Field`.
///
/// # Safety
/// As [`ovoid_field_add`].
#[no_mangle]
pub unsafe extern "C" fn ovoid_field_div(field: *const OvoidField, a: u32, b: u32, out: *mut u32) -> OvoidStatus {
    unsafe { field_op(field, FieldOp::Div, a, b, out) }
}

/// Builds and verifies a model over `field`. Honors `OVOID_CACHE_DIR`.
///
/// # Safety
/// `field` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_model_new(
    field: *const OvoidField,
    kind: OvoidModelKind,
    out: *mut *mut OvoidModel,
) -> OvoidStatus {
    guard(|| {
        let f = unsafe { as_ref(field, "field") }?.inner.clone();
        let kind = match kind {
            OvoidModelKind::Q4 => ModelKind::Q4,
            OvoidModelKind::T2 => ModelKind::T2,
        };
        let inner = Model::build_cached(kind, f, GqCache::from_env().as_ref())?;
        unsafe { write_out(out, Box::into_raw(Box::new(OvoidModel { inner }))) }
    })
}

/// # Safety
/// `model` must come from [`ovoid_model_new`] (or be null).
#[no_mangle]
pub unsafe extern "C" fn ovoid_model_free(model: *mut OvoidModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Points, lines and order `(s, t)`.
///
/// # Safety
/// `model` must be a live handle; each output valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_model_counts(
    model: *const OvoidModel,
    points: *mut usize,
    lines: *mut usize,
    s: *mut usize,
    t: *mut usize,
) -> OvoidStatus {
    guard(|| {
        let gq = unsafe { as_ref(model, "model") }?.inner.gq();
        let (os, ot) = gq.order();
        unsafe {
            write_out(points, gq.num_points())?;
            write_out(lines, gq.num_lines())?;
            write_out(s, os)?;
            write_out(t, ot)
        }
    })
}

#[no_mangle]
pub extern "C" fn ovoid_search_options_default() -> OvoidSearchOptions {
    OvoidSearchOptions {
        target: 0,
        mode: OvoidSearchMode::Pairs,
        seed: 0,
        threads: 1,
        budget_secs: 0.0,
    }
}

/// Searches for a maximal partial ovoid. In T2(C) the exact search keeps
/// `(∞)` in the set. Returns `NotFound` when the search ends empty-handed.
///
/// # Safety
/// `model` and `opts` must be live; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_search(
    model: *const OvoidModel,
    opts: *const OvoidSearchOptions,
    out: *mut *mut OvoidPartialOvoid,
) -> OvoidStatus {
    guard(|| {
        let model = &unsafe { as_ref(model, "model") }?.inner;
        let o = *unsafe { as_ref(opts, "options") }?;
        let q = model.field().q() as usize;
        let target = if o.target == 0 { q * q - 1 } else { o.target };
        let mode = match o.mode {
            OvoidSearchMode::Exact => SearchMode::ExactDfs,
            OvoidSearchMode::Pairs => SearchMode::AntipodePaired,
            OvoidSearchMode::Random => SearchMode::ExtendRandom,
        };
        let mut cfg = SearchConfig::new(target, mode);
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        cfg.time_budget = (o.budget_secs > 0.0).then_some(o.budget_secs);
        cfg.require_maximal = target == q * q - 1;
        let (result, _) = match (model, mode) {
            (Model::Q4(m), SearchMode::AntipodePaired) => {
                cfg.root_fix = None;
                search_antipode_paired(m, &canonical_qplus(m), &cfg)?
            }
            (Model::T2(_), SearchMode::AntipodePaired) => {
                return Err(Fail(OvoidStatus::InvalidArgument, "pairs mode needs the Q4 model".into()));
            }
            (Model::T2(m), _) => {
                cfg.root_fix = Some(m.infinity());
                search_maximal(m.gq(), &cfg)?
            }
            (Model::Q4(m), _) => search_maximal(m.gq(), &cfg)?,
        };
        let SearchResult::Found(k) = result else {
            return Err(Fail(OvoidStatus::NotFound, "no partial ovoid found".into()));
        };
        let handle = OvoidPartialOvoid {
            inner: k,
            num_points: model.gq().num_points(),
        };
        unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
    })
}

/// A partial ovoid from point indices of `model`.
///
/// # Safety
/// `members` must point to `len` indices (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_new(
    model: *const OvoidModel,
    members: *const usize,
    len: usize,
    out: *mut *mut OvoidPartialOvoid,
) -> OvoidStatus {
    guard(|| {
        let model = &unsafe { as_ref(model, "model") }?.inner;
        let idx: Vec<usize> = if len == 0 {
            Vec::new()
        } else if members.is_null() {
            return Err(null("members"));
        } else {
            // SAFETY: caller guarantees `len` readable indices
            unsafe { std::slice::from_raw_parts(members, len) }.to_vec()
        };
        let inner = PartialOvoid::new(model.gq(), idx)?;
        let handle = OvoidPartialOvoid {
            inner,
            num_points: model.gq().num_points(),
        };
        unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
    })
}

/// # Safety
/// `k` must come from this library (or be null).
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_free(k: *mut OvoidPartialOvoid) {
    if !k.is_null() {
        drop(unsafe { Box::from_raw(k) });
    }
}

/// Number of members, or 0 for a null handle.
///
/// # Safety
/// `k` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_len(k: *const OvoidPartialOvoid) -> usize {
    unsafe { k.as_ref() }.map_or(0, |k| k.inner.len())
}

/// Copies up to `cap` sorted member indices into `buf`; returns the total
/// member count.
///
/// # Safety
/// `buf` must have room for `cap` indices.
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_members(k: *const OvoidPartialOvoid, buf: *mut usize, cap: usize) -> usize {
    let Some(k) = (unsafe { k.as_ref() }) else {
        return 0;
    };
    let m = k.inner.members();
    if !buf.is_null() {
        let n = m.len().min(cap);
        // SAFETY: caller guarantees `cap` writable slots
        unsafe { ptr::copy_nonoverlapping(m.as_ptr(), buf, n) };
    }
    m.len()
}

fn check_same_model(model: &OvoidModel, k: &OvoidPartialOvoid) -> Result<(), Fail> {
    if model.inner.gq().num_points() != k.num_points {
        return Err(Fail(OvoidStatus::InvalidArgument, "partial ovoid belongs to another model".into()));
    }
    Ok(())
}

/// Whether no point extends `k`.
///
/// # Safety
/// Live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_is_maximal(
    model: *const OvoidModel,
    k: *const OvoidPartialOvoid,
    out: *mut bool,
) -> OvoidStatus {
    guard(|| {
        let m = unsafe { as_ref(model, "model") }?;
        let k = unsafe { as_ref(k, "partial ovoid") }?;
        check_same_model(m, k)?;
        unsafe { write_out(out, is_maximal(m.inner.gq(), &k.inner).maximal) }
    })
}

/// The partial ovoid in the JSON file format.
///
/// # Safety
/// Live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_to_json(
    model: *const OvoidModel,
    k: *const OvoidPartialOvoid,
    out: *mut *mut c_char,
) -> OvoidStatus {
    guard(|| {
        let m = unsafe { as_ref(model, "model") }?;
        let k = unsafe { as_ref(k, "partial ovoid") }?;
        check_same_model(m, k)?;
        unsafe { write_json(out, &m.inner.to_file(&k.inner)) }
    })
}

/// Parses the JSON file format against `model`.
///
/// # Safety
/// `json` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ovoid_partial_ovoid_from_json(
    model: *const OvoidModel,
    json: *const c_char,
    out: *mut *mut OvoidPartialOvoid,
) -> OvoidStatus {
    guard(|| {
        let m = &unsafe { as_ref(model, "model") }?.inner;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| Fail(OvoidStatus::InvalidArgument, e.to_string()))?;
        let file: PartialOvoidFile = serde_json::from_str(text).map_err(Error::from)?;
        let handle = OvoidPartialOvoid {
            inner: m.from_file(&file)?,
            num_points: m.gq().num_points(),
        };
        unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
    })
}

/// Verification report (maximality, subquadrangle, identity suite) as JSON.
///
/// # Safety
/// Live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_verify_json(
    model: *const OvoidModel,
    k: *const OvoidPartialOvoid,
    out: *mut *mut c_char,
) -> OvoidStatus {
    guard(|| {
        let m = unsafe { as_ref(model, "model") }?;
        let k = unsafe { as_ref(k, "partial ovoid") }?;
        check_same_model(m, k)?;
        let report = pipeline::verify_partial_ovoid(&m.inner, &k.inner, GqCache::from_env().as_ref())?;
        unsafe { write_json(out, &report) }
    })
}

/// Elliptic-section census with its checks, as JSON.
///
/// # Safety
/// Live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_census_json(
    model: *const OvoidModel,
    k: *const OvoidPartialOvoid,
    out: *mut *mut c_char,
) -> OvoidStatus {
    guard(|| {
        let m = unsafe { as_ref(model, "model") }?;
        let k = unsafe { as_ref(k, "partial ovoid") }?;
        check_same_model(m, k)?;
        let (q4, kq) = pipeline::in_quadric_model(&m.inner, &k.inner, GqCache::from_env().as_ref())?;
        unsafe { write_json(out, &pipeline::census_summary(&q4, &kq)?) }
    })
}

/// Allowed residues mod p, as a JSON array. Prime q only.
///
/// # Safety
/// `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_residues_json(q: u32, out: *mut *mut c_char) -> OvoidStatus {
    guard(|| {
        let f = FieldCtx::of_order(q)?;
        unsafe { write_json(out, &residue_set(&f)?) }
    })
}

/// Full search-verify-census run for prime q, as JSON. A reference
/// mismatch still returns the report, with status `Reference`.
///
/// # Safety
/// `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ovoid_pipeline_json(q: u32, threads: usize, out: *mut *mut c_char) -> OvoidStatus {
    let mut passed = true;
    let status = guard(|| {
        let mut cfg = PipelineConfig::new(q);
        cfg.threads = threads;
        let run = pipeline::run_pipeline(&cfg)?;
        passed = run.report.passed();
        unsafe { write_json(out, &run) }
    });
    if status == OvoidStatus::Ok && !passed {
        set_error("report does not match the reference values");
        return OvoidStatus::Reference;
    }
    status
}
