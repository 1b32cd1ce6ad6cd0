//! C ABI over the planners.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free` function. Vertex pairs are passed as flat arrays
//! `[u0, v0, u1, v1, ...]` with `len` counting pairs. On any status other
//! than `Ok` a description is available from [`gr_last_error_message`] on
//! the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gradual::mcm::{plan_mcm, McmError};
use gradual::msf::{plan_msf, MsfError};
use gradual::mwm::{plan_mwm_any, MwmError};
use gradual::script::{verify_script, VerifyError};
use gradual::{Edge, Graph, GraphError, Matching, Script, SpanningForest, Tolerance, VertexId};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    Precondition = 4,
    GuaranteeViolated = 5,
    Internal = 6,
}

/// A mutable host graph.
pub struct GrGraph {
    inner: Graph,
}

/// A planned phase script.
pub struct GrScript {
    inner: Script,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: GrStatus, msg: impl ToString) -> GrStatus {
    set_error(msg);
    status
}

fn guarded<F: FnOnce() -> GrStatus>(f: F) -> GrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(GrStatus::Internal, "internal panic"),
    }
}

fn graph_status(e: GraphError) -> GrStatus {
    match e {
        GraphError::MissingEdge(..) | GraphError::MissingVertex(_) | GraphError::DuplicateEdge(..) => {
            fail(GrStatus::Precondition, e)
        }
        _ => fail(GrStatus::InvalidArgument, e),
    }
}

/// Last error message of this thread, or null. Valid until the next call
/// into this library on the same thread.
#[no_mangle]
pub extern "C" fn gr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn gr_graph_new() -> *mut GrGraph {
    Box::into_raw(Box::new(GrGraph { inner: Graph::new() }))
}

/// # Safety
/// `g` must be null or a pointer from [`gr_graph_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_free(g: *mut GrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_add_edge(g: *mut GrGraph, u: u32, v: u32, w: f64) -> GrStatus {
    let Some(g) = g.as_mut() else { return fail(GrStatus::NullPointer, "graph is null") };
    guarded(|| match g.inner.insert_edge(u, v, w) {
        Ok(_) => GrStatus::Ok,
        Err(e) => graph_status(e),
    })
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_remove_edge(g: *mut GrGraph, u: u32, v: u32) -> GrStatus {
    let Some(g) = g.as_mut() else { return fail(GrStatus::NullPointer, "graph is null") };
    guarded(|| match g.inner.delete_edge(u, v) {
        Ok(_) => GrStatus::Ok,
        Err(e) => graph_status(e),
    })
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_edge_count(g: *const GrGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

unsafe fn pairs(ptr: *const u32, len: usize) -> Option<Vec<(VertexId, VertexId)>> {
    if len == 0 {
        return Some(Vec::new());
    }
    if ptr.is_null() {
        return None;
    }
    let flat: &[u32] = std::slice::from_raw_parts(ptr, 2 * len);
    Some(flat.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

struct PlanInput<'a> {
    g: &'a Graph,
    from: Vec<(VertexId, VertexId)>,
    to: Vec<(VertexId, VertexId)>,
}

unsafe fn plan_input<'a>(
    g: *const GrGraph,
    from: *const u32,
    from_len: usize,
    to: *const u32,
    to_len: usize,
) -> Result<PlanInput<'a>, GrStatus> {
    let g = g.as_ref().ok_or_else(|| fail(GrStatus::NullPointer, "graph is null"))?;
    let from = pairs(from, from_len).ok_or_else(|| fail(GrStatus::NullPointer, "source pairs are null"))?;
    let to = pairs(to, to_len).ok_or_else(|| fail(GrStatus::NullPointer, "target pairs are null"))?;
    Ok(PlanInput { g: &g.inner, from, to })
}

unsafe fn emit(script: Script, out: *mut *mut GrScript) -> GrStatus {
    *out = Box::into_raw(Box::new(GrScript { inner: script }));
    GrStatus::Ok
}

fn matchings(p: &PlanInput) -> Result<(Matching, Matching), GrStatus> {
    let s = Matching::from_pairs(p.g, &p.from).map_err(|e| fail(GrStatus::DataError, format!("source: {e}")))?;
    let t = Matching::from_pairs(p.g, &p.to).map_err(|e| fail(GrStatus::DataError, format!("target: {e}")))?;
    Ok((s, t))
}

fn mcm_status(e: McmError) -> GrStatus {
    fail(GrStatus::DataError, e)
}

fn mwm_status(e: MwmError) -> GrStatus {
    match e {
        MwmError::Epsilon(_) => fail(GrStatus::InvalidArgument, e),
        MwmError::InvalidSource(_) | MwmError::InvalidTarget(_) => fail(GrStatus::DataError, e),
        _ => fail(GrStatus::Precondition, e),
    }
}

fn msf_status(e: MsfError) -> GrStatus {
    match e {
        MsfError::NotCrossEdge(_) => fail(GrStatus::Internal, e),
        _ => fail(GrStatus::DataError, e),
    }
}

/// Plans a maximum-cardinality matching transformation.
///
/// # Safety
/// `g` must be a live graph handle, the pair arrays must hold `2 * len`
/// values (or be null with `len == 0`), and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_plan_mcm(
    g: *const GrGraph,
    from: *const u32,
    from_len: usize,
    to: *const u32,
    to_len: usize,
    out: *mut *mut GrScript,
) -> GrStatus {
    if out.is_null() {
        return fail(GrStatus::NullPointer, "out is null");
    }
    guarded(|| {
        let p = match plan_input(g, from, from_len, to, to_len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let (s, t) = match matchings(&p) {
            Ok(x) => x,
            Err(st) => return st,
        };
        match plan_mcm(p.g, &s, &t) {
            Ok(script) => emit(script, out),
            Err(e) => mcm_status(e),
        }
    })
}

/// Plans a maximum-weight matching transformation with accuracy `epsilon`.
///
/// # Safety
/// As for [`gr_plan_mcm`].
#[no_mangle]
pub unsafe extern "C" fn gr_plan_mwm(
    g: *const GrGraph,
    from: *const u32,
    from_len: usize,
    to: *const u32,
    to_len: usize,
    epsilon: f64,
    out: *mut *mut GrScript,
) -> GrStatus {
    if out.is_null() {
        return fail(GrStatus::NullPointer, "out is null");
    }
    guarded(|| {
        let p = match plan_input(g, from, from_len, to, to_len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let (s, t) = match matchings(&p) {
            Ok(x) => x,
            Err(st) => return st,
        };
        match plan_mwm_any(p.g, &s, &t, epsilon) {
            Ok(script) => emit(script, out),
            Err(e) => mwm_status(e),
        }
    })
}

/// Plans a minimum spanning forest transformation.
///
/// # Safety
/// As for [`gr_plan_mcm`].
#[no_mangle]
pub unsafe extern "C" fn gr_plan_msf(
    g: *const GrGraph,
    from: *const u32,
    from_len: usize,
    to: *const u32,
    to_len: usize,
    out: *mut *mut GrScript,
) -> GrStatus {
    if out.is_null() {
        return fail(GrStatus::NullPointer, "out is null");
    }
    guarded(|| {
        let p = match plan_input(g, from, from_len, to, to_len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let s = match SpanningForest::from_pairs(p.g, &p.from) {
            Ok(x) => x,
            Err(e) => return fail(GrStatus::DataError, format!("source: {e}")),
        };
        let t = match SpanningForest::from_pairs(p.g, &p.to) {
            Ok(x) => x,
            Err(e) => return fail(GrStatus::DataError, format!("target: {e}")),
        };
        match plan_msf(p.g, &s, &t) {
            Ok(script) => emit(script, out),
            Err(e) => msf_status(e),
        }
    })
}

/// # Safety
/// `s` must be null or a live script handle.
#[no_mangle]
pub unsafe extern "C" fn gr_script_phase_count(s: *const GrScript) -> usize {
    s.as_ref().map_or(0, |s| s.inner.phases.len())
}

/// # Safety
/// `s` must be null or a live script handle.
#[no_mangle]
pub unsafe extern "C" fn gr_script_op_count(s: *const GrScript) -> usize {
    s.as_ref().map_or(0, |s| s.inner.op_count())
}

/// # Safety
/// `s` must be null or a live script handle.
#[no_mangle]
pub unsafe extern "C" fn gr_script_budget(s: *const GrScript) -> usize {
    s.as_ref().map_or(0, |s| s.inner.budget)
}

/// Writes a newly allocated JSON string to `out`; free it with [`gr_string_free`].
///
/// # Safety
/// `s` must be a live script handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gr_script_to_json(s: *const GrScript, out: *mut *mut c_char) -> GrStatus {
    let Some(s) = s.as_ref() else { return fail(GrStatus::NullPointer, "script is null") };
    if out.is_null() {
        return fail(GrStatus::NullPointer, "out is null");
    }
    guarded(|| match CString::new(s.inner.to_json()) {
        Ok(c) => {
            *out = c.into_raw();
            GrStatus::Ok
        }
        Err(e) => fail(GrStatus::Internal, e),
    })
}

/// # Safety
/// `p` must be null or a string from [`gr_script_to_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gr_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Replays `s` from `from` and checks its guarantee and that it reaches `to`.
/// Returns `Ok` on success and `GuaranteeViolated` otherwise.
///
/// # Safety
/// As for [`gr_plan_mcm`], with `s` a live script handle.
#[no_mangle]
pub unsafe extern "C" fn gr_script_check(
    g: *const GrGraph,
    from: *const u32,
    from_len: usize,
    to: *const u32,
    to_len: usize,
    s: *const GrScript,
) -> GrStatus {
    let Some(s) = s.as_ref() else { return fail(GrStatus::NullPointer, "script is null") };
    guarded(|| {
        let p = match plan_input(g, from, from_len, to, to_len) {
            Ok(p) => p,
            Err(st) => return st,
        };
        let lookup = |list: &[(VertexId, VertexId)], what: &str| -> Result<Vec<Edge>, GrStatus> {
            list.iter()
                .map(|&(u, v)| {
                    p.g.edge_between(u, v)
                        .copied()
                        .ok_or_else(|| fail(GrStatus::DataError, format!("{what}: ({u},{v}) is not an edge")))
                })
                .collect()
        };
        let (src, tgt) = match (lookup(&p.from, "source"), lookup(&p.to, "target")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(st), _) | (_, Err(st)) => return st,
        };
        match verify_script(p.g, &src, &tgt, &s.inner, Tolerance::default()) {
            Ok((_, v)) if v.passed() => GrStatus::Ok,
            Ok((_, v)) => fail(GrStatus::GuaranteeViolated, format!("{v:?}")),
            Err(VerifyError::Replay(e)) => fail(GrStatus::GuaranteeViolated, e),
            Err(e) => fail(GrStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `s` must be null or a live script handle.
#[no_mangle]
pub unsafe extern "C" fn gr_script_free(s: *mut GrScript) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
