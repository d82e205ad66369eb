//! C ABI for `qmut`.
//!
//! Objects are opaque handles created by `qmut_*` constructors and released by
//! the matching `*_free`. Every fallible function returns a [`QmutStatus`];
//! on failure a message is available from [`qmut_last_error_message`] until the
//! next call on the same thread. Strings returned through `char **` are owned
//! by the caller and must be released with [`qmut_string_free`]. Vertices are
//! 1-based, as in the JSON documents.

use num_integer::Integer;
use qmut::document::{GramDocument, QuiverDocument};
use qmut::series::{self, Family, StandardForm};
use qmut::{report, ExploreBudget, QmutError, Quiver, Realization, Verdict};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes. Values 2 to 6 coincide with the exit codes of the `qmut` CLI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmutStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    VertexOutOfRange = 3,
    Infinite = 4,
    BudgetExhausted = 5,
    NoPath = 6,
    InvalidArgument = 8,
    NoRealization = 9,
    Panic = 10,
    Other = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmutVerdict {
    Finite = 0,
    Infinite = 1,
    BudgetExhausted = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmutFamily {
    Odd = 0,
    EvenA = 1,
    EvenB = 2,
}

/// Opaque quiver handle.
pub struct QmutQuiver(Quiver);

/// Opaque realization handle (a Gram matrix together with its ambient order).
pub struct QmutRealization {
    gram: Realization,
    ambient: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(QmutStatus, String);

impl From<QmutError> for Fail {
    fn from(e: QmutError) -> Self {
        let status = match e {
            QmutError::Parse(_)
            | QmutError::InvalidLabel { .. }
            | QmutError::IncompatibleAmbient { .. }
            | QmutError::NotSkewSymmetric
            | QmutError::NotGram
            | QmutError::EmptyVertexSet => QmutStatus::Parse,
            QmutError::VertexOutOfRange { .. } => QmutStatus::VertexOutOfRange,
            QmutError::NotFinite => QmutStatus::Infinite,
            QmutError::BudgetExhausted(_) => QmutStatus::BudgetExhausted,
            QmutError::NoRealizationShape | QmutError::Incompatible { .. } => QmutStatus::NoRealization,
            QmutError::ConditionViolation(_) | QmutError::WrongRank { .. } | QmutError::OddFamily => QmutStatus::InvalidArgument,
            _ => QmutStatus::Other,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QmutStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QmutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QmutStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QmutStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(QmutStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn quiver_arg<'a>(p: *const QmutQuiver) -> Result<&'a Quiver, Fail> {
    p.as_ref().map(|q| &q.0).ok_or_else(|| null("quiver"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_quiver(out: *mut *mut QmutQuiver, q: Quiver) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(QmutQuiver(q))));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(CString::new(s).expect("no interior nul").into_raw());
    Ok(())
}

fn vertex(v: usize, rank: usize) -> Result<usize, Fail> {
    if v == 0 || v > rank {
        return Err(QmutError::VertexOutOfRange { vertex: v, rank }.into());
    }
    Ok(v - 1)
}

fn budget(max_nodes: usize) -> ExploreBudget {
    ExploreBudget::with_max_nodes(max_nodes.max(1))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next `qmut_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qmut_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn qmut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a quiver JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_from_json(json: *const c_char, out: *mut *mut QmutQuiver) -> QmutStatus {
    guard(|| {
        let doc = QuiverDocument::from_json(str_arg(json, "json")?)?;
        put_quiver(out, doc.to_quiver()?)
    })
}

/// Copies a built-in seed by name (`"H3"`, `"h4_11"`, ...).
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_builtin(name: *const c_char, out: *mut *mut QmutQuiver) -> QmutStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let e = qmut::tables::lookup(name).ok_or_else(|| Fail(QmutStatus::InvalidArgument, format!("unknown built-in seed {name:?}")))?;
        put_quiver(out, e.quiver())
    })
}

/// Standard-form quiver of a rank-4 series tuple.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_series_realize(
    family: QmutFamily,
    n: u32,
    k: u32,
    q: u32,
    m: u32,
    s: u32,
    out: *mut *mut QmutQuiver,
) -> QmutStatus {
    guard(|| {
        let family = match family {
            QmutFamily::Odd => Family::Odd,
            QmutFamily::EvenA => Family::EvenA,
            QmutFamily::EvenB => Family::EvenB,
        };
        let sf = StandardForm::new(family, n, k, q, m, s)?;
        put_quiver(out, series::realize_standard_form(&sf)?)
    })
}

/// # Safety
/// `q` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_free(q: *mut QmutQuiver) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Serializes to a JSON document.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_to_json(q: *const QmutQuiver, out: *mut *mut c_char) -> QmutStatus {
    guard(|| put_string(out, QuiverDocument::from_quiver(quiver_arg(q)?).to_json()))
}

/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_rank(q: *const QmutQuiver, out: *mut usize) -> QmutStatus {
    guard(|| put(out, quiver_arg(q)?.rank()))
}

/// Approximate value of b[i][j] (positive for an arrow i -> j).
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_weight(q: *const QmutQuiver, i: usize, j: usize, out: *mut f64) -> QmutStatus {
    guard(|| {
        let q = quiver_arg(q)?;
        let (i, j) = (vertex(i, q.rank())?, vertex(j, q.rank())?);
        put(out, q.entry(i, j).approx())
    })
}

/// Label m/d of the arrow between i and j, whichever its direction. Fails with
/// `InvalidArgument` when there is no arrow or the weight has no label.
///
/// # Safety
/// `q` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_label(q: *const QmutQuiver, i: usize, j: usize, num: *mut u32, den: *mut u32) -> QmutStatus {
    guard(|| {
        let q = quiver_arg(q)?;
        let (a, b) = (vertex(i, q.rank())?, vertex(j, q.rank())?);
        let l = q
            .has_arrow(a, b)
            .then(|| q.weight(a, b).to_label())
            .flatten()
            .ok_or_else(|| Fail(QmutStatus::InvalidArgument, format!("no labelled arrow between {i} and {j}")))?;
        put(num, l.num())?;
        put(den, l.den())
    })
}

/// Mutation at a vertex; the input is left unchanged.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_mutate(q: *const QmutQuiver, v: usize, out: *mut *mut QmutQuiver) -> QmutStatus {
    guard(|| {
        let q = quiver_arg(q)?;
        put_quiver(out, q.mutate(vertex(v, q.rank())?)?)
    })
}

/// Applies `len` mutations in order.
///
/// # Safety
/// `q` must be a live handle; `seq` must point to `len` values (or be null when
/// `len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_mutate_seq(
    q: *const QmutQuiver,
    seq: *const usize,
    len: usize,
    out: *mut *mut QmutQuiver,
) -> QmutStatus {
    guard(|| {
        let q = quiver_arg(q)?;
        let seq = if len == 0 {
            &[][..]
        } else if seq.is_null() {
            return Err(null("seq"));
        } else {
            std::slice::from_raw_parts(seq, len)
        };
        let seq = seq.iter().map(|&v| vertex(v, q.rank())).collect::<Result<Vec<_>, _>>()?;
        put_quiver(out, q.mutate_seq(&seq)?)
    })
}

/// Whether the two quivers are isomorphic (or anti-isomorphic, with `mod_opposite`).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_quiver_isomorphic(
    a: *const QmutQuiver,
    b: *const QmutQuiver,
    mod_opposite: bool,
    out: *mut bool,
) -> QmutStatus {
    guard(|| {
        let (a, b) = (quiver_arg(a)?, quiver_arg(b)?);
        let same = a.rank() == b.rank() && {
            let ambient = a.ambient().lcm(&b.ambient());
            qmut::canonical_form(&a.lift(ambient)?, mod_opposite)? == qmut::canonical_form(&b.lift(ambient)?, mod_opposite)?
        };
        put(out, same)
    })
}

/// Explores the mutation class. `size` receives the number of classes reached
/// (the class size when the verdict is finite).
///
/// # Safety
/// `q` must be a live handle; `verdict` and `size` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_explore(
    q: *const QmutQuiver,
    max_nodes: usize,
    mod_opposite: bool,
    verdict: *mut QmutVerdict,
    size: *mut usize,
) -> QmutStatus {
    guard(|| {
        let r = qmut::explore(quiver_arg(q)?, &budget(max_nodes), mod_opposite)?;
        let v = match r.verdict {
            Verdict::Finite => QmutVerdict::Finite,
            Verdict::Infinite => QmutVerdict::Infinite,
            Verdict::BudgetExhausted => QmutVerdict::BudgetExhausted,
        };
        put(verdict, v)?;
        put(size, r.size)
    })
}

/// Explores the mutation class and returns the full JSON report.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_explore_json(
    q: *const QmutQuiver,
    max_nodes: usize,
    mod_opposite: bool,
    out: *mut *mut c_char,
) -> QmutStatus {
    guard(|| {
        let r = qmut::explore(quiver_arg(q)?, &budget(max_nodes), mod_opposite)?;
        put_string(out, report::class_report_value(&r).to_string())
    })
}

/// Rank-3 finiteness decision.
///
/// # Safety
/// `q` must be a live handle; `finite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_classify_rank3(q: *const QmutQuiver, finite: *mut bool) -> QmutStatus {
    guard(|| put(finite, qmut::classify_rank3(quiver_arg(q)?)?.is_finite()))
}

/// Mutation sequence (JSON array of 1-based vertices) from `a` to a quiver
/// isomorphic to `b`; `NoPath` when none exists within `max_depth` steps.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_find_mutation_path(
    a: *const QmutQuiver,
    b: *const QmutQuiver,
    max_depth: usize,
    out: *mut *mut c_char,
) -> QmutStatus {
    guard(|| match qmut::find_mutation_path(quiver_arg(a)?, quiver_arg(b)?, max_depth)? {
        Some(p) => put_string(out, serde_json::to_string(&p.iter().map(|v| v + 1).collect::<Vec<_>>()).expect("serializable")),
        None => Err(Fail(QmutStatus::NoPath, format!("no mutation path within {max_depth} steps"))),
    })
}

/// Initial realization of an acyclic or double-arrow-shaped quiver.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_initial(q: *const QmutQuiver, out: *mut *mut QmutRealization) -> QmutStatus {
    guard(|| {
        let q = quiver_arg(q)?;
        let gram = qmut::initial_realization(q)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(Box::new(QmutRealization { gram, ambient: q.ambient() })));
        Ok(())
    })
}

/// Partial reflection at `v` of a realization compatible with `q`.
///
/// # Safety
/// `r` and `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_mutate(
    r: *const QmutRealization,
    q: *const QmutQuiver,
    v: usize,
    out: *mut *mut QmutRealization,
) -> QmutStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("realization"))?;
        let q = quiver_arg(q)?;
        let gram = qmut::mutate_realization(&r.gram, q, vertex(v, q.rank())?)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(Box::new(QmutRealization { gram, ambient: r.ambient })));
        Ok(())
    })
}

/// Dimension of the kernel of the Gram form.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_corank(r: *const QmutRealization, out: *mut usize) -> QmutStatus {
    guard(|| put(out, qmut::gram_corank(&r.as_ref().ok_or_else(|| null("realization"))?.gram)))
}

/// Whether the realization is compatible with `q` and admissible.
///
/// # Safety
/// `r` and `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_is_admissible(r: *const QmutRealization, q: *const QmutQuiver, out: *mut bool) -> QmutStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("realization"))?.gram;
        let q = quiver_arg(q)?;
        put(out, qmut::check_compatibility(r, q) && qmut::check_admissible(r, q))
    })
}

/// Gram matrix as a JSON document.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_to_json(r: *const QmutRealization, out: *mut *mut c_char) -> QmutStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("realization"))?;
        put_string(out, GramDocument::from_realization(&r.gram, r.ambient).to_json())
    })
}

/// # Safety
/// `r` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn qmut_realization_free(r: *mut QmutRealization) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Propagates a realization through the class and returns the JSON report.
/// Succeeds whether or not violations were found; see the `holds` field.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmut_verify_class_realization(q: *const QmutQuiver, max_nodes: usize, out: *mut *mut c_char) -> QmutStatus {
    guard(|| {
        let r = qmut::verify_class_realization(quiver_arg(q)?, &budget(max_nodes))?;
        let gram = qmut::initial_realization(&r.start)?;
        put_string(out, report::realization_value(&r, &gram).to_string())
    })
}
