//! C ABI over `braidqp`.
//!
//! Objects are opaque handles created by `bq_*` constructors and released by
//! the matching `*_free` function. Every fallible call returns a
//! [`BqStatus`]; on failure `bq_last_error_message` describes the error for
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and must be released with `bq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use braidqp::cohomology::{build_complex, right_equivalent_primitive, twisted_class_of, two_cycle_basis};
use braidqp::mutation::{mutate, mutate_along_move, QP};
use braidqp::potential::{seeded_potential, Seeding};
use braidqp::{build_qx, build_qxtilde, BraidMove, BraidQuiver, Error, GammaGraph, Vertex, Word};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidGraph = 4,
    UnknownLabel = 5,
    InvalidMove = 6,
    Conditions = 7,
    Precondition = 8,
    Potential = 9,
    Unsupported = 10,
    Invariant = 11,
    Io = 12,
    Panic = 13,
}

/// Coefficient choice for a primitive potential.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqSeeding {
    Ones = 0,
    PowersOfTwo = 1,
}

/// A simply-laced graph.
pub struct BqGraph(GammaGraph);

/// The quiver `Q(x~)` of a word together with the word and its graph.
pub struct BqBraidQuiver(BraidQuiver);

/// A quiver with potential.
pub struct BqQp(QP);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BqStatus {
    match e {
        Error::Parse { .. } => BqStatus::Parse,
        Error::InvalidGraph(_) | Error::Gluing(_) => BqStatus::InvalidGraph,
        Error::UnknownLabel(_) => BqStatus::UnknownLabel,
        Error::InvalidMove { .. } => BqStatus::InvalidMove,
        Error::Conditions(_) => BqStatus::Conditions,
        Error::Precondition(_) => BqStatus::Precondition,
        Error::Potential(_) => BqStatus::Potential,
        Error::Unsupported(_) => BqStatus::Unsupported,
        Error::Invariant(_) => BqStatus::Invariant,
        Error::Io(_) => BqStatus::Io,
        Error::Json(_) => BqStatus::Parse,
    }
}

struct Fail(BqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> BqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BqStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BqStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Fail(BqStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(BqStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BqStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(BqStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(BqStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Fail(BqStatus::InvalidUtf8, "string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn check_out<T>(out: *mut T) -> FfiResult<()> {
    if out.is_null() {
        Err(Fail(BqStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next `bq_*` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn bq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph description (`vertices: ...` and `edge: a b` lines).
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_graph_parse(source: *const c_char, out: *mut *mut BqGraph) -> BqStatus {
    guard(|| {
        let t = text(source, "source")?;
        store(out, BqGraph(GammaGraph::parse(t, "<ffi>")?))
    })
}

/// Builtin graph by name: `aN` for the path, `cycleN` for the cycle.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_graph_builtin(name: *const c_char, out: *mut *mut BqGraph) -> BqStatus {
    guard(|| {
        let n = text(name, "name")?;
        let size = |prefix: &str, min: usize| {
            n.strip_prefix(prefix)
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= min)
        };
        let g = match (size("cycle", 3), size("a", 1)) {
            (Some(k), _) => GammaGraph::cycle(k),
            (None, Some(k)) => GammaGraph::a_n(k),
            (None, None) => return Err(Fail(BqStatus::InvalidGraph, format!("`{n}` is not a builtin graph"))),
        };
        store(out, BqGraph(g))
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bq_graph_free(g: *mut BqGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// First Betti number of the graph.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_graph_betti(g: *const BqGraph, out: *mut usize) -> BqStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        check_out(out)?;
        *out = g.0.first_betti_number();
        Ok(())
    })
}

/// Builds `Q(x)` for a word and returns it as JSON.
///
/// # Safety
/// `g` must be a live handle, `word` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_build_qx_json(g: *const BqGraph, word: *const c_char, out: *mut *mut c_char) -> BqStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let w = Word::parse(text(word, "word")?, &g.0)?;
        store_string(out, build_qx(&w, &g.0)?.to_json())
    })
}

/// Builds `Q(x~)` for a word.
///
/// # Safety
/// `g` must be a live handle, `word` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_build_qxtilde(g: *const BqGraph, word: *const c_char, out: *mut *mut BqBraidQuiver) -> BqStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let w = Word::parse(text(word, "word")?, &g.0)?;
        store(out, BqBraidQuiver(build_qxtilde(&w, &g.0)?))
    })
}

/// # Safety
/// `bq` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bq_braid_quiver_free(bq: *mut BqBraidQuiver) {
    if !bq.is_null() {
        drop(Box::from_raw(bq));
    }
}

/// The quiver as JSON.
///
/// # Safety
/// `bq` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_braid_quiver_to_json(bq: *const BqBraidQuiver, out: *mut *mut c_char) -> BqStatus {
    guard(|| store_string(out, borrow(bq, "braid quiver")?.0.quiver.to_json()))
}

/// The word of the quiver, in the same notation the parser accepts.
///
/// # Safety
/// `bq` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_braid_quiver_word(bq: *const BqBraidQuiver, out: *mut *mut c_char) -> BqStatus {
    guard(|| store_string(out, borrow(bq, "braid quiver")?.0.word.to_string()))
}

/// A primitive potential on `Q(x~)`, with all coefficients 1 or with
/// seeded signed powers of two.
///
/// # Safety
/// `bq` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_qp_primitive(
    bq: *const BqBraidQuiver,
    seeding: BqSeeding,
    seed: u64,
    max_exp: u32,
    out: *mut *mut BqQp,
) -> BqStatus {
    guard(|| {
        let bq = borrow(bq, "braid quiver")?;
        let cw = build_complex(&bq.0)?;
        let s = match seeding {
            BqSeeding::Ones => Seeding::Ones,
            BqSeeding::PowersOfTwo => Seeding::PowersOfTwo { seed, max_exp },
        };
        let w = seeded_potential(&cw.cells, &s)?;
        store(out, BqQp(QP::from_quiver(&bq.0.quiver, w)?))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_qp_from_json(json: *const c_char, out: *mut *mut BqQp) -> BqStatus {
    guard(|| store(out, BqQp(QP::from_json(text(json, "json")?)?)))
}

/// # Safety
/// `qp` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_qp_to_json(qp: *const BqQp, out: *mut *mut c_char) -> BqStatus {
    guard(|| store_string(out, borrow(qp, "qp")?.0.to_json()?))
}

/// # Safety
/// `qp` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bq_qp_free(qp: *mut BqQp) {
    if !qp.is_null() {
        drop(Box::from_raw(qp));
    }
}

/// Mutation at a vertex written `dec,idx`.
///
/// # Safety
/// `qp` must be a live handle, `vertex` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_qp_mutate(qp: *const BqQp, vertex: *const c_char, out: *mut *mut BqQp) -> BqStatus {
    guard(|| {
        let qp = borrow(qp, "qp")?;
        let k: Vertex = text(vertex, "vertex")?.parse()?;
        store(out, BqQp(mutate(&qp.0, &k)?))
    })
}

/// Applies a braid move `kind@position` and mutates the potential of `qp`
/// along it. Returns the quiver of the new word and the moved QP.
///
/// # Safety
/// Handles must be live, `mv` a NUL-terminated string, outputs valid.
#[no_mangle]
pub unsafe extern "C" fn bq_mutate_along_move(
    bq: *const BqBraidQuiver,
    qp: *const BqQp,
    mv: *const c_char,
    out_bq: *mut *mut BqBraidQuiver,
    out_qp: *mut *mut BqQp,
) -> BqStatus {
    guard(|| {
        let bq = borrow(bq, "braid quiver")?;
        let qp = borrow(qp, "qp")?;
        let mv: BraidMove = text(mv, "move")?.parse()?;
        check_out(out_bq)?;
        check_out(out_qp)?;
        let outcome = mutate_along_move(&bq.0, &qp.0.potential, &mv)?;
        store(out_bq, BqBraidQuiver(outcome.target))?;
        store(out_qp, BqQp(outcome.qp))
    })
}

/// Size of the 2-cycle basis and the twisted class of a primitive
/// potential, the latter formatted as `[c1, c2, ...]`.
///
/// # Safety
/// Handles must be live and outputs valid.
#[no_mangle]
pub unsafe extern "C" fn bq_twisted_class(
    bq: *const BqBraidQuiver,
    qp: *const BqQp,
    out_rank: *mut usize,
    out_class: *mut *mut c_char,
) -> BqStatus {
    guard(|| {
        let bq = borrow(bq, "braid quiver")?;
        let qp = borrow(qp, "qp")?;
        check_out(out_rank)?;
        check_out(out_class)?;
        let cw = build_complex(&bq.0)?;
        let basis = two_cycle_basis(&cw);
        let class = twisted_class_of(&qp.0.potential, &cw, &basis)?;
        *out_rank = basis.len();
        store_string(out_class, class.to_string())
    })
}

/// Whether two primitive potentials on `Q(x~)` are right-equivalent.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_right_equivalent(
    bq: *const BqBraidQuiver,
    qp1: *const BqQp,
    qp2: *const BqQp,
    out: *mut bool,
) -> BqStatus {
    guard(|| {
        let bq = borrow(bq, "braid quiver")?;
        let (a, b) = (borrow(qp1, "qp1")?, borrow(qp2, "qp2")?);
        check_out(out)?;
        let cw = build_complex(&bq.0)?;
        let basis = two_cycle_basis(&cw);
        *out = right_equivalent_primitive(&a.0.potential, &b.0.potential, &cw, &basis)?;
        Ok(())
    })
}
