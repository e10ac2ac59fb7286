//! C interface to forestkit.
//!
//! Digraphs are opaque [`FkGraph`] handles created by [`fk_graph_parse`] or
//! [`fk_graph_from_arcs`] and released with [`fk_graph_free`]. Vertex ids are
//! 1-based. Matrices are written row-major into caller-provided buffers of
//! `n * n` doubles. Every fallible call returns an [`FkStatus`]; on failure
//! [`fk_last_error`] describes the cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use forestkit::accessibility::Measure;
use forestkit::edgelist::parse_digraph;
use forestkit::forest::ForestExpansion;
use forestkit::markov::{cesaro_limit, inverse_chain};
use forestkit::ranking::{borda_scores, daniels_tree_scores, mean_limit_scores};
use forestkit::{Error, Matrix, WeightedDigraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidGraph = 2,
    InvalidParameter = 3,
    BufferTooSmall = 4,
    Numerical = 5,
    NotStronglyConnected = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkMeasure {
    /// `J(tau)`; the parameter is `tau`.
    Out = 0,
    /// In-forest counterpart of `Out`; the parameter is `tau`.
    In = 1,
    LimitingOut = 2,
    LimitingIn = 3,
    /// Dense-forest measure; the parameter is `alpha`.
    DenseOut = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkScoreMethod {
    KernelMean = 0,
    DanielsTree = 1,
    /// The parameter is `tau`.
    Borda = 2,
}

/// Opaque weighted digraph.
pub struct FkGraph {
    inner: WeightedDigraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: FkStatus,
    message: String,
}

impl Failure {
    fn new(status: FkStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            _ if e.is_numerical() => FkStatus::Numerical,
            Error::NotStronglyConnected => FkStatus::NotStronglyConnected,
            Error::TooFewVertices(_)
            | Error::LoopArc(_)
            | Error::NonpositiveWeight { .. }
            | Error::VertexOutOfRange { .. }
            | Error::Parse { .. }
            | Error::DuplicateHeader { .. }
            | Error::MissingHeader => FkStatus::InvalidGraph,
            _ => FkStatus::InvalidParameter,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            FkStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(_) => {
            set_last_error("internal panic");
            FkStatus::Panic
        }
    }
}

unsafe fn graph<'a>(g: *const FkGraph) -> Result<&'a WeightedDigraph, Failure> {
    g.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure::new(FkStatus::NullPointer, "graph handle is null"))
}

unsafe fn buffer<'a>(out: *mut f64, len: usize, needed: usize) -> Result<&'a mut [f64], Failure> {
    if out.is_null() {
        return Err(Failure::new(FkStatus::NullPointer, "output buffer is null"));
    }
    if len < needed {
        return Err(Failure::new(
            FkStatus::BufferTooSmall,
            format!("output buffer holds {len} values, {needed} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(out, needed))
}

unsafe fn write_matrix(m: &Matrix, out: *mut f64, len: usize) -> Result<(), Failure> {
    let n = m.nrows();
    let buf = buffer(out, len, n * n)?;
    for i in 0..n {
        for j in 0..n {
            buf[i * n + j] = m[(i, j)];
        }
    }
    Ok(())
}

unsafe fn write_vector(v: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    buffer(out, len, v.len())?.copy_from_slice(v);
    Ok(())
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FkStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Parses an edge list (`n <count>` header, then `tail<TAB>head<TAB>weight`
/// lines) into a new handle stored at `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fk_graph_parse(text: *const c_char, out: *mut *mut FkGraph) -> FkStatus {
    guard(|| {
        if text.is_null() {
            return Err(Failure::new(FkStatus::NullPointer, "text is null"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure::new(FkStatus::InvalidUtf8, e.to_string()))?;
        let g = parse_digraph(text)?;
        store(out, Box::into_raw(Box::new(FkGraph { inner: g })))
    })
}

/// Builds a digraph on `n` vertices from `m` arcs `tails[a] -> heads[a]` with
/// weights `weights[a]`, storing a new handle at `*out`.
///
/// # Safety
/// The three arrays must hold `m` elements each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fk_graph_from_arcs(
    n: usize,
    tails: *const usize,
    heads: *const usize,
    weights: *const f64,
    m: usize,
    out: *mut *mut FkGraph,
) -> FkStatus {
    guard(|| {
        let arcs = if m == 0 {
            Vec::new()
        } else {
            if tails.is_null() || heads.is_null() || weights.is_null() {
                return Err(Failure::new(FkStatus::NullPointer, "arc array is null"));
            }
            let (t, h, w) = (
                std::slice::from_raw_parts(tails, m),
                std::slice::from_raw_parts(heads, m),
                std::slice::from_raw_parts(weights, m),
            );
            (0..m).map(|a| (t[a], h[a], w[a])).collect()
        };
        let g = WeightedDigraph::build(n, &arcs)?;
        store(out, Box::into_raw(Box::new(FkGraph { inner: g })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fk_graph_free(g: *mut FkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fk_graph_vertex_count(g: *const FkGraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.n())
}

/// Stores the number of source knots `d'` at `*out`.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fk_out_forest_dimension(g: *const FkGraph, out: *mut usize) -> FkStatus {
    guard(|| store(out, graph(g)?.strong_components().d_prime))
}

/// Writes `sigma_0, ..., sigma_{n-d'}` to `out` and their count to `*count`.
/// With a short buffer only `*count` is set and `BUFFER_TOO_SMALL` returned.
///
/// # Safety
/// `g` must be a live handle, `out` must hold `len` doubles, `count` valid.
#[no_mangle]
pub unsafe extern "C" fn fk_forest_coefficients(
    g: *const FkGraph,
    out: *mut f64,
    len: usize,
    count: *mut usize,
) -> FkStatus {
    guard(|| {
        let exp = ForestExpansion::of_graph(graph(g)?)?;
        let sigma = exp.sigma_nonzero();
        store(count, sigma.len())?;
        write_vector(sigma, out, len)
    })
}

/// Writes `J(tau) = (I + tau L)^-1`.
///
/// # Safety
/// `g` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_parametric_matrix(g: *const FkGraph, tau: f64, out: *mut f64, len: usize) -> FkStatus {
    guard(|| {
        let j = ForestExpansion::of_graph(graph(g)?)?.j_of_tau(tau)?;
        write_matrix(&j.j_matrix, out, len)
    })
}

/// Writes the limiting matrix of maximum out-forests.
///
/// # Safety
/// `g` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_limiting_matrix(g: *const FkGraph, out: *mut f64, len: usize) -> FkStatus {
    guard(|| {
        let jt = ForestExpansion::of_graph(graph(g)?)?.j_tilde();
        write_matrix(jt.matrix(), out, len)
    })
}

/// Writes an accessibility matrix. `param` is `tau` or `alpha` as the measure
/// requires and is ignored by the limiting measures.
///
/// # Safety
/// `g` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_accessibility(
    g: *const FkGraph,
    measure: FkMeasure,
    param: f64,
    out: *mut f64,
    len: usize,
) -> FkStatus {
    guard(|| {
        let measure = match measure {
            FkMeasure::Out => Measure::Out { tau: param },
            FkMeasure::In => Measure::In { tau: param },
            FkMeasure::LimitingOut => Measure::LimitingOut,
            FkMeasure::LimitingIn => Measure::LimitingIn,
            FkMeasure::DenseOut => Measure::DenseOut { alpha: param },
        };
        let p = measure.evaluate(graph(g)?)?;
        write_matrix(&p.p, out, len)
    })
}

/// Writes one score per vertex. `param` is `tau` for Borda scores and is
/// ignored otherwise.
///
/// # Safety
/// `g` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_scores(
    g: *const FkGraph,
    method: FkScoreMethod,
    param: f64,
    out: *mut f64,
    len: usize,
) -> FkStatus {
    guard(|| {
        let g = graph(g)?;
        let scores = match method {
            FkScoreMethod::KernelMean => mean_limit_scores(g)?,
            FkScoreMethod::DanielsTree => daniels_tree_scores(g)?,
            FkScoreMethod::Borda => borda_scores(g, param)?,
        };
        write_vector(&scores.values, out, len)
    })
}

/// Writes the Cesaro limit of the inverse chain `I - alpha L^T`. A NaN
/// `alpha` selects the default step; `*iterations` receives the number of
/// squarings. Non-convergence within `max_iters` returns `NUMERICAL`.
///
/// # Safety
/// `g` must be a live handle, `out` must hold `len` doubles, `iterations`
/// must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn fk_cesaro_limit(
    g: *const FkGraph,
    alpha: f64,
    max_iters: usize,
    tol: f64,
    out: *mut f64,
    len: usize,
    iterations: *mut usize,
) -> FkStatus {
    guard(|| {
        let chain = inverse_chain(graph(g)?, (!alpha.is_nan()).then_some(alpha))?;
        let result = cesaro_limit(&chain, max_iters, tol);
        if !iterations.is_null() {
            iterations.write(result.iterations);
        }
        let result = result.into_result()?;
        write_matrix(&result.pi, out, len)
    })
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fk_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fk_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
