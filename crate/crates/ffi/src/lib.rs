//! C ABI for paracc.
//!
//! Graphs and clusterings are opaque heap handles created by `*_new` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`ParaccStatus`]; on failure a description is available from
//! [`paracc_last_error_message`] on the same thread. Node ids are 0-based and
//! bipartite clusterings use the combined id space (right nodes shifted by
//! `n1`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use paracc::eval::ari;
use paracc::heuristics::{hyperlam_louvain, ExpansionKind};
use paracc::rounding::{pbcc_round, verify_case_bounds, Regime, RoundMode};
use paracc::{
    hyperlam_objective, pbcc_objective, BipartiteGraph, Clustering, CutPenalty, Hypergraph, LpOptions, ParaccError,
    WeightMode,
};

/// Opaque hypergraph handle.
pub struct ParaccHypergraph(Hypergraph);

/// Opaque bipartite graph handle.
pub struct ParaccBipartite(BipartiteGraph);

/// Opaque clustering handle.
pub struct ParaccClustering(Clustering);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidGraph = 3,
    Parse = 4,
    SizeLimit = 5,
    ZeroVolume = 6,
    Undefined = 7,
    NotConverged = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaccCutPenalty {
    AllOrNothing = 0,
    Linear = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaccWeightMode {
    Unit = 0,
    Degree = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaccRegime {
    Matching = 0,
    BiclusterDeletion = 1,
    MuZero = 2,
    EqualMu = 3,
    Sweep = 4,
    Fixed = 5,
}

/// Summary of [`paracc_pbcc_round`]. Absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ParaccRoundInfo {
    pub regime: ParaccRegime,
    pub delta: f64,
    pub alpha: f64,
    /// PBCC objective of the returned clustering.
    pub objective: f64,
    pub lp_objective: f64,
    pub lp_lower_bound: f64,
    /// 1 if the LP solve converged, 0 if not, -1 if no LP was solved.
    pub lp_converged: i32,
    /// 1 if the approximation checker passed, 0 if it failed, -1 if not run.
    pub check_passed: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &ParaccError) -> ParaccStatus {
    match e {
        ParaccError::InvalidParameter { .. } => ParaccStatus::InvalidParameter,
        ParaccError::InvalidGraph(_) => ParaccStatus::InvalidGraph,
        ParaccError::Parse { .. } | ParaccError::Csv(_) | ParaccError::Json(_) => ParaccStatus::Parse,
        ParaccError::SizeLimit { .. } => ParaccStatus::SizeLimit,
        ParaccError::ZeroVolume => ParaccStatus::ZeroVolume,
        ParaccError::Undefined(_) => ParaccStatus::Undefined,
        ParaccError::NotConverged => ParaccStatus::NotConverged,
        ParaccError::Io(_) => ParaccStatus::Io,
    }
}

enum Failure {
    Lib(ParaccError),
    Status(ParaccStatus, &'static str),
}

impl From<ParaccError> for Failure {
    fn from(e: ParaccError) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(ParaccStatus::NullPointer, "required pointer argument is null")
}

/// Run `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ParaccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ParaccStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            ParaccStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn paracc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn paracc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a hypergraph from CSR arrays: hyperedge `e` holds
/// `nodes[offsets[e] .. offsets[e + 1]]`. `weights` may be NULL (all 1).
///
/// # Safety
/// `offsets` must point to `num_edges + 1` values, `nodes` to
/// `offsets[num_edges]` values, `weights` (if not NULL) to `num_edges` values.
#[no_mangle]
pub unsafe extern "C" fn paracc_hypergraph_new(
    n: usize,
    offsets: *const usize,
    nodes: *const usize,
    weights: *const f64,
    num_edges: usize,
    out: *mut *mut ParaccHypergraph,
) -> ParaccStatus {
    guard(|| {
        let offsets = slice(offsets, num_edges + 1)?;
        let total = *offsets.last().expect("num_edges + 1 >= 1");
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Failure::Status(ParaccStatus::InvalidParameter, "offsets must start at 0 and be nondecreasing"));
        }
        let nodes = slice(nodes, total)?;
        let weights = if weights.is_null() { None } else { Some(slice(weights, num_edges)?) };
        let edges = (0..num_edges)
            .map(|e| (nodes[offsets[e]..offsets[e + 1]].to_vec(), weights.map_or(1.0, |w| w[e])))
            .collect();
        put(out, boxed(ParaccHypergraph(Hypergraph::with_edge_weights(n, edges)?)))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`paracc_hypergraph_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn paracc_hypergraph_free(h: *mut ParaccHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Build a bipartite graph from `m` edges `(left[k], right[k])`, each id
/// local to its side.
///
/// # Safety
/// `left` and `right` must each point to `m` values.
#[no_mangle]
pub unsafe extern "C" fn paracc_bipartite_new(
    n1: usize,
    n2: usize,
    left: *const usize,
    right: *const usize,
    m: usize,
    out: *mut *mut ParaccBipartite,
) -> ParaccStatus {
    guard(|| {
        let (l, r) = (slice(left, m)?, slice(right, m)?);
        let g = BipartiteGraph::new(n1, n2, l.iter().copied().zip(r.iter().copied()))?;
        put(out, boxed(ParaccBipartite(g)))
    })
}

/// # Safety
/// `g` must be NULL or a handle from [`paracc_bipartite_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn paracc_bipartite_free(g: *mut ParaccBipartite) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Clustering from arbitrary labels; clusters are renumbered by first
/// appearance.
///
/// # Safety
/// `labels` must point to `n` values.
#[no_mangle]
pub unsafe extern "C" fn paracc_clustering_new(
    labels: *const usize,
    n: usize,
    out: *mut *mut ParaccClustering,
) -> ParaccStatus {
    guard(|| {
        let labels = slice(labels, n)?;
        put(out, boxed(ParaccClustering(Clustering::new(labels.iter().copied()))))
    })
}

/// # Safety
/// `c` must be NULL or a clustering handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn paracc_clustering_free(c: *mut ParaccClustering) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn paracc_clustering_len(c: *const ParaccClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Number of clusters, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn paracc_clustering_num_clusters(c: *const ParaccClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.num_clusters())
}

/// Copy the canonical cluster ids into `buf`, which must hold at least
/// `paracc_clustering_len(c)` values.
///
/// # Safety
/// `c` must be a live clustering handle and `buf` must point to `len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn paracc_clustering_assignment(
    c: *const ParaccClustering,
    buf: *mut usize,
    len: usize,
) -> ParaccStatus {
    guard(|| {
        let a = handle(c)?.0.assignment();
        if len < a.len() {
            return Err(Failure::Status(ParaccStatus::BufferTooSmall, "buffer shorter than the clustering"));
        }
        if buf.is_null() {
            return Err(null());
        }
        std::ptr::copy_nonoverlapping(a.as_ptr(), buf, a.len());
        Ok(())
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_pbcc_objective(
    g: *const ParaccBipartite,
    c: *const ParaccClustering,
    mu1: f64,
    mu2: f64,
    beta: f64,
    out: *mut f64,
) -> ParaccStatus {
    guard(|| {
        let v = pbcc_objective(&handle(g)?.0, &handle(c)?.0, mu1, mu2, beta)?;
        put(out, v)
    })
}

fn penalty(p: ParaccCutPenalty) -> CutPenalty {
    match p {
        ParaccCutPenalty::AllOrNothing => CutPenalty::AllOrNothing,
        ParaccCutPenalty::Linear => CutPenalty::Linear,
    }
}

fn mode(w: ParaccWeightMode) -> WeightMode {
    match w {
        ParaccWeightMode::Unit => WeightMode::Unit,
        ParaccWeightMode::Degree => WeightMode::Degree,
    }
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_hyperlam_objective(
    h: *const ParaccHypergraph,
    c: *const ParaccClustering,
    lambda: f64,
    cut: ParaccCutPenalty,
    weights: ParaccWeightMode,
    out: *mut f64,
) -> ParaccStatus {
    guard(|| {
        let v = hyperlam_objective(&handle(h)?.0, &handle(c)?.0, lambda, penalty(cut), mode(weights))?;
        put(out, v)
    })
}

/// Solve the PBCC LP and round. A NaN `delta` selects the threshold from the
/// parameter regime; otherwise `delta` is used as given. `info` may be NULL.
///
/// # Safety
/// `g` must be live; `out` must be writable; `info` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_pbcc_round(
    g: *const ParaccBipartite,
    mu1: f64,
    mu2: f64,
    beta: f64,
    delta: f64,
    seed: u64,
    out: *mut *mut ParaccClustering,
    info: *mut ParaccRoundInfo,
) -> ParaccStatus {
    guard(|| {
        let g = &handle(g)?.0;
        if out.is_null() {
            return Err(null());
        }
        let round_mode = if delta.is_nan() {
            RoundMode::Auto
        } else {
            RoundMode::Fixed { delta, alpha: None }
        };
        let r = pbcc_round(g, mu1, mu2, beta, round_mode, seed, &LpOptions::default())?;
        if !info.is_null() {
            let regime = match r.regime {
                Regime::Matching => ParaccRegime::Matching,
                Regime::BiclusterDeletion => ParaccRegime::BiclusterDeletion,
                Regime::MuZero => ParaccRegime::MuZero,
                Regime::EqualMu => ParaccRegime::EqualMu,
                Regime::Sweep => ParaccRegime::Sweep,
                Regime::Fixed => ParaccRegime::Fixed,
            };
            info.write(ParaccRoundInfo {
                regime,
                delta: r.delta.unwrap_or(f64::NAN),
                alpha: r.alpha.unwrap_or(f64::NAN),
                objective: r.objective,
                lp_objective: r.lp.as_ref().map_or(f64::NAN, |l| l.objective),
                lp_lower_bound: r.lp.as_ref().map_or(f64::NAN, |l| l.lower_bound),
                lp_converged: r.lp.as_ref().map_or(-1, |l| i32::from(l.converged)),
                check_passed: r.check.as_ref().map_or(-1, |c| i32::from(c.passed)),
            });
        }
        out.write(boxed(ParaccClustering(r.clustering)));
        Ok(())
    })
}

/// Lambda-Louvain on the clique expansion (all-or-nothing) or the star
/// expansion (linear).
///
/// # Safety
/// `h` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_hyperlam_louvain(
    h: *const ParaccHypergraph,
    lambda: f64,
    cut: ParaccCutPenalty,
    weights: ParaccWeightMode,
    seed: u64,
    out: *mut *mut ParaccClustering,
) -> ParaccStatus {
    guard(|| {
        let kind = match cut {
            ParaccCutPenalty::AllOrNothing => ExpansionKind::AonViaClique,
            ParaccCutPenalty::Linear => ExpansionKind::LinearViaStar,
        };
        let c = hyperlam_louvain(&handle(h)?.0, lambda, kind, mode(weights), seed)?;
        put(out, boxed(ParaccClustering(c)))
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_ari(
    a: *const ParaccClustering,
    b: *const ParaccClustering,
    out: *mut f64,
) -> ParaccStatus {
    guard(|| {
        let v = ari(&handle(a)?.0, &handle(b)?.0)?;
        put(out, v)
    })
}

/// Evaluate the bad-triangle case bounds. `min_margin` receives the smallest
/// margin over applicable cases and the two pair conditions; either output
/// may be NULL.
///
/// # Safety
/// Non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn paracc_verify_case_bounds(
    mu: f64,
    beta: f64,
    delta: f64,
    alpha: f64,
    passed: *mut bool,
    min_margin: *mut f64,
) -> ParaccStatus {
    guard(|| {
        let r = verify_case_bounds(mu, beta, delta, alpha)?;
        if !passed.is_null() {
            passed.write(r.passed);
        }
        if !min_margin.is_null() {
            let m = r
                .cases
                .iter()
                .filter(|c| c.applicable)
                .map(|c| c.margin)
                .fold(r.positive_pair_margin.min(r.negative_pair_margin), f64::min);
            min_margin.write(m);
        }
        Ok(())
    })
}

/// Copy of the last error message (convenience for Rust callers and tests).
pub fn last_error() -> String {
    // SAFETY: the pointer comes from the thread-local CString.
    unsafe { CStr::from_ptr(paracc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}
