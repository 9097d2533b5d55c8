//! C ABI for coinmirror.
//!
//! Every fallible function returns a [`CmStatus`]; on failure the message is
//! available from [`cm_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their matching `*_free` function.
//! Strings returned by the library are freed with [`cm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use coinmirror::config::RunConfig;
use coinmirror::graph::{build_graph, CommGraph, Interval};
use coinmirror::ingest::{parse_mbox, parse_message_csv, ActorId, MessageSet};
use coinmirror::metrics::{betweenness, contribution_index, METRIC_COLUMNS};
use coinmirror::report::{correlations_text, read_team_metrics_csv};
use coinmirror::stats::{correlation_matrix, pearson, two_tailed_p};
use coinmirror::{pipeline, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    InsufficientData = 5,
    Undefined = 6,
    Internal = 7,
}

/// Parsed messages.
pub struct CmMessageSet {
    inner: MessageSet,
}

/// Weighted directed communication graph.
pub struct CmGraph {
    inner: CommGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> CmStatus {
    match err {
        Error::Stage { source, .. } => status_of(source),
        e if e.is_config() => CmStatus::Config,
        Error::Io { .. } => CmStatus::Io,
        Error::TooFewSamples { .. } | Error::LengthMismatch { .. } => CmStatus::InsufficientData,
        Error::ZeroVariance | Error::ZeroTraffic | Error::NoTeamTraffic | Error::NoReplies | Error::NoMessages(_) => {
            CmStatus::Undefined
        }
        _ => CmStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> CmStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `f`, turning panics into `Internal` and clearing the error slot on
/// success.
fn guard(f: impl FnOnce() -> CmStatus) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(CmStatus::Ok) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CmStatus::Ok
        }
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CmStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, CmStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(CmStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        CmStatus::InvalidArgument
    })
}

macro_rules! try_arg {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!(stringify!($p), " is null"));
            return CmStatus::NullPointer;
        })+
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next library call on this thread.
#[no_mangle]
pub extern "C" fn cm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn load_messages(path: *const c_char, out: *mut *mut CmMessageSet, csv: bool) -> CmStatus {
    non_null!(out);
    let path = try_arg!(str_arg(path, "path"));
    let parsed = if csv { parse_message_csv(path) } else { parse_mbox(path) };
    match parsed {
        Ok(ms) => {
            *out = Box::into_raw(Box::new(CmMessageSet { inner: ms }));
            CmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parses an mbox file into a new message set.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_messages_from_mbox(path: *const c_char, out: *mut *mut CmMessageSet) -> CmStatus {
    guard(|| load_messages(path, out, false))
}

/// Parses a message CSV into a new message set.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_messages_from_csv(path: *const c_char, out: *mut *mut CmMessageSet) -> CmStatus {
    guard(|| load_messages(path, out, true))
}

/// # Safety
/// `ms` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_messages_len(ms: *const CmMessageSet, out: *mut usize) -> CmStatus {
    guard(|| {
        non_null!(ms, out);
        *out = (*ms).inner.len();
        CmStatus::Ok
    })
}

/// Count of input problems recorded while parsing (skipped or repaired
/// messages).
///
/// # Safety
/// `ms` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_messages_warning_count(ms: *const CmMessageSet, out: *mut u64) -> CmStatus {
    guard(|| {
        non_null!(ms, out);
        *out = (*ms).inner.warnings().total();
        CmStatus::Ok
    })
}

/// # Safety
/// `ms` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_messages_free(ms: *mut CmMessageSet) {
    if !ms.is_null() {
        drop(Box::from_raw(ms));
    }
}

/// New empty graph.
#[no_mangle]
pub extern "C" fn cm_graph_new() -> *mut CmGraph {
    Box::into_raw(Box::new(CmGraph {
        inner: CommGraph::new(),
    }))
}

/// Graph of every message in the set over its whole time span.
///
/// # Safety
/// `ms` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_from_messages(ms: *const CmMessageSet, out: *mut *mut CmGraph) -> CmStatus {
    guard(|| {
        non_null!(ms, out);
        let ms = &(*ms).inner;
        let Some(span) = Interval::covering(ms) else {
            set_error("message set is empty");
            return CmStatus::InsufficientData;
        };
        *out = Box::into_raw(Box::new(CmGraph {
            inner: build_graph(ms, span, None),
        }));
        CmStatus::Ok
    })
}

/// Adds `weight` messages from `src` to `dst`. Addresses are normalized;
/// self-loops are ignored.
///
/// # Safety
/// `g` must be a live handle; `src` and `dst` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_add_edge(
    g: *mut CmGraph,
    src: *const c_char,
    dst: *const c_char,
    weight: u64,
) -> CmStatus {
    guard(|| {
        non_null!(g);
        let src = try_arg!(str_arg(src, "src"));
        let dst = try_arg!(str_arg(dst, "dst"));
        let (s, d) = (ActorId::normalize(src), ActorId::normalize(dst));
        if s.is_empty() || d.is_empty() {
            set_error("empty address");
            return CmStatus::InvalidArgument;
        }
        (*g).inner.add_node(s.clone());
        (*g).inner.add_node(d.clone());
        (*g).inner.add_edge(s, d, weight);
        CmStatus::Ok
    })
}

/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_node_count(g: *const CmGraph, out: *mut usize) -> CmStatus {
    guard(|| {
        non_null!(g, out);
        *out = (*g).inner.node_count();
        CmStatus::Ok
    })
}

/// Betweenness of one actor. Unknown actors score 0.
///
/// # Safety
/// `g` must be a live handle; `actor` a NUL-terminated string; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_betweenness(
    g: *const CmGraph,
    actor: *const c_char,
    normalized: bool,
    directed: bool,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        non_null!(g, out);
        let actor = try_arg!(str_arg(actor, "actor"));
        let scores = betweenness(&(*g).inner, normalized, directed);
        *out = scores.get(&ActorId::normalize(actor));
        CmStatus::Ok
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_free(g: *mut CmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Pearson r of two samples and its two-tailed p-value. `out_p` may be
/// NULL.
///
/// # Safety
/// `xs` and `ys` must point to `n` doubles each; `out_r` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_pearson(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out_r: *mut f64,
    out_p: *mut f64,
) -> CmStatus {
    guard(|| {
        non_null!(xs, ys, out_r);
        let (xs, ys) = (std::slice::from_raw_parts(xs, n), std::slice::from_raw_parts(ys, n));
        let r = match pearson(xs, ys) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        *out_r = r;
        if !out_p.is_null() {
            match two_tailed_p(r, n) {
                Ok(p) => *out_p = p,
                Err(e) => return fail(e),
            }
        }
        CmStatus::Ok
    })
}

/// Two-tailed p-value for correlation `r` over `n` samples.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_two_tailed_p(r: f64, n: usize, out: *mut f64) -> CmStatus {
    guard(|| {
        non_null!(out);
        if !(-1.0..=1.0).contains(&r) {
            set_error("r must lie in [-1, 1]");
            return CmStatus::InvalidArgument;
        }
        match two_tailed_p(r, n) {
            Ok(p) => {
                *out = p;
                CmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// (sent − received) / (sent + received); `Undefined` when both are 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_contribution_index(sent: u64, received: u64, out: *mut f64) -> CmStatus {
    guard(|| {
        non_null!(out);
        match contribution_index(sent, received) {
            Ok(ci) => {
                *out = ci;
                CmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Correlation table of a team metrics CSV as aligned text. `columns` is a
/// comma-separated list, or NULL for every metric column. Free the result
/// with [`cm_string_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string, `columns` NULL or one, and
/// `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_correlate_csv(
    path: *const c_char,
    columns: *const c_char,
    out_text: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        non_null!(out_text);
        let path = try_arg!(str_arg(path, "path"));
        let columns: Vec<String> = if columns.is_null() {
            METRIC_COLUMNS.iter().map(|s| s.to_string()).collect()
        } else {
            try_arg!(str_arg(columns, "columns"))
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        };
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(Error::io(path, e)),
        };
        let mut rows = match read_team_metrics_csv(file) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        rows.sort_by(|a, b| a.team.cmp(&b.team));
        let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
        match correlation_matrix(&rows, &cols) {
            Ok(t) => {
                let text = CString::new(correlations_text(&t)).expect("table text has no NUL");
                *out_text = text.into_raw();
                CmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the full analysis for a config file. `output_dir` overrides the
/// config's output directory when not NULL.
///
/// # Safety
/// `config_path` must be a NUL-terminated string, `output_dir` NULL or one.
#[no_mangle]
pub unsafe extern "C" fn cm_analyze(config_path: *const c_char, output_dir: *const c_char) -> CmStatus {
    guard(|| {
        let path = try_arg!(str_arg(config_path, "config_path"));
        let mut cfg = match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        if !output_dir.is_null() {
            cfg.output_dir = PathBuf::from(try_arg!(str_arg(output_dir, "output_dir")));
        }
        match pipeline::run(&cfg) {
            Ok(_) => CmStatus::Ok,
            Err(e) => fail(e),
        }
    })
}
