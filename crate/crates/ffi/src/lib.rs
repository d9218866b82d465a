//! C ABI for `leo-offload`.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible function returns a
//! [`LeoStatus`]; on failure a message is available from
//! [`leo_last_error_message`] on the same thread. Panics never cross the
//! boundary; they are reported as [`LeoStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use leo_offload::offload::Scheme;
use leo_offload::simulator::{output, run, MetricsReport, Scenario, SimError};
use leo_offload::state_graph::{shortest_path, DenseStateGraph, PathError, StateGraph};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// No path from source to destination.
    Unreachable = 3,
    /// A weight was negative or NaN.
    InvalidWeight = 4,
    /// A scenario failed to parse or validate.
    Config = 5,
    Simulation = 6,
    Io = 7,
    /// The output buffer is too small; the required size was still written.
    BufferTooSmall = 8,
    Panic = 9,
}

/// Offloading scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeoScheme {
    Adaptive = 0,
    Ground = 1,
    OneHop = 2,
}

impl From<LeoScheme> for Scheme {
    fn from(s: LeoScheme) -> Self {
        match s {
            LeoScheme::Adaptive => Scheme::Adaptive,
            LeoScheme::Ground => Scheme::Ground,
            LeoScheme::OneHop => Scheme::OneHop,
        }
    }
}

/// Static state graph with `num_states` copies of `num_nodes` nodes. Every
/// edge and transition starts absent (infinite weight).
pub struct LeoStateGraph {
    inner: DenseStateGraph,
}

pub struct LeoScenario {
    inner: Scenario,
}

pub struct LeoReport {
    inner: MetricsReport,
}

/// Mean delay of a report split by where the time was spent.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeoBreakdown {
    pub isl_tx_s: f64,
    pub sgl_tx_s: f64,
    pub compute_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).expect("nul bytes removed"));
}

fn fail(status: LeoStatus, message: impl AsRef<str>) -> LeoStatus {
    set_error(message.as_ref());
    status
}

fn guard(body: impl FnOnce() -> LeoStatus) -> LeoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(LeoStatus::Panic, "internal panic"),
    }
}

fn path_status(e: &PathError) -> LeoStatus {
    match e {
        PathError::Unreachable => LeoStatus::Unreachable,
        PathError::Weight { .. } => LeoStatus::InvalidWeight,
        _ => LeoStatus::InvalidArgument,
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, LeoStatus> {
    if s.is_null() {
        return Err(fail(LeoStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(LeoStatus::InvalidArgument, "string is not UTF-8"))
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn leo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn leo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a graph. `num_states` and `num_nodes` must be positive.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn leo_graph_new(num_states: usize, num_nodes: usize, out: *mut *mut LeoStateGraph) -> LeoStatus {
    guard(|| {
        if out.is_null() {
            return fail(LeoStatus::NullPointer, "out is null");
        }
        if num_states == 0 || num_nodes == 0 {
            return fail(LeoStatus::InvalidArgument, "graph needs at least one state and one node");
        }
        let g = Box::new(LeoStateGraph { inner: DenseStateGraph::new(num_states, num_nodes) });
        *out = Box::into_raw(g);
        LeoStatus::Ok
    })
}

/// # Safety
/// `graph` must come from [`leo_graph_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn leo_graph_free(graph: *mut LeoStateGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

unsafe fn graph_mut<'a>(graph: *mut LeoStateGraph) -> Result<&'a mut LeoStateGraph, LeoStatus> {
    graph.as_mut().ok_or_else(|| fail(LeoStatus::NullPointer, "graph is null"))
}

/// Sets the weight of `from -> to` within `state`. Pass infinity to remove
/// the edge.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_graph_set_edge(graph: *mut LeoStateGraph, state: usize, from: usize, to: usize, weight: f64) -> LeoStatus {
    guard(|| {
        let g = match graph_mut(graph) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let (k, v) = (g.inner.num_states(), g.inner.num_nodes());
        if state >= k || from >= v || to >= v || from == to {
            return fail(LeoStatus::InvalidArgument, format!("edge ({state}, {from} -> {to}) outside a {k} x {v} graph"));
        }
        g.inner.set_edge(state, from, to, weight);
        LeoStatus::Ok
    })
}

/// Sets the weight of moving `node` from `state` to `state + 1`.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_graph_set_transition(graph: *mut LeoStateGraph, state: usize, node: usize, weight: f64) -> LeoStatus {
    guard(|| {
        let g = match graph_mut(graph) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let (k, v) = (g.inner.num_states(), g.inner.num_nodes());
        if state + 1 >= k || node >= v {
            return fail(LeoStatus::InvalidArgument, format!("transition ({state}, {node}) outside a {k} x {v} graph"));
        }
        g.inner.set_transition(state, node, weight);
        LeoStatus::Ok
    })
}

/// Shortest path from `(0, source)` to `(last state, dest)`.
///
/// On success writes the length and the number of hops. If `hops` is not
/// null, up to `capacity` hops are written as `(state, node)` pairs, so it
/// must hold `2 * capacity` entries. Returns `BufferTooSmall` when the path
/// has more than `capacity` hops; `num_hops` then holds the size needed.
///
/// # Safety
/// `graph` must be a live handle, `length` and `num_hops` valid pointers,
/// and `hops` null or valid for `2 * capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn leo_graph_shortest_path(
    graph: *const LeoStateGraph,
    source: usize,
    dest: usize,
    depart_time: f64,
    length: *mut f64,
    hops: *mut usize,
    capacity: usize,
    num_hops: *mut usize,
) -> LeoStatus {
    guard(|| {
        let Some(g) = graph.as_ref() else {
            return fail(LeoStatus::NullPointer, "graph is null");
        };
        if length.is_null() || num_hops.is_null() {
            return fail(LeoStatus::NullPointer, "length and num_hops are required");
        }
        let path = match shortest_path(&g.inner, source, dest, depart_time) {
            Ok(p) => p,
            Err(e) => return fail(path_status(&e), e.to_string()),
        };
        *length = path.length;
        *num_hops = path.hops.len();
        if hops.is_null() {
            return LeoStatus::Ok;
        }
        if path.hops.len() > capacity {
            return fail(LeoStatus::BufferTooSmall, format!("path has {} hops, buffer holds {capacity}", path.hops.len()));
        }
        for (i, h) in path.hops.iter().enumerate() {
            *hops.add(2 * i) = h.state;
            *hops.add(2 * i + 1) = h.node;
        }
        LeoStatus::Ok
    })
}

/// The built-in default scenario.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_default(out: *mut *mut LeoScenario) -> LeoStatus {
    guard(|| {
        if out.is_null() {
            return fail(LeoStatus::NullPointer, "out is null");
        }
        *out = Box::into_raw(Box::new(LeoScenario { inner: Scenario::default() }));
        LeoStatus::Ok
    })
}

/// Parses a scenario from TOML text. Missing keys take default values.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_from_toml(text: *const c_char, out: *mut *mut LeoScenario) -> LeoStatus {
    guard(|| {
        if out.is_null() {
            return fail(LeoStatus::NullPointer, "out is null");
        }
        let text = match c_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::from_toml_str(text) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(LeoScenario { inner: s }));
                LeoStatus::Ok
            }
            Err(e) => fail(LeoStatus::Config, e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_free(scenario: *mut LeoScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_set_scheme(scenario: *mut LeoScenario, scheme: LeoScheme) -> LeoStatus {
    guard(|| match scenario.as_mut() {
        Some(s) => {
            s.inner.simulation.scheme = scheme.into();
            LeoStatus::Ok
        }
        None => fail(LeoStatus::NullPointer, "scenario is null"),
    })
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_set_seed(scenario: *mut LeoScenario, seed: u64) -> LeoStatus {
    guard(|| match scenario.as_mut() {
        Some(s) => {
            s.inner.simulation.seed = seed;
            LeoStatus::Ok
        }
        None => fail(LeoStatus::NullPointer, "scenario is null"),
    })
}

/// Sets the simulated horizon in seconds; must be positive.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_scenario_set_horizon(scenario: *mut LeoScenario, horizon_s: f64) -> LeoStatus {
    guard(|| match scenario.as_mut() {
        Some(_) if !(horizon_s > 0.0 && horizon_s.is_finite()) => fail(LeoStatus::InvalidArgument, "horizon must be positive"),
        Some(s) => {
            s.inner.simulation.horizon_s = horizon_s;
            LeoStatus::Ok
        }
        None => fail(LeoStatus::NullPointer, "scenario is null"),
    })
}

/// Simulates the scenario.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn leo_run(scenario: *const LeoScenario, out: *mut *mut LeoReport) -> LeoStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else {
            return fail(LeoStatus::NullPointer, "scenario is null");
        };
        if out.is_null() {
            return fail(LeoStatus::NullPointer, "out is null");
        }
        match run(&s.inner) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(LeoReport { inner: r }));
                LeoStatus::Ok
            }
            Err(SimError::Config(e)) => fail(LeoStatus::Config, e.to_string()),
            Err(e) => fail(LeoStatus::Simulation, e.to_string()),
        }
    })
}

/// # Safety
/// `report` must come from [`leo_run`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn leo_report_free(report: *mut LeoReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of served tasks; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_report_num_tasks(report: *const LeoReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.records.len())
}

/// Number of tasks that could not be delivered; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn leo_report_num_dropped(report: *const LeoReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.dropped.len())
}

/// Mean overall delay in seconds and its breakdown.
///
/// # Safety
/// `report` must be a live handle; `mean_delay_s` and `breakdown` must be
/// valid pointers or null (then skipped).
#[no_mangle]
pub unsafe extern "C" fn leo_report_summary(report: *const LeoReport, mean_delay_s: *mut f64, breakdown: *mut LeoBreakdown) -> LeoStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return fail(LeoStatus::NullPointer, "report is null");
        };
        if !mean_delay_s.is_null() {
            *mean_delay_s = r.inner.mean_delay_s;
        }
        if !breakdown.is_null() {
            let b = r.inner.mean_breakdown;
            *breakdown = LeoBreakdown { isl_tx_s: b.isl_tx_s, sgl_tx_s: b.sgl_tx_s, compute_s: b.compute_s };
        }
        LeoStatus::Ok
    })
}

/// Writes the per-task CSV to `path`.
///
/// # Safety
/// `report` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn leo_report_write_tasks_csv(report: *const LeoReport, path: *const c_char) -> LeoStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return fail(LeoStatus::NullPointer, "report is null");
        };
        let path = match c_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let file = match std::fs::File::create(path) {
            Ok(f) => f,
            Err(e) => return fail(LeoStatus::Io, format!("{path}: {e}")),
        };
        match output::write_tasks_csv(&r.inner, std::io::BufWriter::new(file)) {
            Ok(()) => LeoStatus::Ok,
            Err(e) => fail(LeoStatus::Io, format!("{path}: {e}")),
        }
    })
}
