//! C ABI for `inesh-sim`.
//!
//! Every function returns an [`IneshStatus`]; results come back through out
//! pointers. Objects are opaque handles that must be released with their
//! matching `*_free`. Strings returned by the library are released with
//! [`inesh_string_free`]. After a non-OK status, [`inesh_last_error`] returns a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use inesh_sim::harness::config::{parse_config, render_config, ScenarioConfig};
use inesh_sim::harness::metrics::MetricsReport;
use inesh_sim::harness::scenario::{run_scenario, ScenarioError};
use inesh_sim::inesh::{inesh_search, Graph, NodeId, TrustOutcome, TrustParams, TrustTable};
use inesh_sim::protocols::DropReason;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneshStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    InvalidInput = 4,
    RuntimeError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneshDropReason {
    Blackhole = 0,
    Dropper = 1,
    NoRoute = 2,
    LinkBreak = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneshTrustOutcome {
    Reward = 0,
    Penalize = 1,
}

/// Scalar results of one run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IneshSummary {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub pdr: f64,
    pub mean_delay_s: f64,
    pub routing_overhead: f64,
    pub control_transmissions: u64,
    pub data_transmissions: u64,
    pub delivered_bits: u64,
    pub malicious_count: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IneshThroughputPoint {
    pub window_end_s: f64,
    pub bits_per_s: f64,
    pub cumulative_bits: u64,
}

/// Opaque scenario configuration.
pub struct IneshConfig {
    inner: ScenarioConfig,
}

/// Opaque result of [`inesh_run`].
pub struct IneshReport {
    report: MetricsReport,
    malicious_count: u64,
}

/// Opaque weighted undirected graph over nodes `1..=n`.
pub struct IneshGraph {
    inner: Graph,
}

/// Opaque per-(observer, subject) trust table.
pub struct IneshTrust {
    inner: TrustTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(IneshStatus, String);

fn fail<T>(status: IneshStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IneshStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            IneshStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(&format!("panic: {msg}"));
            IneshStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(IneshStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(IneshStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(IneshStatus::NullPointer, format!("{what} is null")))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(IneshStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(IneshStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(IneshStatus::RuntimeError, "string contains a NUL byte"))
}

fn node(id: u32) -> Result<NodeId, Failure> {
    if id == 0 {
        return fail(IneshStatus::InvalidInput, "node ids start at 1");
    }
    Ok(NodeId(id))
}

/// Message describing the last failure on this thread; empty after success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn inesh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn inesh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn inesh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default configuration.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_config_default(out: *mut *mut IneshConfig) -> IneshStatus {
    guard(|| {
        let cfg = Box::new(IneshConfig {
            inner: ScenarioConfig::default(),
        });
        put(out, Box::into_raw(cfg))
    })
}

/// Parses a scenario document.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_config_parse(text: *const c_char, out: *mut *mut IneshConfig) -> IneshStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return fail(IneshStatus::NullPointer, "output pointer is null");
        }
        let inner = parse_config(text).or_else(|e| fail(IneshStatus::ConfigError, e.to_string()))?;
        put(out, Box::into_raw(Box::new(IneshConfig { inner })))
    })
}

/// Sets one key using the file syntax (`"node_count"`, `"50"`). The config
/// is left unchanged if the result would be invalid.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn inesh_config_set(
    cfg: *mut IneshConfig,
    key: *const c_char,
    value: *const c_char,
) -> IneshStatus {
    guard(|| {
        let cfg = get_mut(cfg, "config")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        let mut next = cfg.inner.clone();
        next.set(key, value)
            .and_then(|_| next.validate())
            .or_else(|e| fail(IneshStatus::ConfigError, e.to_string()))?;
        cfg.inner = next;
        Ok(())
    })
}

/// Renders the configuration in file syntax. Free the result with
/// [`inesh_string_free`].
///
/// # Safety
/// `cfg` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_config_render(cfg: *const IneshConfig, out: *mut *mut c_char) -> IneshStatus {
    guard(|| {
        let cfg = get(cfg, "config")?;
        if out.is_null() {
            return fail(IneshStatus::NullPointer, "output pointer is null");
        }
        put(out, into_c_string(render_config(&cfg.inner))?)
    })
}

/// # Safety
/// `cfg` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inesh_config_free(cfg: *mut IneshConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs one scenario to completion.
///
/// # Safety
/// `cfg` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_run(cfg: *const IneshConfig, out: *mut *mut IneshReport) -> IneshStatus {
    guard(|| {
        let cfg = get(cfg, "config")?;
        if out.is_null() {
            return fail(IneshStatus::NullPointer, "output pointer is null");
        }
        let run = run_scenario(&cfg.inner).or_else(|e| match e {
            ScenarioError::Config(c) => fail(IneshStatus::ConfigError, c.to_string()),
            other => fail(IneshStatus::RuntimeError, other.to_string()),
        })?;
        let report = Box::new(IneshReport {
            malicious_count: run.malicious.len() as u64,
            report: run.report,
        });
        put(out, Box::into_raw(report))
    })
}

/// # Safety
/// `report` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_report_summary(report: *const IneshReport, out: *mut IneshSummary) -> IneshStatus {
    guard(|| {
        let rep = get(report, "report")?;
        let r = &rep.report;
        put(
            out,
            IneshSummary {
                sent: r.sent,
                delivered: r.delivered,
                dropped: r.dropped,
                in_flight: r.in_flight,
                pdr: r.pdr,
                mean_delay_s: r.mean_end_to_end_delay,
                routing_overhead: r.routing_overhead,
                control_transmissions: r.control_transmissions,
                data_transmissions: r.data_transmissions,
                delivered_bits: r.delivered_bits,
                malicious_count: rep.malicious_count,
            },
        )
    })
}

/// # Safety
/// `report` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_report_drops(
    report: *const IneshReport,
    reason: IneshDropReason,
    out: *mut u64,
) -> IneshStatus {
    guard(|| {
        let rep = get(report, "report")?;
        let reason = match reason {
            IneshDropReason::Blackhole => DropReason::Blackhole,
            IneshDropReason::Dropper => DropReason::Dropper,
            IneshDropReason::NoRoute => DropReason::NoRoute,
            IneshDropReason::LinkBreak => DropReason::LinkBreak,
        };
        put(out, rep.report.drops(reason))
    })
}

/// Number of throughput windows.
///
/// # Safety
/// `report` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_report_throughput_len(report: *const IneshReport, out: *mut usize) -> IneshStatus {
    guard(|| {
        let rep = get(report, "report")?;
        put(out, rep.report.throughput_series.len())
    })
}

/// # Safety
/// `report` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_report_throughput_at(
    report: *const IneshReport,
    index: usize,
    out: *mut IneshThroughputPoint,
) -> IneshStatus {
    guard(|| {
        let rep = get(report, "report")?;
        let Some(p) = rep.report.throughput_series.get(index) else {
            return fail(IneshStatus::InvalidInput, format!("window {index} out of range"));
        };
        put(
            out,
            IneshThroughputPoint {
                window_end_s: p.window_end,
                bits_per_s: p.bits_per_s,
                cumulative_bits: p.cumulative_bits,
            },
        )
    })
}

/// # Safety
/// `report` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inesh_report_free(report: *mut IneshReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Empty graph over nodes `1..=node_count`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_graph_new(node_count: u32, out: *mut *mut IneshGraph) -> IneshStatus {
    guard(|| {
        let g = Box::new(IneshGraph {
            inner: Graph::new(node_count as usize),
        });
        put(out, Box::into_raw(g))
    })
}

/// Adds or re-costs the undirected edge `u`–`w`.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn inesh_graph_add_edge(graph: *mut IneshGraph, u: u32, w: u32, cost: f64) -> IneshStatus {
    guard(|| {
        let g = get_mut(graph, "graph")?;
        g.inner
            .add_edge(node(u)?, node(w)?, cost)
            .or_else(|e| fail(IneshStatus::InvalidInput, e.to_string()))
    })
}

/// # Safety
/// `graph` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inesh_graph_free(graph: *mut IneshGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Trust table where unseen pairs start at `initial`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_trust_new(
    initial: f64,
    reward: f64,
    penalty: f64,
    out: *mut *mut IneshTrust,
) -> IneshStatus {
    guard(|| {
        for (name, v) in [("initial", initial), ("reward", reward), ("penalty", penalty)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(IneshStatus::InvalidInput, format!("{name} = {v} is outside [0, 1]"));
            }
        }
        let t = Box::new(IneshTrust {
            inner: TrustTable::new(TrustParams {
                initial,
                reward,
                penalty,
            }),
        });
        put(out, Box::into_raw(t))
    })
}

/// Applies a reward or penalty and writes the new score to `out_value`
/// (which may be null).
///
/// # Safety
/// `trust` must be a live handle; `out_value` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_trust_update(
    trust: *mut IneshTrust,
    observer: u32,
    subject: u32,
    outcome: IneshTrustOutcome,
    sim_time: f64,
    out_value: *mut f64,
) -> IneshStatus {
    guard(|| {
        let t = get_mut(trust, "trust")?;
        let outcome = match outcome {
            IneshTrustOutcome::Reward => TrustOutcome::Reward,
            IneshTrustOutcome::Penalize => TrustOutcome::Penalize,
        };
        let v = t.inner.update(node(observer)?, node(subject)?, outcome, sim_time);
        if !out_value.is_null() {
            out_value.write(v);
        }
        Ok(())
    })
}

/// # Safety
/// `trust` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inesh_trust_get(
    trust: *const IneshTrust,
    observer: u32,
    subject: u32,
    out: *mut f64,
) -> IneshStatus {
    guard(|| {
        let t = get(trust, "trust")?;
        put(out, t.inner.trust(node(observer)?, node(subject)?))
    })
}

/// # Safety
/// `trust` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inesh_trust_free(trust: *mut IneshTrust) {
    if !trust.is_null() {
        drop(Box::from_raw(trust));
    }
}

/// Trust-filtered shortest path from `source` to `dest`, as seen by
/// `source`. Writes the cost (infinity when unreachable) and, if `out_text`
/// is not null, a line such as `path=1,2,4 cost=2 excluded=3` to free with
/// [`inesh_string_free`].
///
/// # Safety
/// `graph` and `trust` must be live handles; `out_cost` valid for a write;
/// `out_text` null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn inesh_search_path(
    graph: *const IneshGraph,
    trust: *const IneshTrust,
    source: u32,
    dest: u32,
    threshold: f64,
    out_cost: *mut f64,
    out_text: *mut *mut c_char,
) -> IneshStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let t = get(trust, "trust")?;
        if out_cost.is_null() {
            return fail(IneshStatus::NullPointer, "output pointer is null");
        }
        let r = inesh_search(&g.inner, &t.inner, node(source)?, node(dest)?, threshold)
            .or_else(|e| fail(IneshStatus::InvalidInput, e.to_string()))?;
        out_cost.write(r.total_cost);
        if !out_text.is_null() {
            out_text.write(ptr::null_mut());
            out_text.write(into_c_string(r.to_string())?);
        }
        Ok(())
    })
}
