//! C ABI over the `stochord` library.
//!
//! Objects are opaque heap handles created by `*_parse` and released by the
//! matching `*_free`. Every fallible call returns a [`StochordStatus`] and
//! writes results through out-pointers; on failure a message is available
//! from [`stochord_last_error`] on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stochord::channels::{ChannelModel, Moment};
use stochord::error::Error;
use stochord::metrics::{self, AverageMethod, MetricFunction};
use stochord::noise::NoiseModel;
use stochord::orders::{self, Outcome};
use stochord::systems::{simulate_system, Topology};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochordStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    OutOfRange = 4,
    Unsupported = 5,
    NumericFailure = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochordOrder {
    Usual = 0,
    Convex = 1,
    Laplace = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochordOutcome {
    Holds = 0,
    Fails = 1,
    Inconclusive = 2,
}

/// Opaque channel (SNR distribution) handle.
pub struct StochordChannel {
    inner: ChannelModel,
}

/// Opaque instantaneous-metric handle.
pub struct StochordMetric {
    inner: MetricFunction,
}

/// Opaque topology handle with its per-link channels.
pub struct StochordTopology {
    inner: Topology,
}

/// Opaque additive-noise handle.
pub struct StochordNoise {
    inner: NoiseModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StochordStatus {
    match e {
        Error::InvalidParameter(_) | Error::Config { .. } | Error::Arity { .. } | Error::GridMismatch(_) => {
            StochordStatus::InvalidArgument
        }
        Error::OutOfRange(_) => StochordStatus::OutOfRange,
        Error::Unsupported(_) | Error::DensityUnavailable(_) => StochordStatus::Unsupported,
        _ => StochordStatus::NumericFailure,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F>(f: F) -> StochordStatus
where
    F: FnOnce() -> Result<(), (StochordStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            StochordStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            StochordStatus::Panic
        }
    }
}

type Fallible<T> = Result<T, (StochordStatus, String)>;

fn lib<T>(r: stochord::error::Result<T>) -> Fallible<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (StochordStatus, String) {
    (StochordStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Fallible<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (StochordStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Fallible<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Fallible<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn boxed<T>(out: *mut *mut T, v: T) -> Fallible<()> {
    put(out, Box::into_raw(Box::new(v)), "out")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stochord_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn stochord_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a channel expression such as `rician(k=2)`.
///
/// # Safety
/// `expr` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_parse(
    expr: *const c_char,
    out: *mut *mut StochordChannel,
) -> StochordStatus {
    guard(|| {
        let inner = lib(stochord::expr::parse_channel(text(expr, "expr")?))?;
        boxed(out, StochordChannel { inner })
    })
}

/// # Safety
/// `ch` must come from [`stochord_channel_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_free(ch: *mut StochordChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_pdf(ch: *const StochordChannel, x: f64, out: *mut f64) -> StochordStatus {
    guard(|| put(out, lib(get(ch, "channel")?.inner.pdf(x))?, "out"))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_cdf(ch: *const StochordChannel, x: f64, out: *mut f64) -> StochordStatus {
    guard(|| put(out, lib(get(ch, "channel")?.inner.cdf(x))?, "out"))
}

/// `E[exp(-rho X)]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_laplace(
    ch: *const StochordChannel,
    rho: f64,
    out: *mut f64,
) -> StochordStatus {
    guard(|| put(out, lib(get(ch, "channel")?.inner.laplace(rho))?.value, "out"))
}

/// `E[X]`; a divergent mean is reported as `+INFINITY`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_channel_mean(ch: *const StochordChannel, out: *mut f64) -> StochordStatus {
    guard(|| {
        let v = match lib(get(ch, "channel")?.inner.mean())? {
            Moment::Finite(v) => v,
            Moment::Diverges => f64::INFINITY,
        };
        put(out, v, "out")
    })
}

/// Parse a metric expression such as `mqam(m=16)`.
///
/// # Safety
/// `expr` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_metric_parse(expr: *const c_char, out: *mut *mut StochordMetric) -> StochordStatus {
    guard(|| {
        let inner = lib(stochord::expr::parse_metric(text(expr, "expr")?))?;
        boxed(out, StochordMetric { inner })
    })
}

/// # Safety
/// `m` must come from [`stochord_metric_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn stochord_metric_free(m: *mut StochordMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Metric value at instantaneous SNR `s`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_metric_instant(m: *const StochordMetric, s: f64, out: *mut f64) -> StochordStatus {
    guard(|| put(out, lib(get(m, "metric")?.inner.instant(s))?, "out"))
}

/// `E[g(rho X)]` by quadrature.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_average_metric(
    ch: *const StochordChannel,
    m: *const StochordMetric,
    rho: f64,
    out: *mut f64,
) -> StochordStatus {
    guard(|| {
        let e = lib(metrics::average_metric(
            &get(ch, "channel")?.inner,
            &get(m, "metric")?.inner,
            rho,
            AverageMethod::Quadrature,
        ))?;
        put(out, e.mean, "out")
    })
}

/// Ergodic capacity `E[ln(1 + rho X)]` in nats.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_ergodic_capacity(
    ch: *const StochordChannel,
    rho: f64,
    out: *mut f64,
) -> StochordStatus {
    guard(|| put(out, lib(metrics::ergodic_capacity(&get(ch, "channel")?.inner, rho))?, "out"))
}

/// Check `X <= Y` in the given order on the default grids. `margin` may be
/// NULL.
///
/// # Safety
/// Pointers other than `margin` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_check_order(
    x: *const StochordChannel,
    y: *const StochordChannel,
    order: StochordOrder,
    outcome: *mut StochordOutcome,
    margin: *mut f64,
) -> StochordStatus {
    guard(|| {
        let (x, y) = (&get(x, "x")?.inner, &get(y, "y")?.inner);
        let v = lib(match order {
            StochordOrder::Usual => orders::check_usual(x, y, &orders::default_x_grid()),
            StochordOrder::Convex => orders::check_convex(x, y, &orders::default_x_grid()),
            StochordOrder::Laplace => orders::check_lt(x, y, &orders::default_rho_grid()),
        })?;
        let o = match v.outcome {
            Outcome::Holds => StochordOutcome::Holds,
            Outcome::Fails => StochordOutcome::Fails,
            Outcome::Inconclusive => StochordOutcome::Inconclusive,
        };
        put(outcome, o, "outcome")?;
        if !margin.is_null() {
            margin.write(v.margin);
        }
        Ok(())
    })
}

/// Topology such as `mrc(3)` whose links are i.i.d. copies of `ch`.
///
/// # Safety
/// `expr` must be NUL-terminated; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_topology_iid(
    expr: *const c_char,
    ch: *const StochordChannel,
    out: *mut *mut StochordTopology,
) -> StochordStatus {
    guard(|| {
        let kind = lib(stochord::expr::parse_topology(text(expr, "expr")?))?;
        let inner = lib(Topology::iid(kind, get(ch, "channel")?.inner.clone()))?;
        boxed(out, StochordTopology { inner })
    })
}

/// # Safety
/// `t` must come from [`stochord_topology_iid`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn stochord_topology_free(t: *mut StochordTopology) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Monte Carlo end-to-end average metric; deterministic in `seed`.
/// `stderr_out` may be NULL.
///
/// # Safety
/// Pointers other than `stderr_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_system_simulate(
    t: *const StochordTopology,
    m: *const StochordMetric,
    rho: f64,
    samples: u64,
    seed: u64,
    mean_out: *mut f64,
    stderr_out: *mut f64,
) -> StochordStatus {
    guard(|| {
        let e = lib(simulate_system(&get(t, "topology")?.inner, &get(m, "metric")?.inner, rho, samples, seed))?;
        put(mean_out, e.mean, "mean_out")?;
        if !stderr_out.is_null() {
            stderr_out.write(e.stderr);
        }
        Ok(())
    })
}

/// Parse a noise expression such as `sas(alpha=1.6)`.
///
/// # Safety
/// `expr` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_noise_parse(expr: *const c_char, out: *mut *mut StochordNoise) -> StochordStatus {
    guard(|| {
        let inner = lib(stochord::expr::parse_noise(text(expr, "expr")?))?;
        boxed(out, StochordNoise { inner })
    })
}

/// # Safety
/// `n` must come from [`stochord_noise_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn stochord_noise_free(n: *mut StochordNoise) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// BPSK error probability with sign detection at instantaneous SNR `s`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stochord_noise_conditional_ber(
    n: *const StochordNoise,
    s: f64,
    out: *mut f64,
) -> StochordStatus {
    guard(|| put(out, lib(get(n, "noise")?.inner.conditional_ber(s))?, "out"))
}
