//! Instantaneous and average performance metrics.
//!
//! Error-rate metrics are completely monotone (c.m.) in the instantaneous SNR
//! `s = ρx`; capacity has a c.m. derivative. The Bernstein mixing densities
//! below make the c.m. property explicit: `g(s) = ∫ e^{−su} μ(u) du`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::channels::{ChannelModel, Moment};
use crate::error::{Error, Result};
use crate::montecarlo::{self, Estimate};
use crate::specfun::{integrate_adaptive, integrate_with_breaks, q_function};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityClass {
    /// Completely monotone.
    Cm,
    /// Completely monotone derivative.
    Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricFunction {
    /// Binary DPSK, `½·e^{−s}`.
    Dpsk,
    /// `a·Q(√(b·s))`; BPSK is `a = 1, b = 2`.
    AQsqrtB { a: f64, b: f64 },
    /// Exact M-PSK symbol error rate.
    Mpsk { m: u32 },
    /// Exact square M-QAM symbol error rate.
    Mqam { m: u32 },
    /// `ln(1 + s)` in nats.
    Capacity,
}

impl MetricFunction {
    pub const BPSK: MetricFunction = MetricFunction::AQsqrtB { a: 1.0, b: 2.0 };

    pub fn a_q_sqrt_b(a: f64, b: f64) -> Result<Self> {
        let m = MetricFunction::AQsqrtB { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn mpsk(m: u32) -> Result<Self> {
        let f = MetricFunction::Mpsk { m };
        f.validate()?;
        Ok(f)
    }

    pub fn mqam(m: u32) -> Result<Self> {
        let f = MetricFunction::Mqam { m };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MetricFunction::AQsqrtB { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                Err(Error::InvalidParameter(format!("qfunc: need a > 0 and b > 0, got a={a}, b={b}")))
            }
            MetricFunction::Mpsk { m } if m < 2 => {
                Err(Error::InvalidParameter(format!("mpsk: M must be >= 2, got {m}")))
            }
            MetricFunction::Mqam { m } => {
                let r = (m as f64).sqrt().round() as u32;
                if m < 4 || r * r != m {
                    Err(Error::InvalidParameter(format!(
                        "mqam: M must be a perfect square >= 4, got {m}"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn class(&self) -> MonotonicityClass {
        match self {
            MetricFunction::Capacity => MonotonicityClass::Cmd,
            _ => MonotonicityClass::Cm,
        }
    }

    /// QAM constants `(a, b, g)` with `a = 4(√M−1)/√M`, `b = a²/4`, `g = 3/(M−1)`.
    pub fn qam_constants(m: u32) -> (f64, f64, f64) {
        let r = (m as f64).sqrt();
        let a = 4.0 * (r - 1.0) / r;
        (a, a * a / 4.0, 3.0 / (m as f64 - 1.0))
    }

    /// Metric value at instantaneous SNR `s ≥ 0`.
    pub fn instant(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::OutOfRange(format!("instantaneous SNR must be >= 0, got {s}")));
        }
        self.validate()?;
        self.eval(s)
    }

    pub(crate) fn eval(&self, s: f64) -> Result<f64> {
        Ok(match *self {
            MetricFunction::Dpsk => 0.5 * (-s).exp(),
            MetricFunction::AQsqrtB { a, b } => a * q_function((b * s).sqrt()),
            MetricFunction::Mpsk { m } => mpsk_ser(m, s)?,
            MetricFunction::Mqam { m } => {
                let (a, b, g) = Self::qam_constants(m);
                let q = q_function((g * s).sqrt());
                a * q - b * q * q
            }
            MetricFunction::Capacity => s.ln_1p(),
        })
    }

    /// Bernstein mixing density `μ(u)` with `instant(s) = ∫ e^{−su} μ(u) du`.
    pub fn bernstein_density(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::OutOfRange(format!("mixing variable must be > 0, got {u}")));
        }
        self.validate()?;
        match *self {
            MetricFunction::Mpsk { m } => {
                let g = (PI / m as f64).sin().powi(2);
                if u <= g {
                    return Ok(0.0);
                }
                // θ ∈ (0, π/2] maps onto u ≥ g, θ ∈ [π/2, (M−1)π/M] onto g ≤ u ≤ 1
                let branches = 1.0 + if u < 1.0 { 1.0 } else { 0.0 };
                Ok(branches * g.sqrt() / (2.0 * PI * u * (u - g).sqrt()))
            }
            MetricFunction::Mqam { m } => {
                let (a, b, g) = Self::qam_constants(m);
                if u <= g / 2.0 {
                    return Ok(0.0);
                }
                let w = if u < g { a } else { a - b };
                Ok(w * g.sqrt() / (2.0 * PI * u * (2.0 * u - g).sqrt()))
            }
            _ => Err(Error::Unsupported(format!(
                "no Bernstein density implemented for {self}"
            ))),
        }
    }

    /// `∫ e^{−su} μ(u) du` by quadrature.
    ///
    /// The square-root singularity at the lower support edge is removed by
    /// substituting `u = g + t²` (PSK) or `u = (g + t²)/2` (QAM).
    pub fn bernstein_transform(&self, s: f64) -> Result<f64> {
        let (lower, scale, cut) = match *self {
            MetricFunction::Mpsk { m } => {
                let g = (PI / m as f64).sin().powi(2);
                (g, 1.0, (1.0 - g).max(0.0).sqrt())
            }
            MetricFunction::Mqam { m } => {
                let (_, _, g) = Self::qam_constants(m);
                (g, 0.5, g.sqrt())
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "no Bernstein density implemented for {self}"
                )))
            }
        };
        let integrand = |t: f64| {
            let u = scale * (lower + t * t);
            let jac = 2.0 * scale * t;
            (-s * u).exp() * self.bernstein_density(u).unwrap_or(f64::NAN) * jac
        };
        let breaks = if cut > 0.0 { vec![0.0, cut, f64::INFINITY] } else { vec![0.0, f64::INFINITY] };
        let r = integrate_with_breaks(integrand, &breaks, 1e-13, 1e-11)?;
        Ok(r.value)
    }
}

fn mpsk_ser(m: u32, s: f64) -> Result<f64> {
    let g = (PI / m as f64).sin().powi(2);
    // the θ ∈ [0, π/2] part of the Craig integral is Q(√(2gs))
    let head = q_function((2.0 * g * s).sqrt());
    if m == 2 {
        return Ok(head);
    }
    let hi = (m as f64 - 1.0) * PI / m as f64;
    let tail = integrate_adaptive(
        |t: f64| (-g * s / t.sin().powi(2)).exp(),
        FRAC_PI_2,
        hi,
        1e-300,
        1e-13,
    )?;
    Ok(head + tail.value / PI)
}

impl fmt::Display for MetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricFunction::Dpsk => write!(f, "dpsk"),
            MetricFunction::AQsqrtB { a, b } if *a == 1.0 && *b == 2.0 => write!(f, "bpsk"),
            MetricFunction::AQsqrtB { a, b } => write!(f, "qfunc(a={a}, b={b})"),
            MetricFunction::Mpsk { m } => write!(f, "mpsk(m={m})"),
            MetricFunction::Mqam { m } => write!(f, "mqam(m={m})"),
            MetricFunction::Capacity => write!(f, "capacity"),
        }
    }
}

/// Finite-difference complete-monotonicity report.
#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub passes: bool,
    pub order: usize,
    /// Sign tests performed.
    pub checks: usize,
    /// Sign tests whose difference cleared the noise threshold.
    pub resolved: usize,
    pub violations: Vec<CmViolation>,
    /// First grid point where `f` vanishes after being positive. A c.m.
    /// function that is zero somewhere is zero everywhere to the right and
    /// strictly positive before only if it is identically zero.
    pub compact_support: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmViolation {
    pub x: f64,
    pub derivative: usize,
    /// `(−1)^k f^{(k)}(x)` as estimated by the finite difference.
    pub signed_value: f64,
}

/// Relative evaluation noise assumed by [`certify_cm`].
pub const DEFAULT_CM_NOISE: f64 = 1e-12;

/// Check `(−1)^k f^{(k)} ≥ 0` for `k = 0..=order` on `grid`.
pub fn certify_cm<F: Fn(f64) -> f64>(f: F, order: usize, grid: &[f64]) -> Result<CmReport> {
    certify_cm_with_noise(f, order, grid, DEFAULT_CM_NOISE)
}

/// As [`certify_cm`], with `noise` the relative error of one evaluation of
/// `f`. Differences smaller than the propagated noise count as unresolved
/// rather than as violations.
pub fn certify_cm_with_noise<F: Fn(f64) -> f64>(
    f: F,
    order: usize,
    grid: &[f64],
    noise: f64,
) -> Result<CmReport> {
    if order > 6 {
        return Err(Error::InvalidParameter(format!(
            "finite differences beyond order 6 are below the noise floor, got {order}"
        )));
    }
    if grid.is_empty() || grid.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("grid must be nonempty, finite and >= 0".into()));
    }
    if !(noise > 0.0 && noise < 1e-2) {
        return Err(Error::InvalidParameter(format!("noise level must be in (0, 1e-2), got {noise}")));
    }
    let mut report = CmReport {
        passes: true,
        order,
        checks: 0,
        resolved: 0,
        violations: Vec::new(),
        compact_support: None,
    };
    let mut seen_positive = false;
    for &x in grid {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::InvalidParameter(format!("f({x}) is not finite")));
        }
        if fx > 0.0 {
            seen_positive = true;
        } else if fx == 0.0 && seen_positive && report.compact_support.is_none() {
            report.compact_support = Some(x);
        }
        for k in 0..=order {
            let (value, threshold) = if k == 0 {
                (fx, noise * fx.abs())
            } else {
                let h = x.max(1e-2) * noise.powf(1.0 / (k as f64 + 2.0));
                if h <= f64::MIN_POSITIVE || x + h == x {
                    return Err(Error::OutOfRange(format!("finite-difference step underflow at x={x}")));
                }
                // central stencil, shifted forward where it would cross zero
                let start = if x - 0.5 * k as f64 * h >= 0.0 {
                    x - 0.5 * k as f64 * h
                } else {
                    x
                };
                let mut acc = 0.0;
                let mut mag = 0.0;
                for j in 0..=k {
                    let c = binomial(k, j) * if (k - j) % 2 == 1 { -1.0 } else { 1.0 };
                    let v = f(start + j as f64 * h);
                    acc += c * v;
                    mag += c.abs() * v.abs();
                }
                let scale = h.powi(k as i32);
                (acc / scale, 8.0 * noise * mag / scale)
            };
            let signed = if k % 2 == 1 { -value } else { value };
            report.checks += 1;
            if signed.abs() > threshold {
                report.resolved += 1;
                if signed < 0.0 {
                    report.violations.push(CmViolation {
                        x,
                        derivative: k,
                        signed_value: signed,
                    });
                }
            }
        }
    }
    report.passes = report.violations.is_empty() && report.compact_support.is_none();
    Ok(report)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Averaging method for [`average_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageMethod {
    Quadrature,
    MonteCarlo { n: u64, seed: u64 },
}

/// `E[g(ρX)]` for metric `g`.
pub fn average_metric(
    model: &ChannelModel,
    metric: &MetricFunction,
    rho: f64,
    method: AverageMethod,
) -> Result<Estimate> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("average SNR must be finite and >= 0, got {rho}")));
    }
    metric.validate()?;
    model.validate()?;
    match method {
        AverageMethod::Quadrature => {
            let v = model.expect_tol(|x| metric.eval(rho * x).unwrap_or(f64::NAN), 1e-15, 1e-10)?;
            Ok(Estimate {
                mean: v,
                stderr: 0.0,
                n: 0,
            })
        }
        AverageMethod::MonteCarlo { n, seed } => {
            if n == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
            let sampler = model.sampler()?;
            let est = montecarlo::mc_mean(n, seed, 0, |rng| {
                metric.eval(rho * sampler.sample(rng)).unwrap_or(f64::NAN)
            });
            if est.mean.is_finite() {
                Ok(est)
            } else {
                Err(Error::InvalidParameter(format!("metric {metric} failed during sampling")))
            }
        }
    }
}

/// Ergodic capacity `E[ln(1 + ρX)]` in nats.
///
/// Pareto SINR uses the tail form `∫ ρ/(1+ρz)·(1 − F(z)) dz` in `ln z`; other kinds
/// integrate against the law of `X`.
pub fn ergodic_capacity(model: &ChannelModel, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("average SNR must be finite and >= 0, got {rho}")));
    }
    model.validate()?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    match model {
        ChannelModel::Pareto { beta } => {
            let b = *beta;
            // z = e^v turns both the tail and the slow ln growth into
            // exponentially decaying integrands
            let f = |v: f64| {
                let e = (-b * v.abs()).exp();
                let tail = if v <= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
                let z = v.exp();
                if z == 0.0 || !z.is_finite() {
                    0.0
                } else {
                    rho * z / (1.0 + rho * z) * tail
                }
            };
            let r = integrate_with_breaks(f, &[f64::NEG_INFINITY, 0.0, f64::INFINITY], 1e-13, 1e-11)?;
            Ok(r.value)
        }
        _ => model.expect_tol(|x| (rho * x).ln_1p(), 1e-13, 1e-11),
    }
}

/// Ergodic capacity by plain quadrature against the law, for any kind.
pub fn ergodic_capacity_direct(model: &ChannelModel, rho: f64) -> Result<f64> {
    model.expect_tol(|x| (rho * x).ln_1p(), 1e-13, 1e-11)
}

/// Channel-inversion (delay-limited) capacity `ln(1 + ρ/E[1/X])`; zero when
/// the inverse moment diverges.
pub fn ci_capacity(model: &ChannelModel, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("average SNR must be finite and >= 0, got {rho}")));
    }
    Ok(match model.inverse_mean()? {
        Moment::Finite(inv) => (rho / inv).ln_1p(),
        Moment::Diverges => 0.0,
    })
}

/// Power-constraint residual `E[(1/z − 1/X)·1{X ≥ z}] − ρ`.
pub fn oa_constraint(model: &ChannelModel, z: f64, rho: f64) -> Result<f64> {
    let v = model.expect_tail(z, |x| 1.0 / z - 1.0 / x, 1e-14 * (1.0 + rho), 1e-12)?;
    Ok(v - rho)
}

/// Water-filling cutoff `z_t(ρ)` for optimal power and rate adaptation.
pub fn oa_threshold(model: &ChannelModel, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("average SNR must be finite and > 0, got {rho}")));
    }
    model.validate()?;
    let g = |z: f64| oa_constraint(model, z, rho);
    // the constraint decreases strictly in z from +∞ towards −ρ
    let mut lo = 1.0 / (1.0 + rho);
    let mut hi = lo;
    let mut tries = 0;
    while g(lo)? <= 0.0 {
        lo *= 0.5;
        tries += 1;
        if tries > 2000 || lo == 0.0 {
            return Err(Error::Bracket(format!("no lower water level for {model} at rho={rho}")));
        }
    }
    tries = 0;
    while g(hi)? > 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 2000 || !hi.is_finite() {
            return Err(Error::Bracket(format!("no upper water level for {model} at rho={rho}")));
        }
    }
    let target = 1e-9 * rho;
    let mut best = (f64::INFINITY, hi);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let r = g(mid)?;
        if r.abs() < best.0 {
            best = (r.abs(), mid);
        }
        if r.abs() <= target || hi / lo - 1.0 < 1e-15 {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 > 1e-8 * rho {
        return Err(Error::Bracket(format!(
            "water level residual {:e} exceeds tolerance for {model} at rho={rho}",
            best.0
        )));
    }
    Ok(best.1)
}

/// Optimal power and rate adaptation capacity `E[ln(X/z_t)·1{X ≥ z_t}]`.
pub fn oa_capacity(model: &ChannelModel, rho: f64) -> Result<f64> {
    let zt = oa_threshold(model, rho)?;
    model.expect_tail(zt, |x| (x / zt).ln(), 1e-14, 1e-11)
}

/// Same quantity in the integrated-by-parts form
/// `∫_{z_t}^∞ (1 − F(z))/z dz`.
pub fn oa_capacity_by_parts(model: &ChannelModel, rho: f64) -> Result<f64> {
    let zt = oa_threshold(model, rho)?;
    let f = |z: f64| (1.0 - model.cdf(z).unwrap_or(f64::NAN)) / z;
    let mut breaks = vec![zt];
    if let ChannelModel::PointMass { value } = model {
        if *value > zt {
            breaks.push(*value);
        }
    }
    breaks.push(f64::INFINITY);
    Ok(integrate_with_breaks(f, &breaks, 1e-13, 1e-10)?.value)
}
