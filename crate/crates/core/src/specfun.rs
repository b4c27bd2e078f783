//! Special functions and adaptive quadrature.
//!
//! Everything numeric in the crate bottoms out here: the Gaussian tail
//! `Q`, its Craig single-integral form for `Q^k(√x)`, the modified Bessel
//! function `I₀` used by the Rician density, and a globally adaptive
//! Gauss–Kronrod (7/15) integrator that also accepts infinite limits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Default absolute tolerance for [`integrate`].
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Default relative tolerance for [`integrate`].
pub const DEFAULT_REL_TOL: f64 = 1e-8;

const MAX_SEGMENTS: usize = 4000;

/// Gaussian tail probability `Pr(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `Q^k(√x)` for `k ∈ {1, 2}`, evaluated through the Craig form
/// `(1/π) ∫₀^{π/2k} exp(−x / (2 sin²θ)) dθ`.
pub fn q_function_pow(x: f64, k: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "q_function_pow needs x >= 0, got {x}"
        )));
    }
    if k != 1 && k != 2 {
        return Err(Error::InvalidParameter(format!(
            "q_function_pow supports k = 1 or 2, got {k}"
        )));
    }
    let upper = PI / (2.0 * k as f64);
    let integrand = |theta: f64| {
        let s = theta.sin();
        if s == 0.0 {
            0.0
        } else {
            (-x / (2.0 * s * s)).exp()
        }
    };
    let r = integrate_adaptive(integrand, 0.0, upper, 1e-14, 1e-12)?;
    Ok(r.value * FRAC_1_PI)
}

/// Modified Bessel function of the first kind, order zero.
///
/// Power series below 15, asymptotic expansion above. Fails with
/// [`Error::OutOfRange`] when the result overflows `f64`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    let scaled = bessel_i0_scaled(x)?;
    let v = scaled * x.abs().exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::OutOfRange(format!("I0({x}) overflows")))
    }
}

/// Exponentially scaled `e^{-|x|} I₀(x)`; finite for every finite `x`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::OutOfRange(format!("I0 argument must be finite, got {x}")));
    }
    let x = x.abs();
    if x < 15.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        Ok(sum * (-x).exp())
    } else {
        // e^x / sqrt(2πx) · Σ ((2k-1)!!)² / (k! (8x)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k: f64 = 1.0;
        loop {
            let next = term * (2.0 * k - 1.0).powi(2) / (8.0 * x * k);
            if next > term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        Ok(sum / (2.0 * PI * x).sqrt())
    }
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always `>= 0`.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integrate with the default tolerances and return only the value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_adaptive(f, a, b, DEFAULT_ABS_TOL, DEFAULT_REL_TOL).map(|r| r.value)
}

/// Globally adaptive Gauss–Kronrod 7/15 quadrature of `f` over `[a, b]`.
///
/// Either limit may be infinite; half-lines are mapped onto `[0, 1)` with
/// `x = a + t/(1−t)` and the whole line is split at zero. The segment with
/// the largest error estimate is bisected until the total error is below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_dyn(&f, a, b, abs_tol, rel_tol)
}

fn integrate_dyn(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "quadrature tolerances must be positive".into(),
        ));
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidParameter("NaN integration limit".into()));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if a > b {
        let r = integrate_dyn(f, b, a, abs_tol, rel_tol)?;
        return Ok(QuadratureResult {
            value: -r.value,
            ..r
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(f, a, b, abs_tol, rel_tol),
        (true, false) => adaptive(
            &|t: f64| {
                let d = 1.0 - t;
                if d <= 0.0 {
                    return 0.0;
                }
                f(a + t / d) / (d * d)
            },
            0.0,
            1.0,
            abs_tol,
            rel_tol,
        ),
        (false, true) => adaptive(
            &|t: f64| {
                let d = 1.0 - t;
                if d <= 0.0 {
                    return 0.0;
                }
                f(b - t / d) / (d * d)
            },
            0.0,
            1.0,
            abs_tol,
            rel_tol,
        ),
        (false, false) => {
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, abs_tol / 2.0, rel_tol)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, abs_tol / 2.0, rel_tol)?;
            Ok(QuadratureResult {
                value: left.value + right.value,
                error_estimate: left.error_estimate + right.error_estimate,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}

/// Integrate over consecutive finite sub-ranges given by `breaks`
/// (ascending; the end entries may be infinite). Use this when the integrand has
/// jumps or kinks at known interior points.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    if breaks.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two break points".into(),
        ));
    }
    let pieces = (breaks.len() - 1) as f64;
    let mut total = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let r = integrate_adaptive(&f, w[0], w[1], abs_tol / pieces, rel_tol)?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = half.abs();
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * ah, res_asc * ah);
    Ok(Segment {
        a,
        b,
        value,
        error: err,
    })
}

// QUADPACK's heuristic sharpening of the raw Kronrod-minus-Gauss difference.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > e {
            e = floor;
        }
    }
    e
}

fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let first = kronrod15(f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);

    loop {
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Segment too narrow to split further: keep its contribution as is.
        if !(worst.a < mid && mid < worst.b) || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if heap.len() + 2 > MAX_SEGMENTS {
            heap.push(worst);
            let estimate = value;
            return Err(Error::NoConvergence {
                estimate,
                error,
                evaluations,
            });
        }
        let left = kronrod15(f, worst.a, mid)?;
        let right = kronrod15(f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Running sums drift; resum periodically.
        if evaluations % 3000 == 0 {
            value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }
    let value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    let error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    let tol = abs_tol.max(rel_tol * value.abs());
    if error > tol && !heap.is_empty() {
        return Err(Error::NoConvergence {
            estimate: value,
            error,
            evaluations,
        });
    }
    if error > tol {
        // Every remaining segment hit the resolution floor; the integrand is
        // resolved as far as floating point allows.
        if error > 1e3 * tol {
            return Err(Error::NoConvergence {
                estimate: value,
                error,
                evaluations,
            });
        }
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
    })
}
