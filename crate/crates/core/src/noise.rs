//! Additive noise models and binary error rates under them.
//!
//! Received sample `z = √(2s)·S + W` with `S ∈ {−1, +1}`, unit-variance `W`
//! where the variance exists, and sign detection. In Gaussian noise this
//! gives the familiar `Q(√(2s))`.
//!
//! Symmetric α-stable noise uses scale `1/√2`, the scale at which `α = 2`
//! is exactly `N(0, 1)`. Equivalently `W = √A·G` with `G ~ N(0, 1)` and `A`
//! positive (α/2)-stable with `E[e^{−tA}] = e^{−t^{α/2}}`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channels::{open_unit, ChannelModel, Sampler};
use crate::error::{Error, Result};
use crate::montecarlo::{self, Estimate, StreamRng};
use crate::specfun::{integrate_adaptive, q_function};

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// Standard normal.
    Gaussian,
    /// Symmetric α-stable, `0 < α ≤ 2`, scale `1/√2`.
    SymmetricAlphaStable { alpha: f64 },
    /// Uniform on `[−c, c]`.
    UniformBounded { half_width: f64 },
    /// `√A·G` with `A` drawn from `mixing` and `G ~ N(0, 1)`.
    CompoundGaussian { mixing: ChannelModel },
}

impl NoiseModel {
    pub fn alpha_stable(alpha: f64) -> Result<Self> {
        let n = NoiseModel::SymmetricAlphaStable { alpha };
        n.validate()?;
        Ok(n)
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        let n = NoiseModel::UniformBounded { half_width };
        n.validate()?;
        Ok(n)
    }

    pub fn compound(mixing: ChannelModel) -> Result<Self> {
        let n = NoiseModel::CompoundGaussian { mixing };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Gaussian => Ok(()),
            NoiseModel::SymmetricAlphaStable { alpha } => {
                if *alpha > 0.0 && *alpha <= 2.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "sas: alpha must lie in (0, 2], got {alpha}"
                    )))
                }
            }
            NoiseModel::UniformBounded { half_width } => {
                if half_width.is_finite() && *half_width > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "uniform: half width must be > 0, got {half_width}"
                    )))
                }
            }
            NoiseModel::CompoundGaussian { mixing } => mixing.validate(),
        }
    }

    /// Precompute a sampler.
    pub fn sampler(&self) -> Result<NoiseSampler> {
        self.validate()?;
        Ok(match self {
            NoiseModel::Gaussian => NoiseSampler::Gaussian,
            NoiseModel::SymmetricAlphaStable { alpha } if *alpha == 2.0 => NoiseSampler::Gaussian,
            NoiseModel::SymmetricAlphaStable { alpha } => NoiseSampler::Stable { alpha: *alpha },
            NoiseModel::UniformBounded { half_width } => NoiseSampler::Uniform { c: *half_width },
            NoiseModel::CompoundGaussian { mixing } => NoiseSampler::Compound(mixing.sampler()?),
        })
    }

    /// One noise variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }

    /// `P(W > t)`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if t < 0.0 {
            return Ok(1.0 - self.tail(-t)?);
        }
        Ok(match self {
            NoiseModel::Gaussian => q_function(t),
            NoiseModel::SymmetricAlphaStable { alpha } => stable_tail(*alpha, SQRT_2 * t)?,
            NoiseModel::UniformBounded { half_width: c } => ((c - t) / (2.0 * c)).max(0.0),
            NoiseModel::CompoundGaussian { mixing } => {
                if t == 0.0 {
                    return Ok(0.5);
                }
                mixing.expect_tol(
                    |a| if a == 0.0 { 0.0 } else { q_function(t / a.sqrt()) },
                    1e-300,
                    1e-12,
                )?
            }
        })
    }

    /// Bit error probability of BPSK with sign detection at instantaneous
    /// SNR `s`: `P(W > √(2s))`.
    pub fn conditional_ber(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::OutOfRange(format!("instantaneous SNR must be >= 0, got {s}")));
        }
        self.tail((2.0 * s).sqrt())
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Gaussian => write!(f, "gaussian"),
            NoiseModel::SymmetricAlphaStable { alpha } => write!(f, "sas(alpha={alpha})"),
            NoiseModel::UniformBounded { half_width } => write!(f, "uniform(half_width={half_width})"),
            NoiseModel::CompoundGaussian { mixing } => write!(f, "compound({mixing})"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum NoiseSampler {
    Gaussian,
    Stable { alpha: f64 },
    Uniform { c: f64 },
    Compound(Sampler),
}

impl NoiseSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseSampler::Gaussian => StandardNormal.sample(rng),
            NoiseSampler::Stable { alpha } => std::f64::consts::FRAC_1_SQRT_2 * symmetric_stable(*alpha, rng),
            NoiseSampler::Uniform { c } => c * (2.0 * rng.random::<f64>() - 1.0),
            NoiseSampler::Compound(a) => {
                let g: f64 = StandardNormal.sample(rng);
                a.sample(rng).sqrt() * g
            }
        }
    }
}

/// Standard symmetric α-stable variate (characteristic function
/// `exp(−|t|^α)`) by the Chambers–Mallows–Stuck transform.
pub fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w: f64 = Exp1.sample(rng);
    if alpha == 1.0 {
        return v.tan();
    }
    let num = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    num * ((v * (1.0 - alpha)).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Positive stable variate with Laplace transform `e^{−t^a}`, `0 < a < 1`,
/// by Kanter's representation.
pub fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u = PI * open_unit(rng);
    let e: f64 = Exp1.sample(rng);
    let zolotarev = ((a * u).sin().powf(a) * ((1.0 - a) * u).sin().powf(1.0 - a) / u.sin())
        .powf(1.0 / (1.0 - a));
    (zolotarev / e).powf((1.0 - a) / a)
}

/// `√A·G` with `A` positive (α/2)-stable; same law as
/// `symmetric_stable(α)/√2`.
pub fn stable_by_mixture<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let g: f64 = StandardNormal.sample(rng);
    if alpha == 2.0 {
        return g;
    }
    positive_stable(alpha / 2.0, rng).sqrt() * g
}

/// `P(X > x)` for the standard symmetric α-stable law, `x ≥ 0`.
pub fn stable_tail(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(x >= 0.0) {
        return Err(Error::OutOfRange(format!("tail argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return Ok(0.5 - x.atan() / PI);
    }
    if alpha == 2.0 {
        return Ok(q_function(x / SQRT_2));
    }
    let e = alpha / (alpha - 1.0);
    let xe = x.powf(e);
    let v = |t: f64| {
        let c = t.cos();
        (c / (alpha * t).sin()).powf(e) * ((alpha - 1.0) * t).cos() / c
    };
    let f = |t: f64| {
        let a = xe * v(t);
        if a.is_finite() {
            (-a).exp()
        } else {
            0.0
        }
    };
    let r = integrate_adaptive(f, 0.0, FRAC_PI_2, 1e-300, 1e-11)?.value / PI;
    Ok(if alpha > 1.0 { r } else { 0.5 - r })
}

/// Monte Carlo BPSK error rate over fading and noise: draw the channel and
/// the noise, detect by sign, count errors.
pub fn average_ber_fading(
    noise: &NoiseModel,
    channel: &ChannelModel,
    rho: f64,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("average SNR must be finite and >= 0, got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let d = FadingNoiseSampler::new(noise, channel)?;
    Ok(montecarlo::mc_mean(n, seed, 0, |rng| d.draw(rho, rng)))
}

/// Per-sample error indicator for BPSK over fading in additive noise.
#[derive(Debug, Clone)]
pub struct FadingNoiseSampler {
    noise: NoiseSampler,
    channel: Sampler,
}

impl FadingNoiseSampler {
    pub fn new(noise: &NoiseModel, channel: &ChannelModel) -> Result<Self> {
        Ok(FadingNoiseSampler {
            noise: noise.sampler()?,
            channel: channel.sampler()?,
        })
    }

    #[inline]
    pub fn draw(&self, rho: f64, rng: &mut StreamRng) -> f64 {
        let x = self.channel.sample(rng);
        let w = self.noise.sample(rng);
        if (2.0 * rho * x).sqrt() + w < 0.0 {
            1.0
        } else {
            0.0
        }
    }
}
