//! Instantaneous-SNR ("effective channel") distributions.
//!
//! Every single-channel kind except [`ChannelModel::Pareto`] is normalized to
//! unit mean, so comparing two models compares the *shape* of the fading and
//! never the average SNR. The average SNR `ρ` is applied by the caller as
//! `ρ·X`.

use std::cell::RefCell;
use std::f64::consts::{LN_10, PI};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::specfun::{self, bessel_i0_scaled, integrate_adaptive, q_function};

/// Parametric descriptor of an instantaneous-SNR distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Exponential law, unit mean.
    Rayleigh,
    /// Rician fading with LoS factor `k ≥ 0`, unit mean.
    Rician { k: f64 },
    /// Gamma-distributed SNR (Nakagami-`m` envelope), `m ≥ 0.5`, unit mean.
    Nakagami { m: f64 },
    /// Pareto-type SINR with cdf `z^β / (1 + z^β)`. Not normalized.
    Pareto { beta: f64 },
    /// Lognormal shadowing with spread `sigma_db` (dB), unit mean.
    Lognormal { sigma_db: f64 },
    /// Product of two independent SNR variables (composite fading).
    Product(Box<ChannelModel>, Box<ChannelModel>),
    /// `gain · X`; turns any kind into a scale family.
    Scaled { base: Box<ChannelModel>, gain: f64 },
    /// Degenerate law at `value > 0`. Used as an exact oracle for the
    /// power-adaptation capacities; the config syntax does not accept it.
    PointMass { value: f64 },
}

/// A moment that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Diverges,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Diverges => None,
        }
    }

    fn times(self, other: Moment) -> Moment {
        match (self, other) {
            (Moment::Finite(a), Moment::Finite(b)) => Moment::Finite(a * b),
            _ => Moment::Diverges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceMethod {
    Analytic,
    Quadrature,
    MonteCarlo,
}

/// `E[exp(−ρX)]` together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEval {
    pub rho: f64,
    pub value: f64,
    pub method: LaplaceMethod,
}

impl ChannelModel {
    pub fn rician(k: f64) -> Result<Self> {
        let m = ChannelModel::Rician { k };
        m.validate()?;
        Ok(m)
    }

    pub fn nakagami(m: f64) -> Result<Self> {
        let c = ChannelModel::Nakagami { m };
        c.validate()?;
        Ok(c)
    }

    pub fn pareto(beta: f64) -> Result<Self> {
        let c = ChannelModel::Pareto { beta };
        c.validate()?;
        Ok(c)
    }

    pub fn lognormal(sigma_db: f64) -> Result<Self> {
        let c = ChannelModel::Lognormal { sigma_db };
        c.validate()?;
        Ok(c)
    }

    pub fn product(left: ChannelModel, right: ChannelModel) -> Result<Self> {
        let c = ChannelModel::Product(Box::new(left), Box::new(right));
        c.validate()?;
        Ok(c)
    }

    pub fn scaled(base: ChannelModel, gain: f64) -> Result<Self> {
        let c = ChannelModel::Scaled {
            base: Box::new(base),
            gain,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        let c = ChannelModel::PointMass { value };
        c.validate()?;
        Ok(c)
    }

    /// Check parameter ranges, recursively for composites.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match self {
            ChannelModel::Rayleigh => Ok(()),
            ChannelModel::Rician { k } => {
                if k.is_finite() && *k >= 0.0 {
                    Ok(())
                } else {
                    bad(&format!("rician: K must satisfy K >= 0, got {k}"))
                }
            }
            ChannelModel::Nakagami { m } => {
                if m.is_finite() && *m >= 0.5 {
                    Ok(())
                } else {
                    bad(&format!("nakagami: m must satisfy m >= 0.5, got {m}"))
                }
            }
            ChannelModel::Pareto { beta } => {
                if beta.is_finite() && *beta > 0.0 {
                    Ok(())
                } else {
                    bad(&format!("pareto: beta must satisfy beta > 0, got {beta}"))
                }
            }
            ChannelModel::Lognormal { sigma_db } => {
                if sigma_db.is_finite() && *sigma_db > 0.0 {
                    Ok(())
                } else {
                    bad(&format!(
                        "lognormal: sigma_db must satisfy sigma_db > 0, got {sigma_db}"
                    ))
                }
            }
            ChannelModel::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            ChannelModel::Scaled { base, gain } => {
                if !(gain.is_finite() && *gain > 0.0) {
                    return bad(&format!("scaled: gain must satisfy gain > 0, got {gain}"));
                }
                base.validate()
            }
            ChannelModel::PointMass { value } => {
                if value.is_finite() && *value > 0.0 {
                    Ok(())
                } else {
                    bad(&format!("point mass: value must be > 0, got {value}"))
                }
            }
        }
    }

    /// Whether [`pdf`](Self::pdf) is available.
    pub fn has_density(&self) -> bool {
        match self {
            ChannelModel::Product(..) | ChannelModel::PointMass { .. } => false,
            ChannelModel::Scaled { base, .. } => base.has_density(),
            _ => true,
        }
    }

    /// Probability density at `x ≥ 0`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_nonneg("pdf argument", x)?;
        self.validate()?;
        self.pdf_unchecked(x)
    }

    fn pdf_unchecked(&self, x: f64) -> Result<f64> {
        Ok(match self {
            ChannelModel::Rayleigh => (-x).exp(),
            ChannelModel::Nakagami { m } => gamma_pdf(*m, x),
            ChannelModel::Rician { k } => rician_pdf(*k, x),
            ChannelModel::Pareto { beta } => pareto_pdf(*beta, x),
            ChannelModel::Lognormal { sigma_db } => {
                if x == 0.0 {
                    0.0
                } else {
                    let (mu, sigma) = lognormal_params(*sigma_db);
                    let z = (x.ln() - mu) / sigma;
                    (-0.5 * z * z).exp() / (x * sigma * (2.0 * PI).sqrt())
                }
            }
            ChannelModel::Scaled { base, gain } => base.pdf_unchecked(x / gain)? / gain,
            ChannelModel::Product(..) | ChannelModel::PointMass { .. } => {
                return Err(Error::DensityUnavailable(self.to_string()))
            }
        })
    }

    /// Cumulative distribution function at `x ≥ 0`.
    ///
    /// Closed forms for Rayleigh, Pareto, lognormal and point masses;
    /// quadrature of the density for Rician and Nakagami; conditioning on
    /// the right factor for products.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_nonneg("cdf argument", x)?;
        self.validate()?;
        self.cdf_unchecked(x)
    }

    fn cdf_unchecked(&self, x: f64) -> Result<f64> {
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        match self {
            ChannelModel::Rayleigh => Ok(-(-x).exp_m1()),
            ChannelModel::Pareto { beta } => Ok(pareto_cdf(*beta, x)),
            ChannelModel::Lognormal { sigma_db } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let (mu, sigma) = lognormal_params(*sigma_db);
                Ok(q_function(-(x.ln() - mu) / sigma))
            }
            ChannelModel::PointMass { value } => Ok(if x >= *value { 1.0 } else { 0.0 }),
            ChannelModel::Scaled { base, gain } => base.cdf_unchecked(x / gain),
            ChannelModel::Rician { .. } | ChannelModel::Nakagami { .. } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let f = |t: f64| self.pdf_unchecked(t).unwrap_or(f64::NAN);
                // Integrate whichever side of x carries less mass.
                if x <= 1.0 {
                    let r = integrate_adaptive(f, 0.0, x, 1e-13, 1e-11)?;
                    Ok(r.value.clamp(0.0, 1.0))
                } else {
                    let r = integrate_adaptive(f, x, f64::INFINITY, 1e-13, 1e-11)?;
                    Ok((1.0 - r.value).clamp(0.0, 1.0))
                }
            }
            ChannelModel::Product(a, b) => {
                let v = b.expect_dyn(
                    &|y: f64| {
                        if y == 0.0 {
                            1.0
                        } else {
                            a.cdf_unchecked(x / y).unwrap_or(f64::NAN)
                        }
                    },
                    1e-11,
                    1e-9,
                )?;
                Ok(v.clamp(0.0, 1.0))
            }
        }
    }

    /// Laplace transform `E[exp(−ρX)]`.
    pub fn laplace(&self, rho: f64) -> Result<LaplaceEval> {
        check_nonneg("Laplace argument", rho)?;
        self.validate()?;
        let (value, method) = self.laplace_unchecked(rho)?;
        Ok(LaplaceEval { rho, value, method })
    }

    fn laplace_unchecked(&self, rho: f64) -> Result<(f64, LaplaceMethod)> {
        use LaplaceMethod::*;
        if rho == 0.0 {
            return Ok((1.0, Analytic));
        }
        Ok(match self {
            ChannelModel::Rayleigh => (1.0 / (1.0 + rho), Analytic),
            ChannelModel::Nakagami { m } => ((-m * (rho / m).ln_1p()).exp(), Analytic),
            ChannelModel::Rician { k } => {
                let d = 1.0 + k + rho;
                ((1.0 + k) / d * (-k * rho / d).exp(), Analytic)
            }
            ChannelModel::PointMass { value } => ((-rho * value).exp(), Analytic),
            ChannelModel::Scaled { base, gain } => base.laplace_unchecked(rho * gain)?,
            ChannelModel::Pareto { .. } | ChannelModel::Lognormal { .. } => {
                (self.expect(|x| (-rho * x).exp())?, Quadrature)
            }
            ChannelModel::Product(a, b) => {
                let v = b.expect_dyn(
                    &|y: f64| a.laplace_unchecked(rho * y).map(|r| r.0).unwrap_or(f64::NAN),
                    specfun::DEFAULT_ABS_TOL,
                    specfun::DEFAULT_REL_TOL,
                )?;
                (v, Quadrature)
            }
        })
    }

    /// `E[h(X)]` with default quadrature tolerances.
    pub fn expect<H: Fn(f64) -> f64>(&self, h: H) -> Result<f64> {
        self.expect_tol(h, specfun::DEFAULT_ABS_TOL, specfun::DEFAULT_REL_TOL)
    }

    /// `E[h(X)]` by quadrature against the law of `X`.
    ///
    /// Point masses evaluate `h` directly, scaled kinds rescale the argument,
    /// and products condition on the right factor, so this works for every
    /// kind, including those without a density.
    pub fn expect_tol<H: Fn(f64) -> f64>(&self, h: H, abs_tol: f64, rel_tol: f64) -> Result<f64> {
        self.validate()?;
        self.expect_dyn(&h, abs_tol, rel_tol)
    }

    fn expect_dyn(&self, h: &dyn Fn(f64) -> f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
        match self {
            ChannelModel::PointMass { value } => Ok(h(*value)),
            ChannelModel::Scaled { base, gain } => {
                let g = *gain;
                base.expect_dyn(&|x| h(g * x), abs_tol, rel_tol)
            }
            ChannelModel::Product(a, b) => {
                let failure = RefCell::new(None);
                let v = b.expect_dyn(
                    &|y: f64| match a.expect_dyn(&|x| h(x * y), abs_tol * 0.1, rel_tol * 0.1) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    },
                    abs_tol,
                    rel_tol,
                )?;
                match failure.into_inner() {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
            ChannelModel::Pareto { beta } => pareto_log_integral(*beta, h, f64::NEG_INFINITY, abs_tol, rel_tol),
            ChannelModel::Lognormal { sigma_db } => {
                let (mu, sigma) = lognormal_params(*sigma_db);
                let norm = 1.0 / (2.0 * PI).sqrt();
                let r = integrate_adaptive(
                    |z: f64| {
                        let w = norm * (-0.5 * z * z).exp();
                        if w == 0.0 {
                            0.0
                        } else {
                            w * h((mu + sigma * z).exp())
                        }
                    },
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    abs_tol,
                    rel_tol,
                )?;
                Ok(r.value)
            }
            _ => {
                let f = |x: f64| {
                    let p = self.pdf_unchecked(x).unwrap_or(f64::NAN);
                    if p == 0.0 {
                        0.0
                    } else {
                        h(x) * p
                    }
                };
                let lo = integrate_adaptive(f, 0.0, 1.0, abs_tol / 2.0, rel_tol)?;
                let hi = integrate_adaptive(f, 1.0, f64::INFINITY, abs_tol / 2.0, rel_tol)?;
                Ok(lo.value + hi.value)
            }
        }
    }

    /// `E[h(X)·1{X ≥ z}]` for `h` continuous on `[z, ∞)`.
    pub fn expect_tail<H: Fn(f64) -> f64>(
        &self,
        z: f64,
        h: H,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<f64> {
        check_nonneg("tail threshold", z)?;
        self.validate()?;
        self.expect_tail_dyn(z, &h, abs_tol, rel_tol)
    }

    fn expect_tail_dyn(
        &self,
        z: f64,
        h: &dyn Fn(f64) -> f64,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<f64> {
        if z == 0.0 {
            return self.expect_dyn(h, abs_tol, rel_tol);
        }
        if z == f64::INFINITY {
            return Ok(0.0);
        }
        match self {
            ChannelModel::PointMass { value } => Ok(if *value >= z { h(*value) } else { 0.0 }),
            ChannelModel::Scaled { base, gain } => {
                let g = *gain;
                base.expect_tail_dyn(z / g, &|x| h(g * x), abs_tol, rel_tol)
            }
            ChannelModel::Product(a, b) => {
                let failure = RefCell::new(None);
                let v = b.expect_dyn(
                    &|y: f64| {
                        if y == 0.0 {
                            return 0.0;
                        }
                        match a.expect_tail_dyn(z / y, &|x| h(x * y), abs_tol * 0.1, rel_tol * 0.1) {
                            Ok(v) => v,
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    abs_tol,
                    rel_tol,
                )?;
                match failure.into_inner() {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
            ChannelModel::Pareto { beta } => pareto_log_integral(*beta, h, z.ln(), abs_tol, rel_tol),
            ChannelModel::Lognormal { sigma_db } => {
                let (mu, sigma) = lognormal_params(*sigma_db);
                let norm = 1.0 / (2.0 * PI).sqrt();
                let t0 = (z.ln() - mu) / sigma;
                let r = integrate_adaptive(
                    |t: f64| {
                        let w = norm * (-0.5 * t * t).exp();
                        if w == 0.0 {
                            0.0
                        } else {
                            w * h((mu + sigma * t).exp())
                        }
                    },
                    t0,
                    f64::INFINITY,
                    abs_tol,
                    rel_tol,
                )?;
                Ok(r.value)
            }
            _ => {
                let f = |x: f64| {
                    let p = self.pdf_unchecked(x).unwrap_or(f64::NAN);
                    if p == 0.0 {
                        0.0
                    } else {
                        h(x) * p
                    }
                };
                if z < 1.0 {
                    let lo = integrate_adaptive(f, z, 1.0, abs_tol / 2.0, rel_tol)?;
                    let hi = integrate_adaptive(f, 1.0, f64::INFINITY, abs_tol / 2.0, rel_tol)?;
                    Ok(lo.value + hi.value)
                } else {
                    Ok(integrate_adaptive(f, z, f64::INFINITY, abs_tol, rel_tol)?.value)
                }
            }
        }
    }

    /// `E[X]`.
    pub fn mean(&self) -> Result<Moment> {
        self.validate()?;
        Ok(match self {
            ChannelModel::Rayleigh
            | ChannelModel::Rician { .. }
            | ChannelModel::Nakagami { .. }
            | ChannelModel::Lognormal { .. } => Moment::Finite(1.0),
            ChannelModel::Pareto { beta } => {
                if *beta <= 1.0 {
                    Moment::Diverges
                } else {
                    Moment::Finite(self.expect_tol(|x| x, 1e-12, 1e-10)?)
                }
            }
            ChannelModel::PointMass { value } => Moment::Finite(*value),
            ChannelModel::Scaled { base, gain } => base.mean()?.times(Moment::Finite(*gain)),
            ChannelModel::Product(a, b) => a.mean()?.times(b.mean()?),
        })
    }

    /// `E[1/X]`, or [`Moment::Diverges`] when the density does not vanish
    /// fast enough at the origin.
    pub fn inverse_mean(&self) -> Result<Moment> {
        self.validate()?;
        let quad = |c: &ChannelModel| c.expect_tol(|x| 1.0 / x, 1e-12, 1e-10).map(Moment::Finite);
        Ok(match self {
            // positive density at zero: logarithmic divergence
            ChannelModel::Rayleigh | ChannelModel::Rician { .. } => Moment::Diverges,
            // density ~ x^(m-1) at zero
            ChannelModel::Nakagami { m } if *m <= 1.0 => Moment::Diverges,
            // density ~ x^(beta-1) at zero
            ChannelModel::Pareto { beta } if *beta <= 1.0 => Moment::Diverges,
            ChannelModel::Nakagami { .. }
            | ChannelModel::Pareto { .. }
            | ChannelModel::Lognormal { .. } => quad(self)?,
            ChannelModel::PointMass { value } => Moment::Finite(1.0 / value),
            ChannelModel::Scaled { base, gain } => {
                base.inverse_mean()?.times(Moment::Finite(1.0 / gain))
            }
            ChannelModel::Product(a, b) => a.inverse_mean()?.times(b.inverse_mean()?),
        })
    }

    /// Precompute a sampler for repeated draws.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match self {
            ChannelModel::Rayleigh => Sampler::Exponential,
            ChannelModel::Rician { k } => Sampler::Rician {
                los: (k / (k + 1.0)).sqrt(),
                sigma: (0.5 / (k + 1.0)).sqrt(),
            },
            ChannelModel::Nakagami { m } => Sampler::Gamma(
                Gamma::new(*m, 1.0 / m).map_err(|e| Error::InvalidParameter(e.to_string()))?,
            ),
            ChannelModel::Pareto { beta } => Sampler::Pareto { inv_beta: 1.0 / beta },
            ChannelModel::Lognormal { sigma_db } => {
                let (mu, sigma) = lognormal_params(*sigma_db);
                Sampler::Lognormal { mu, sigma }
            }
            ChannelModel::Product(a, b) => {
                Sampler::Product(Box::new(a.sampler()?), Box::new(b.sampler()?))
            }
            ChannelModel::Scaled { base, gain } => Sampler::Scaled(Box::new(base.sampler()?), *gain),
            ChannelModel::PointMass { value } => Sampler::Constant(*value),
        })
    }

    /// Draw one variate. Builds a [`Sampler`] per call; prefer
    /// [`sampler`](Self::sampler) in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Compiled sampling recipe for a [`ChannelModel`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Exponential,
    Rician { los: f64, sigma: f64 },
    Gamma(Gamma<f64>),
    Pareto { inv_beta: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Product(Box<Sampler>, Box<Sampler>),
    Scaled(Box<Sampler>, f64),
    Constant(f64),
}

impl Sampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exponential => Exp1.sample(rng),
            Sampler::Rician { los, sigma } => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let re = los + sigma * re;
                let im = sigma * im;
                re * re + im * im
            }
            Sampler::Gamma(g) => g.sample(rng),
            Sampler::Pareto { inv_beta } => pareto_quantile_inv(open_unit(rng), *inv_beta),
            Sampler::Lognormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
            Sampler::Product(a, b) => a.sample(rng) * b.sample(rng),
            Sampler::Scaled(s, g) => g * s.sample(rng),
            Sampler::Constant(v) => *v,
        }
    }
}

/// Uniform on the open interval (0, 1).
#[inline]
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverse of the Pareto-type cdf `z^β/(1+z^β)`: `(u/(1−u))^{1/β}`.
pub fn pareto_quantile(beta: f64, u: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("pareto: beta must be > 0, got {beta}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::OutOfRange(format!("quantile level must be in (0,1), got {u}")));
    }
    Ok(pareto_quantile_inv(u, 1.0 / beta))
}

#[inline]
fn pareto_quantile_inv(u: f64, inv_beta: f64) -> f64 {
    (u / (1.0 - u)).powf(inv_beta)
}

fn check_nonneg(what: &str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{what} must be >= 0, got {x}")))
    }
}

fn lognormal_params(sigma_db: f64) -> (f64, f64) {
    let sigma = sigma_db * LN_10 / 10.0;
    (-0.5 * sigma * sigma, sigma)
}

fn gamma_pdf(m: f64, x: f64) -> f64 {
    if x == 0.0 {
        return match m.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0,
            _ => 0.0,
        };
    }
    (m * m.ln() - libm::lgamma(m) + (m - 1.0) * x.ln() - m * x).exp()
}

fn rician_pdf(k: f64, x: f64) -> f64 {
    let z = 2.0 * (k * (k + 1.0) * x).sqrt();
    // (1+K) e^{-K-(K+1)x} I0(z), with I0 kept scaled to avoid overflow
    let i0e = bessel_i0_scaled(z).unwrap_or(0.0);
    (1.0 + k) * (-k - (k + 1.0) * x + z).exp() * i0e
}

/// `∫_{v0}^{∞} h(e^v)·w(v) dv` where `w` is the Pareto law of `ln X`,
/// `β e^{−β|v|}/(1 + e^{−β|v|})²`. The weight decays exponentially, so heavy
/// tails in `x` pose no difficulty.
fn pareto_log_integral(beta: f64, h: &dyn Fn(f64) -> f64, v0: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let f = |v: f64| {
        let e = (-beta * v.abs()).exp();
        let w = beta * e / ((1.0 + e) * (1.0 + e));
        let x = v.exp();
        // |v| beyond ~709 leaves w negligible against any h of polynomial growth
        if w == 0.0 || x == 0.0 || !x.is_finite() {
            0.0
        } else {
            w * h(x)
        }
    };
    if v0 < 0.0 {
        let lo = integrate_adaptive(f, v0, 0.0, abs_tol / 2.0, rel_tol)?;
        let hi = integrate_adaptive(f, 0.0, f64::INFINITY, abs_tol / 2.0, rel_tol)?;
        Ok(lo.value + hi.value)
    } else {
        Ok(integrate_adaptive(f, v0, f64::INFINITY, abs_tol, rel_tol)?.value)
    }
}

fn pareto_pdf(beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return match beta.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0,
            _ => 0.0,
        };
    }
    if z <= 1.0 {
        let zb = z.powf(beta);
        beta * zb / (z * (1.0 + zb).powi(2))
    } else {
        let zb = z.powf(-beta);
        beta * zb / (z * (1.0 + zb).powi(2))
    }
}

fn pareto_cdf(beta: f64, z: f64) -> f64 {
    if z <= 1.0 {
        let zb = z.powf(beta);
        zb / (1.0 + zb)
    } else {
        1.0 / (1.0 + z.powf(-beta))
    }
}

impl fmt::Display for ChannelModel {
    /// Renders the model in the config expression syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelModel::Rayleigh => write!(f, "rayleigh"),
            ChannelModel::Rician { k } => write!(f, "rician(k={k})"),
            ChannelModel::Nakagami { m } => write!(f, "nakagami(m={m})"),
            ChannelModel::Pareto { beta } => write!(f, "pareto(beta={beta})"),
            ChannelModel::Lognormal { sigma_db } => write!(f, "lognormal(sigma_db={sigma_db})"),
            ChannelModel::Product(a, b) => write!(f, "product({a}, {b})"),
            ChannelModel::Scaled { base, gain } => write!(f, "scaled({base}, gain={gain})"),
            ChannelModel::PointMass { value } => write!(f, "point_mass(value={value})"),
        }
    }
}
