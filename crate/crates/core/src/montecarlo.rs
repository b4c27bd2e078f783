//! Seeded SNR sweeps with standard errors and crossover detection.
//!
//! Sample `j` of sweep point `i` always comes from the ChaCha8 stream keyed by
//! the sweep seed with stream id `(i << 32) | (j / BLOCK_SIZE)`. Blocks are
//! reduced in index order, so results are bit-identical for any number of
//! worker threads.

use std::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Samples per independent RNG stream.
pub const BLOCK_SIZE: u64 = 16_384;

/// Smallest sample count accepted for a Monte Carlo sweep.
pub const MIN_SAMPLES: u64 = 10_000;

/// Default number of samples per sweep point.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub rho_grid_db: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
    pub method: Method,
}

impl SweepSpec {
    pub fn new(rho_grid_db: Vec<f64>, n_samples: u64, seed: u64, method: Method) -> Result<Self> {
        let spec = SweepSpec {
            rho_grid_db,
            n_samples,
            seed,
            method,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho_grid_db.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if self.rho_grid_db.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("sweep grid has non-finite entries".into()));
        }
        if self.rho_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sweep grid must be strictly ascending".into()));
        }
        if self.method == Method::MonteCarlo && self.n_samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "monte carlo sweeps need at least {MIN_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }

    /// Stable fingerprint of the sweep settings, recorded in metadata.
    pub fn hash64(&self) -> u64 {
        let mut h = std::hash::DefaultHasher::new();
        for r in &self.rho_grid_db {
            r.to_bits().hash(&mut h);
        }
        self.n_samples.hash(&mut h);
        self.seed.hash(&mut h);
        self.method.hash(&mut h);
        h.finish()
    }
}

/// Evenly spaced dB grid from `start` to `stop` inclusive.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad grid {start}:{step}:{stop}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub rho_db: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepMetadata {
    pub spec_hash: u64,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub metadata: SweepMetadata,
}

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pairwise combination of two disjoint sample sets.
    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        Moments {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    pub fn estimate(&self) -> Estimate {
        let stderr = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr,
            n: self.n,
        }
    }
}

/// RNG for one block of one sweep point.
pub fn stream_rng(seed: u64, point: u64, block: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((point << 32) | (block & 0xffff_ffff));
    rng
}

/// Derive a child seed for a named series, so two series under one master
/// seed draw from unrelated streams.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, folded into the seed with a SplitMix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn blocks(n: u64) -> impl Iterator<Item = (u64, u64)> {
    let count = n.div_ceil(BLOCK_SIZE);
    (0..count).map(move |b| (b, BLOCK_SIZE.min(n - b * BLOCK_SIZE)))
}

fn block_moments<F>(seed: u64, point: u64, block: u64, len: u64, sample: &F) -> Moments
where
    F: Fn(&mut StreamRng) -> f64,
{
    let mut rng = stream_rng(seed, point, block);
    let mut m = Moments::default();
    for _ in 0..len {
        m.push(sample(&mut rng));
    }
    m
}

/// Monte Carlo mean of `sample` over `n` draws at sweep point `point`.
pub fn mc_mean<F>(n: u64, seed: u64, point: u64, sample: F) -> Estimate
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let parts: Vec<Moments> = blocks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, len)| block_moments(seed, point, b, len, &sample))
        .collect();
    parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate()
}

type SampleFn<'a> = Box<dyn Fn(f64, &mut StreamRng) -> f64 + Sync + 'a>;

/// How a sweep obtains the value at one average SNR (linear scale).
pub enum Evaluator<'a> {
    /// One Monte Carlo draw of the quantity being averaged.
    Sample(SampleFn<'a>),
    /// A deterministic value, e.g. from quadrature.
    Exact(Box<dyn Fn(f64) -> Result<f64> + Sync + 'a>),
}

impl<'a> Evaluator<'a> {
    pub fn sample(f: impl Fn(f64, &mut StreamRng) -> f64 + Sync + 'a) -> Self {
        Evaluator::Sample(Box::new(f))
    }

    pub fn exact(f: impl Fn(f64) -> Result<f64> + Sync + 'a) -> Self {
        Evaluator::Exact(Box::new(f))
    }
}

/// Evaluate every grid point of `spec`.
pub fn run_sweep(spec: &SweepSpec, evaluator: &Evaluator<'_>, description: &str) -> Result<SweepResult> {
    spec.validate()?;
    let metadata = SweepMetadata {
        spec_hash: spec.hash64(),
        description: description.to_string(),
    };
    let grid = &spec.rho_grid_db;
    let points = match evaluator {
        Evaluator::Exact(f) => {
            let values: Vec<Result<f64>> = grid.par_iter().map(|&db| f(db_to_linear(db))).collect();
            values
                .into_iter()
                .zip(grid)
                .enumerate()
                .map(|(index, (v, &rho_db))| match v {
                    Ok(estimate) if estimate.is_finite() => Ok(SweepPoint {
                        rho_db,
                        estimate,
                        stderr: 0.0,
                        n_samples: 0,
                    }),
                    Ok(bad) => Err(Error::SweepPoint {
                        index,
                        rho_db,
                        source: Box::new(Error::InvalidParameter(format!(
                            "evaluator returned {bad}"
                        ))),
                    }),
                    Err(e) => Err(Error::SweepPoint {
                        index,
                        rho_db,
                        source: Box::new(e),
                    }),
                })
                .collect::<Result<Vec<_>>>()?
        }
        Evaluator::Sample(f) => {
            if spec.method != Method::MonteCarlo {
                return Err(Error::InvalidParameter(
                    "a sampling evaluator needs a monte carlo sweep".into(),
                ));
            }
            let tasks: Vec<(usize, u64, u64)> = (0..grid.len())
                .flat_map(|p| blocks(spec.n_samples).map(move |(b, len)| (p, b, len)))
                .collect();
            let parts: Vec<Moments> = tasks
                .par_iter()
                .map(|&(p, b, len)| {
                    let rho = db_to_linear(grid[p]);
                    block_moments(spec.seed, p as u64, b, len, &|rng: &mut StreamRng| f(rho, rng))
                })
                .collect();
            let per_point = parts.len() / grid.len();
            let mut out = Vec::with_capacity(grid.len());
            for (index, (&rho_db, chunk)) in grid.iter().zip(parts.chunks(per_point)).enumerate() {
                let est = chunk
                    .iter()
                    .copied()
                    .fold(Moments::default(), Moments::merge)
                    .estimate();
                if !est.mean.is_finite() {
                    return Err(Error::SweepPoint {
                        index,
                        rho_db,
                        source: Box::new(Error::InvalidParameter(
                            "non-finite Monte Carlo sample".into(),
                        )),
                    });
                }
                out.push(SweepPoint {
                    rho_db,
                    estimate: est.mean,
                    stderr: est.stderr,
                    n_samples: est.n,
                });
            }
            out
        }
    };
    Ok(SweepResult { points, metadata })
}

/// A dB interval over which two curves exchange order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub lo_db: f64,
    pub hi_db: f64,
}

impl Crossover {
    pub fn contains(&self, db: f64) -> bool {
        self.lo_db <= db && db <= self.hi_db
    }
}

/// Significance multiplier on the combined standard error.
pub const CROSSOVER_SIGMAS: f64 = 3.0;

/// Intervals where `a − b` changes sign.
///
/// Only grid points whose difference exceeds three combined standard errors
/// take part; a crossover is reported between consecutive such points of
/// opposite sign.
pub fn crossover_detect(a: &SweepResult, b: &SweepResult) -> Result<Vec<Crossover>> {
    check_same_grid(a, b)?;
    let mut last: Option<(f64, f64)> = None;
    let mut out = Vec::new();
    for (pa, pb) in a.points.iter().zip(&b.points) {
        let d = pa.estimate - pb.estimate;
        let s = pa.stderr.hypot(pb.stderr);
        let floor = 1e-12 * pa.estimate.abs().max(pb.estimate.abs());
        if d.abs() <= CROSSOVER_SIGMAS * s + floor {
            continue;
        }
        if let Some((db, prev)) = last {
            if prev.signum() != d.signum() {
                out.push(Crossover {
                    lo_db: db,
                    hi_db: pa.rho_db,
                });
            }
        }
        last = Some((pa.rho_db, d));
    }
    Ok(out)
}

/// Grid points where `a` exceeds `b` by more than three combined standard
/// errors; empty when `a ≤ b` holds uniformly at that significance.
pub fn significant_violations(a: &SweepResult, b: &SweepResult) -> Result<Vec<f64>> {
    check_same_grid(a, b)?;
    Ok(a.points
        .iter()
        .zip(&b.points)
        .filter(|(pa, pb)| pa.estimate - pb.estimate > CROSSOVER_SIGMAS * pa.stderr.hypot(pb.stderr))
        .map(|(pa, _)| pa.rho_db)
        .collect())
}

fn check_same_grid(a: &SweepResult, b: &SweepResult) -> Result<()> {
    if a.points.len() != b.points.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            a.points.len(),
            b.points.len()
        )));
    }
    for (i, (pa, pb)) in a.points.iter().zip(&b.points).enumerate() {
        if (pa.rho_db - pb.rho_db).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "point {i}: {} dB vs {} dB",
                pa.rho_db, pb.rho_db
            )));
        }
    }
    Ok(())
}
