//! Diversity combiners and relay networks.
//!
//! SNR-combining topologies map the per-link SNR vector to one end-to-end
//! SNR. Decode-and-forward and post-detection combining instead compose
//! per-link error probabilities.

use std::fmt;

use smallvec::SmallVec;

use crate::channels::{ChannelModel, Sampler};
use crate::error::{Error, Result};
use crate::metrics::MetricFunction;
use crate::montecarlo::{self, Estimate, StreamRng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyKind {
    /// Maximum-ratio combining: `Σ x_m`.
    Mrc(usize),
    /// Equal-gain combining: `(Σ √x_m)² / M`.
    Egc(usize),
    /// Selection combining: `max x_m`.
    Sc(usize),
    /// Multi-hop amplify-and-forward: `[Π(1 + 1/x_m) − 1]^{−1}`.
    MultiHopAf(usize),
    /// Multi-hop decode-and-forward with binary per-hop decisions.
    MultiHopDf(usize),
    /// Majority vote over `M` (odd) independent branch decisions.
    Pdc(usize),
    /// Parallel AF relay branches with `branches[i]` hops each, combined by
    /// MRC together with an optional direct link.
    MbMhAf { branches: Vec<usize>, direct_link: bool },
}

impl TopologyKind {
    /// Number of channel values the topology consumes.
    pub fn arity(&self) -> usize {
        match self {
            TopologyKind::Mrc(m)
            | TopologyKind::Egc(m)
            | TopologyKind::Sc(m)
            | TopologyKind::MultiHopAf(m)
            | TopologyKind::MultiHopDf(m)
            | TopologyKind::Pdc(m) => *m,
            TopologyKind::MbMhAf {
                branches,
                direct_link,
            } => branches.iter().sum::<usize>() + usize::from(*direct_link),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TopologyKind::MbMhAf { branches, .. } => {
                if branches.is_empty() || branches.contains(&0) {
                    return Err(Error::InvalidParameter(
                        "mbmhaf: need at least one branch and at least one hop per branch".into(),
                    ));
                }
            }
            TopologyKind::Pdc(m) if m % 2 == 0 => {
                return Err(Error::InvalidParameter(format!(
                    "pdc: majority voting needs an odd number of branches, got {m}"
                )))
            }
            _ => {}
        }
        if self.arity() == 0 {
            return Err(Error::InvalidParameter("topology needs M >= 1".into()));
        }
        Ok(())
    }

    /// Whether the topology combines SNRs (as opposed to decisions).
    pub fn combines_snr(&self) -> bool {
        !matches!(self, TopologyKind::MultiHopDf(_) | TopologyKind::Pdc(_))
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Mrc(m) => write!(f, "mrc({m})"),
            TopologyKind::Egc(m) => write!(f, "egc({m})"),
            TopologyKind::Sc(m) => write!(f, "sc({m})"),
            TopologyKind::MultiHopAf(m) => write!(f, "af({m})"),
            TopologyKind::MultiHopDf(m) => write!(f, "df({m})"),
            TopologyKind::Pdc(m) => write!(f, "pdc({m})"),
            TopologyKind::MbMhAf {
                branches,
                direct_link,
            } => {
                let b: Vec<String> = branches.iter().map(|n| n.to_string()).collect();
                write!(f, "mbmhaf(branches=[{}], direct={direct_link})", b.join(","))
            }
        }
    }
}

/// A topology with one channel model bound to each link.
///
/// For [`TopologyKind::MbMhAf`] the direct link (if any) comes first, then
/// the hops of branch 1 in order, then branch 2, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub channels: Vec<ChannelModel>,
}

impl Topology {
    pub fn new(kind: TopologyKind, channels: Vec<ChannelModel>) -> Result<Self> {
        kind.validate()?;
        if channels.len() != kind.arity() {
            return Err(Error::Arity {
                expected: kind.arity(),
                got: channels.len(),
            });
        }
        for c in &channels {
            c.validate()?;
        }
        Ok(Topology { kind, channels })
    }

    /// Same model on every link.
    pub fn iid(kind: TopologyKind, channel: ChannelModel) -> Result<Self> {
        let n = kind.arity();
        Topology::new(kind, vec![channel; n])
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over [", self.kind)?;
        for (i, c) in self.channels.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

fn af_chain(x: &[f64]) -> f64 {
    if x.contains(&0.0) {
        return 0.0;
    }
    let s: f64 = x.iter().map(|&v| (1.0 / v).ln_1p()).sum();
    1.0 / s.exp_m1()
}

/// End-to-end SNR for an SNR-combining topology.
pub fn combined_snr(kind: &TopologyKind, x: &[f64]) -> Result<f64> {
    kind.validate()?;
    if x.len() != kind.arity() {
        return Err(Error::Arity {
            expected: kind.arity(),
            got: x.len(),
        });
    }
    if x.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::OutOfRange("link SNRs must be >= 0".into()));
    }
    if !kind.combines_snr() {
        return Err(Error::Unsupported(format!(
            "{kind} combines decisions, not SNRs"
        )));
    }
    Ok(combine_unchecked(kind, x))
}

#[inline]
fn combine_unchecked(kind: &TopologyKind, x: &[f64]) -> f64 {
    match kind {
        TopologyKind::Mrc(_) => x.iter().sum(),
        TopologyKind::Egc(m) => {
            let s: f64 = x.iter().map(|v| v.sqrt()).sum();
            s * s / *m as f64
        }
        TopologyKind::Sc(_) => x.iter().copied().fold(0.0, f64::max),
        TopologyKind::MultiHopAf(_) => af_chain(x),
        TopologyKind::MbMhAf {
            branches,
            direct_link,
        } => {
            let mut at = usize::from(*direct_link);
            let mut total = if *direct_link { x[0] } else { 0.0 };
            for &n in branches {
                total += af_chain(&x[at..at + n]);
                at += n;
            }
            total
        }
        TopologyKind::MultiHopDf(_) | TopologyKind::Pdc(_) => f64::NAN,
    }
}

fn check_prob(p: f64, hi: f64) -> Result<()> {
    if (0.0..=hi).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "error probability must lie in [0, {hi}], got {p}"
        )))
    }
}

/// End-to-end bit error of a binary decode-and-forward cascade.
pub fn df_combined_error(per_hop_error: &[f64]) -> Result<f64> {
    if per_hop_error.is_empty() {
        return Err(Error::InvalidParameter("need at least one hop".into()));
    }
    for &p in per_hop_error {
        check_prob(p, 0.5)?;
    }
    Ok(df_unchecked(per_hop_error))
}

#[inline]
fn df_unchecked(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |acc, &q| acc * (1.0 - q) + (1.0 - acc) * q)
}

/// Probability that a majority of `M` (odd) independent branches err.
pub fn pdc_average_error(per_branch_error: &[f64]) -> Result<f64> {
    let m = per_branch_error.len();
    if m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "pdc: majority voting needs an odd number of branches, got {m}"
        )));
    }
    for &p in per_branch_error {
        check_prob(p, 1.0)?;
    }
    Ok(majority_unchecked(per_branch_error))
}

#[inline]
fn majority_unchecked(p: &[f64]) -> f64 {
    // dist[k] = P(exactly k of the branches seen so far err)
    let mut dist: SmallVec<[f64; 16]> = SmallVec::from_elem(0.0, p.len() + 1);
    dist[0] = 1.0;
    for (i, &q) in p.iter().enumerate() {
        for k in (0..=i + 1).rev() {
            let stay = dist[k] * (1.0 - q);
            let moved = if k > 0 { dist[k - 1] * q } else { 0.0 };
            dist[k] = stay + moved;
        }
    }
    dist[p.len().div_ceil(2)..].iter().sum()
}

/// Brute-force majority error by enumerating all error subsets.
pub fn pdc_average_error_enumerated(per_branch_error: &[f64]) -> Result<f64> {
    let m = per_branch_error.len();
    if m.is_multiple_of(2) || m > 20 {
        return Err(Error::InvalidParameter(format!(
            "enumeration needs odd M <= 20, got {m}"
        )));
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        if (mask.count_ones() as usize) < m.div_ceil(2) {
            continue;
        }
        total += per_branch_error
            .iter()
            .enumerate()
            .map(|(i, &p)| if mask >> i & 1 == 1 { p } else { 1.0 - p })
            .product::<f64>();
    }
    Ok(total)
}

/// Precompiled per-sample evaluator of a topology and metric.
#[derive(Debug, Clone)]
pub struct SystemSampler {
    kind: TopologyKind,
    samplers: Vec<Sampler>,
    metric: MetricFunction,
}

impl SystemSampler {
    pub fn new(topology: &Topology, metric: &MetricFunction) -> Result<Self> {
        metric.validate()?;
        if !topology.kind.combines_snr() && metric.eval(0.0)? > 0.5 {
            return Err(Error::InvalidParameter(format!(
                "{} needs a binary error-rate metric (value <= 1/2), got {metric}",
                topology.kind
            )));
        }
        Ok(SystemSampler {
            kind: topology.kind.clone(),
            samplers: topology
                .channels
                .iter()
                .map(|c| c.sampler())
                .collect::<Result<_>>()?,
            metric: *metric,
        })
    }

    /// One draw of the conditional metric given fresh channel values.
    #[inline]
    pub fn draw(&self, rho: f64, rng: &mut StreamRng) -> f64 {
        let x: SmallVec<[f64; 16]> = self.samplers.iter().map(|s| s.sample(rng)).collect();
        let eval = |s: f64| self.metric.eval(s).unwrap_or(f64::NAN);
        match &self.kind {
            TopologyKind::MultiHopDf(_) => {
                let p: SmallVec<[f64; 16]> = x.iter().map(|&v| eval(rho * v)).collect();
                df_unchecked(&p)
            }
            TopologyKind::Pdc(_) => {
                let p: SmallVec<[f64; 16]> = x.iter().map(|&v| eval(rho * v)).collect();
                majority_unchecked(&p)
            }
            k => eval(rho * combine_unchecked(k, &x)),
        }
    }
}

/// Monte Carlo average of the end-to-end metric at average SNR `rho`.
pub fn simulate_system(
    topology: &Topology,
    metric: &MetricFunction,
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
    let s = SystemSampler::new(topology, metric)?;
    let est = montecarlo::mc_mean(n, seed, 0, |rng| s.draw(rho, rng));
    if est.mean.is_finite() {
        Ok(est)
    } else {
        Err(Error::InvalidParameter(format!("metric {metric} failed during sampling")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{average_metric, AverageMethod};
    use proptest::prelude::*;

    #[test]
    fn combiner_examples() {
        assert_eq!(combined_snr(&TopologyKind::Mrc(3), &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(combined_snr(&TopologyKind::Egc(3), &[4.0, 4.0, 4.0]).unwrap(), 12.0);
        assert!((combined_snr(&TopologyKind::MultiHopAf(2), &[1.0, 1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(combined_snr(&TopologyKind::Sc(3), &[1.0, 5.0, 2.0]).unwrap(), 5.0);
        let mb = TopologyKind::MbMhAf {
            branches: vec![1],
            direct_link: true,
        };
        assert!((combined_snr(&mb, &[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(combined_snr(&TopologyKind::MultiHopAf(3), &[2.0, 0.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn combiner_errors() {
        assert!(matches!(
            combined_snr(&TopologyKind::Mrc(3), &[1.0, 2.0]),
            Err(Error::Arity { expected: 3, got: 2 })
        ));
        assert!(matches!(combined_snr(&TopologyKind::MultiHopDf(2), &[1.0, 1.0]), Err(Error::Unsupported(_))));
        assert!(TopologyKind::Pdc(2).validate().is_err());
        assert!(TopologyKind::Mrc(0).validate().is_err());
        assert!(Topology::iid(TopologyKind::Mrc(2), ChannelModel::Rayleigh).is_ok());
        assert!(matches!(
            Topology::new(TopologyKind::Mrc(2), vec![ChannelModel::Rayleigh]),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn mbmhaf_matches_its_parts() {
        let kind = TopologyKind::MbMhAf {
            branches: vec![2, 3],
            direct_link: true,
        };
        let x = [0.7, 1.0, 2.0, 3.0, 0.5, 4.0];
        let want = 0.7 + af_chain(&x[1..3]) + af_chain(&x[3..6]);
        assert!((combined_snr(&kind, &x).unwrap() - want).abs() < 1e-14);
        // product form of the two-hop chain
        let direct = 1.0 / ((1.0 + 1.0 / 1.0) * (1.0 + 1.0 / 2.0) - 1.0);
        assert!((af_chain(&[1.0, 2.0]) - direct).abs() < 1e-14);
    }

    #[test]
    fn df_examples() {
        assert_eq!(df_combined_error(&[0.2]).unwrap(), 0.2);
        assert!((df_combined_error(&[0.1, 0.1]).unwrap() - 0.18).abs() < 1e-15);
        assert_eq!(df_combined_error(&[0.5, 0.3]).unwrap(), 0.5);
        assert_eq!(df_combined_error(&[0.3, 0.5, 0.01]).unwrap(), 0.5);
        assert!(df_combined_error(&[0.6]).is_err());
    }

    #[test]
    fn pdc_examples() {
        assert_eq!(pdc_average_error(&[0.3]).unwrap(), 0.3);
        assert!((pdc_average_error(&[0.1; 3]).unwrap() - 0.028).abs() < 1e-15);
        assert_eq!(pdc_average_error(&[0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert!(pdc_average_error(&[0.1, 0.1]).is_err());
    }

    fn arb_kind() -> impl Strategy<Value = TopologyKind> {
        prop_oneof![
            (1usize..6).prop_map(TopologyKind::Mrc),
            (1usize..6).prop_map(TopologyKind::Egc),
            (1usize..6).prop_map(TopologyKind::Sc),
            (1usize..6).prop_map(TopologyKind::MultiHopAf),
            (prop::collection::vec(1usize..4, 1..4), any::<bool>())
                .prop_map(|(branches, direct_link)| TopologyKind::MbMhAf { branches, direct_link }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn combined_snr_is_monotone(
            kind in arb_kind(),
            seed in prop::collection::vec((0.0f64..50.0, 0.0f64..10.0), 16),
        ) {
            let n = kind.arity();
            let x: Vec<f64> = seed[..n].iter().map(|p| p.0).collect();
            let y: Vec<f64> = seed[..n].iter().map(|p| p.0 + p.1).collect();
            let cx = combined_snr(&kind, &x).unwrap();
            let cy = combined_snr(&kind, &y).unwrap();
            prop_assert!(cx >= 0.0);
            prop_assert!(cx <= cy * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn df_properties(p in prop::collection::vec(0.0f64..=0.5, 1..6), i in 0usize..6, bump in 0.0f64..0.5) {
            let e = df_combined_error(&p).unwrap();
            prop_assert!((0.0..=0.5).contains(&e));
            let mut rev = p.clone();
            rev.reverse();
            prop_assert!((df_combined_error(&rev).unwrap() - e).abs() < 1e-14);
            let i = i % p.len();
            let mut q = p.clone();
            q[i] = (q[i] + bump).min(0.5);
            prop_assert!(df_combined_error(&q).unwrap() >= e - 1e-15);
        }

        #[test]
        fn pdc_dp_matches_enumeration(p in prop::collection::vec(0.0f64..=1.0, 1..12), i in 0usize..12, bump in 0.0f64..1.0) {
            let mut p = p;
            if p.len() % 2 == 0 { p.pop(); }
            let e = pdc_average_error(&p).unwrap();
            prop_assert!((e - pdc_average_error_enumerated(&p).unwrap()).abs() < 1e-12);
            let i = i % p.len();
            let mut q = p.clone();
            q[i] = (q[i] + bump).min(1.0);
            prop_assert!(pdc_average_error(&q).unwrap() >= e - 1e-14);
        }
    }

    #[test]
    fn single_branch_mrc_is_average_metric() {
        let c = ChannelModel::rician(2.0).unwrap();
        let t = Topology::iid(TopologyKind::Mrc(1), c.clone()).unwrap();
        for rho in [0.5, 5.0] {
            let sim = simulate_system(&t, &MetricFunction::BPSK, rho, 400_000, 11).unwrap();
            let q = average_metric(&c, &MetricFunction::BPSK, rho, AverageMethod::Quadrature).unwrap();
            assert!((sim.mean - q.mean).abs() < 4.0 * sim.stderr, "{} vs {}", sim.mean, q.mean);
        }
    }

    #[test]
    fn pdc_simulation_factorizes() {
        let chans = vec![
            ChannelModel::rician(2.0).unwrap(),
            ChannelModel::Rayleigh,
            ChannelModel::nakagami(3.0).unwrap(),
        ];
        let t = Topology::new(TopologyKind::Pdc(3), chans.clone()).unwrap();
        let rho = 2.0;
        let sim = simulate_system(&t, &MetricFunction::BPSK, rho, 400_000, 5).unwrap();
        let per: Vec<f64> = chans
            .iter()
            .map(|c| average_metric(c, &MetricFunction::BPSK, rho, AverageMethod::Quadrature).unwrap().mean)
            .collect();
        let composed = pdc_average_error(&per).unwrap();
        assert!((sim.mean - composed).abs() < 3.0 * sim.stderr.max(1e-9), "{} vs {composed}", sim.mean);
    }

    #[test]
    fn df_rejects_non_binary_metrics() {
        let t = Topology::iid(TopologyKind::MultiHopDf(2), ChannelModel::Rayleigh).unwrap();
        assert!(simulate_system(&t, &MetricFunction::mpsk(8).unwrap(), 1.0, 10_000, 1).is_err());
    }
}
