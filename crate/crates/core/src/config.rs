//! Scenario files.
//!
//! A scenario is a TOML document. Every value that names a model uses the
//! expression syntax of [`crate::expr`]:
//!
//! ```toml
//! command = "system-sim"
//! channels = ["rician(k=2)", "rician(k=5)"]
//! topology = "mrc(3)"
//! metric = "bpsk"
//! output = "fig5.csv"
//!
//! [sweep]
//! grid_db = { start = -10.0, stop = 30.0, step = 0.5 }
//! samples = 1000000
//! seed = 2024
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::channels::ChannelModel;
use crate::error::{Error, Result};
use crate::expr;
use crate::metrics::MetricFunction;
use crate::montecarlo::{db_grid, Method};
use crate::noise::NoiseModel;
use crate::orders::Order;
use crate::systems::TopologyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    OrderCheck,
    AvgMetric,
    Capacity,
    SystemSim,
    NoiseSim,
    ReproduceFigure,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "order-check" => Command::OrderCheck,
            "avg-metric" => Command::AvgMetric,
            "capacity" => Command::Capacity,
            "system-sim" => Command::SystemSim,
            "noise-sim" => Command::NoiseSim,
            "reproduce-figure" => Command::ReproduceFigure,
            other => {
                return Err(Error::config(
                    "command",
                    format!(
                        "unknown command `{other}` (expected order-check, avg-metric, capacity, system-sim, noise-sim or reproduce-figure)"
                    ),
                ))
            }
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::OrderCheck => "order-check",
            Command::AvgMetric => "avg-metric",
            Command::Capacity => "capacity",
            Command::SystemSim => "system-sim",
            Command::NoiseSim => "noise-sim",
            Command::ReproduceFigure => "reproduce-figure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityKind {
    Ergodic,
    ChannelInversion,
    OptimalAdaptation,
}

impl FromStr for CapacityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erg" | "ergodic" => Ok(CapacityKind::Ergodic),
            "ci" => Ok(CapacityKind::ChannelInversion),
            "oa" => Ok(CapacityKind::OptimalAdaptation),
            other => Err(Error::config("capacity", format!("expected erg, ci or oa, got `{other}`"))),
        }
    }
}

impl fmt::Display for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapacityKind::Ergodic => "erg",
            CapacityKind::ChannelInversion => "ci",
            CapacityKind::OptimalAdaptation => "oa",
        })
    }
}

pub fn parse_order(s: &str) -> Result<Order> {
    match s {
        "st" | "usual" => Ok(Order::Usual),
        "cx" | "convex" => Ok(Order::Convex),
        "lt" | "laplace" => Ok(Order::Laplace),
        other => Err(Error::config("order", format!("expected st, cx or lt, got `{other}`"))),
    }
}

pub fn parse_method(s: &str) -> Result<Method> {
    match s {
        "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
        "quadrature" | "quad" => Ok(Method::Quadrature),
        other => Err(Error::config(
            "sweep.method",
            format!("expected monte_carlo or quadrature, got `{other}`"),
        )),
    }
}

/// Sweep settings; unset fields fall back to command defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub grid_db: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub command: Command,
    pub channels: Vec<ChannelModel>,
    /// Series labels, one per channel; the source expressions by default.
    pub labels: Vec<String>,
    pub metric: Option<MetricFunction>,
    pub topology: Option<TopologyKind>,
    pub noise: Option<NoiseModel>,
    pub order: Option<Order>,
    pub capacity: Option<CapacityKind>,
    pub figure: Option<u32>,
    pub sweep: SweepConfig,
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn new(command: Command) -> Self {
        Scenario {
            command,
            channels: Vec::new(),
            labels: Vec::new(),
            metric: None,
            topology: None,
            noise: None,
            order: None,
            capacity: None,
            figure: None,
            sweep: SweepConfig::default(),
            output: None,
        }
    }

    pub fn with_channels(mut self, exprs: &[&str]) -> Result<Self> {
        for e in exprs {
            self.channels.push(expr::parse_channel(e)?);
            self.labels.push(e.to_string());
        }
        Ok(self)
    }

    /// Check that the fields required by the command are present.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, key: &str, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(key, format!("{} requires {what}", self.command)))
            }
        };
        if self.labels.len() != self.channels.len() {
            return Err(Error::config("labels", "one label per channel is required"));
        }
        match self.command {
            Command::OrderCheck => {
                need(self.channels.len() == 2, "channels", "exactly two channels")?;
                need(self.order.is_some(), "order", "`order`")?;
            }
            Command::AvgMetric => {
                need(!self.channels.is_empty(), "channels", "at least one channel")?;
                need(self.metric.is_some(), "metric", "`metric`")?;
            }
            Command::Capacity => {
                need(!self.channels.is_empty(), "channels", "at least one channel")?;
                need(self.capacity.is_some(), "capacity", "`capacity`")?;
            }
            Command::SystemSim => {
                need(!self.channels.is_empty(), "channels", "at least one channel")?;
                need(self.topology.is_some(), "topology", "`topology`")?;
                need(self.metric.is_some(), "metric", "`metric`")?;
            }
            Command::NoiseSim => {
                need(!self.channels.is_empty(), "channels", "at least one channel")?;
                need(self.noise.is_some(), "noise", "`noise`")?;
            }
            Command::ReproduceFigure => match self.figure {
                Some(3..=10) => {}
                _ => return Err(Error::config("figure", "reproduce-figure requires `figure` in 3..=10")),
            },
        }
        if let Some(g) = &self.sweep.grid_db {
            if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) || g.iter().any(|x| !x.is_finite()) {
                return Err(Error::config("sweep.grid_db", "grid must be nonempty, finite and strictly ascending"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    command: String,
    #[serde(default)]
    channels: Vec<String>,
    channel_x: Option<String>,
    channel_y: Option<String>,
    labels: Option<Vec<String>>,
    metric: Option<String>,
    topology: Option<String>,
    noise: Option<String>,
    order: Option<String>,
    capacity: Option<String>,
    figure: Option<u32>,
    output: Option<PathBuf>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    grid_db: Option<RawGrid>,
    samples: Option<u64>,
    seed: Option<u64>,
    method: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

/// 1-based line of the first `key = ...` assignment in `text`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(leaf)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

fn locate(text: &str, e: Error) -> Error {
    match e {
        Error::Config { line: None, key: Some(k), message } => Error::Config {
            line: line_of(text, &k),
            key: Some(k),
            message,
        },
        other => other,
    }
}

fn field<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Config { .. } => e,
        other => Error::config(key, other.to_string()),
    })
}

/// Parse and validate a scenario document.
pub fn parse_config(text: &str) -> Result<Scenario> {
    parse_inner(text).map_err(|e| locate(text, e))
}

fn parse_inner(text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Config {
            line,
            key: None,
            message: e.message().to_string(),
        }
    })?;
    let mut s = Scenario::new(raw.command.parse()?);
    let mut exprs: Vec<(String, String)> = Vec::new();
    for (i, c) in raw.channels.iter().enumerate() {
        exprs.push((format!("channels[{i}]"), c.clone()));
    }
    if !raw.channels.is_empty() && (raw.channel_x.is_some() || raw.channel_y.is_some()) {
        return Err(Error::config("channel_x", "use either `channels` or `channel_x`/`channel_y`, not both"));
    }
    if let Some(x) = raw.channel_x {
        exprs.push(("channel_x".into(), x));
    }
    if let Some(y) = raw.channel_y {
        if exprs.is_empty() {
            return Err(Error::config("channel_y", "`channel_y` needs `channel_x`"));
        }
        exprs.push(("channel_y".into(), y));
    }
    for (key, e) in &exprs {
        let k = if key.starts_with("channels[") { "channels" } else { key.as_str() };
        s.channels.push(field(k, expr::parse_channel(e))?);
        s.labels.push(e.clone());
    }
    if let Some(labels) = raw.labels {
        if labels.len() != s.channels.len() {
            return Err(Error::config("labels", "one label per channel is required"));
        }
        s.labels = labels;
    }
    if let Some(m) = raw.metric {
        s.metric = Some(field("metric", expr::parse_metric(&m))?);
    }
    if let Some(t) = raw.topology {
        s.topology = Some(field("topology", expr::parse_topology(&t))?);
    }
    if let Some(n) = raw.noise {
        s.noise = Some(field("noise", expr::parse_noise(&n))?);
    }
    if let Some(o) = raw.order {
        s.order = Some(parse_order(&o)?);
    }
    if let Some(c) = raw.capacity {
        s.capacity = Some(c.parse()?);
    }
    s.figure = raw.figure;
    s.output = raw.output;
    if let Some(sw) = raw.sweep {
        s.sweep.grid_db = match sw.grid_db {
            None => None,
            Some(RawGrid::List(g)) => Some(g),
            Some(RawGrid::Range { start, stop, step }) => Some(field("grid_db", db_grid(start, stop, step))?),
        };
        s.sweep.samples = sw.samples;
        s.sweep.seed = sw.seed;
        s.sweep.method = sw.method.as_deref().map(parse_method).transpose()?;
    }
    s.validate()?;
    Ok(s)
}

/// Parse a grid given as `start:stop:step` or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::config("grid", format!("expected start:stop:step or a comma list, got `{s}`"));
    let g = if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if parts.len() != 3 {
            return Err(bad());
        }
        field("grid", db_grid(parts[0], parts[1], parts[2]))?
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) || g.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_keys() {
        let s = parse_config(
            "command = \"order-check\"\norder = \"lt\"\nchannel_x = \"rician(k=2)\"\nchannel_y = \"rician(k=5)\"\n",
        )
        .unwrap();
        assert_eq!(s.channels[0], ChannelModel::Rician { k: 2.0 });
        assert_eq!(s.order, Some(Order::Laplace));
    }

    #[test]
    fn validation_errors_are_located() {
        let text = "command = \"order-check\"\norder = \"lt\"\nchannel_x = \"rician(k=-1)\"\nchannel_y = \"rayleigh\"\n";
        match parse_config(text).unwrap_err() {
            Error::Config { line, key, message } => {
                assert_eq!(line, Some(3));
                assert_eq!(key.as_deref(), Some("channel_x"));
                assert!(message.contains("K >= 0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = parse_config("command = \"avg-metric\"\nmetric = \"dpsk\"\nchannels = [\"rayleigh\"]\nbogus = 1\n").unwrap_err();
        match e {
            Error::Config { line, message, .. } => {
                assert_eq!(line, Some(4));
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_config("command = \"avg-metric\"\nmetric = \"dpsk\"\nchannels = [\"rayleigh\"]\n[sweep]\nsed = 1\n").is_err());
    }

    #[test]
    fn command_requirements() {
        assert!(parse_config("command = \"system-sim\"\nchannels = [\"rayleigh\"]\nmetric = \"bpsk\"\n").is_err());
        assert!(parse_config("command = \"reproduce-figure\"\nfigure = 11\n").is_err());
        assert!(parse_config("command = \"fly\"\n").is_err());
        assert!(parse_config("command = \"order-check\"\norder = \"lt\"\nchannels = [\"rayleigh\"]\n").is_err());
    }

    #[test]
    fn sweep_section() {
        let s = parse_config(
            "command = \"capacity\"\ncapacity = \"oa\"\nchannels = [\"nakagami(m=2)\"]\n[sweep]\ngrid_db = [0.0, 5.0]\nmethod = \"quadrature\"\n",
        )
        .unwrap();
        assert_eq!(s.sweep.grid_db, Some(vec![0.0, 5.0]));
        assert_eq!(s.sweep.method, Some(Method::Quadrature));
        assert!(parse_config("command = \"capacity\"\ncapacity = \"oa\"\nchannels = [\"rayleigh\"]\n[sweep]\ngrid_db = [5.0, 0.0]\n").is_err());
    }

    #[test]
    fn grids_from_flags() {
        assert_eq!(parse_grid("0:2:1").unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(parse_grid("-1, 3").unwrap(), vec![-1.0, 3.0]);
        assert!(parse_grid("3,1").is_err());
        assert!(parse_grid("a:b").is_err());
    }
}
