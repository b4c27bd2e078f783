//! Execution of scenarios, including the built-in figure presets.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::config::{CapacityKind, Command, Scenario};
use crate::csv_io::Series;
use crate::error::{Error, Result};
use crate::metrics::{self, AverageMethod, MetricFunction};
use crate::montecarlo::{
    crossover_detect, db_grid, derive_seed, run_sweep, Evaluator, Method, SweepSpec, DEFAULT_SAMPLES,
};
use crate::noise::{FadingNoiseSampler, NoiseModel};
use crate::orders::{self, Order, OrderVerdict, Outcome, Witness};
use crate::systems::{SystemSampler, Topology, TopologyKind};

/// Seed used when neither flags, config nor environment provide one.
pub const DEFAULT_SEED: u64 = 1;

/// Command-line overrides; each wins over the scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub grid_db: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NUMERIC_FAILURE: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const ORDER_FAILS: i32 = 3;
    pub const ORDER_INCONCLUSIVE: i32 = 4;
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub series: Vec<Series>,
    pub verdict: Option<OrderVerdict>,
    /// Human-oriented summary.
    pub report: String,
    pub output: Option<PathBuf>,
}

const RICIAN_PAIR: [&str; 2] = ["rician(k=2)", "rician(k=5)"];
const PARETO_PAIR: [&str; 2] = ["pareto(beta=2)", "pareto(beta=5)"];

/// Built-in scenario for figure `n` (3 through 10).
pub fn figure_scenario(n: u32) -> Result<Scenario> {
    let with = |cmd, chans: [&str; 2]| Scenario::new(cmd).with_channels(&chans);
    let mut s = match n {
        3 => {
            let mut s = with(Command::AvgMetric, PARETO_PAIR)?;
            s.metric = Some(MetricFunction::Dpsk);
            s.sweep.method = Some(Method::MonteCarlo);
            s
        }
        4 => {
            let mut s = with(Command::Capacity, PARETO_PAIR)?;
            s.capacity = Some(CapacityKind::Ergodic);
            s.sweep.method = Some(Method::Quadrature);
            s
        }
        5..=8 => {
            let mut s = with(Command::SystemSim, RICIAN_PAIR)?;
            let (topology, metric) = match n {
                5 => (TopologyKind::Mrc(3), MetricFunction::BPSK),
                6 => (TopologyKind::Egc(3), MetricFunction::BPSK),
                7 => (TopologyKind::Sc(3), MetricFunction::Dpsk),
                _ => (TopologyKind::MultiHopAf(3), MetricFunction::BPSK),
            };
            s.topology = Some(topology);
            s.metric = Some(metric);
            s
        }
        9 | 10 => {
            let mut s = with(Command::NoiseSim, RICIAN_PAIR)?;
            s.noise = Some(if n == 9 {
                NoiseModel::alpha_stable(1.6)?
            } else {
                NoiseModel::uniform(3f64.sqrt())?
            });
            s
        }
        other => {
            return Err(Error::config(
                "figure",
                format!("figures 3 through 10 are available, got {other}"),
            ))
        }
    };
    s.figure = Some(n);
    Ok(s)
}

fn default_grid(command: Command) -> Vec<f64> {
    let step = if command == Command::Capacity { 1.0 } else { 0.5 };
    db_grid(-10.0, 30.0, step).expect("static grid")
}

/// Run a validated scenario.
///
/// `env_seed` replaces the built-in default seed only; config and flags
/// still take precedence.
pub fn run_scenario(scenario: &Scenario, ov: &Overrides, env_seed: Option<u64>) -> Result<RunOutput> {
    scenario.validate()?;
    let mut scn = scenario.clone();
    if scn.command == Command::ReproduceFigure {
        let mut preset = figure_scenario(scn.figure.unwrap_or(0))?;
        // sweep knobs and output path of the wrapper still apply
        preset.sweep.grid_db = scn.sweep.grid_db.take().or(preset.sweep.grid_db);
        preset.sweep.samples = scn.sweep.samples.or(preset.sweep.samples);
        preset.sweep.seed = scn.sweep.seed.or(preset.sweep.seed);
        preset.output = scn.output.take().or(preset.output);
        scn = preset;
    }
    let output = ov.output.clone().or(scn.output.clone());
    if scn.command == Command::OrderCheck {
        return order_check(&scn, output);
    }
    let seed = ov.seed.or(scn.sweep.seed).or(env_seed).unwrap_or(DEFAULT_SEED);
    let samples = ov.samples.or(scn.sweep.samples).unwrap_or(DEFAULT_SAMPLES);
    let grid = ov
        .grid_db
        .clone()
        .or(scn.sweep.grid_db.clone())
        .unwrap_or_else(|| default_grid(scn.command));
    let default_method = match scn.command {
        Command::Capacity => Method::Quadrature,
        _ => Method::MonteCarlo,
    };
    let method = scn.sweep.method.unwrap_or(default_method);

    let mut series = Vec::with_capacity(scn.channels.len());
    for (channel, label) in scn.channels.iter().zip(&scn.labels) {
        let spec = SweepSpec::new(
            grid.clone(),
            samples,
            derive_seed(seed, label),
            method,
        )
        .map_err(|e| Error::config("sweep", e.to_string()))?;
        let result = match scn.command {
            Command::AvgMetric => {
                let metric = scn.metric.expect("validated");
                match method {
                    Method::Quadrature => run_sweep(
                        &spec,
                        &Evaluator::exact(|rho| {
                            metrics::average_metric(channel, &metric, rho, AverageMethod::Quadrature).map(|e| e.mean)
                        }),
                        &format!("{metric} over {channel}"),
                    )?,
                    Method::MonteCarlo => {
                        let sampler = channel.sampler()?;
                        run_sweep(
                            &spec,
                            &Evaluator::sample(move |rho, rng| {
                                metric.eval(rho * sampler.sample(rng)).unwrap_or(f64::NAN)
                            }),
                            &format!("{metric} over {channel}"),
                        )?
                    }
                }
            }
            Command::Capacity => {
                let kind = scn.capacity.expect("validated");
                let desc = format!("{kind} capacity of {channel}");
                match (kind, method) {
                    (_, Method::Quadrature) => run_sweep(
                        &spec,
                        &Evaluator::exact(|rho| match kind {
                            CapacityKind::Ergodic => metrics::ergodic_capacity(channel, rho),
                            CapacityKind::ChannelInversion => metrics::ci_capacity(channel, rho),
                            CapacityKind::OptimalAdaptation => metrics::oa_capacity(channel, rho),
                        }),
                        &desc,
                    )?,
                    (CapacityKind::Ergodic, Method::MonteCarlo) => {
                        let sampler = channel.sampler()?;
                        run_sweep(&spec, &Evaluator::sample(move |rho, rng| (rho * sampler.sample(rng)).ln_1p()), &desc)?
                    }
                    (_, Method::MonteCarlo) => {
                        return Err(Error::config(
                            "sweep.method",
                            "ci and oa capacities are computed by quadrature only",
                        ))
                    }
                }
            }
            Command::SystemSim => {
                if method != Method::MonteCarlo {
                    return Err(Error::config("sweep.method", "system-sim is Monte Carlo only"));
                }
                let kind = scn.topology.clone().expect("validated");
                let metric = scn.metric.expect("validated");
                let topology = Topology::iid(kind, channel.clone())?;
                let sampler = SystemSampler::new(&topology, &metric)?;
                run_sweep(
                    &spec,
                    &Evaluator::sample(move |rho, rng| sampler.draw(rho, rng)),
                    &format!("{metric} through {topology}"),
                )?
            }
            Command::NoiseSim => {
                if method != Method::MonteCarlo {
                    return Err(Error::config("sweep.method", "noise-sim is Monte Carlo only"));
                }
                let noise = scn.noise.clone().expect("validated");
                let sampler = FadingNoiseSampler::new(&noise, channel)?;
                run_sweep(
                    &spec,
                    &Evaluator::sample(move |rho, rng| sampler.draw(rho, rng)),
                    &format!("bpsk in {noise} over {channel}"),
                )?
            }
            Command::OrderCheck | Command::ReproduceFigure => unreachable!("handled above"),
        };
        series.push(Series {
            name: label.clone(),
            result,
        });
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "{} with {} series, {} grid points, seed {seed}{}",
        scn.figure.map(|f| format!("figure {f}")).unwrap_or_else(|| scn.command.to_string()),
        series.len(),
        grid.len(),
        if method == Method::MonteCarlo { format!(", {samples} samples/point") } else { String::new() },
    );
    if series.len() == 2 {
        let cross = crossover_detect(&series[0].result, &series[1].result)?;
        if cross.is_empty() {
            let _ = writeln!(report, "no significant crossover between `{}` and `{}`", series[0].name, series[1].name);
        }
        for c in cross {
            let _ = writeln!(report, "crossover in [{}, {}] dB", c.lo_db, c.hi_db);
        }
    }
    Ok(RunOutput {
        exit_code: exit::OK,
        series,
        verdict: None,
        report,
        output,
    })
}

fn order_check(scn: &Scenario, output: Option<PathBuf>) -> Result<RunOutput> {
    let (x, y) = (&scn.channels[0], &scn.channels[1]);
    let order = scn.order.expect("validated");
    let v = match order {
        Order::Usual => orders::check_usual(x, y, &orders::default_x_grid())?,
        Order::Convex => orders::check_convex(x, y, &orders::default_x_grid())?,
        Order::Laplace => orders::check_lt(x, y, &orders::default_rho_grid())?,
    };
    let mut report = String::new();
    let (code, word) = match v.outcome {
        Outcome::Holds => (exit::OK, "holds"),
        Outcome::Fails => (exit::ORDER_FAILS, "fails"),
        Outcome::Inconclusive => (exit::ORDER_INCONCLUSIVE, "inconclusive"),
    };
    let _ = writeln!(report, "X = {x}\nY = {y}\nX <={order} Y {word} (margin {:e})", v.margin);
    match v.counterexample {
        Some(Witness::Point { at, lhs, rhs }) => {
            let what = match order {
                Order::Laplace => "rho",
                _ => "x",
            };
            let _ = writeln!(report, "counterexample at {what} = {at}: lhs {lhs} < rhs {rhs}");
        }
        Some(Witness::Means { x, y }) => {
            let _ = writeln!(report, "counterexample: means differ, E[X] = {x}, E[Y] = {y}");
        }
        None => {}
    }
    Ok(RunOutput {
        exit_code: code,
        series: Vec::new(),
        verdict: Some(v),
        report,
        output,
    })
}

/// Exit code for an error raised while running an already parsed scenario.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => exit::INVALID_CONFIG,
        _ => exit::NUMERIC_FAILURE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_presets_validate() {
        for n in 3..=10 {
            let s = figure_scenario(n).unwrap();
            s.validate().unwrap();
            assert_eq!(s.channels.len(), 2);
        }
        assert!(figure_scenario(2).is_err());
        assert_eq!(figure_scenario(7).unwrap().topology, Some(TopologyKind::Sc(3)));
    }

    #[test]
    fn order_check_exit_codes() {
        let mut s = Scenario::new(Command::OrderCheck).with_channels(&RICIAN_PAIR).unwrap();
        s.order = Some(Order::Laplace);
        assert_eq!(run_scenario(&s, &Overrides::default(), None).unwrap().exit_code, exit::OK);
        let mut s = Scenario::new(Command::OrderCheck).with_channels(&PARETO_PAIR).unwrap();
        s.order = Some(Order::Usual);
        let out = run_scenario(&s, &Overrides::default(), None).unwrap();
        assert_eq!(out.exit_code, exit::ORDER_FAILS);
        assert!(out.report.contains("counterexample"));
        let mut s = Scenario::new(Command::OrderCheck).with_channels(&["nakagami(m=1)", "nakagami(m=2)"]).unwrap();
        s.order = Some(Order::Convex);
        assert_eq!(run_scenario(&s, &Overrides::default(), None).unwrap().exit_code, exit::ORDER_INCONCLUSIVE);
    }

    #[test]
    fn seed_precedence() {
        let mut s = figure_scenario(5).unwrap();
        let ov = |seed| Overrides {
            seed,
            samples: Some(10_000),
            grid_db: Some(vec![0.0]),
            output: None,
        };
        let run = |s: &Scenario, seed, env| run_scenario(s, &ov(seed), env).unwrap().series;
        let base = run(&s, None, None);
        assert_eq!(base, run(&s, Some(DEFAULT_SEED), None));
        assert_ne!(base, run(&s, None, Some(7)));
        assert_eq!(run(&s, None, Some(7)), run(&s, Some(7), None));
        s.sweep.seed = Some(9);
        assert_eq!(run(&s, None, Some(7)), run(&s, Some(9), Some(3)));
        assert_eq!(run(&s, Some(7), None), run(&figure_scenario(5).unwrap(), Some(7), None));
    }

    #[test]
    fn capacity_sweeps() {
        let mut s = Scenario::new(Command::Capacity).with_channels(&["nakagami(m=2)"]).unwrap();
        s.capacity = Some(CapacityKind::ChannelInversion);
        let out = run_scenario(&s, &Overrides::default(), None).unwrap();
        let pts = &out.series[0].result.points;
        assert_eq!(pts.len(), 41);
        for p in pts {
            let rho = 10f64.powf(p.rho_db / 10.0);
            assert!((p.estimate - (rho / 2.0).ln_1p()).abs() < 1e-8);
            assert_eq!(p.stderr, 0.0);
        }
        s.sweep.method = Some(Method::MonteCarlo);
        assert!(run_scenario(&s, &Overrides::default(), None).is_err());
    }
}
