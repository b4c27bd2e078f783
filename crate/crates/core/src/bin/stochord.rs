//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stochord::config::{self, parse_config, parse_grid, parse_method, parse_order, Command, Scenario};
use stochord::csv_io::write_series;
use stochord::error::{Error, Result};
use stochord::expr;
use stochord::runner::{exit, exit_code_for, figure_scenario, run_scenario, Overrides, RunOutput};

#[derive(Parser, Debug)]
#[command(name = "stochord", version, about = "Stochastic ordering of fading channels")]
struct Cli {
    /// Scenario file (TOML); run directly when no subcommand is given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file and STOCHORD_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo samples per grid point.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// SNR grid in dB, `start:stop:step` or a comma-separated list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Averaging method: `monte_carlo` or `quadrature`.
    #[arg(long, global = true)]
    method: Option<String>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Debug)]
struct Channels {
    /// Channel expressions, e.g. `rician(k=2)` `pareto(beta=5)`.
    #[arg(required = true)]
    channels: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check X <=_order Y; exit 0 holds, 3 fails, 4 inconclusive.
    OrderCheck {
        /// st, cx or lt
        order: String,
        x: String,
        y: String,
    },
    /// Average a metric over each channel.
    AvgMetric {
        #[arg(long)]
        metric: String,
        #[command(flatten)]
        channels: Channels,
    },
    /// Capacity sweep: erg, ci or oa.
    Capacity {
        kind: String,
        #[command(flatten)]
        channels: Channels,
    },
    /// Simulate a multi-branch or multi-hop system with i.i.d. links.
    SystemSim {
        #[arg(long)]
        topology: String,
        #[arg(long, default_value = "bpsk")]
        metric: String,
        #[command(flatten)]
        channels: Channels,
    },
    /// BPSK error rate in non-Gaussian noise over fading.
    NoiseSim {
        #[arg(long)]
        noise: String,
        #[command(flatten)]
        channels: Channels,
    },
    /// Regenerate one of the built-in figure sweeps (3 through 10).
    ReproduceFigure { figure: u32 },
    /// Run a scenario file.
    Run { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: None,
        key: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text)
}

fn channel_scenario(command: Command, channels: &[String]) -> Result<Scenario> {
    let refs: Vec<&str> = channels.iter().map(String::as_str).collect();
    Scenario::new(command).with_channels(&refs)
}

fn build(cli: &Cli) -> Result<Scenario> {
    let mut s = match &cli.command {
        None => match &cli.config {
            Some(p) => load(p)?,
            None => {
                return Err(Error::Config {
                    line: None,
                    key: None,
                    message: "a subcommand or --config is required (see --help)".into(),
                })
            }
        },
        Some(Cmd::Run { config }) => load(config)?,
        Some(Cmd::OrderCheck { order, x, y }) => {
            let mut s = channel_scenario(Command::OrderCheck, &[x.clone(), y.clone()])?;
            s.order = Some(parse_order(order)?);
            s
        }
        Some(Cmd::AvgMetric { metric, channels }) => {
            let mut s = channel_scenario(Command::AvgMetric, &channels.channels)?;
            s.metric = Some(expr::parse_metric(metric)?);
            s
        }
        Some(Cmd::Capacity { kind, channels }) => {
            let mut s = channel_scenario(Command::Capacity, &channels.channels)?;
            s.capacity = Some(kind.parse::<config::CapacityKind>()?);
            s
        }
        Some(Cmd::SystemSim {
            topology,
            metric,
            channels,
        }) => {
            let mut s = channel_scenario(Command::SystemSim, &channels.channels)?;
            s.topology = Some(expr::parse_topology(topology)?);
            s.metric = Some(expr::parse_metric(metric)?);
            s
        }
        Some(Cmd::NoiseSim { noise, channels }) => {
            let mut s = channel_scenario(Command::NoiseSim, &channels.channels)?;
            s.noise = Some(expr::parse_noise(noise)?);
            s
        }
        Some(Cmd::ReproduceFigure { figure }) => figure_scenario(*figure)?,
    };
    if let Some(m) = &cli.method {
        s.sweep.method = Some(parse_method(m)?);
    }
    Ok(s)
}

fn overrides(cli: &Cli) -> Result<Overrides> {
    Ok(Overrides {
        seed: cli.seed,
        samples: cli.samples,
        grid_db: cli.grid.as_deref().map(parse_grid).transpose()?,
        output: cli.output.clone(),
    })
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("STOCHORD_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Config {
            line: None,
            key: Some("STOCHORD_SEED".into()),
            message: format!("expected an unsigned integer, got `{v}`"),
        }),
        Err(_) => Ok(None),
    }
}

fn emit(out: &RunOutput) -> Result<()> {
    if out.verdict.is_some() {
        print!("{}", out.report);
        return Ok(());
    }
    let multi = out.series.len() > 1;
    match &out.output {
        Some(path) => {
            let f = File::create(path)?;
            write_series(BufWriter::new(f), &out.series, multi)?;
        }
        None => {
            let stdout = io::stdout();
            write_series(stdout.lock(), &out.series, multi)?;
        }
    }
    io::stderr().write_all(out.report.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(exit::INVALID_CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(exit::NUMERIC_FAILURE as u8);
        }
    }
    let setup = (|| Ok::<_, Error>((build(&cli)?, overrides(&cli)?, env_seed()?)))();
    let (scenario, ov, seed) = match setup {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::INVALID_CONFIG as u8);
        }
    };
    let result = run_scenario(&scenario, &ov, seed).and_then(|out| emit(&out).map(|_| out.exit_code));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
