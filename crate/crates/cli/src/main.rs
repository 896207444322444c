use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wpnet_core::netmodel::NetworkConfig;
use wpnet_cli::config::{parse_config, parse_value, Quantity};
use wpnet_cli::figures::FigureId;
use wpnet_cli::run::{
    run_experiment, CliError, ExperimentKind, ExperimentSpec, RunOptions, SimulateWhat, SolveTarget, Sweep, TierSel,
};

#[derive(Parser)]
#[command(name = "wpnet", version, about = "Wireless-powered two-tier network analysis and simulation")]
struct Cli {
    /// Config file (`key = value` lines); defaults apply otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials (per sweep point).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory for the CSV tables.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Analytic columns only.
    #[arg(long, global = true)]
    no_mc: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Analyze(Analyze),
    #[command(subcommand)]
    Solve(Solve),
    Simulate(SimulateArgs),
    /// Reproduce a figure (`all` for every one).
    Figure {
        #[arg(value_enum)]
        id: FigureArg,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Directed power coverage.
    Energy(CoverageArgs),
    /// Ambient RF coverage and moments.
    Ambient(CoverageArgs),
    Association(SweepArg),
    Throughput(ThroughputArgs),
}

#[derive(Args)]
struct SweepArg {
    /// `name=v1,v2,..`, `name=lin(a,b,n)unit` or `name=log(a,b,n)unit`.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long, value_enum, default_value_t = TierArg::Both)]
    tier: TierArg,
    /// Threshold when sweeping something else, e.g. `-10dBm`.
    #[arg(long, default_value = "-10dBm")]
    p_th: String,
    #[command(flatten)]
    sweep: SweepArg,
}

#[derive(Args)]
struct ThroughputArgs {
    #[arg(long, value_enum)]
    tier: Option<TierArg>,
    #[command(flatten)]
    sweep: SweepArg,
}

#[derive(Subcommand)]
enum Solve {
    /// Density thresholds.
    Density {
        #[arg(long, value_enum)]
        what: SolveWhat,
        #[arg(long, default_value = "-10dBm")]
        p_th: String,
        #[arg(long, default_value_t = 0.9)]
        epsilon: f64,
        /// Target rate, e.g. `50Mbps`.
        #[arg(long, default_value = "50Mbps")]
        rate: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveWhat {
    Sub6Coverage,
    Sub6Rate,
    MmRate,
    MmDominance,
    AmbientDominance,
    CrossTier,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    what: SimWhat,
    #[arg(long, value_enum, default_value_t = TierArg::Both)]
    tier: TierArg,
    #[arg(long)]
    no_interference: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimWhat {
    Directed,
    Ambient,
    Association,
    Uplink,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TierArg {
    Sub6,
    Mmwave,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    All,
}

impl From<TierArg> for TierSel {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Sub6 => TierSel::Sub6,
            TierArg::Mmwave => TierSel::MmWave,
            TierArg::Both => TierSel::Both,
        }
    }
}

fn quantity(text: &str, q: Quantity, what: &str) -> Result<f64, CliError> {
    parse_value(text, q).map_err(|(_, m)| CliError::Usage(format!("--{what}: {m}")))
}

fn sweep(arg: &SweepArg) -> Result<Option<Sweep>, CliError> {
    arg.sweep.as_deref().map(Sweep::parse).transpose()
}

fn kinds(command: &Command) -> Result<(Vec<ExperimentKind>, Option<Sweep>), CliError> {
    let one = |k| Ok((vec![k], None));
    match command {
        Command::Analyze(a) => match a {
            Analyze::Energy(c) | Analyze::Ambient(c) => {
                let tiers = c.tier.into();
                let p_th = quantity(&c.p_th, Quantity::Power, "p-th")?;
                let kind = if matches!(a, Analyze::Energy(_)) {
                    ExperimentKind::EnergyCoverage { tiers, p_th }
                } else {
                    ExperimentKind::Ambient { tiers, p_th }
                };
                Ok((vec![kind], sweep(&c.sweep)?))
            }
            Analyze::Association(s) => Ok((vec![ExperimentKind::Association], sweep(s)?)),
            Analyze::Throughput(t) => Ok((
                vec![ExperimentKind::Throughput {
                    tiers: t.tier.map(Into::into),
                }],
                sweep(&t.sweep)?,
            )),
        },
        Command::Solve(Solve::Density {
            what,
            p_th,
            epsilon,
            rate,
        }) => {
            let p_th = || quantity(p_th, Quantity::Power, "p-th");
            let rate = || quantity(rate, Quantity::Rate, "rate");
            let target = match what {
                SolveWhat::Sub6Coverage => SolveTarget::Sub6Coverage {
                    p_th: p_th()?,
                    epsilon: *epsilon,
                },
                SolveWhat::Sub6Rate => SolveTarget::Sub6Rate { rate: rate()? },
                SolveWhat::MmRate => SolveTarget::MmRate { rate: rate()? },
                SolveWhat::MmDominance => SolveTarget::MmDominance { p_th: p_th()? },
                SolveWhat::AmbientDominance => SolveTarget::AmbientDominance { p_th: p_th()? },
                SolveWhat::CrossTier => SolveTarget::CrossTier,
            };
            one(ExperimentKind::DensitySolver(target))
        }
        Command::Simulate(s) => one(ExperimentKind::Simulate {
            what: match s.what {
                SimWhat::Directed => SimulateWhat::Directed,
                SimWhat::Ambient => SimulateWhat::Ambient,
                SimWhat::Association => SimulateWhat::Association,
                SimWhat::Uplink => SimulateWhat::Uplink,
            },
            tiers: s.tier.into(),
            interference: !s.no_interference,
        }),
        Command::Figure { id } => {
            let ids: Vec<FigureId> = match id {
                FigureArg::All => FigureId::ALL.to_vec(),
                other => vec![FigureId::ALL[*other as usize]],
            };
            Ok((ids.into_iter().map(ExperimentKind::Figure).collect(), None))
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(p) => parse_config(p)?,
        None => NetworkConfig::default(),
    };
    let (kinds, sweep) = kinds(&cli.command)?;
    let options = RunOptions {
        seed: cli.seed,
        trials: cli.trials,
        mc: !cli.no_mc,
    };
    if options.trials == Some(0) {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut partial = None;
    for kind in kinds {
        let spec = ExperimentSpec {
            kind,
            config,
            sweep: sweep.clone(),
            options,
            output_path: cli.out.clone(),
            command: command.clone(),
        };
        match run_experiment(&spec) {
            Ok(written) => {
                for (path, _) in written {
                    println!("{}", path.display());
                }
            }
            Err(e @ CliError::Partial { .. }) => {
                eprintln!("warning: {e}");
                partial.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    partial.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
