use std::path::PathBuf;
use std::process::ExitCode;

use boxnet_lab::commands::{self, Common, OracleQuery};
use clap::{Args, Parser, Subcommand};

/// Dots-and-Boxes neuroevolution laboratory.
#[derive(Parser)]
#[command(name = "boxnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = one per core); results do not depend on it
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            seed: a.seed,
            out: a.out,
            config: a.config,
            workers: a.workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark tournaments between players (CSV of win rates)
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// First player selector (level0, level1, level2, level1net, net:<file>)
        #[arg(long)]
        a: Option<String>,
        /// Second player selector
        #[arg(long)]
        b: Option<String>,
        /// Games per pairing (even)
        #[arg(long)]
        games: Option<usize>,
    },
    /// Evolve a population and write snapshots
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Back-propagation baseline
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Games used to generate the training set
        #[arg(long, default_value_t = 800)]
        games: usize,
        /// Evaluation games per opponent (even)
        #[arg(long, default_value_t = 300)]
        eval_games: usize,
    },
    /// Evaluate snapshots against a benchmark player (CSV curve)
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Benchmark player selector
        #[arg(long)]
        opponent: Option<String>,
        /// Games per population member (even)
        #[arg(long)]
        games: Option<usize>,
        /// Snapshot files or directories
        #[arg(required = true)]
        snapshots: Vec<PathBuf>,
    },
    /// Exact minimax values of small positions
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 2)]
        cols: usize,
        /// Comma-separated occupied edges, played in order
        #[arg(long)]
        edges: Option<String>,
        /// Evaluate this many random positions instead
        #[arg(long)]
        random: Option<usize>,
        /// Open edges left in random positions
        #[arg(long, default_value_t = 10)]
        remaining: usize,
    },
}

fn run(cli: Cli) -> boxnet_lab::Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            a,
            b,
            games,
        } => {
            commands::simulate(&common.into(), a.as_deref(), b.as_deref(), games)?;
        }
        Command::Evolve { common } => {
            commands::evolve(&common.into(), |snap| {
                let best = snap.raw_fitness.iter().copied().fold(f64::MIN, f64::max);
                eprintln!(
                    "gen {:>5}  games {:>9}  best raw fitness {best:.3}",
                    snap.generation, snap.cumulative_games
                );
            })?;
        }
        Command::Train {
            common,
            games,
            eval_games,
        } => {
            let o = commands::train(&common.into(), games, eval_games)?;
            eprintln!(
                "{} examples, mean loss {:.4} -> {:.4}",
                o.examples, o.loss_before, o.loss_after
            );
            for r in &o.records {
                eprintln!(
                    "{} vs {}: {:.3} ± {:.3}",
                    r.subject, r.opponent, r.win_rate, r.confidence_halfwidth
                );
            }
        }
        Command::Evaluate {
            common,
            opponent,
            games,
            snapshots,
        } => {
            commands::evaluate(&common.into(), opponent.as_deref(), games, &snapshots)?;
        }
        Command::Oracle {
            common,
            rows,
            cols,
            edges,
            random,
            remaining,
        } => {
            let q = OracleQuery {
                rows,
                cols,
                edges,
                random,
                remaining,
            };
            commands::oracle(&common.into(), &q)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
