use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use qttt::experiments::{
    blocking_effectiveness, enumerate_classical, harvest_endgames, run_deterministic, run_random_games,
    write_curves_csv, write_curves_json, write_tables_csv, write_tables_json, BlockMode, Format, GameMode,
    OutcomeTable, TableReport, DEFAULT_BIN_WIDTH,
};
use qttt::optimizer::{maximizing_move, ConstraintSet, DEFAULT_RESTARTS};
use qttt::service::{serve, SessionStore};
use qttt::strategies::{OpeningKind, StrategyPair};

/// Quantum tic-tac-toe experiments, solver and game server.
#[derive(Debug, Parser)]
#[command(name = "qttt", version, about)]
struct Cli {
    /// Worker threads for parallel runs (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random classical games: a uniformly random empty site each turn.
    RandomClassical(GamesArgs),
    /// Random quantum games: an isotropic random legal move each turn.
    RandomQuantum {
        #[command(flatten)]
        games: GamesArgs,
        /// Fixed first move for player 1: classical, uniform or random.
        #[arg(long)]
        opening: Option<OpeningKind>,
    },
    /// Random quantum games for each of the three openings.
    OpeningStudy(GamesArgs),
    /// Harvest end games and measure how often each blocking move stops player 1.
    Endgames {
        /// Number of end games to harvest.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        games: u64,
        #[command(flatten)]
        seed: SeedArg,
        /// Blocking move to test: weighted, random or single_best (default: all three).
        #[arg(long)]
        mode: Option<BlockMode>,
        /// Width of the pre-winning weight bins.
        #[arg(long, default_value_t = DEFAULT_BIN_WIDTH, value_parser = positive_f64)]
        bins: f64,
        #[command(flatten)]
        restarts: RestartsArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Games where both players follow a strategy pair after player 1's opening.
    Deterministic {
        /// Strategy pair: wb, wbb, wwb or wbwb.
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        strategy: Option<StrategyPair>,
        /// Opening: classical, uniform or random.
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        opening: Option<OpeningKind>,
        /// Run every strategy pair with every opening.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        games: GamesArgs,
        #[command(flatten)]
        restarts: RestartsArg,
    },
    /// Exact outcome counts over all 9! classical move orders.
    EnumerateClassical(OutputArgs),
    /// Solve for the maximizing move of one constraint set read from JSON.
    Solve {
        /// JSON file with {"previous": [[9 numbers]...], "own": [9 numbers], "line": "123"}.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Seed for the random starts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        restarts: RestartsArg,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the game session HTTP API.
    Serve {
        /// Address to listen on.
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory for session snapshots (default: memory only).
        #[arg(long, value_name = "DIR")]
        store: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Master seed; every game uses its own substream.
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RestartsArg {
    /// Random starts per maximizing-move search.
    #[arg(long, default_value_t = DEFAULT_RESTARTS, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    restarts: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct GamesArgs {
    /// Number of games.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    games: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: OutputArgs,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

type Failure = Box<dyn std::error::Error>;

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_tables(reports: &[TableReport], output: &OutputArgs) -> Result<(), Failure> {
    let mut w = open_output(&output.out)?;
    match output.format {
        Format::Csv => write_tables_csv(reports, &mut w)?,
        Format::Json => write_tables_json(reports, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn labelled(config: &[(&str, &str)], table: OutcomeTable) -> Result<TableReport, Failure> {
    let config = config.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    Ok(TableReport::new(config, table)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::RandomClassical(g) => {
            let table = run_random_games(GameMode::Classical, g.games, g.seed.seed, None);
            write_tables(&[labelled(&[], table)?], &g.output)
        }
        Command::RandomQuantum { games: g, opening } => {
            let table = run_random_games(GameMode::Quantum, g.games, g.seed.seed, opening);
            write_tables(&[labelled(&[], table)?], &g.output)
        }
        Command::OpeningStudy(g) => {
            let reports = OpeningKind::ALL
                .iter()
                .map(|&o| labelled(&[("opening", o.name())], run_random_games(GameMode::Quantum, g.games, g.seed.seed, Some(o))))
                .collect::<Result<Vec<_>, _>>()?;
            write_tables(&reports, &g.output)
        }
        Command::Endgames { games, seed, mode, bins, restarts, output } => {
            let endgames = harvest_endgames(games as usize, seed.seed);
            log::info!("harvested {} end games", endgames.len());
            let modes = mode.map_or_else(|| BlockMode::ALL.to_vec(), |m| vec![m]);
            let curves: Vec<_> = modes
                .iter()
                .map(|&m| blocking_effectiveness(&endgames, m, seed.seed, restarts.restarts, bins))
                .collect();
            let mut w = open_output(&output.out)?;
            match output.format {
                Format::Csv => write_curves_csv(&curves, &mut w)?,
                Format::Json => write_curves_json(&curves, &mut w)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Deterministic { strategy, opening, all, games: g, restarts } => {
            let cells: Vec<(StrategyPair, OpeningKind)> = if all {
                StrategyPair::ALL.iter().flat_map(|&p| OpeningKind::ALL.iter().map(move |&o| (p, o))).collect()
            } else {
                vec![(strategy.expect("required by clap"), opening.expect("required by clap"))]
            };
            let reports = cells
                .into_iter()
                .map(|(p, o)| {
                    log::info!("deterministic {p} / {o}");
                    let table = run_deterministic(p, o, g.games, g.seed.seed, restarts.restarts);
                    labelled(&[("strategy", p.name()), ("opening", o.name())], table)
                })
                .collect::<Result<Vec<_>, _>>()?;
            write_tables(&reports, &g.output)
        }
        Command::EnumerateClassical(output) => write_tables(&[labelled(&[], enumerate_classical())?], &output),
        Command::Solve { input, seed, restarts, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let cs: ConstraintSet = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", input.display()))?;
            let sol = maximizing_move(&cs, &mut qttt::rng::seeded(seed), restarts.restarts)?;
            let mut w = open_output(&out)?;
            serde_json::to_writer_pretty(&mut w, &sol)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        Command::Serve { addr, store } => {
            let store = match store {
                Some(dir) => SessionStore::persistent(dir)?,
                None => SessionStore::in_memory(),
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(addr, Arc::new(store)))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QTTT_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
