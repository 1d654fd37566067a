use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use techrank_cli::commands::{bench, compare, ingest, rank};
use techrank_cli::config::{Overrides, RunConfig};
use techrank_cli::error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "techrank",
    version,
    about = "Rank companies and technologies from a bipartite graph of who works on what"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Seed for subset sampling (overrides the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Sample this many companies before building the graphs.
    #[arg(long)]
    subset: Option<usize>,

    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Calibration grid as "alpha_min,alpha_max,beta_min,beta_max,step".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Walker convergence tolerance.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Walker iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self, trajectory: bool, strict: bool) -> Overrides {
        Overrides {
            seed: self.seed,
            subset: self.subset,
            trajectory,
            out: self.out.clone(),
            grid: self.grid.clone(),
            tolerance: self.tolerance,
            max_iter: self.max_iter,
            strict,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and filter the data files, then report what survived.
    Ingest {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Full pipeline: calibrate both layers and emit ranking reports.
    Rank {
        #[command(flatten)]
        common: CommonArgs,

        /// Also emit per-iteration score trajectories.
        #[arg(long)]
        trajectory: bool,

        /// Exit with code 3 if the walker does not converge.
        #[arg(long)]
        strict: bool,
    },
    /// Spearman correlation between an emitted ranking and an external one.
    Compare {
        /// companies.csv or technologies.csv produced by `rank`.
        #[arg(long)]
        ours: PathBuf,

        /// External CSV with `id,rank` columns.
        #[arg(long)]
        external: PathBuf,
    },
    /// Time calibration and convergence across company subset sizes.
    Bench {
        #[command(flatten)]
        common: CommonArgs,

        /// Comma-separated company subset sizes, e.g. "10,100,499".
        #[arg(long)]
        sizes: String,
    },
}

fn parse_sizes(raw: &str) -> CliResult<Vec<usize>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Config(format!("--sizes entry {s:?} is not an integer")))
        })
        .collect()
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest { common } => {
            let config = RunConfig::load(&common.config, &common.overrides(false, false))?;
            let counts = ingest::execute(&config)?;
            println!("{}", ingest::summarize(&counts));
        }
        Command::Rank {
            common,
            trajectory,
            strict,
        } => {
            let config = RunConfig::load(&common.config, &common.overrides(trajectory, strict))?;
            let outcome = rank::execute(&config)?;
            println!("{}", rank::summarize(&outcome));
        }
        Command::Compare { ours, external } => {
            let outcome = compare::execute(&ours, &external)?;
            eprintln!("overlap: {} entities", outcome.overlap);
            println!("{}", outcome.rho);
        }
        Command::Bench { common, sizes } => {
            let sizes = parse_sizes(&sizes)?;
            let config = RunConfig::load(&common.config, &common.overrides(false, false))?;
            let rows = bench::execute(&config, &sizes)?;
            std::fs::create_dir_all(&config.out_dir)?;
            let path = config.out_dir.join("bench.csv");
            bench::write_csv(&path, &rows)?;
            for row in &rows {
                println!(
                    "n_companies={} n_technologies={} calib={:.3}s walk={:.3}s",
                    row.n_companies, row.n_technologies, row.calib_seconds, row.walk_seconds
                );
            }
            println!("timings written to {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
