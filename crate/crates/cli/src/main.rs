use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

mod commands;
mod output;

use burnlab_core::PathForest;

#[derive(Debug, Parser)]
#[command(name = "burnlab", version, about = "Burning path forests: decisions, lists and bound checks")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory of stored lists, used for loading and saving levels.
    #[arg(long, global = true, env = "BURNLAB_LISTS_DIR")]
    pub lists_dir: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Items held by one generation pass before a level is split.
    #[arg(long, global = true, default_value_t = 50_000_000,
          value_parser = clap::value_parser!(u64).range(1_000_000..))]
    pub memory_budget: u64,
    /// Cross-check results against the exhaustive oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

fn parse_forest(s: &str) -> Result<PathForest, String> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned.parse::<PathForest>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a forest burns in ⌈√N⌉ rounds (or in --m rounds).
    Decide {
        #[arg(value_parser = parse_forest)]
        forest: PathForest,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Burning number with a covering certificate.
    Bn {
        #[arg(value_parser = parse_forest)]
        forest: PathForest,
    },
    /// Per-path requirements and the impossibility verdict.
    Impossible {
        #[arg(value_parser = parse_forest)]
        forest: PathForest,
    },
    /// Well-burnable n-path forests of order m².
    Enumerate {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        l1_min: u32,
        /// Print every row.
        #[arg(long)]
        rows: bool,
    },
    /// Deficient n-path forests of order m² with l_1 ≥ --l1-min.
    Deficient {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: u32,
        #[arg(long)]
        l1_min: u32,
    },
    /// Largest shortest path of an impossibly burnable n-path forest.
    Mn {
        #[arg(short)]
        n: usize,
        /// Show the extremal forest and its structure report.
        #[arg(long)]
        construct: bool,
    },
    /// Check that every n-path forest with l_1 ≥ L is well-burnable and L is least.
    #[command(name = "verify-L")]
    VerifyL {
        #[arg(short)]
        n: usize,
        #[arg(long = "L")]
        l: u32,
        #[arg(long)]
        m_max: u32,
    },
    /// Deficient forests with l_1 ≥ --floor that are not impossibly burnable.
    Delta {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        floor: u32,
        #[arg(long)]
        m_max: u32,
    },
    /// Well and deficient 7-path forests with l_1 ≥ 46 at level m.
    Table1 {
        #[arg(long)]
        m: u32,
        /// Print every level up to m.
        #[arg(long)]
        all: bool,
    },
    /// Potentially deficient forests of order m², generated from level m−1 and certified.
    Candidates {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        m: u32,
        /// Shortest-path bound; defaults to the known bound for n−1 paths.
        #[arg(long)]
        floor: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if cli.config.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .init();
    if cli.config.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.config.threads).build_global() {
            error!("could not size the thread pool: {e}");
        }
    }
    let result = commands::run(&cli.command, &cli.config);
    match result {
        Ok(out) => {
            out.print(cli.config.json);
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = output::exit_code(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
