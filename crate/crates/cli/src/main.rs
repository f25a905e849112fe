use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hgs_cli::commands::{
    error_report, run_construct, run_exists, run_gen_random, run_oracle, run_search, run_verify,
    with_stranger_pairs, Exit, Report,
};
use hgs_cli::format::{parse_game, parse_partition, CliError};
use hgs_core::exist::{ExistOptions, SearchOptions, SearchPreset};
use hgs_core::oracle::OracleBudget;
use hgs_core::random::RandomGameParams;
use hgs_core::verify::VerifyOptions;
use hgs_core::{Game, Mode, Notion, Orientation, StabilityQuery};

/// Possible and necessary stability in hedonic games with strangers.
#[derive(Parser)]
#[command(name = "hgs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one partition; exit 0 if stable, 1 with a witness otherwise.
    Verify {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, short)]
        partition: String,
        /// Sweep at most 2^cap coalitions.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Look for a stable partition; exit 0 with a certificate, 1 if none, 3 if over the cap.
    Exists {
        #[command(flatten)]
        query: QueryArgs,
        /// Enumerate partitions of at most this many agents.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a necessarily internally stable partition.
    Construct {
        game: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check one partition by exhausting every resolution.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, short)]
        partition: String,
        /// Enumerate at most 2^cap resolutions.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a reproducible random game.
    GenRandom(RandomArgs),
    /// Search for a game without a necessarily core stable partition.
    Search {
        /// `thm9` (friend oriented) or `thm10` (enemy oriented, one stranger pair).
        preset: SearchPreset,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Require exactly this many stranger pairs.
        #[arg(long)]
        stranger_pairs: Option<usize>,
        /// Enumerate partitions of at most this many agents.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct QueryArgs {
    /// Game file, or `-` for standard input.
    game: PathBuf,
    /// IR, NS, IS, CIS, CS, SCS or INS.
    #[arg(long)]
    notion: Notion,
    /// possible or necessary.
    #[arg(long)]
    mode: Mode,
}

impl QueryArgs {
    fn query(&self) -> StabilityQuery {
        StabilityQuery::new(self.notion, self.mode)
    }
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, short)]
    n: usize,
    #[arg(long)]
    friend_density: f64,
    #[arg(long)]
    stranger_density: f64,
    #[arg(long)]
    symmetric: bool,
    /// fohgs or eohgs.
    #[arg(long, default_value = "fohgs", value_parser = parse_orientation)]
    orientation: Orientation,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    match s.to_ascii_lowercase().as_str() {
        "fohgs" | "friend" => Ok(Orientation::FriendOriented),
        "eohgs" | "enemy" => Ok(Orientation::EnemyOriented),
        _ => Err(format!(
            "unknown orientation `{s}` (expected fohgs or eohgs)"
        )),
    }
}

fn load_game(path: &PathBuf) -> Result<Game, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map(|_| s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    };
    parse_game(&text)
}

fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Verify {
            query,
            partition,
            cap,
            json,
        } => {
            let game = load_game(&query.game)?;
            let p = parse_partition(&partition, game.agent_count())?;
            run_verify(
                &game,
                &p,
                query.query(),
                &VerifyOptions { coalition_cap: cap },
                json,
            )
        }
        Command::Exists { query, cap, json } => {
            let game = load_game(&query.game)?;
            let opts = ExistOptions {
                partition_cap: cap,
                ..ExistOptions::default()
            };
            run_exists(&game, query.notion, query.mode, &opts, json)
        }
        Command::Construct { game, json } => run_construct(&load_game(&game)?, json),
        Command::Oracle {
            query,
            partition,
            cap,
            json,
        } => {
            let game = load_game(&query.game)?;
            let p = parse_partition(&partition, game.agent_count())?;
            let budget = OracleBudget {
                max_resolution_bits: cap,
                ..OracleBudget::default()
            };
            run_oracle(&game, &p, query.query(), &budget, json)
        }
        Command::GenRandom(a) => {
            let params = RandomGameParams {
                n: a.n,
                orientation: a.orientation,
                friend_density: a.friend_density,
                stranger_density: a.stranger_density,
                symmetric: a.symmetric,
            };
            run_gen_random(&params, a.seed, a.json)
        }
        Command::Search {
            preset,
            n_max,
            stranger_pairs,
            cap,
            json,
        } => {
            let constraints = with_stranger_pairs(preset.constraints(), stranger_pairs);
            let opts = SearchOptions {
                partition_cap: cap,
                ..SearchOptions::default()
            };
            run_search(&constraints, n_max, &opts, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Exit::InputError as u8
            } else {
                0
            });
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            let report = error_report(&e);
            eprint!("{}", report.text);
            ExitCode::from(report.exit as u8)
        }
    }
}
