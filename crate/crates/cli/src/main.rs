//! Command-line front end: parses arguments into a run configuration,
//! executes it, streams the line records to stdout, and exits with the
//! run status (0 pass, 1 falsification found, 2 configuration error,
//! 3 indeterminate).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use smale_core::rational::Rational;
use smale_core::runner::{run, AxiomSelect, RunConfig, RunOutput, STATUS_CONFIG_ERROR};
use smale_core::system::AxiomConstants;

#[derive(Parser)]
#[command(
    name = "smale-lab",
    about = "Exact verification laboratory for expanding systems and their inverse limits",
    version
)]
struct Cli {
    /// Worker threads for net scans (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConstantArgs {
    /// Axiom constant K >= 1
    #[arg(long = "K", value_name = "N")]
    big_k: u32,
    /// Axiom constant beta > 0, written p/q
    #[arg(long)]
    beta: Rational,
    /// Axiom constant gamma in (0,1), written p/q
    #[arg(long)]
    gamma: Rational,
}

impl ConstantArgs {
    fn build(&self) -> Result<AxiomConstants, String> {
        AxiomConstants::new(self.beta.clone(), self.big_k, self.gamma.clone())
            .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check axiom 1, axiom 2, or both over a net
    Verify {
        /// fullshift2|goldenmean|example2|solenoid|gasket or config:<path>
        #[arg(long)]
        system: String,
        /// 1, 2, or both
        #[arg(long, default_value = "both")]
        axiom: String,
        #[command(flatten)]
        constants: ConstantArgs,
        /// Net resolution, written p/q
        #[arg(long)]
        resolution: Rational,
        /// Comma-separated epsilon list for axiom 2 (default: beta, beta/2, beta/8)
        #[arg(long)]
        epsilons: Option<String>,
        /// Also emit a (pair, ratio) table for plotting
        #[arg(long)]
        csv: bool,
    },
    /// Grid-search admissible constants
    Search {
        #[arg(long)]
        system: String,
        #[arg(long = "K-max", value_name = "N")]
        k_max: u32,
        /// Comma-separated gamma grid
        #[arg(long)]
        gammas: String,
        /// Comma-separated beta grid
        #[arg(long)]
        betas: String,
        #[arg(long)]
        resolution: Rational,
        /// Optional coarser resolution for pre-screening axiom 2
        #[arg(long)]
        screen_resolution: Option<Rational>,
    },
    /// Construct the bracket of two threads
    Bracket {
        #[arg(long)]
        system: String,
        #[command(flatten)]
        constants: ConstantArgs,
        /// Thread entries e0;e1;… in the system's point notation
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        depth: usize,
    },
    /// Contraction, finiteness, and disconnectedness suite on seeded samples
    SmaleVerify {
        #[arg(long)]
        system: String,
        #[command(flatten)]
        constants: ConstantArgs,
        #[arg(long)]
        resolution: Rational,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Verify the quotient/inverse-limit conjugacy for a shift of finite type
    Conjugacy {
        /// fullshift2|goldenmean or file:<adjacency matrix path>
        #[arg(long)]
        sft: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Produce the exact axiom-2 failure certificate for the glued shift union
    FalsifyExample2 {
        #[arg(long = "K", value_name = "N")]
        big_k: u32,
        /// Witness depth N >= 2K
        #[arg(long = "N", value_name = "N")]
        depth_n: u32,
        #[arg(long)]
        gamma: Rational,
    },
    /// Re-verify every witness record in a report file
    Replay {
        #[arg(long)]
        witness_file: PathBuf,
    },
    /// Execute a serialized run configuration file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn to_run_config(command: Command) -> Result<RunConfig, String> {
    Ok(match command {
        Command::Verify { system, axiom, constants, resolution, epsilons, csv } => {
            RunConfig::Verify {
                system,
                axiom: match axiom.as_str() {
                    "1" => AxiomSelect::One,
                    "2" => AxiomSelect::Two,
                    "both" => AxiomSelect::Both,
                    other => return Err(format!("bad --axiom {other:?} (expected 1|2|both)")),
                },
                constants: constants.build()?,
                resolution,
                epsilons: match epsilons {
                    None => Vec::new(),
                    Some(text) => parse_rational_list(&text)?,
                },
                csv,
            }
        }
        Command::Search { system, k_max, gammas, betas, resolution, screen_resolution } => {
            RunConfig::Search {
                system,
                k_max,
                gammas: parse_rational_list(&gammas)?,
                betas: parse_rational_list(&betas)?,
                resolution,
                screen_resolution,
            }
        }
        Command::Bracket { system, constants, x, y, depth } => RunConfig::Bracket {
            system,
            constants: constants.build()?,
            x: x.split(';').map(str::to_string).collect(),
            y: y.split(';').map(str::to_string).collect(),
            depth,
        },
        Command::SmaleVerify { system, constants, resolution, samples, seed, depth } => {
            RunConfig::SmaleVerify {
                system,
                constants: constants.build()?,
                resolution,
                samples,
                seed,
                depth,
            }
        }
        Command::Conjugacy { sft, samples, depth, seed } => {
            RunConfig::Conjugacy { sft, samples, depth, seed }
        }
        Command::FalsifyExample2 { big_k, depth_n, gamma } => {
            RunConfig::FalsifyExample2 { big_k, depth_n, gamma }
        }
        Command::Replay { witness_file } => RunConfig::Replay {
            witness_text: std::fs::read_to_string(&witness_file)
                .map_err(|e| format!("cannot read {}: {e}", witness_file.display()))?,
        },
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            RunConfig::parse(&text)?
        }
    })
}

fn parse_rational_list(text: &str) -> Result<Vec<Rational>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<Rational>().map_err(|e| e.to_string()))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error kind=config message=cannot size worker pool: {e}");
            return ExitCode::from(STATUS_CONFIG_ERROR);
        }
    }
    let output: RunOutput = match to_run_config(cli.command) {
        Ok(config) => run(&config),
        Err(message) => {
            eprintln!("error kind=config message={message}");
            return ExitCode::from(STATUS_CONFIG_ERROR);
        }
    };
    for line in &output.lines {
        println!("{line}");
    }
    ExitCode::from(output.status)
}
