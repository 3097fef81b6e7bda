use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmbath::cli::{self, Scenario};
use nmbath::{Error, Result};

#[derive(Parser)]
#[command(name = "nmbath", version, about = "Three-level system in a non-thermal bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in scenario name
    #[arg(long)]
    preset: Option<String>,
    /// Scenario TOML file
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write trajectory.csv, report.txt and (markov1) rates.csv
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the finite-time rates of a scenario to rates.csv
    Rates {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print occupations and critical coherence strengths
    Pc {
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        /// constant:T | two_step:T1,T2[,split] | tabulated:w0:T0,w1:T1,...
        #[arg(long)]
        profile: String,
    },
    /// Print a built-in scenario as TOML
    DumpPreset { name: String },
    /// Run every scenario in a list file into <out>/<name>
    Batch {
        list: PathBuf,
        #[arg(long, default_value = "batch-out")]
        out: PathBuf,
    },
}

fn load(source: &Source) -> Result<Scenario> {
    match (&source.preset, &source.config) {
        (Some(name), _) => cli::preset(name),
        (None, Some(path)) => cli::load_scenario(path),
        (None, None) => Err(Error::config("source", "give --preset or --config")),
    }
}

fn batch(list: &Path, out: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(list)?;
    let base = list.parent().unwrap_or(Path::new("."));
    let items = cli::parse_batch_list(&text, base);
    let mut status = cli::EXIT_OK;
    for (label, result) in cli::run_batch(&items, out) {
        match result {
            Ok(()) => println!("{label}: ok"),
            Err(e) => {
                eprintln!("{label}: {e}");
                status = status.max(cli::exit_code(&e));
            }
        }
    }
    Ok(status)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run { source, out } => {
            let scenario = load(&source)?;
            let output = cli::run(&scenario, &out)?;
            let p = &output.positivity;
            println!(
                "wrote {} records to {}; state positivity violated: {}; markovian: {}",
                output.trajectory.len(),
                out.display(),
                p.first_violation_time.is_some(),
                output.markovianity.is_markovian
            );
        }
        Command::Rates { source, out } => {
            cli::write_rates(&load(&source)?, &out)?;
            println!("wrote {}", out.join("rates.csv").display());
        }
        Command::Pc { eps1, eps2, profile } => {
            let profile = cli::parse_profile(&profile, 0.5 * (eps1 + eps2))?;
            print!("{}", cli::pc_table(eps1, eps2, &profile)?);
        }
        Command::DumpPreset { name } => print!("{}", cli::preset_text(&name)?),
        Command::Batch { list, out } => return batch(&list, &out),
    }
    Ok(cli::EXIT_OK)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let code = match dispatch(args.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
