use clap::{Parser, Subcommand};
use depletion_cli::commands::{run, Command, RunOptions};
use depletion_cli::config::Config;
use depletion_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "depletion", version, about = "Active depletion of a readout resonator by short pulses")]
struct Cli {
    #[command(subcommand)]
    command: Action,
    /// Scenario file (TOML); built-in defaults when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node count for `eigenmodes`, mode window for `quantum`
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Action {
    /// Transient voltage, envelope, transform and output signal, with the ODE oracle
    SimulateClassical,
    /// Solve the matching conditions and dump a reloadable config with the designed pulse
    MatchPulse,
    /// Normal modes of the discretized feedline
    Eigenmodes,
    /// Coherent-state trajectory and golden-rule loss rate
    Quantum,
    /// Photon number of a short Gaussian pulse
    PhotonNumber,
    /// Run the invariant suite; exit 3 on any failure
    Verify,
}

impl From<Action> for Command {
    fn from(a: Action) -> Self {
        match a {
            Action::SimulateClassical => Command::SimulateClassical,
            Action::MatchPulse => Command::MatchPulse,
            Action::Eigenmodes => Command::Eigenmodes,
            Action::Quantum => Command::Quantum,
            Action::PhotonNumber => Command::PhotonNumber,
            Action::Verify => Command::Verify,
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let opts = RunOptions { out_dir: cli.out.clone(), seed: cli.seed, modes: cli.modes };
    let report = run(cli.command.into(), &config, &opts)?;
    if !cli.quiet {
        for line in &report.lines {
            println!("{line}");
        }
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: {}", CliError::Invariant("see report above".into()));
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
