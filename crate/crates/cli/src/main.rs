use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};
use octane_cli::{run, RunManifest, Subcommand};

#[derive(Parser)]
#[command(name = "octane", version, about = "Optical format and link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Sectioned key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads (overrides OCTANE_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Report structural properties of the configured formats.
    InspectFormat(Common),
    /// NGMI against SNR over AWGN.
    AwgnSweep(Common),
    /// NGMI against span count over the link.
    ReachSweep(Common),
    /// NGMI against launch power at a fixed distance.
    PowerSweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, c) = match cli.command {
        Command::InspectFormat(c) => (Subcommand::InspectFormat, c),
        Command::AwgnSweep(c) => (Subcommand::AwgnSweep, c),
        Command::ReachSweep(c) => (Subcommand::ReachSweep, c),
        Command::PowerSweep(c) => (Subcommand::PowerSweep, c),
    };
    let manifest = RunManifest {
        subcommand,
        config_path: c.config,
        overrides: c.set,
        output_path: c.out,
        workers: c.workers,
        seed: c.seed,
    };
    ExitCode::from(run(&manifest) as u8)
}
