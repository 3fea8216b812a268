use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polycurv_cli::{execute, OutputFormat, Overrides, TaskKind};

#[derive(Parser)]
#[command(
    name = "polycurv",
    version,
    about = "Exact curvature invariants of polydisc submodules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the submodule kernel K_N(z, w)
    Kernel(Common),
    /// Build the kernel decomposition frames
    Decompose(Common),
    /// Grammian metric of the frames
    Metric(Common),
    /// Determinant-bundle and matrix curvature
    Curvature(Common),
    /// Localization dimension at a point
    Dimension(Common),
    /// Decide equivalence of two weight tuples
    Compare(Common),
    /// Positive roots of the weight-ratio cubic
    Cubic(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    output: Option<Format>,
    #[arg(long)]
    trunc_degree: Option<u32>,
    #[arg(long)]
    ideal_degree: Option<u32>,
    /// Rational tuple such as "(1/2, 0)"
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, common) = match cli.command {
        Command::Kernel(c) => (TaskKind::Kernel, c),
        Command::Decompose(c) => (TaskKind::Decompose, c),
        Command::Metric(c) => (TaskKind::Metric, c),
        Command::Curvature(c) => (TaskKind::Curvature, c),
        Command::Dimension(c) => (TaskKind::Dimension, c),
        Command::Compare(c) => (TaskKind::Compare, c),
        Command::Cubic(c) => (TaskKind::Cubic, c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        task: Some(task),
        output: common.output.map(|f| match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }),
        trunc_degree: common.trunc_degree,
        ideal_degree: common.ideal_degree,
        point: common.point,
    };
    match execute(&text, &overrides) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
