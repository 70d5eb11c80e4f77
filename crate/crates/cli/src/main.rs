use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fockdyn::commands;
use fockdyn::config::{Overrides, Route, RunConfig};
use fockdyn::io::read_file;
use fockdyn::qed::JcModel;
use fockdyn::Error;

/// Photon-loss dynamics of few-photon cavity states.
#[derive(Debug, Parser)]
#[command(name = "fockdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wigner-function snapshots along the decay.
    Wigner(RunArgs),
    /// g2 and anti-normally ordered g2 sweeps.
    Correlations(RunArgs),
    /// Two-atom cavity state preparation.
    Prepare(RunArgs),
    /// Simulated Ramsey parity measurement of the Wigner function.
    Measure(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for shot noise (`measure`).
    #[arg(long)]
    seed: Option<u64>,
    /// Interaction model (`prepare`).
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Wigner evaluator (`wigner`).
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Paper,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Closed,
    Rho,
    Convolution,
    Both,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Wigner(a) => ("wigner", a),
            Command::Correlations(a) => ("correlations", a),
            Command::Prepare(a) => ("prepare", a),
            Command::Measure(a) => ("measure", a),
        }
    }
}

fn load(name: &str, args: &RunArgs) -> Result<RunConfig, Error> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_json(&read_file(path)?)?,
        None => RunConfig::default_for(name)?,
    };
    if config.command() != name {
        return Err(Error::Config(vec![format!(
            "configuration is for `{}` but the `{name}` subcommand was run",
            config.command()
        )]));
    }
    config.apply(&Overrides {
        output_dir: args.out.clone(),
        seed: args.seed,
        model: args.model.map(|m| match m {
            ModelArg::Paper => JcModel::Paper,
            ModelArg::Exact => JcModel::Exact,
        }),
        route: args.route.map(|r| match r {
            RouteArg::Closed => Route::Closed,
            RouteArg::Rho => Route::Rho,
            RouteArg::Convolution => Route::Convolution,
            RouteArg::Both => Route::Both,
        }),
    })?;
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (name, args) = cli.command.parts();
    let result = load(name, args).and_then(|config| commands::run(&config));
    match result {
        Ok(report) => {
            for file in report.files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
