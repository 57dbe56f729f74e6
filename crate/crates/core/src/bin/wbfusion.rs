use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wbfusion::channel::matrix_to_text;
use wbfusion::experiment::{list_presets, preset, run, shared_channel, ExperimentSpec, RunOptions};
use wbfusion::{Error, Result};

#[derive(Parser)]
#[command(name = "wbfusion", version, about = "Wideband decision-fusion spectrum sensing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a spec file or a built-in preset.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Print the resolved spec of a preset as JSON.
    DumpPreset { name: String },
    /// Print the shared fading matrix of a spec's active subcarrier.
    DumpChannel(SourceArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Experiment spec (JSON).
    #[arg(conflicts_with = "preset", required_unless_present = "preset")]
    spec: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn load(src: &SourceArgs) -> Result<ExperimentSpec> {
    let mut spec = match (&src.spec, &src.preset) {
        (Some(path), _) => ExperimentSpec::from_json(&fs::read_to_string(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Error::Config("a spec file or --preset is required".into())),
    };
    if let Some(seed) = src.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Presets => print!("{}", list_presets()),
        Command::DumpPreset { name } => println!("{}", preset(&name)?.to_json()),
        Command::DumpChannel(src) => {
            let spec = load(&src)?;
            let ch = shared_channel(&spec, &spec.scenario()?)?;
            print!("{}", matrix_to_text(&ch.g));
        }
        Command::Run(args) => {
            let mut spec = load(&args.source)?;
            if let Some(t) = args.trials {
                spec.trials = Some(t);
            }
            let opts = RunOptions { out_dir: args.out, workers: args.workers };
            for f in run(&spec, &opts)?.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
