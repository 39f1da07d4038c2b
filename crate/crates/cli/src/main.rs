use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ramsey_zne_cli::commands::{cmd_plot, cmd_preset, cmd_run, CliError, GlobalOpts, RunManifest};
use ramsey_zne_cli::svg::PlotSpec;

#[derive(Parser)]
#[command(
    name = "ramsey-zne",
    about = "Simulate Ramsey/GHZ DC-field sensing under damping noise and \
             evaluate zero-noise-extrapolation estimators",
    version
)]
struct Cli {
    /// Override the config's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: out/<name>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trial execution (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Restore the full-scale trial count (5000) instead of desk scale.
    #[arg(long, global = true)]
    full_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run { config: PathBuf },
    /// Materialize a named preset, apply overrides, and run it.
    Preset {
        name: String,
        /// Override a config field, e.g. --set noise.rate=0.2
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Render a results CSV as an SVG line plot.
    Plot {
        csv: PathBuf,
        /// Logarithmic y axis.
        #[arg(long)]
        logy: bool,
        /// Output file (default: alongside the CSV).
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

fn print_manifest(manifest: &RunManifest) {
    println!("config:   {}", manifest.config_source);
    println!("seed:     {}", manifest.seed);
    println!("out dir:  {}", manifest.out_dir.display());
    for artifact in &manifest.artifacts {
        println!("artifact: {}", artifact.display());
    }
    println!("elapsed:  {:.2?}", manifest.duration);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = GlobalOpts {
        seed: cli.seed,
        out_dir: cli.out,
        workers: cli.workers,
        full_scale: cli.full_scale,
    };
    match cli.command {
        Command::Run { config } => print_manifest(&cmd_run(&config, &opts)?),
        Command::Preset { name, set } => print_manifest(&cmd_preset(&name, &set, &opts)?),
        Command::Plot { csv, logy, out_file } => {
            let out = cmd_plot(&csv, PlotSpec { log_y: logy }, out_file)?;
            println!("plot:     {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            if err.is_usage_error() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
