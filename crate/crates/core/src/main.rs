use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use surrogate_de::experiment::{report, run_experiment, ExperimentConfig, ReportKind, ReportOptions, RunOptions, Verb};
use surrogate_de::Result;

#[derive(Parser)]
#[command(version, about = "Surrogate-assisted differential evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Result store directory; overrides the configuration.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Runs executed concurrently; overrides the configuration.
    #[arg(short, long)]
    workers: Option<usize>,
    /// Keep runs already recorded as done instead of recomputing them.
    #[arg(long)]
    skip_existing: bool,
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configuration of the experiment matrix.
    Run(RunArgs),
    /// Run surrogate configurations in shadow mode, evaluating every challenger.
    Shadow(RunArgs),
    /// Run only the offline Kriging configurations.
    KrigingOffline(RunArgs),
    /// Emit report tables from a result store.
    Report {
        /// Result store directory.
        #[arg(short, long)]
        output: PathBuf,
        /// ranking, stats, heatmap, delta-e, confusion, zeta or all.
        #[arg(short, long, default_value = "all")]
        kind: ReportKind,
        /// Plain-DE configuration used as the δe reference.
        #[arg(long)]
        baseline: Option<String>,
        /// Restrict rankings to these configurations (comma separated).
        #[arg(long, value_delimiter = ',')]
        configs: Option<Vec<String>>,
        /// Window, in generations, of the ζ series.
        #[arg(long, default_value_t = surrogate_de::experiment::report::DEFAULT_ZETA_WINDOW)]
        zeta_window: usize,
        /// Where to write the tables; defaults to <output>/reports.
        #[arg(long)]
        reports_dir: Option<PathBuf>,
    },
}

fn execute(verb: Verb, args: RunArgs) -> Result<bool> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let opts = RunOptions {
        verb,
        output_dir: args.output,
        workers: args.workers,
        skip_existing: args.skip_existing,
        verbose: !args.quiet,
    };
    let outcome = run_experiment(&cfg, &opts)?;
    eprintln!(
        "{} completed, {} skipped, {} failed",
        outcome.completed, outcome.skipped, outcome.failed
    );
    Ok(outcome.success())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => execute(Verb::Run, args),
        Command::Shadow(args) => execute(Verb::Shadow, args),
        Command::KrigingOffline(args) => execute(Verb::KrigingOffline, args),
        Command::Report {
            output,
            kind,
            baseline,
            configs,
            zeta_window,
            reports_dir,
        } => {
            let opts = ReportOptions {
                baseline,
                configs,
                zeta_window,
                out_dir: reports_dir,
            };
            report(output, kind, &opts).map(|written| {
                for path in written {
                    println!("{}", path.display());
                }
                true
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
