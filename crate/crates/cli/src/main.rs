use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lieobs_cli::run::{load_study, run_study, Overrides};
use lieobs_cli::verify::{run_property_suite, SuiteOptions};
use lieobs_cli::{builtins, plot, CliError};

const EXIT_STEP_FAILURE: u8 = 3;
const EXIT_VERIFY_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "lieobs", version, about = "Local exponential observers on matrix Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a builtin study and write CSVs plus a manifest.
    Run {
        /// Builtin name (see `list-builtins`) or path to a scenario file.
        target: String,
        /// Output root; results go to <out>/<study>/.
        #[arg(long, env = "LIEOBS_OUT_DIR", default_value = "lieobs-out")]
        out: PathBuf,
        /// Number of seeds for every noisy scenario.
        #[arg(long)]
        seeds: Option<u32>,
        /// Integrator step for every scenario.
        #[arg(long)]
        dt: Option<f64>,
        /// Final time for every scenario.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Run the property suite and print a TSV report.
    Verify {
        /// One of the selectors printed by `verify --list`, or `all`.
        #[arg(default_value = "all")]
        selector: String,
        /// List the selectors and exit.
        #[arg(long)]
        list: bool,
    },
    /// Write a gnuplot script next to a run manifest.
    Plot {
        manifest: PathBuf,
        /// Linear instead of logarithmic y axes.
        #[arg(long)]
        linear: bool,
    },
    /// List the embedded studies.
    ListBuiltins,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("lieobs: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            target,
            out,
            seeds,
            dt,
            t_end,
        } => {
            let overrides = Overrides { seeds, dt, t_end };
            let outcome = match load_study(&target).and_then(|s| run_study(s, &overrides, &out)) {
                Ok(o) => o,
                Err(e) => return fail(&e),
            };
            let m = &outcome.manifest;
            for r in &m.runs {
                match &r.failure {
                    Some(f) => println!("{}\tFAILED\t{f}", r.csv),
                    None => println!(
                        "{}\tterminal {:e}",
                        r.csv,
                        r.terminal_error.unwrap_or(f64::NAN)
                    ),
                }
            }
            for s in &m.noise_statistics {
                println!(
                    "{}\tsigma {}\t{} of {} seeds\tlate mean error {:.6e} +/- {:.6e}",
                    s.scenario,
                    s.sigma,
                    s.completed,
                    s.seeds.len(),
                    s.mean,
                    s.std_dev
                );
            }
            for c in &m.comparisons {
                println!(
                    "{} vs {}\tmean difference {:.6e}\tlower mean: {}",
                    c.first, c.second, c.mean_difference, c.lower_mean
                );
            }
            println!("manifest\t{}", outcome.manifest_path.display());
            if m.any_failure() {
                ExitCode::from(EXIT_STEP_FAILURE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Verify { selector, list } => {
            if list {
                for (name, what) in lieobs_cli::verify::SELECTORS {
                    println!("{name}\t{what}");
                }
                return ExitCode::SUCCESS;
            }
            match run_property_suite(&selector, &SuiteOptions::default()) {
                Ok(report) => {
                    print!("{}", report.to_tsv());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_VERIFY_FAILURE)
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Plot { manifest, linear } => match plot::emit_plot_script(&manifest, !linear) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::ListBuiltins => {
            for b in &builtins::BUILTINS {
                println!("{}\t{}", b.name, b.description);
            }
            ExitCode::SUCCESS
        }
    }
}
