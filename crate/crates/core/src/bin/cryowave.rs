//! `cryowave run | validate | describe` on JSON scenario files.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid scenario, 3 runtime
//! (tracer or output) failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cryowave::run::{run, Overrides};
use cryowave::scenario::{Engine, Scenario};

#[derive(Parser)]
#[command(
    name = "cryowave",
    version,
    about = "Multipath channel simulation for cryostat enclosures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace all links and write paths, CIRs, frequency responses and metrics.
    Run {
        file: PathBuf,
        /// Output directory [default: scenario `output_dir`, then $CRYOWAVE_OUT, then ./cryowave-out].
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = ["images", "rays", "both"])]
        engine: Option<String>,
        /// Launched ray count.
        #[arg(long)]
        rays: Option<usize>,
        /// Maximum reflections per ray.
        #[arg(long)]
        bounces: Option<usize>,
    },
    /// List schema and geometry problems; exit 0 only if there are none.
    Validate { file: PathBuf },
    /// Print the scene surfaces, materials and antenna positions.
    Describe { file: PathBuf },
}

fn load(file: &Path) -> Result<Scenario, ExitCode> {
    Scenario::load(file).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run {
            file,
            out,
            engine,
            rays,
            bounces,
        } => {
            let overrides = Overrides {
                output_dir: out,
                engine: engine.map(|e| e.parse::<Engine>().expect("validated by clap")),
                ray_count: rays,
                max_bounces: bounces,
            };
            match run(&file, &overrides) {
                Ok(report) => {
                    for w in &report.simulation.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!("wrote {} files to {}", report.files.len(), report.output_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate { file } => {
            let scenario = match load(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let diags = scenario.validate();
            for d in &diags {
                println!("{d}");
            }
            if diags.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Describe { file } => {
            let scenario = match load(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match scenario.describe() {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
