use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jmsteer::harness::{
    jm_scan, jm_scan_csv, joint_table, load_jm_scan, load_povm_data, load_scenario, load_sweep,
    run_scenario, run_sweep, sweep_csv, write_output, HarnessError, HarnessResult, Round,
};
use jmsteer::validate_povm;

#[derive(Parser)]
#[command(name = "jmsteer", version, about = "Joint measurability and entropic steering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a POVM file and print its validation report.
    Validate { povm: PathBuf },
    /// Evaluate a scenario file and print the uncertainty report as JSON.
    Run {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the joint outcome table of one measurement round as CSV.
    Joint {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "x")]
        round: RoundArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a scenario template over a parameter grid.
    Sweep {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the analytic and numerical joint-measurability verdicts.
    JmScan {
        pair: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RoundArg {
    X,
    Z,
}

fn emit(output: Option<&Path>, text: &str) -> HarnessResult<()> {
    match output {
        Some(path) => write_output(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn execute(command: Command) -> HarnessResult<i32> {
    match command {
        Command::Validate { povm } => {
            let data = load_povm_data(&povm)?;
            let report = validate_povm(&data);
            print!(
                "{}",
                json_line(&serde_json::json!({
                    "valid": report.is_valid(),
                    "max_residual": report.max_residual(),
                    "violations": report.violations,
                }))
            );
            if report.is_valid() {
                Ok(0)
            } else {
                eprintln!("error: {report}");
                Ok(3)
            }
        }
        Command::Run { scenario, output } => {
            let report = run_scenario(&scenario)?;
            emit(output.as_deref(), &json_line(&report.rounded()))?;
            Ok(0)
        }
        Command::Joint { scenario, round, output } => {
            let scenario = load_scenario(&scenario)?.build()?;
            let round = match round {
                RoundArg::X => Round::X,
                RoundArg::Z => Round::Z,
            };
            emit(output.as_deref(), &joint_table(&scenario, round)?.to_csv())?;
            Ok(0)
        }
        Command::Sweep { spec, output } => {
            let rows = run_sweep(&load_sweep(&spec)?)?;
            emit(output.as_deref(), &sweep_csv(&rows))?;
            Ok(0)
        }
        Command::JmScan { pair, output, start, stop, steps } => {
            let mut spec = load_jm_scan(&pair)?;
            if let Some(v) = start {
                spec.grid.start = v;
            }
            if let Some(v) = stop {
                spec.grid.stop = v;
            }
            if let Some(v) = steps {
                spec.grid.steps = v;
            }
            let rows = jm_scan(&spec)?;
            emit(output.as_deref(), &jm_scan_csv(&rows))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = execute(cli.command).unwrap_or_else(|e: HarnessError| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
