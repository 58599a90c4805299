use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optinput::cli::{load_spec, render, run, run_to_dir, Command, Options, PRESETS};

#[derive(Parser)]
#[command(name = "optinput", version, about = "Optimal input states for channel inference")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// CPTP and covariance report for the family
    Validate(Common),
    /// Dominance check between two named inputs
    Compare(Common),
    /// Protocol certificates (group-correction, unital-qubit, measurement)
    Certify(Common),
    /// Product-input sufficiency, entanglement breaking and advantage witness
    EntAdvantage(Common),
    /// Trace-norm curves as CSV
    Sweep(Common),
    /// Polygon angle-set queries
    Ang(Common),
    /// Repetition analyses
    Repeat(Common),
    /// Lists the bundled preset specs
    Presets,
}

#[derive(Args)]
struct Common {
    /// Spec JSON path, or preset:<name>
    #[arg(long)]
    spec: String,
    /// Directory for report and CSV files
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of s grid points
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::EntAdvantage(a) => (Command::EntAdvantage, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Ang(a) => (Command::Ang, a),
        Cmd::Repeat(a) => (Command::Repeat, a),
        Cmd::Presets => {
            let mut out = std::io::stdout().lock();
            for (name, _) in PRESETS {
                let _ = writeln!(out, "{}", name);
            }
            return ExitCode::SUCCESS;
        }
    };
    let opts = Options { seed: args.seed, grid: args.grid, tol: args.tol };
    let result = load_spec(&args.spec).and_then(|doc| match &args.out {
        Some(dir) => run_to_dir(cmd, &doc, &opts, dir).map(|(o, _)| o),
        None => run(cmd, &doc, &opts),
    });
    match result {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = write!(out, "{}", render(&outcome.report));
            if args.out.is_none() {
                if let Some(csv) = &outcome.csv {
                    let _ = write!(out, "{}", csv);
                }
            }
            ExitCode::from(if outcome.failed { 3 } else { 0 })
        }
        Err(e) => {
            eprintln!("optinput: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
