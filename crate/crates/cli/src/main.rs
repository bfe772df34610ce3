use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phasetrop::harness::{Fault, Strategy};
use phasetrop_cli::{
    deform, frames, read_frames, report_json, sample, verify, write_atomic, write_frames, CliError, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "phasetrop", version, about = "Sample, deform and verify the isotopy from the complex line to the phase tropical line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a sample set of the line as a frame file with t = 0.
    Sample {
        /// coamoeba, amoeba, chart or seams
        #[arg(long, default_value = "coamoeba", value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 100, value_parser = positive)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map every row of a frame file by the deformation at time t.
    Deform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write frames at t = j / steps for j = 0..=steps.
    Frames {
        #[arg(long, value_parser = positive)]
        steps: usize,
        #[arg(long, default_value_t = 100, value_parser = positive)]
        n: usize,
        #[arg(long, default_value = "coamoeba", value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the verification suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, default_value_t = 100, value_parser = positive)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        t_steps: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Lambda,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Sample { strategy, n, seed, out } => {
            let rows = sample(strategy, n, seed)?;
            write_frames(&out, &rows)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Deform { input, t, out } => {
            let rows = read_frames(&input)?;
            let d = deform(&rows, t)?;
            if d.skipped > 0 {
                eprintln!("warning: skipped {} rows off the line", d.skipped);
            }
            write_frames(&out, &d.rows)?;
            println!("wrote {} rows to {}", d.rows.len(), out.display());
        }
        Command::Frames { steps, n, strategy, seed, out_dir } => {
            let rows = sample(strategy, n, seed)?;
            let paths = frames(&rows, steps, &out_dir)?;
            println!("wrote {} frames to {}", paths.len(), out_dir.display());
        }
        Command::Verify { n, seed, t_steps, report, inject_fault } => {
            let fault = inject_fault.map(|FaultArg::Lambda| Fault::Lambda);
            let rep = verify(&VerifyOptions { n, seed, t_steps, fault })?;
            if let Some(path) = report {
                write_atomic(&path, &report_json(&rep)?)?;
            }
            for c in rep.failures() {
                eprintln!("FAIL {}: {:e} > {:e} ({} samples)", c.name, c.max_residual, c.tolerance, c.sample_count);
            }
            let passed = rep.checks.iter().filter(|c| c.pass).count();
            println!("{passed}/{} checks passed", rep.checks.len());
            return Ok(if rep.overall { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
