//! `rdwalk`: evaluate and cross-validate the distortion-rate curves of a
//! lossy-compressed decimated Gaussian walk.
//!
//! Exit status: 0 on success, 1 when evaluation or validation fails, 2 on
//! usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rdwalk_cli::curve::{self, CurveError, CurveMode, CurveRequest, SchemeColumn, Spacing};
use rdwalk_cli::point::point_report;
use rdwalk_cli::validate::{all_passed, render_report, run_suite, Level};

#[derive(Parser)]
#[command(
    name = "rdwalk",
    version,
    about = "Distortion-rate curves for recovering a Gaussian walk from its \
             lossy-compressed decimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Sweep the rate with M fixed.
    VsRate,
    /// Sweep the decimation factor with R fixed.
    VsM,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate both schemes at one (M, R) point and print the breakdown.
    Point {
        /// Decimation factor M (positive integer).
        #[arg(long)]
        m: usize,
        /// Rate in bits per source sample (positive).
        #[arg(long)]
        rate: f64,
    },
    /// Sweep a grid and write the evaluated curves as CSV.
    Curve {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Fixed parameter of the other axis: M for vs-rate, R for vs-m.
        #[arg(long)]
        fixed: f64,
        /// Lower end of the grid.
        #[arg(long)]
        min: f64,
        /// Upper end of the grid.
        #[arg(long)]
        max: f64,
        /// Number of grid points (at least 2).
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
        spacing: SpacingArg,
        /// Comma-separated subset of: source_drf, ec, ce, mmse, gap.
        #[arg(long)]
        schemes: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the validation suite and print its report.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// Master seed for the Monte Carlo criteria.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn run_point(m: usize, rate: f64) -> ExitCode {
    if m == 0 {
        return usage_error("the decimation factor M must be a positive integer");
    }
    if !rate.is_finite() || rate <= 0.0 {
        return usage_error("the rate must be positive and finite");
    }
    match point_report(m, rate) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("point evaluation failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_schemes(list: &str) -> Result<Vec<SchemeColumn>, String> {
    let mut out = Vec::new();
    for token in list.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match SchemeColumn::from_label(token) {
            Some(s) => out.push(s),
            None => {
                return Err(format!(
                    "unknown scheme {token:?}; choose from source_drf, ec, ce, mmse, gap"
                ))
            }
        }
    }
    if out.is_empty() {
        return Err("at least one scheme is required".into());
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_curve(
    mode: ModeArg,
    fixed: f64,
    min: f64,
    max: f64,
    steps: usize,
    spacing: SpacingArg,
    schemes: &str,
    out: &Path,
) -> ExitCode {
    let schemes = match parse_schemes(schemes) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let request = CurveRequest {
        mode: match mode {
            ModeArg::VsRate => CurveMode::VsRate,
            ModeArg::VsM => CurveMode::VsM,
        },
        fixed,
        min,
        max,
        steps,
        spacing: match spacing {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        },
        schemes,
    };
    match curve::write_curve(&request, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CurveError::Usage(msg)) => usage_error(&msg),
        Err(CurveError::Evaluation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn run_validate(level: LevelArg, seed: u64) -> ExitCode {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let results = run_suite(level, seed);
    print!("{}", render_report(level, seed, &results));
    if all_passed(&results) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Point { m, rate } => run_point(m, rate),
        Command::Curve {
            mode,
            fixed,
            min,
            max,
            steps,
            spacing,
            schemes,
            out,
        } => run_curve(mode, fixed, min, max, steps, spacing, &schemes, &out),
        Command::Validate { level, seed } => run_validate(level, seed),
    }
}
