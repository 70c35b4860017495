//! `legstr`: classify, solve, build, measure, verify and plot closed
//! critical curves of the strain functional on Legendrian curves in the
//! 3-sphere.
//!
//! Exit codes: 0 success, 2 bad input, 3 modulus outside the open region,
//! 4 solver did not converge, 5 file or format trouble, 6 a requested check
//! failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use legstr::cli_io::{
    self, CurveDocument, ListFormat, PlotView, ReportDocument,
};
use legstr::tol::Tolerances;
use legstr::Error;

#[derive(Parser)]
#[command(
    name = "legstr",
    version,
    about = "Closed critical curves of the strain functional on Legendrian curves in S^3",
    after_help = "Numerical gates can be overridden through LEGSTR_* environment variables; \
                  run `legstr verify --help` for where they bite."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every closed-string class up to a wave number
    Enumerate {
        /// Largest wave number n to include
        #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
        max_wave: i64,
        /// Output format: table, csv or json
        #[arg(long, default_value = "table", value_parser = parse_format)]
        format: ListFormat,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover the curvature characters (m, ell) of one class
    Solve {
        /// Wave number n of the class |n,l1,l2>
        #[arg(long, allow_negative_numbers = true)]
        wave: Option<i64>,
        /// Linking number l1 of the class
        #[arg(long, allow_negative_numbers = true)]
        lk1: Option<i64>,
        /// Linking number l2 of the class
        #[arg(long, allow_negative_numbers = true)]
        lk2: Option<i64>,
        /// Rotation number q2 as an exact fraction, e.g. 10/27
        #[arg(long)]
        q2: Option<String>,
        /// Rotation number q3 as an exact fraction, e.g. 4/27
        #[arg(long)]
        q3: Option<String>,
        /// Inversion tolerance (defaults to the solve gate)
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
        /// Write the JSON record here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample a symmetric configuration into a curve document
    Build {
        /// Wave number n of the closed class |n,l1,l2>
        #[arg(long, allow_negative_numbers = true)]
        wave: Option<i64>,
        /// Linking number l1 of the closed class
        #[arg(long, allow_negative_numbers = true)]
        lk1: Option<i64>,
        /// Linking number l2 of the closed class
        #[arg(long, allow_negative_numbers = true)]
        lk2: Option<i64>,
        /// Curvature modulus m in (0, 1): samples one open wave instead
        #[arg(long, allow_negative_numbers = true)]
        m: Option<f64>,
        /// Wave parameter ell > 3^(1/4): samples one open wave instead
        #[arg(long, allow_negative_numbers = true)]
        ell: Option<f64>,
        /// Sample count per curvature wave
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Apply the order-four axis exchange to the result
        #[arg(long)]
        dual: bool,
        /// Write the curve document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample a constant-curvature solenoid into a curve document
    Constcurv {
        /// Slope ratio a/b with a > b >= 1 coprime, e.g. 5/3
        #[arg(long)]
        q: String,
        /// Sample count per turn
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Apply the order-four axis exchange to the result
        #[arg(long)]
        dual: bool,
        /// Write the curve document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Measure the knot invariants of a documented closed curve
    Invariants {
        /// Curve document to measure
        input: PathBuf,
        /// Write the JSON report here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-derive every residual gate for a documented curve
    Verify {
        /// Curve document to verify
        input: PathBuf,
        /// Write the JSON report here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render one chart projection of a documented curve as SVG
    Plot {
        /// Curve document to draw
        input: PathBuf,
        /// Projection: lagrangian, xy, xz or yz
        #[arg(long, default_value = "lagrangian", value_parser = parse_view)]
        view: PlotView,
        /// Write the SVG here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_format(text: &str) -> Result<ListFormat, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn parse_view(text: &str) -> Result<PlotView, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::DegenerateTangent(_) => 2,
        Error::OutsideDomain(_) => 3,
        Error::Convergence(_) => 4,
        Error::Io(_) | Error::Format(_) => 5,
        _ => 6,
    }
}

fn run(command: Command) -> legstr::Result<()> {
    // Surface malformed LEGSTR_ overrides immediately; the library alone
    // would fall back to the defaults without a word.
    Tolerances::from_env()?;
    match command {
        Command::Enumerate { max_wave, format, output } => {
            emit(&cli_io::render_enumeration(max_wave, format)?, output.as_deref())
        }
        Command::Solve { wave, lk1, lk2, q2, q3, tol, output } => {
            let record = match (wave, lk1, lk2, &q2, &q3) {
                (Some(n), Some(l1), Some(l2), None, None) => {
                    cli_io::solve_from_triple(n, l1, l2, tol)?
                }
                (None, None, None, Some(q2), Some(q3)) => {
                    cli_io::solve_from_modulus(q2, q3, tol)?
                }
                _ => {
                    return Err(Error::Domain(
                        "give either --wave N --lk1 L1 --lk2 L2 or --q2 A/B --q3 C/D".into(),
                    ))
                }
            };
            eprintln!("{}", record.summary());
            emit(&record.to_json(), output.as_deref())
        }
        Command::Build { wave, lk1, lk2, m, ell, samples, dual, output } => {
            let doc = match (wave, lk1, lk2, m, ell) {
                (Some(n), Some(l1), Some(l2), None, None) => {
                    cli_io::build_closed_document(n, l1, l2, samples, dual)?
                }
                (None, None, None, Some(m), Some(ell)) => {
                    cli_io::build_arc_document(m, ell, samples, dual)?
                }
                _ => {
                    return Err(Error::Domain(
                        "give either --wave N --lk1 L1 --lk2 L2 or --m M --ell ELL".into(),
                    ))
                }
            };
            emit(&doc.to_json(), output.as_deref())
        }
        Command::Constcurv { q, samples, dual, output } => {
            let doc = cli_io::build_solenoid_document(&q, samples, dual)?;
            emit(&doc.to_json(), output.as_deref())
        }
        Command::Invariants { input, output } => {
            report(cli_io::invariants_report(&read(&input)?)?, output.as_deref())
        }
        Command::Verify { input, output } => {
            report(cli_io::verify_report(&read(&input)?)?, output.as_deref())
        }
        Command::Plot { input, view, output } => {
            emit(&cli_io::render_plot(&read(&input)?, view)?, output.as_deref())
        }
    }
}

fn read(path: &Path) -> legstr::Result<CurveDocument> {
    cli_io::read_curve_document(path)
}

fn emit(text: &str, output: Option<&Path>) -> legstr::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn report(report: ReportDocument, output: Option<&Path>) -> legstr::Result<()> {
    eprintln!("{}", report.summary());
    emit(&report.to_json(), output)?;
    if report.verdict {
        Ok(())
    } else {
        Err(Error::Verification(format!(
            "{} of {} checks failed",
            report.failing(),
            report.checks.len()
        )))
    }
}
