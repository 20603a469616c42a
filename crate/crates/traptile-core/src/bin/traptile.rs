//! Command-line front end: construct, verify, and illustrate trapezoid
//! tilings, with stable JSON/SVG/DOT file formats and scriptable exit codes.
//!
//! Exit codes: 0 success, 1 a check returned FAIL, 2 parse or precondition
//! error, 3 the condition checker answered UNKNOWN.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use traptile_core::analysis::{check_conditions_with, CondIii, CondVerdict};
use traptile_core::circuit::{build_circuit, verify_kenyon};
use traptile_core::config::Config;
use traptile_core::field::{format_qnum, parse_qnum, parse_rational};
use traptile_core::geometry::{realize, to_svg, verify_exact, SvgOptions, Tiling};
use traptile_core::plot::{plot_plane, Level, PlotOptions};
use traptile_core::synth::{proposition_last_sequence, tile_quadratic, tile_rational};
use traptile_core::{FieldContext, QuadraticNumber};

#[derive(Parser)]
#[command(
    name = "traptile",
    version,
    about = "Exact tilings of trapezoids by homothetic standard trapezoids"
)]
struct Cli {
    /// Config file; overrides the TRAPTILE_CONFIG environment variable.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Discriminant of the quadratic field, e.g. 2 for Q[sqrt(2)].
    #[arg(long)]
    d: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct and verify a tiling; write its JSON and SVG.
    Tile {
        /// Prototile midline, e.g. 2 or "3+1*sqrt(2)".
        #[arg(long)]
        a: String,
        /// Target midline (rational mode) or second prototile midline.
        #[arg(long)]
        b: String,
        /// Target midline for the two-prototile mode.
        #[arg(long)]
        c: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
        /// Output basename; writes <out>.json and <out>.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a tiling JSON file exactly.
    Verify { file: PathBuf },
    /// Build the electrical network of a tiling; write JSON and DOT.
    Circuit {
        file: PathBuf,
        /// Output basename; writes <out>.json and <out>.dot.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the necessary conditions on a candidate midline b.
    Check {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Print the boundary sequence b_1..b_n with equality certificates.
    Sequence {
        #[arg(long)]
        a: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Render the (conjugate, value) half-plane picture.
    Plot {
        #[arg(long)]
        a: String,
        /// Comma-separated h-levels; rationals or "inf".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        levels: Vec<String>,
        #[command(flatten)]
        field: FieldArgs,
        /// Output SVG path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A terminal outcome: message to stderr plus process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        fail(2, e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(cli_path: &Option<PathBuf>) -> Result<Config, Failure> {
    match cli_path {
        Some(path) => Ok(Config::from_file(path)?),
        None => Ok(Config::from_env()?),
    }
}

/// Field context from the --d flag, falling back to the configured default.
fn context_for(field: &FieldArgs, config: &Config) -> Result<FieldContext, Failure> {
    let d = match &field.d {
        Some(text) => parse_rational(text)?,
        None => config.d.clone(),
    };
    Ok(FieldContext::new(d)?)
}

fn parse_midline(name: &str, text: &str, ctx: &FieldContext) -> Result<QuadraticNumber, Failure> {
    parse_qnum(text, ctx).map_err(|e| fail(2, format!("{name}: {e}")))
}

fn out_base(out: &Option<PathBuf>, config: &Config, default_name: &str) -> PathBuf {
    out.clone().unwrap_or_else(|| config.out_dir.join(default_name))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| fail(2, format!("cannot write {path:?}: {e}")))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn read_tiling(path: &Path) -> Result<Tiling, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {path:?}: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok(Tiling::from_json(&value)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(&cli.config)?;
    match cli.command {
        Command::Tile { a, b, c, field, out } => {
            let ctx = context_for(&field, &config)?;
            let a = parse_midline("a", &a, &ctx)?;
            let b = parse_midline("b", &b, &ctx)?;
            let tree = match c {
                Some(c) => {
                    let c = parse_midline("c", &c, &ctx)?;
                    tile_quadratic(&a, &b, &c)?
                }
                None => {
                    let (ar, br) = match (a.as_rational(), b.as_rational()) {
                        (Some(ar), Some(br)) => (ar.clone(), br.clone()),
                        _ => {
                            return Err(fail(
                                2,
                                "irrational midlines need a target: pass --c",
                            ))
                        }
                    };
                    tile_rational(&ctx, &ar, &br)?
                }
            };
            let tiling = realize(&tree);
            let report = verify_exact(&tiling)?;
            println!("pieces: {}", report.piece_count);
            println!("verification: {report}");
            let base = out_base(&out, &config, "tiling");
            let json = serde_json::to_string_pretty(&tiling.to_json())
                .expect("tiling JSON is always serializable");
            write_file(&base.with_extension("json"), &json)?;
            write_file(
                &base.with_extension("svg"),
                &to_svg(&tiling, &SvgOptions::default()),
            )?;
            if report.pass() {
                Ok(())
            } else {
                Err(fail(1, "verification failed"))
            }
        }
        Command::Verify { file } => {
            let tiling = read_tiling(&file)?;
            let report = verify_exact(&tiling)?;
            println!("{report}");
            if report.pass() {
                Ok(())
            } else {
                Err(fail(1, "verification failed"))
            }
        }
        Command::Circuit { file, out } => {
            let tiling = read_tiling(&file)?;
            let circuit = build_circuit(&tiling)?;
            let report = verify_kenyon(&tiling)?;
            let base = out_base(&out, &config, "circuit");
            let json = serde_json::to_string_pretty(&circuit.to_json())
                .expect("circuit JSON is always serializable");
            write_file(&base.with_extension("json"), &json)?;
            write_file(&base.with_extension("dot"), &circuit.to_dot())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report.to_json())
                    .expect("report JSON is always serializable")
            );
            if report.pass() {
                Ok(())
            } else {
                Err(fail(1, "network check failed"))
            }
        }
        Command::Check { a, b, field } => {
            let ctx = context_for(&field, &config)?;
            let a = parse_midline("a", &a, &ctx)?;
            let b = parse_midline("b", &b, &ctx)?;
            let report = check_conditions_with(&a, &b, config.precision_cap, config.e_max)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report.to_json())
                    .expect("report JSON is always serializable")
            );
            let failed = report.cond_i == CondVerdict::Fails
                || report.cond_ii == CondVerdict::Fails
                || report.cond_iii == CondIii::Fails;
            if failed {
                Err(fail(1, "a necessary condition fails"))
            } else if report.cond_iii == CondIii::Unknown {
                Err(fail(3, "condition (iii) undecided at the configured precision"))
            } else {
                Ok(())
            }
        }
        Command::Sequence { a, n, field } => {
            let ctx = context_for(&field, &config)?;
            let a = parse_midline("a", &a, &ctx)?;
            let sequence = proposition_last_sequence(&a, n)?;
            for (i, (b, tree)) in sequence.iter().enumerate() {
                let report = check_conditions_with(&a, b, config.precision_cap, config.e_max)?;
                let certificate = match report.cond_iii {
                    CondIii::Equality { p, q } => format!("EQUALITY({p},{q})"),
                    ref other => format!("{other:?}"),
                };
                println!(
                    "b_{} = {}  pieces = {}  {}",
                    i + 1,
                    format_qnum(b),
                    tree.piece_count(),
                    certificate
                );
            }
            Ok(())
        }
        Command::Plot { a, levels, field, out } => {
            let ctx = context_for(&field, &config)?;
            let a = parse_midline("a", &a, &ctx)?;
            let levels = levels
                .iter()
                .map(|text| {
                    let t = text.trim();
                    if t.eq_ignore_ascii_case("inf") {
                        Ok(Level::Infinite)
                    } else {
                        Ok(Level::Finite(parse_rational(t)?))
                    }
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let svg = plot_plane(&a, &levels, &PlotOptions::default())?;
            let base = out_base(&out, &config, "plane");
            write_file(&base.with_extension("svg"), &svg)
        }
    }
}
