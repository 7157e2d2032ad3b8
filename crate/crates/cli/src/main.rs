//! `boatset`: posterior mean bounds, imprecision, credibility unions and
//! `s`-sweeps for sets of Beta priors.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when a numerical
//! routine fails. Errors writing the output give 1.

mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use boatset::oracle::{grid_credibility_union, grid_shadow, GridSpec};
use boatset::params::{canonical_to_eta, eta_to_canonical, update_eta};
use boatset::shapes::validate;
use boatset::sweep::{s_grid, sweep};
use boatset::touchpoint::{agreement_thresholds, shadow_with, terminal_slopes};
use boatset::inference::credibility_union_with;
use boatset::{BinomialData, CanonicalParams, EtaPoint, Execution, PriorShape};
use clap::{Args, Parser, Subcommand};

use config::{Record, ShapeArgs};
use table::{Cell, Format, Table};

/// Grid resolution used by `--verify` for credibility unions, where every
/// grid point costs two Beta quantiles.
const CREDIBILITY_GRID: usize = 200;

#[derive(Debug)]
pub enum CliError {
    Core(boatset::Error),
    Input(String),
    Output(std::io::Error),
}

impl From<boatset::Error> for CliError {
    fn from(e: boatset::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_validation() => 3,
            CliError::Core(_) | CliError::Input(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(msg) => f.write_str(msg),
            CliError::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "boatset", version, about = "Robust Bayesian inference with sets of Beta priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to PATH instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Evaluate sequentially on the calling thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also report brute-force grid values and the disagreement
    #[arg(long)]
    verify: bool,
    /// Grid resolution per axis for --verify
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior mean bounds, imprecision, touchpoints and phase for one (n, s)
    Bounds {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bounds for every s in a range at fixed n, in ascending s
    Sweep {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        n: Option<f64>,
        /// Default 0
        #[arg(long)]
        s_min: Option<f64>,
        /// Default n
        #[arg(long)]
        s_max: Option<f64>,
        /// Default 1
        #[arg(long)]
        s_step: Option<f64>,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Union of central credibility intervals over the posterior set
    Credibility {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        n: Option<f64>,
        /// Single s; without it the s_min/s_max/s_step range is used
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long)]
        s_step: Option<f64>,
        /// Credibility level, default 0.5
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Agreement thresholds and terminal slopes of an axial boatshape
    Thresholds {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        n: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convert between (n0, y0) and (eta0, eta1), optionally updating with data
    Transform {
        #[arg(long, allow_hyphen_values = true, requires = "y0", conflicts_with_all = ["eta0", "eta1"])]
        n0: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "n0")]
        y0: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "eta1")]
        eta0: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "eta0")]
        eta1: Option<f64>,
        #[arg(long, requires = "s")]
        n: Option<f64>,
        #[arg(long, requires = "n")]
        s: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check that a shape lies inside the domain
    Validate {
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn exec(output: &OutputArgs) -> Execution {
    if output.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn grid_spec(record: &Record, verify: &VerifyArgs, default: usize, exec: Execution) -> Result<GridSpec, CliError> {
    let resolution = match verify.grid {
        Some(g) => g,
        None => match record.number("grid")? {
            Some(g) if g >= 0.0 && g.fract() == 0.0 => g as usize,
            Some(g) => return Err(CliError::Input(format!("grid must be a positive integer (got {g})"))),
            None => default,
        },
    };
    Ok(GridSpec::new(resolution)?.with_execution(exec))
}

fn s_values(record: &Record, n: f64) -> Result<Vec<f64>, CliError> {
    let s_min = record.number("s_min")?.unwrap_or(0.0);
    let s_max = record.number("s_max")?.unwrap_or(n);
    let s_step = record.number("s_step")?.unwrap_or(1.0);
    Ok(s_grid(s_min, s_max, s_step)?)
}

fn emit(table: &Table, output: &OutputArgs) -> Result<(), CliError> {
    let text = table.render(output.format);
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Output),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::Output),
    }
}

fn phase_label(p: Option<boatset::LearningPhase>) -> Cell {
    Cell::from(p.map(|p| p.label()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { shape, n, s, verify, output } => {
            let record = Record::load(&shape, &[("n", n), ("s", s)])?;
            let set = record.set()?;
            let d = BinomialData::new(record.required("n")?, record.required("s")?)?;
            let post = set.updated(&d);
            let sh = shadow_with(&post, exec(&output))?;
            let mut cols = vec!["n", "s", "y_lo", "y_hi", "delta", "tp_lo", "tp_hi", "phase"];
            let mut row = vec![
                Cell::from(d.n()),
                Cell::from(d.s()),
                Cell::from(sh.y_lo),
                Cell::from(sh.y_hi),
                Cell::from(sh.delta()),
                Cell::from(sh.tp_lo),
                Cell::from(sh.tp_hi),
                phase_label(sh.phase),
            ];
            if verify.verify {
                let g = grid_spec(&record, &verify, GridSpec::default().resolution(), exec(&output))?;
                let (lo, hi) = grid_shadow(&post, &g)?;
                cols.extend(["oracle_y_lo", "oracle_y_hi", "abs_err"]);
                row.extend([
                    Cell::from(lo),
                    Cell::from(hi),
                    Cell::from((lo - sh.y_lo).abs().max((hi - sh.y_hi).abs())),
                ]);
            }
            let mut table = Table::new(&cols);
            table.push(row);
            emit(&table, &output)
        }
        Command::Sweep { shape, n, s_min, s_max, s_step, verify, output } => {
            let record = Record::load(&shape, &[("n", n), ("s_min", s_min), ("s_max", s_max), ("s_step", s_step)])?;
            let set = record.set()?;
            let n = record.required("n")?;
            let values = s_values(&record, n)?;
            let result = sweep(&set, n, &values, exec(&output))?;
            let (s_u, s_l) = match result.thresholds {
                Some(t) => (Some(t.s_u), Some(t.s_l)),
                None => (None, None),
            };
            let mut cols = vec!["s", "y_lo", "y_hi", "delta", "phase", "s_u", "s_l"];
            let grid = if verify.verify {
                cols.extend(["oracle_y_lo", "oracle_y_hi", "abs_err"]);
                Some(grid_spec(&record, &verify, GridSpec::default().resolution(), exec(&output))?)
            } else {
                None
            };
            let mut table = Table::new(&cols);
            for r in &result.rows {
                let mut row = vec![
                    Cell::from(r.s),
                    Cell::from(r.y_lo),
                    Cell::from(r.y_hi),
                    Cell::from(r.delta),
                    phase_label(r.phase),
                    Cell::from(s_u),
                    Cell::from(s_l),
                ];
                if let Some(g) = &grid {
                    let (lo, hi) = grid_shadow(&set.updated(&BinomialData::new(n, r.s)?), g)?;
                    row.extend([
                        Cell::from(lo),
                        Cell::from(hi),
                        Cell::from((lo - r.y_lo).abs().max((hi - r.y_hi).abs())),
                    ]);
                }
                table.push(row);
            }
            emit(&table, &output)
        }
        Command::Credibility { shape, n, s, s_min, s_max, s_step, gamma, verify, output } => {
            let record = Record::load(
                &shape,
                &[("n", n), ("s", s), ("s_min", s_min), ("s_max", s_max), ("s_step", s_step), ("gamma", gamma)],
            )?;
            let set = record.set()?;
            let n = record.required("n")?;
            let gamma = record.number("gamma")?.unwrap_or(0.5);
            let values = match record.number("s")? {
                Some(s) => vec![s],
                None => s_values(&record, n)?,
            };
            let mut cols = vec!["n", "s", "gamma", "lo", "hi", "length"];
            let grid = if verify.verify {
                cols.extend(["oracle_lo", "oracle_hi", "abs_err"]);
                Some(grid_spec(&record, &verify, CREDIBILITY_GRID, exec(&output))?)
            } else {
                None
            };
            let mut table = Table::new(&cols);
            for s in values {
                let d = BinomialData::new(n, s)?;
                let u = credibility_union_with(&set, &d, gamma, exec(&output))?;
                let mut row = vec![
                    Cell::from(n),
                    Cell::from(s),
                    Cell::from(gamma),
                    Cell::from(u.lo),
                    Cell::from(u.hi),
                    Cell::from(u.length()),
                ];
                if let Some(g) = &grid {
                    let o = grid_credibility_union(&set, &d, gamma, g)?;
                    row.extend([
                        Cell::from(o.lo),
                        Cell::from(o.hi),
                        Cell::from((o.lo - u.lo).abs().max((o.hi - u.hi).abs())),
                    ]);
                }
                table.push(row);
            }
            emit(&table, &output)
        }
        Command::Thresholds { shape, n, output } => {
            let record = Record::load(&shape, &[("n", n)])?;
            let set = record.set()?;
            let PriorShape::Boat(spec) = set.shape() else {
                return Err(CliError::Input(format!(
                    "thresholds need kind=boat (got {})",
                    set.shape().kind()
                )));
            };
            let n = record.required("n")?;
            let t = agreement_thresholds(spec, n)?;
            let (happy_lo, happy_hi) = t.happy_interval(n);
            let (up, down) = terminal_slopes(spec, n);
            let mut table = Table::new(&["n", "s_u", "s_l", "happy_lo", "happy_hi", "slope_upper", "slope_lower"]);
            table.push(vec![
                Cell::from(n),
                Cell::from(t.s_u),
                Cell::from(t.s_l),
                Cell::from(happy_lo),
                Cell::from(happy_hi),
                Cell::from(up),
                Cell::from(down),
            ]);
            emit(&table, &output)
        }
        Command::Transform { n0, y0, eta0, eta1, n, s, output } => {
            let prior = match (n0, y0, eta0, eta1) {
                (Some(n0), Some(y0), _, _) => canonical_to_eta(&CanonicalParams::new(n0, y0)?)?,
                (_, _, Some(e0), Some(e1)) => EtaPoint::new(e0, e1)?,
                _ => return Err(CliError::Input("give either --n0 and --y0 or --eta0 and --eta1".into())),
            };
            let mut table = Table::new(&["stage", "n0", "y0", "eta0", "eta1"]);
            let mut push = |stage: &str, p: &EtaPoint| -> Result<(), CliError> {
                let c = eta_to_canonical(p)?;
                table.push(vec![
                    Cell::from(stage),
                    Cell::from(c.n0()),
                    Cell::from(c.y0()),
                    Cell::from(p.eta0()),
                    Cell::from(p.eta1()),
                ]);
                Ok(())
            };
            push("prior", &prior)?;
            if let (Some(n), Some(s)) = (n, s) {
                push("posterior", &update_eta(&prior, &BinomialData::new(n, s)?))?;
            }
            emit(&table, &output)
        }
        Command::Validate { shape, output } => {
            let record = Record::load(&shape, &[])?;
            let (prior, shift) = record.unchecked_shape()?;
            let report = validate(&prior, shift);
            let mut table = Table::new(&["kind", "ok", "worst_margin", "worst_eta0", "worst_eta1", "samples"]);
            table.push(vec![
                Cell::from(prior.kind()),
                Cell::from(if report.is_ok() { "true" } else { "false" }),
                Cell::from(report.worst_margin),
                Cell::from(report.worst_point.0),
                Cell::from(report.worst_point.1),
                Cell::from(report.samples as f64),
            ]);
            emit(&table, &output)?;
            if report.is_ok() {
                Ok(())
            } else {
                Err(CliError::Input(format!(
                    "shape leaves the domain: margin (eta0 + 2)/2 - |eta1| = {} at ({}, {})",
                    report.worst_margin, report.worst_point.0, report.worst_point.1
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boatset: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
