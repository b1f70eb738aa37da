//! Batch command-line surface. Every command runs its independent cross-check
//! when the size budget allows and reports the outcome in its exit status:
//! 0 when all checks pass, 2 on a mismatch, 1 on usage or input errors.

mod commands;
mod config;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::format::{fmt_float, round_sig};
use crate::network::NetworkConfig;
use crate::quantum::Scheme;

pub use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "netbell",
    version,
    about = "Bell inequalities on star networks of GHZ sources"
)]
pub struct Cli {
    /// JSON file with network and run parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel grids and trials.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NetworkArgs {
    /// Number of sources.
    #[arg(long)]
    pub n: Option<usize>,
    /// Branch size of a homogeneous network.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Comma-separated branch sizes, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    pub branches: Option<Vec<usize>>,
    /// Branch measurements: xy or rotated.
    #[arg(long)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalMode {
    DFamily,
    Sample,
    Enumerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepGrid {
    /// `θ₁ = π/2 − θ₀`.
    Diagonal,
    /// Every `(θ₀, θ₁)` pair.
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulated Bell value against its closed form and the classical bound.
    Violate {
        #[command(flatten)]
        net: NetworkArgs,
        /// Also write the simulated correlation table as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Bell value over measurement angles (value does not depend on n).
    Sweep {
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Grid points per angle axis.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_enum)]
        grid: Option<SweepGrid>,
    },
    /// Critical visibility: closed form and bisection on simulated tables.
    Noise {
        #[command(flatten)]
        net: NetworkArgs,
    },
    /// Classical models: saturating family, random sampling or enumeration.
    Classical {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum)]
        mode: ClassicalMode,
        #[arg(long)]
        trials: Option<usize>,
        /// Hidden values per source for sampled models.
        #[arg(long)]
        lattice: Option<usize>,
        /// Grid points for the saturating family.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Slice of the classical K-space region for L = 2.
    Region {
        #[command(flatten)]
        net: NetworkArgs,
        /// Target value of the fixed entry.
        #[arg(long)]
        value: Option<f64>,
        /// Mask of the fixed subset (3 is {1,2}).
        #[arg(long)]
        fixed: Option<u32>,
        /// Grid points per probability axis.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// GHZ-basis measurement at the centre, compared with the separable one.
    Swap {
        #[command(flatten)]
        net: NetworkArgs,
        /// JSON conditioning {"mask": {"bit": i} | {"parity": [i, ...]}}.
        #[arg(long)]
        conditioning: Option<PathBuf>,
    },
    /// Closed-form bounds, predictions and thresholds.
    Bound {
        #[command(flatten)]
        net: NetworkArgs,
    },
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<NetworkConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Result of a command: either a flat report or a list of rows.
#[derive(Debug, Clone)]
pub enum Body {
    Report(Map<String, Value>),
    Rows {
        header: Vec<String>,
        rows: Vec<Vec<f64>>,
        /// Comment line written before the CSV header.
        comment: Option<String>,
    },
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub run: RunSpec,
    pub body: Body,
    pub warnings: Vec<String>,
    pub exit: i32,
}

pub(crate) fn num(x: f64) -> Value {
    Value::from(round_sig(x))
}

impl Outcome {
    pub fn render(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match (&self.body, self.run.format) {
            (Body::Report(fields), Format::Json) => {
                let mut obj = Map::new();
                obj.insert("run".into(), serde_json::to_value(&self.run)?);
                obj.extend(fields.clone());
                obj.insert("warnings".into(), Value::from(self.warnings.clone()));
                serde_json::to_writer_pretty(&mut buf, &obj)?;
                buf.push(b'\n');
            }
            (Body::Report(fields), Format::Csv) => {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["field", "value"])?;
                for (k, v) in fields {
                    let text = match v {
                        Value::Number(x) => fmt_float(x.as_f64().unwrap_or(f64::NAN)),
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), text.as_str()])?;
                }
                for warning in &self.warnings {
                    w.write_record(["warning", warning.as_str()])?;
                }
                w.flush()?;
            }
            (Body::Rows { header, rows, .. }, Format::Json) => {
                let points: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            header
                                .iter()
                                .cloned()
                                .zip(r.iter().map(|&x| num(x)))
                                .collect(),
                        )
                    })
                    .collect();
                let mut obj = Map::new();
                obj.insert("run".into(), serde_json::to_value(&self.run)?);
                obj.insert("points".into(), Value::from(points));
                obj.insert("warnings".into(), Value::from(self.warnings.clone()));
                serde_json::to_writer_pretty(&mut buf, &obj)?;
                buf.push(b'\n');
            }
            (
                Body::Rows {
                    header,
                    rows,
                    comment,
                },
                Format::Csv,
            ) => {
                if let Some(c) = comment {
                    writeln!(buf, "# {c}")?;
                }
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(header)?;
                for r in rows {
                    w.write_record(r.iter().map(|&x| fmt_float(x)))?;
                }
                w.flush()?;
            }
        }
        Ok(buf)
    }
}

fn write_output(outcome: &Outcome) -> Result<()> {
    let bytes = outcome.render()?;
    match &outcome.run.out {
        Some(path) => File::create(path)?.write_all(&bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let result = config::load(cli.config.as_deref()).and_then(|file| commands::run(&cli, &file));
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if let Err(e) = write_output(&outcome) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            outcome.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}
