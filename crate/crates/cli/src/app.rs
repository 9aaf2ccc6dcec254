use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdr_core::simulation::{DEFAULT_EFFECT, DEFAULT_LEVEL, DEFAULT_REPLICATES, DEFAULT_SEED};
use fdr_core::{
    run_study_with, sweep_with, PValueVector, Procedure, RunOptions, SignificanceLevel, SimConfig,
    SweepAxis,
};
use thiserror::Error;

use crate::input::{parse_pvalue_file, Column, InputError, InputFormat};
use crate::report::{self, InputEcho, MethodReport, ReportDocument};

pub const THREADS_ENV: &str = "FDRCTL_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag values; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid input data; exit code 1.
    #[error(transparent)]
    Data(#[from] InputError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fdrctl",
    version,
    about = "Multiple-testing corrections and FDR/FWER simulation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply rejection procedures to a file of p-values.
    Reject(RejectArgs),
    /// Compute adjusted p-values.
    Adjust(AdjustArgs),
    /// Run a Monte Carlo study of FDR, FWER, PCER and power.
    Simulate(SimulateArgs),
    /// Repeat a study across values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Tsv,
}

/// A single procedure or every procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodChoice(pub Vec<Procedure>);

fn parse_method(s: &str) -> Result<MethodChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(MethodChoice(Procedure::ALL.to_vec()));
    }
    s.parse::<Procedure>()
        .map(|p| MethodChoice(vec![p]))
        .map_err(|_| {
            format!("unknown method `{s}` (expected unadjusted, bonferroni, sidak, holm, hochberg, bh or all)")
        })
}

/// Comma-separated procedures for a study.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureList(pub Vec<Procedure>);

fn parse_procedures(s: &str) -> Result<ProcedureList, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ProcedureList(Procedure::ALL.to_vec()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<Procedure>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(ProcedureList)
}

fn parse_level(s: &str) -> Result<SignificanceLevel, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    SignificanceLevel::new(v).map_err(|e| e.to_string())
}

/// Comma-separated sweep values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueList(pub Vec<f64>);

fn parse_values(s: &str) -> Result<ValueList, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        })
        .collect::<Result<_, _>>()
        .map(ValueList)
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// File of p-values.
    pub input: PathBuf,
    /// Input layout; inferred from the file extension when omitted.
    #[arg(long = "input-format", value_enum)]
    pub input_format: Option<InputFormat>,
    /// Column holding the p-values (0-based index or header name) for csv/tsv.
    #[arg(long)]
    pub column: Option<Column>,
}

impl InputArgs {
    fn load(&self) -> Result<(PValueVector, InputEcho), CliError> {
        let format = self
            .input_format
            .unwrap_or_else(|| InputFormat::infer(&self.input));
        let p = parse_pvalue_file(&self.input, format, self.column.as_ref())?;
        let echo = InputEcho {
            path: self.input.display().to_string(),
            format,
            column: self.column.clone(),
            m: p.len(),
        };
        Ok((p, echo))
    }
}

#[derive(Debug, Args)]
pub struct RejectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "bh", value_parser = parse_method)]
    pub method: MethodChoice,
    /// FWER level α or FDR level q, strictly between 0 and 1.
    #[arg(long, default_value_t = SignificanceLevel::new(DEFAULT_LEVEL).unwrap(), value_parser = parse_level)]
    pub level: SignificanceLevel,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct AdjustArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "bh", value_parser = parse_method)]
    pub method: MethodChoice,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Number of hypotheses per family.
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// Number of true nulls; defaults to m (the complete null).
    #[arg(long)]
    pub m0: Option<usize>,
    /// Mean shift of the false-null statistics, in standard deviations.
    #[arg(long, default_value_t = DEFAULT_EFFECT)]
    pub effect: f64,
    #[arg(long, default_value_t = SignificanceLevel::new(DEFAULT_LEVEL).unwrap(), value_parser = parse_level)]
    pub level: SignificanceLevel,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated procedures, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_procedures)]
    pub procedures: ProcedureList,
}

impl StudyArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            m: self.m,
            m0: self.m0.unwrap_or(self.m),
            effect: self.effect,
            level: self.level,
            n_replicates: self.replicates,
            seed: self.seed,
            procedures: self.procedures.0.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to sweep: m, m0_fraction or level.
    #[arg(long, value_parser = |s: &str| s.parse::<SweepAxis>().map_err(|e| e.to_string()))]
    pub axis: SweepAxis,
    /// Comma-separated, strictly increasing values.
    #[arg(long, value_parser = parse_values)]
    pub values: ValueList,
    #[command(flatten)]
    pub study: StudyArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
    pub format: OutputFormat,
}

fn run_options() -> Result<RunOptions, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a nonnegative integer, got `{v}`"
            ))
        })?,
        _ => 0,
    };
    Ok(RunOptions {
        threads,
        ..RunOptions::default()
    })
}

/// Execute a parsed command and return what it prints on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Reject(args) => {
            let (p, echo) = args.input.load()?;
            let reports = args
                .method
                .0
                .iter()
                .map(|&m| MethodReport::rejection(&p, m, args.level))
                .collect();
            let doc = ReportDocument::new("reject", echo, Some(args.level.value()), reports);
            Ok(render(&doc, args.format))
        }
        Command::Adjust(args) => {
            let (p, echo) = args.input.load()?;
            let reports = args
                .method
                .0
                .iter()
                .map(|&m| MethodReport::adjustment(&p, m))
                .collect();
            let doc = ReportDocument::new("adjust", echo, None, reports);
            Ok(render(&doc, args.format))
        }
        Command::Simulate(args) => {
            let config = args.study.config();
            let study = run_study_with(&config, &run_options()?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(match args.format {
                OutputFormat::Json => report::study_json(&study),
                OutputFormat::Tsv => report::study_tsv(&study),
            })
        }
        Command::Sweep(args) => {
            let base = args.study.config();
            let result = sweep_with(&base, args.axis, &args.values.0, &run_options()?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(match args.format {
                OutputFormat::Json => report::sweep_json(&base, &result),
                OutputFormat::Tsv => report::sweep_tsv(&result),
            })
        }
    }
}

fn render(doc: &ReportDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => doc.to_json(),
        OutputFormat::Tsv => doc.to_tsv(),
    }
}
