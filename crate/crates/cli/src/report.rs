//! Output documents. JSON goes through serde_json (shortest round-trip
//! floats); TSV uses `f64`'s `Display`, which is also shortest round-trip.

use std::fmt::Write as _;

use fdr_core::{
    adjust, PValueVector, Procedure, RateEstimates, SignificanceLevel, SimConfig, StudyResult,
    SweepResult,
};
use serde::Serialize;

use crate::input::{Column, InputFormat};

pub const TOOL: &str = "fdrctl";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub path: String,
    pub format: InputFormat,
    pub column: Option<Column>,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub p: f64,
    pub adjusted: f64,
    /// Absent for adjustment-only reports.
    pub rejected: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: Procedure,
    pub level: Option<f64>,
    pub cutoff_rank: Option<usize>,
    pub cutoff_threshold: Option<f64>,
    pub n_rejected: Option<usize>,
    pub rows: Vec<Row>,
}

impl MethodReport {
    pub fn rejection(p: &PValueVector, method: Procedure, level: SignificanceLevel) -> Self {
        let rejected = method.reject(p, level);
        let adjusted = adjust(p, method);
        Self {
            method,
            level: Some(level.value()),
            cutoff_rank: Some(rejected.cutoff_rank()),
            cutoff_threshold: rejected.cutoff_threshold(),
            n_rejected: Some(rejected.count()),
            rows: (0..p.len())
                .map(|i| Row {
                    index: i,
                    p: p.get(i),
                    adjusted: adjusted.values()[i],
                    rejected: Some(rejected.is_rejected(i)),
                })
                .collect(),
        }
    }

    pub fn adjustment(p: &PValueVector, method: Procedure) -> Self {
        let adjusted = adjust(p, method);
        Self {
            method,
            level: None,
            cutoff_rank: None,
            cutoff_threshold: None,
            n_rejected: None,
            rows: (0..p.len())
                .map(|i| Row {
                    index: i,
                    p: p.get(i),
                    adjusted: adjusted.values()[i],
                    rejected: None,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputEcho,
    pub level: Option<f64>,
    pub reports: Vec<MethodReport>,
}

impl ReportDocument {
    pub fn new(
        command: &'static str,
        input: InputEcho,
        level: Option<f64>,
        reports: Vec<MethodReport>,
    ) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            input,
            level,
            reports,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if self.level.is_some() {
            out.push_str(
                "method\tlevel\tindex\tp\tadjusted\trejected\tcutoff_rank\tcutoff_threshold\n",
            );
            for r in &self.reports {
                for row in &r.rows {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        r.method,
                        opt(r.level),
                        row.index,
                        row.p,
                        row.adjusted,
                        row.rejected.unwrap_or(false),
                        r.cutoff_rank.unwrap_or(0),
                        opt(r.cutoff_threshold),
                    );
                }
            }
        } else {
            out.push_str("method\tindex\tp\tadjusted\n");
            for r in &self.reports {
                for row in &r.rows {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}",
                        r.method, row.index, row.p, row.adjusted
                    );
                }
            }
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyDocument<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(flatten)]
    pub study: &'a StudyResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepDocument<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub base_config: &'a SimConfig,
    #[serde(flatten)]
    pub sweep: &'a SweepResult,
}

const RATE_COLUMNS: &str = "fdr\tse_fdr\tfwer\tse_fwer\tpcer\tse_pcer\tpower\tse_power";

fn rate_fields(e: &RateEstimates) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        e.fdr,
        e.se_fdr,
        e.fwer,
        e.se_fwer,
        e.pcer,
        e.se_pcer,
        opt(e.power),
        opt(e.se_power)
    )
}

pub fn study_json(study: &StudyResult) -> String {
    to_json(&StudyDocument {
        tool: TOOL,
        version: VERSION,
        command: "simulate",
        study,
    })
}

pub fn study_tsv(study: &StudyResult) -> String {
    let mut out = format!("procedure\t{RATE_COLUMNS}\n");
    for r in &study.results {
        let _ = writeln!(out, "{}\t{}", r.procedure, rate_fields(&r.estimates));
    }
    out
}

pub fn sweep_json(base: &SimConfig, sweep: &SweepResult) -> String {
    to_json(&SweepDocument {
        tool: TOOL,
        version: VERSION,
        command: "sweep",
        base_config: base,
        sweep,
    })
}

/// Long-form table: one row per (point, procedure), points ascending.
pub fn sweep_tsv(sweep: &SweepResult) -> String {
    let mut out = format!("axis_value\tprocedure\t{RATE_COLUMNS}\n");
    for point in &sweep.points {
        for r in &point.result.results {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                point.value,
                r.procedure,
                rate_fields(&r.estimates)
            );
        }
    }
    out
}
