//! Seeded Monte Carlo study engine.
//!
//! Each replicate draws independent unit-variance normal statistics, with
//! mean 0 for the true nulls and mean `effect` for the false nulls, turns
//! them into two-sided p-values and runs every requested procedure on the
//! same family. Replicates are pure functions of (seed, replicate index),
//! and the per-procedure aggregates merge exactly, so results do not
//! depend on thread count or batching.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    per_replicate_indicators, tabulate_confusion, ConfusionCounts, RateAccumulator, RateEstimates,
    TruthLabels,
};
use crate::normal::two_sided_p;
use crate::procedures::Procedure;
use crate::pvalues::{PValueVector, SignificanceLevel};
use crate::rng::{derive_seed, CounterRng, SHUFFLE_LANE};

pub const DEFAULT_SEED: u64 = 0x5EED_F00D;
pub const DEFAULT_EFFECT: f64 = 3.0;
pub const DEFAULT_REPLICATES: usize = 20_000;
pub const DEFAULT_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub m: usize,
    pub m0: usize,
    pub effect: f64,
    pub level: SignificanceLevel,
    pub n_replicates: usize,
    pub seed: u64,
    pub procedures: Vec<Procedure>,
}

impl SimConfig {
    /// `m` hypotheses of which `m0` are true nulls; everything else at its
    /// default.
    pub fn new(m: usize, m0: usize) -> Self {
        Self {
            m,
            m0,
            effect: DEFAULT_EFFECT,
            level: SignificanceLevel::new(DEFAULT_LEVEL).expect("default level"),
            n_replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            procedures: Procedure::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.m >= SHUFFLE_LANE as usize {
            return Err(Error::InvalidConfig(format!("m = {} is too large", self.m)));
        }
        if self.m0 > self.m {
            return Err(Error::InvalidConfig(format!(
                "m0 = {} exceeds m = {}",
                self.m0, self.m
            )));
        }
        if !(self.effect.is_finite() && self.effect >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "effect must be finite and nonnegative, got {}",
                self.effect
            )));
        }
        if self.n_replicates < 2 {
            return Err(Error::TooFewReplicates(self.n_replicates));
        }
        if self.procedures.is_empty() {
            return Err(Error::InvalidConfig("no procedures requested".into()));
        }
        for (i, p) in self.procedures.iter().enumerate() {
            if self.procedures[..i].contains(p) {
                return Err(Error::InvalidConfig(format!("procedure {p} listed twice")));
            }
        }
        Ok(())
    }
}

/// Draw replicate `replicate_index` of the study: p-values and the truth
/// labels they were generated under.
pub fn generate_replicate(
    config: &SimConfig,
    replicate_index: usize,
) -> Result<(PValueVector, TruthLabels)> {
    config.validate()?;
    if replicate_index >= config.n_replicates {
        return Err(Error::InvalidConfig(format!(
            "replicate index {replicate_index} out of range for {} replicates",
            config.n_replicates
        )));
    }
    Ok(draw_replicate(config, replicate_index as u64))
}

fn draw_replicate(config: &SimConfig, replicate: u64) -> (PValueVector, TruthLabels) {
    let rng = CounterRng::new(config.seed);
    let m = config.m;

    let mut is_null: Vec<bool> = (0..m).map(|i| i < config.m0).collect();
    for i in (1..m).rev() {
        let j = rng.below(replicate, SHUFFLE_LANE, i as u32, i as u64 + 1) as usize;
        is_null.swap(i, j);
    }

    let p: Vec<f64> = is_null
        .iter()
        .enumerate()
        .map(|(i, &null)| {
            let shift = if null { 0.0 } else { config.effect };
            two_sided_p(rng.standard_normal(replicate, i as u32, 0) + shift)
        })
        .collect();

    (
        PValueVector::new(p).expect("generated p-values lie in [0, 1]"),
        TruthLabels::new(is_null).expect("m >= 1"),
    )
}

/// Confusion counts of every configured procedure on one replicate, in
/// the order of `config.procedures`.
pub fn run_replicate(config: &SimConfig, replicate_index: usize) -> Result<Vec<ConfusionCounts>> {
    let (p, truth) = generate_replicate(config, replicate_index)?;
    Ok(tabulate_all(config, &p, &truth))
}

fn tabulate_all(config: &SimConfig, p: &PValueVector, truth: &TruthLabels) -> Vec<ConfusionCounts> {
    config
        .procedures
        .iter()
        .map(|proc_| {
            let rejected = proc_.reject(p, config.level);
            tabulate_confusion(&rejected, truth).expect("same family size")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureResult {
    pub procedure: Procedure,
    #[serde(flatten)]
    pub estimates: RateEstimates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: SimConfig,
    pub replicates: u64,
    pub results: Vec<ProcedureResult>,
}

impl StudyResult {
    pub fn get(&self, procedure: Procedure) -> Option<&RateEstimates> {
        self.results
            .iter()
            .find(|r| r.procedure == procedure)
            .map(|r| &r.estimates)
    }
}

/// Execution knobs that never change results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
    /// Replicates aggregated per task before merging.
    pub batch_size: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            batch_size: 512,
        }
    }
}

pub fn run_study(config: &SimConfig) -> Result<StudyResult> {
    run_study_with(config, &RunOptions::default())
}

pub fn run_study_with(config: &SimConfig, options: &RunOptions) -> Result<StudyResult> {
    config.validate()?;
    let n = config.n_replicates;
    let batch = options.batch_size.max(1);
    let batches: Vec<(usize, usize)> = (0..n)
        .step_by(batch)
        .map(|start| (start, (start + batch).min(n)))
        .collect();

    let run_batch = |&(start, end): &(usize, usize)| {
        let mut accs = vec![RateAccumulator::new(); config.procedures.len()];
        for rep in start..end {
            let (p, truth) = draw_replicate(config, rep as u64);
            for (acc, counts) in accs.iter_mut().zip(tabulate_all(config, &p, &truth)) {
                acc.push(&per_replicate_indicators(&counts));
            }
        }
        accs
    };
    let merge = |mut a: Vec<RateAccumulator>, b: Vec<RateAccumulator>| {
        a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y));
        a
    };
    let empty = || vec![RateAccumulator::new(); config.procedures.len()];

    let accs = if options.threads == 1 {
        batches.iter().map(run_batch).fold(empty(), merge)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| batches.par_iter().map(run_batch).reduce(empty, merge))
    };

    let results = config
        .procedures
        .iter()
        .zip(&accs)
        .map(|(&procedure, acc)| {
            Ok(ProcedureResult {
                procedure,
                estimates: acc.finish()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(StudyResult {
        config: config.clone(),
        replicates: n as u64,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M,
    M0Fraction,
    Level,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::M0Fraction => "m0_fraction",
            SweepAxis::Level => "level",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(SweepAxis::M),
            "m0_fraction" => Ok(SweepAxis::M0Fraction),
            "level" => Ok(SweepAxis::Level),
            other => Err(Error::InvalidAxis(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub result: StudyResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

/// Configuration of sweep point `index` with the swept parameter set to
/// `value`. Sweeping `m` keeps the base null fraction m0/m; every point
/// gets its own seed derived from the base seed and the point index.
pub fn point_config(
    base: &SimConfig,
    axis: SweepAxis,
    value: f64,
    index: usize,
) -> Result<SimConfig> {
    let mut cfg = base.clone();
    cfg.seed = derive_seed(base.seed, index as u64);
    match axis {
        SweepAxis::M => {
            if !(value >= 1.0 && value.fract() == 0.0 && value < SHUFFLE_LANE as f64) {
                return Err(Error::InvalidConfig(format!(
                    "m must be a positive integer, got {value}"
                )));
            }
            let fraction = if base.m == 0 {
                0.0
            } else {
                base.m0 as f64 / base.m as f64
            };
            cfg.m = value as usize;
            cfg.m0 = (fraction * value).round() as usize;
        }
        SweepAxis::M0Fraction => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidConfig(format!(
                    "m0_fraction must lie in [0, 1], got {value}"
                )));
            }
            cfg.m0 = (value * base.m as f64).round() as usize;
        }
        SweepAxis::Level => cfg.level = SignificanceLevel::new(value)?,
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep(base: &SimConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepResult> {
    sweep_with(base, axis, values, &RunOptions::default())
}

pub fn sweep_with(
    base: &SimConfig,
    axis: SweepAxis,
    values: &[f64],
    options: &RunOptions,
) -> Result<SweepResult> {
    if values.is_empty()
        || values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::NotIncreasing);
    }
    let at = |value: f64| {
        move |e: Error| Error::AtPoint {
            value,
            source: Box::new(e),
        }
    };
    // validate every point before spending time on any of them
    let configs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| point_config(base, axis, v, i).map_err(at(v)))
        .collect::<Result<Vec<_>>>()?;
    let points = values
        .iter()
        .zip(&configs)
        .map(|(&value, cfg)| {
            Ok(SweepPoint {
                value,
                result: run_study_with(cfg, options).map_err(at(value))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axis, points })
}
