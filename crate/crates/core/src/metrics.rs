//! Confusion bookkeeping against ground truth and the error-rate estimators
//! built on it (FDR, FWER, PCER, average power).

use serde::{Deserialize, Serialize};

use crate::accumulator::MomentAccumulator;
use crate::error::{Error, Result};
use crate::procedures::RejectionSet;

/// Ground truth: which hypotheses are true nulls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthLabels {
    is_true_null: Vec<bool>,
    m0: usize,
}

impl TruthLabels {
    pub fn new(is_true_null: Vec<bool>) -> Result<Self> {
        if is_true_null.is_empty() {
            return Err(Error::EmptyInput);
        }
        let m0 = is_true_null.iter().filter(|&&t| t).count();
        Ok(Self { is_true_null, m0 })
    }

    pub fn is_true_null(&self, index: usize) -> bool {
        self.is_true_null[index]
    }

    pub fn flags(&self) -> &[bool] {
        &self.is_true_null
    }

    pub fn m(&self) -> usize {
        self.is_true_null.len()
    }

    pub fn m0(&self) -> usize {
        self.m0
    }
}

/// Outcome table of one family of tests.
///
/// | | retained | rejected | total |
/// |---|---|---|---|
/// | true null | U | V | m0 |
/// | false null | T | S | m − m0 |
/// | | m − R | R | m |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub m: usize,
    pub m0: usize,
    pub u: usize,
    pub v: usize,
    pub s: usize,
    pub t: usize,
    pub r: usize,
}

impl ConfusionCounts {
    pub fn is_consistent(&self) -> bool {
        self.u + self.v == self.m0
            && self.s + self.t == self.m - self.m0
            && self.r == self.v + self.s
            && self.m0 <= self.m
    }
}

pub fn tabulate_confusion(
    rejections: &RejectionSet,
    truth: &TruthLabels,
) -> Result<ConfusionCounts> {
    if rejections.len() != truth.m() {
        return Err(Error::LengthMismatch {
            expected: truth.m(),
            found: rejections.len(),
        });
    }
    let (mut v, mut s) = (0, 0);
    for (&rejected, &null) in rejections.rejected().iter().zip(truth.flags()) {
        match (rejected, null) {
            (true, true) => v += 1,
            (true, false) => s += 1,
            _ => {}
        }
    }
    let (m, m0) = (truth.m(), truth.m0());
    let counts = ConfusionCounts {
        m,
        m0,
        u: m0 - v,
        v,
        s,
        t: m - m0 - s,
        r: v + s,
    };
    debug_assert!(counts.is_consistent());
    Ok(counts)
}

/// Q = V/R, with Q = 0 when nothing is rejected.
pub fn false_discovery_proportion(c: &ConfusionCounts) -> f64 {
    if c.r == 0 {
        0.0
    } else {
        c.v as f64 / c.r as f64
    }
}

/// Per-replicate statistics whose means estimate FDR, FWER, PCER and power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indicators {
    pub q: f64,
    pub any_false_alarm: f64,
    pub v_over_m: f64,
    /// S/(m − m0); absent when every hypothesis is a true null.
    pub detect_rate: Option<f64>,
}

pub fn per_replicate_indicators(c: &ConfusionCounts) -> Indicators {
    let alternatives = c.m - c.m0;
    Indicators {
        q: false_discovery_proportion(c),
        any_false_alarm: if c.v >= 1 { 1.0 } else { 0.0 },
        v_over_m: c.v as f64 / c.m as f64,
        detect_rate: (alternatives > 0).then(|| c.s as f64 / alternatives as f64),
    }
}

/// Monte Carlo estimates with standard errors (sample sd / √n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimates {
    pub fdr: f64,
    pub se_fdr: f64,
    pub fwer: f64,
    pub se_fwer: f64,
    pub pcer: f64,
    pub se_pcer: f64,
    /// `None` under the complete null.
    pub power: Option<f64>,
    pub se_power: Option<f64>,
    pub n_replicates: u64,
}

/// Mergeable aggregate of [`Indicators`]. Partial aggregates over disjoint
/// replicate sets merge to a bit-identical result in any order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateAccumulator {
    q: MomentAccumulator,
    any_false_alarm: MomentAccumulator,
    v_over_m: MomentAccumulator,
    detect_rate: MomentAccumulator,
}

impl RateAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ind: &Indicators) {
        self.q.push(ind.q);
        self.any_false_alarm.push(ind.any_false_alarm);
        self.v_over_m.push(ind.v_over_m);
        if let Some(d) = ind.detect_rate {
            self.detect_rate.push(d);
        }
    }

    pub fn merge(&mut self, other: &RateAccumulator) {
        self.q.merge(&other.q);
        self.any_false_alarm.merge(&other.any_false_alarm);
        self.v_over_m.merge(&other.v_over_m);
        self.detect_rate.merge(&other.detect_rate);
    }

    pub fn n_replicates(&self) -> u64 {
        self.q.count()
    }

    pub fn finish(&self) -> Result<RateEstimates> {
        let n = self.n_replicates();
        if n < 2 {
            return Err(Error::TooFewReplicates(n as usize));
        }
        let mean_se = |acc: &MomentAccumulator| {
            (
                acc.mean().unwrap_or(0.0),
                acc.standard_error().unwrap_or(0.0),
            )
        };
        let (fdr, se_fdr) = mean_se(&self.q);
        let (fwer, se_fwer) = mean_se(&self.any_false_alarm);
        let (pcer, se_pcer) = mean_se(&self.v_over_m);
        let (power, se_power) = if self.detect_rate.count() > 0 {
            (
                self.detect_rate.mean(),
                Some(self.detect_rate.standard_error().unwrap_or(0.0)),
            )
        } else {
            (None, None)
        };
        Ok(RateEstimates {
            fdr,
            se_fdr,
            fwer,
            se_fwer,
            pcer,
            se_pcer,
            power,
            se_power,
            n_replicates: n,
        })
    }
}

pub fn aggregate_rates(indicators: &[Indicators]) -> Result<RateEstimates> {
    let mut acc = RateAccumulator::new();
    indicators.iter().for_each(|i| acc.push(i));
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::reject_unadjusted;
    use crate::pvalues::{PValueVector, SignificanceLevel};

    fn rejections(flags: &[bool]) -> RejectionSet {
        // flags -> p-values 0 (rejected) or 1 (retained) at level 0.5
        let p: Vec<f64> = flags.iter().map(|&r| if r { 0.0 } else { 1.0 }).collect();
        reject_unadjusted(
            &PValueVector::new(p).unwrap(),
            SignificanceLevel::new(0.5).unwrap(),
        )
    }

    fn counts(m: usize, m0: usize, v: usize, s: usize) -> ConfusionCounts {
        ConfusionCounts {
            m,
            m0,
            u: m0 - v,
            v,
            s,
            t: m - m0 - s,
            r: v + s,
        }
    }

    #[test]
    fn empty_rejection_set() {
        let truth = TruthLabels::new(vec![true, false, true]).unwrap();
        let c = tabulate_confusion(&rejections(&[false; 3]), &truth).unwrap();
        assert_eq!((c.v, c.s, c.r, c.u, c.t), (0, 0, 0, 2, 1));
    }

    #[test]
    fn complete_null_bookkeeping() {
        let truth = TruthLabels::new(vec![true; 3]).unwrap();
        let c = tabulate_confusion(&rejections(&[true, true, false]), &truth).unwrap();
        assert_eq!((c.v, c.s, c.r), (2, 0, 2));
    }

    #[test]
    fn mixed_enumeration() {
        let truth = TruthLabels::new(vec![true, true, false, false]).unwrap();
        let c = tabulate_confusion(&rejections(&[false, true, true, false]), &truth).unwrap();
        assert_eq!(c, counts(4, 2, 1, 1));
        assert_eq!((c.u, c.t, c.r), (1, 1, 2));
        assert!(c.is_consistent());
    }

    #[test]
    fn length_mismatch() {
        let truth = TruthLabels::new(vec![true, true]).unwrap();
        assert_eq!(
            tabulate_confusion(&rejections(&[true]), &truth),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(TruthLabels::new(vec![]), Err(Error::EmptyInput));
    }

    #[test]
    fn fdp_values() {
        assert_eq!(false_discovery_proportion(&counts(5, 5, 0, 0)), 0.0);
        assert_eq!(false_discovery_proportion(&counts(10, 5, 2, 3)), 0.4);
        assert_eq!(false_discovery_proportion(&counts(6, 6, 3, 0)), 1.0);
    }

    #[test]
    fn indicator_examples() {
        let i = per_replicate_indicators(&counts(10, 10, 1, 0));
        assert_eq!((i.q, i.any_false_alarm, i.v_over_m), (1.0, 1.0, 0.1));
        assert_eq!(i.detect_rate, None);

        let i = per_replicate_indicators(&counts(8, 4, 0, 4));
        assert_eq!((i.q, i.any_false_alarm), (0.0, 0.0));
        assert_eq!(i.detect_rate, Some(1.0));

        let i = per_replicate_indicators(&counts(4, 2, 1, 1));
        assert_eq!((i.q, i.v_over_m, i.detect_rate), (0.5, 0.25, Some(0.5)));
    }

    fn ind(q: f64) -> Indicators {
        Indicators {
            q,
            any_false_alarm: q.ceil(),
            v_over_m: q / 4.0,
            detect_rate: None,
        }
    }

    #[test]
    fn aggregate_constant_stream() {
        let r = aggregate_rates(&[ind(0.0); 50]).unwrap();
        assert_eq!((r.fdr, r.se_fdr), (0.0, 0.0));
        assert_eq!(r.power, None);
        assert_eq!(r.n_replicates, 50);
    }

    #[test]
    fn aggregate_alternating_stream() {
        let r = aggregate_rates(&[ind(0.0), ind(1.0), ind(0.0), ind(1.0)]).unwrap();
        assert_eq!(r.fdr, 0.5);
        let expected = (1.0f64 / 3.0).sqrt() / 2.0;
        assert!((r.se_fdr - expected).abs() < 1e-15);
        assert!((r.se_fdr - 0.2887).abs() < 1e-4);
        // q in {0,1} -> same stream as the false-alarm indicator
        assert_eq!(r.fdr, r.fwer);
        assert_eq!(r.se_fdr, r.se_fwer);
    }

    #[test]
    fn too_few_replicates() {
        assert_eq!(
            aggregate_rates(&[ind(0.0)]),
            Err(Error::TooFewReplicates(1))
        );
        assert_eq!(aggregate_rates(&[]), Err(Error::TooFewReplicates(0)));
    }

    #[test]
    fn power_skips_absent_detect_rates() {
        let mut with = ind(0.0);
        with.detect_rate = Some(0.25);
        let r = aggregate_rates(&[ind(0.0), with, ind(0.0)]).unwrap();
        assert_eq!(r.power, Some(0.25));
        assert_eq!(r.se_power, Some(0.0));
    }
}
