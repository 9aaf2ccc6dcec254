//! Multiple-testing rejection rules.
//!
//! Every rule reduces to "reject the hypotheses of ascending rank 1..=k" for
//! some cutoff rank `k`; the rules differ only in the per-rank level and in
//! whether `k` is found by scanning up from the smallest p-value (step-down)
//! or down from the largest (step-up). All comparisons are inclusive.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pvalues::{PValueVector, SignificanceLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Procedure {
    Unadjusted,
    Bonferroni,
    Sidak,
    Holm,
    Hochberg,
    Bh,
}

impl Procedure {
    pub const ALL: [Procedure; 6] = [
        Procedure::Unadjusted,
        Procedure::Bonferroni,
        Procedure::Sidak,
        Procedure::Holm,
        Procedure::Hochberg,
        Procedure::Bh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Unadjusted => "unadjusted",
            Procedure::Bonferroni => "bonferroni",
            Procedure::Sidak => "sidak",
            Procedure::Holm => "holm",
            Procedure::Hochberg => "hochberg",
            Procedure::Bh => "bh",
        }
    }

    pub fn reject(self, p: &PValueVector, level: SignificanceLevel) -> RejectionSet {
        match self {
            Procedure::Unadjusted => reject_unadjusted(p, level),
            Procedure::Bonferroni => reject_bonferroni(p, level),
            Procedure::Sidak => reject_sidak(p, level),
            Procedure::Holm => reject_holm(p, level),
            Procedure::Hochberg => reject_hochberg(p, level),
            Procedure::Bh => reject_bh(p, level),
        }
    }

    pub fn adjust(self, p: &PValueVector) -> AdjustedPValues {
        adjust(p, self)
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unadjusted" | "none" => Ok(Procedure::Unadjusted),
            "bonferroni" => Ok(Procedure::Bonferroni),
            "sidak" | "dunn-sidak" => Ok(Procedure::Sidak),
            "holm" => Ok(Procedure::Holm),
            "hochberg" => Ok(Procedure::Hochberg),
            "bh" | "fdr" | "benjamini-hochberg" => Ok(Procedure::Bh),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Output of a rejection rule, indexed by original hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSet {
    rejected: Vec<bool>,
    cutoff_rank: usize,
    cutoff_threshold: Option<f64>,
    procedure: Procedure,
}

impl RejectionSet {
    /// Reject ranks `1..=cutoff_rank`; `threshold` is the level the
    /// cutoff rank was compared against.
    fn from_cutoff(
        p: &PValueVector,
        cutoff_rank: usize,
        threshold: f64,
        procedure: Procedure,
    ) -> Self {
        let mut rejected = vec![false; p.len()];
        for &i in &p.ascending()[..cutoff_rank] {
            rejected[i] = true;
        }
        Self {
            rejected,
            cutoff_rank,
            cutoff_threshold: (cutoff_rank > 0).then_some(threshold),
            procedure,
        }
    }

    pub fn rejected(&self) -> &[bool] {
        &self.rejected
    }

    pub fn is_rejected(&self, index: usize) -> bool {
        self.rejected[index]
    }

    /// Number of hypotheses in the family.
    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    /// Observed rejection count R.
    pub fn count(&self) -> usize {
        self.cutoff_rank
    }

    pub fn cutoff_rank(&self) -> usize {
        self.cutoff_rank
    }

    pub fn cutoff_threshold(&self) -> Option<f64> {
        self.cutoff_threshold
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    /// Original indices of the rejected hypotheses, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.rejected
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i))
            .collect()
    }

    pub fn is_subset_of(&self, other: &RejectionSet) -> bool {
        self.rejected.len() == other.rejected.len()
            && self
                .rejected
                .iter()
                .zip(&other.rejected)
                .all(|(&a, &b)| !a || b)
    }
}

/// Bonferroni per-test level α/m.
pub fn bonferroni_level(alpha: f64, m: usize) -> f64 {
    alpha / m as f64
}

/// Dunn–Šidák per-test level 1 − (1 − α)^(1/m), exactly α when m = 1.
pub fn sidak_level(alpha: f64, m: usize) -> f64 {
    if m == 1 {
        alpha
    } else {
        -((-alpha).ln_1p() / m as f64).exp_m1()
    }
}

/// Holm / Hochberg level for 1-based rank `rank`: α/(m − rank + 1).
pub fn holm_level(alpha: f64, m: usize, rank: usize) -> f64 {
    alpha / (m - rank + 1) as f64
}

/// Benjamini–Hochberg level for 1-based rank `rank`: rank·q/m.
pub fn bh_level(q: f64, m: usize, rank: usize) -> f64 {
    if rank == m {
        q
    } else {
        rank as f64 * q / m as f64
    }
}

/// 1 − (1 − p)^m, clamped into [p, m·p] where rounding could escape it.
fn sidak_scale(p: f64, m: usize) -> f64 {
    if m == 1 {
        return p;
    }
    let mf = m as f64;
    (-(mf * (-p).ln_1p()).exp_m1()).min(mf * p).max(p)
}

/// The p-value at 1-based `rank` rescaled so that the rule reads
/// "scaled ≤ level": p ≤ α/m becomes m·p ≤ α, p_(j) ≤ j·q/m becomes
/// (m/j)·p_(j) ≤ q, and so on. Rejection rules, adjusted p-values and the
/// θ formulation all compare this one quantity, so they agree bit for bit.
fn scaled(procedure: Procedure, m: usize, rank: usize, p: f64) -> f64 {
    match procedure {
        Procedure::Unadjusted => p,
        Procedure::Bonferroni => m as f64 * p,
        Procedure::Sidak => sidak_scale(p, m),
        Procedure::Holm | Procedure::Hochberg => (m - rank + 1) as f64 * p,
        Procedure::Bh => bh_scale(m, rank) * p,
    }
}

fn bh_scale(m: usize, rank: usize) -> f64 {
    m as f64 / rank as f64
}

/// Nominal per-rank level the cutoff rank is held to.
fn nominal_level(procedure: Procedure, alpha: f64, m: usize, rank: usize) -> f64 {
    match procedure {
        Procedure::Unadjusted => alpha,
        Procedure::Bonferroni => bonferroni_level(alpha, m),
        Procedure::Sidak => sidak_level(alpha, m),
        Procedure::Holm | Procedure::Hochberg => holm_level(alpha, m, rank),
        Procedure::Bh => bh_level(alpha, m, rank),
    }
}

fn scan(p: &PValueVector, alpha: SignificanceLevel, procedure: Procedure) -> RejectionSet {
    let (a, m) = (alpha.value(), p.len());
    let passes = |rank: usize| scaled(procedure, m, rank, p.ordered(rank)) <= a;
    let k = match procedure {
        // single-step and step-down: the longest passing prefix of ranks
        Procedure::Unadjusted | Procedure::Bonferroni | Procedure::Sidak | Procedure::Holm => {
            (1..=m).find(|&j| !passes(j)).map_or(m, |fail| fail - 1)
        }
        // step-up: the highest passing rank
        Procedure::Hochberg | Procedure::Bh => (1..=m).rev().find(|&j| passes(j)).unwrap_or(0),
    };
    RejectionSet::from_cutoff(p, k, nominal_level(procedure, a, m, k.max(1)), procedure)
}

/// Test every hypothesis at α with no multiplicity correction.
pub fn reject_unadjusted(p: &PValueVector, alpha: SignificanceLevel) -> RejectionSet {
    scan(p, alpha, Procedure::Unadjusted)
}

/// Reject p_i ≤ α/m.
pub fn reject_bonferroni(p: &PValueVector, alpha: SignificanceLevel) -> RejectionSet {
    scan(p, alpha, Procedure::Bonferroni)
}

/// Reject p_i ≤ 1 − (1 − α)^(1/m).
pub fn reject_sidak(p: &PValueVector, alpha: SignificanceLevel) -> RejectionSet {
    scan(p, alpha, Procedure::Sidak)
}

/// Holm step-down: stop at the first rank whose p-value exceeds α/(m−i+1).
pub fn reject_holm(p: &PValueVector, alpha: SignificanceLevel) -> RejectionSet {
    scan(p, alpha, Procedure::Holm)
}

/// Hochberg step-up with the Holm levels α/(m−j+1).
pub fn reject_hochberg(p: &PValueVector, alpha: SignificanceLevel) -> RejectionSet {
    scan(p, alpha, Procedure::Hochberg)
}

/// Benjamini–Hochberg step-up: reject ranks 1..=k for the largest k with
/// p_(k) ≤ k·q/m.
pub fn reject_bh(p: &PValueVector, q: SignificanceLevel) -> RejectionSet {
    scan(p, q, Procedure::Bh)
}

/// Solution of the rejection-maximising threshold problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSolution {
    pub theta: f64,
    pub rejections: usize,
}

impl ThetaSolution {
    pub fn rejection_flags(&self, p: &PValueVector) -> Vec<bool> {
        if self.rejections == 0 {
            return vec![false; p.len()];
        }
        p.values().iter().map(|&v| v <= self.theta).collect()
    }
}

/// Choose the threshold θ maximising r(θ) = #{i : p_i ≤ θ} subject to
/// θ·m / r(θ) ≤ q, scanning θ over {0} ∪ {p_i}.
pub fn bh_theta(p: &PValueVector, q: SignificanceLevel) -> ThetaSolution {
    let m = p.len();
    let sorted: Vec<f64> = p.sorted_values().collect();
    let rejections_at = |theta: f64| sorted.partition_point(|&v| v <= theta);

    let mut best = ThetaSolution {
        theta: 0.0,
        rejections: 0,
    };
    for theta in std::iter::once(0.0).chain(sorted.iter().copied()) {
        let r = rejections_at(theta);
        if r == 0 {
            continue;
        }
        // θ·m/r evaluated as (m/r)·θ, the same rounding as the step-up rule
        let feasible = bh_scale(m, r) * theta <= q.value();
        if feasible && r >= best.rejections {
            best = ThetaSolution {
                theta,
                rejections: r,
            };
        }
    }
    best
}

/// Adjusted p-values, one per original hypothesis index.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedPValues {
    values: Vec<f64>,
    procedure: Procedure,
}

impl AdjustedPValues {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    /// Flags of hypotheses whose adjusted value is at most `gamma`.
    pub fn threshold(&self, gamma: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v <= gamma).collect()
    }
}

/// Adjusted p-values for `procedure`, capped at 1. Thresholding the result
/// at γ reproduces the procedure's rejections at level γ.
pub fn adjust(p: &PValueVector, procedure: Procedure) -> AdjustedPValues {
    let m = p.len();
    let mut values = vec![0.0; m];
    let ranked = p.ascending().iter().enumerate().map(|(r, &i)| (r + 1, i));
    match procedure {
        Procedure::Unadjusted | Procedure::Bonferroni | Procedure::Sidak => {
            for (rank, i) in ranked {
                values[i] = scaled(procedure, m, rank, p.get(i)).min(1.0);
            }
        }
        Procedure::Holm => {
            let mut running = 0.0f64;
            for (rank, i) in ranked {
                running = running.max(scaled(procedure, m, rank, p.get(i)).min(1.0));
                values[i] = running;
            }
        }
        Procedure::Hochberg | Procedure::Bh => {
            let mut running = 1.0f64;
            for (rank, i) in ranked.rev() {
                running = running.min(scaled(procedure, m, rank, p.get(i)));
                values[i] = running;
            }
        }
    }
    AdjustedPValues { values, procedure }
}
