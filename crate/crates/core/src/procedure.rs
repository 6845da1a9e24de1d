//! Two-stage comparison of two means.
//!
//! Stage 1 is the classic two-sided test. Stage 2 compares the 100(1-2α)%
//! interval `[L, U]` with the symmetric equivalence interval `[-Δ, Δ]`, where
//! Δ is the empirical equivalence bound under the realized stage-1 verdict
//! (or a caller-supplied fixed bound).

use serde::{Deserialize, Serialize};

use crate::b_dist::{BDistParams, Condition};
use crate::eeb::{eeb, EebQuery, EebResult, Solver};
use crate::error::{check_alpha, check_probability_open, Error, Result};
use crate::two_sample::{analyze, DistMode, Interval, SampleSummary, Stage1, TwoSampleResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig {
    pub alpha: f64,
    pub beta: f64,
    pub dist_mode: DistMode,
    /// Fixed equivalence bound replacing the EEB.
    pub fixed_delta: Option<f64>,
}

impl ProcedureConfig {
    pub fn new(alpha: f64, beta: f64, dist_mode: DistMode, fixed_delta: Option<f64>) -> Result<Self> {
        let cfg = Self {
            alpha,
            beta,
            dist_mode,
            fixed_delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_probability_open("beta", self.beta)?;
        if let Some(d) = self.fixed_delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::domain(format!(
                    "fixed equivalence bound must be positive and finite, got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Position of a confidence interval relative to `[-Δ, Δ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Contained,
    Overlapping,
    Disjoint,
}

/// Closed-endpoint classification of `ci` against `eq`.
pub fn classify_geometry(ci: &Interval, eq: &Interval) -> Geometry {
    if ci.is_subset_of(eq) {
        Geometry::Contained
    } else if ci.intersects(eq) {
        Geometry::Overlapping
    } else {
        Geometry::Disjoint
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage2 {
    /// Stage 1 accepted and `[L, U] ⊆ [-Δ, Δ]`.
    Equivalence,
    Inconclusive,
    /// Stage 1 rejected and the intervals are disjoint.
    DifferenceConfirmed,
    /// Stage 1 rejected but `[L, U] ⊆ [-Δ, Δ]`.
    FalsePositiveCorrected,
}

impl Stage2 {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage2::Equivalence => "Equivalence",
            Stage2::Inconclusive => "Inconclusive",
            Stage2::DifferenceConfirmed => "DifferenceConfirmed",
            Stage2::FalsePositiveCorrected => "FalsePositiveCorrected",
        }
    }

    /// True for the two outcomes that conclude equivalence.
    pub fn concludes_equivalence(&self) -> bool {
        matches!(self, Stage2::Equivalence | Stage2::FalsePositiveCorrected)
    }
}

/// Stage-2 verdict from the stage-1 verdict and the interval geometry.
pub fn classify_stage2(stage1: Stage1, geometry: Geometry) -> Stage2 {
    match (stage1, geometry) {
        (Stage1::Accept, Geometry::Contained) => Stage2::Equivalence,
        (Stage1::Reject, Geometry::Contained) => Stage2::FalsePositiveCorrected,
        (Stage1::Reject, Geometry::Disjoint) => Stage2::DifferenceConfirmed,
        _ => Stage2::Inconclusive,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum EquivalenceBound {
    Empirical(EebResult),
    Fixed { bound: f64 },
}

impl EquivalenceBound {
    pub fn bound(&self) -> f64 {
        match self {
            EquivalenceBound::Empirical(r) => r.bound,
            EquivalenceBound::Fixed { bound } => *bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureOutcome {
    pub stage1: Stage1,
    pub bound: EquivalenceBound,
    pub geometry: Geometry,
    pub stage2: Stage2,
    pub beta: f64,
    pub result: TwoSampleResult,
}

pub fn run_two_stage(
    g1: &SampleSummary,
    g2: &SampleSummary,
    cfg: &ProcedureConfig,
) -> Result<ProcedureOutcome> {
    cfg.validate()?;
    let result = analyze(g1, g2, cfg.alpha, cfg.dist_mode)?;
    second_stage(result, cfg.beta, cfg.fixed_delta)
}

/// Run stage 2 on an already analysed comparison.
pub fn second_stage(
    result: TwoSampleResult,
    beta: f64,
    fixed_delta: Option<f64>,
) -> Result<ProcedureOutcome> {
    check_probability_open("beta", beta)?;
    let stage1 = result.stage1();
    let bound = match fixed_delta {
        Some(d) => EquivalenceBound::Fixed { bound: d },
        None => {
            let params = BDistParams::null_for(&result, Condition::from(stage1))?;
            EquivalenceBound::Empirical(eeb(&EebQuery::new(params, beta, Solver::Auto)?)?)
        }
    };
    let geometry = classify_geometry(&result.ci_1m_2alpha, &Interval::centered(0.0, bound.bound()));
    Ok(ProcedureOutcome {
        stage1,
        bound,
        geometry,
        stage2: classify_stage2(stage1, geometry),
        beta,
        result,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicVerdict {
    Equivalence,
    NotEstablished,
}

/// Equivalence test against a prespecified bound: equivalence iff
/// `[L, U] ⊆ [-Δ, Δ]`.
pub fn run_classic_equivalence(
    g1: &SampleSummary,
    g2: &SampleSummary,
    alpha: f64,
    delta: f64,
) -> Result<ClassicVerdict> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::domain(format!(
            "equivalence bound must be positive, got {delta}"
        )));
    }
    let r = analyze(g1, g2, alpha, DistMode::T)?;
    Ok(if r.ci_1m_2alpha.is_subset_of(&Interval::centered(0.0, delta)) {
        ClassicVerdict::Equivalence
    } else {
        ClassicVerdict::NotEstablished
    })
}
