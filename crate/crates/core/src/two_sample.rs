//! Pooled-variance two-sample comparison: standard error, confidence
//! intervals, test statistic, p-value and the B-value.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::special_fns::RefDist;

/// Sufficient statistics of one group. `sd` uses the n - 1 divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    n: usize,
    mean: f64,
    sd: f64,
}

impl SampleSummary {
    pub fn new(n: usize, mean: f64, sd: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!(
                "a group needs at least 2 observations, got {n}"
            )));
        }
        if !mean.is_finite() {
            return Err(Error::domain(format!("group mean must be finite, got {mean}")));
        }
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(Error::domain(format!(
                "group standard deviation must be finite and >= 0, got {sd}"
            )));
        }
        Ok(Self { n, mean, sd })
    }

    /// Reduce raw observations to a summary (two-pass mean and variance).
    pub fn from_observations(xs: &[f64]) -> Result<Self> {
        if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain(format!("observation is not finite: {bad}")));
        }
        let n = xs.len();
        if n < 2 {
            return Err(Error::domain(format!(
                "a group needs at least 2 observations, got {n}"
            )));
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        Self::new(n, mean, (ss / (n - 1) as f64).sqrt())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }
}

/// Which reference distribution supplies quantiles and p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistMode {
    /// Student t with n1 + n2 - 2 degrees of freedom.
    #[default]
    T,
    /// Standard normal (large-sample z-test).
    Z,
}

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper);
        Self { lower, upper }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Closed containment `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Verdict of the classic two-sided test, read off the 100(1-α)% interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage1 {
    /// The interval covers zero.
    Accept,
    /// The interval excludes zero.
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSampleResult {
    /// Mean of group 1 minus mean of group 2.
    pub delta_hat: f64,
    /// Pooled standard error of `delta_hat`.
    pub se: f64,
    pub dof: f64,
    pub alpha: f64,
    pub t_stat: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// 100(1-α)% interval `[L0, U0]`.
    pub ci_1m_alpha: Interval,
    /// 100(1-2α)% interval `[L, U]`.
    pub ci_1m_2alpha: Interval,
    pub b_value: f64,
    pub dist: RefDist,
}

/// Pooled standard error of the difference in means under a common variance.
pub fn pooled_se(g1: &SampleSummary, g2: &SampleSummary) -> Result<f64> {
    if g1.n < 2 || g2.n < 2 {
        return Err(Error::domain("each group needs at least 2 observations"));
    }
    let (n1, n2) = (g1.n as f64, g2.n as f64);
    let pooled_var =
        ((n1 - 1.0) * g1.sd * g1.sd + (n2 - 1.0) * g2.sd * g2.sd) / (n1 + n2 - 2.0);
    let se = (1.0 / n1 + 1.0 / n2).sqrt() * pooled_var.sqrt();
    if se > 0.0 && se.is_finite() {
        Ok(se)
    } else {
        Err(Error::Degenerate(
            "both groups have zero variance; the standard error is zero".into(),
        ))
    }
}

/// Run the pooled two-sample test on group summaries.
pub fn analyze(
    g1: &SampleSummary,
    g2: &SampleSummary,
    alpha: f64,
    mode: DistMode,
) -> Result<TwoSampleResult> {
    check_alpha(alpha)?;
    let se = pooled_se(g1, g2)?;
    let dof = (g1.n + g2.n - 2) as f64;
    let dist = match mode {
        DistMode::T => RefDist::student_t(dof)?,
        DistMode::Z => RefDist::Normal,
    };
    Ok(from_estimate(g1.mean - g2.mean, se, dof, alpha, dist))
}

/// Same as [`analyze`] starting from raw observations.
pub fn analyze_observations(
    x1: &[f64],
    x2: &[f64],
    alpha: f64,
    mode: DistMode,
) -> Result<TwoSampleResult> {
    let g1 = SampleSummary::from_observations(x1)?;
    let g2 = SampleSummary::from_observations(x2)?;
    analyze(&g1, &g2, alpha, mode)
}

/// Assemble a result from an estimate and its standard error. Callers
/// guarantee `se > 0`, `alpha` in (0, 0.5) and finite `delta_hat`.
pub(crate) fn from_estimate(
    delta_hat: f64,
    se: f64,
    dof: f64,
    alpha: f64,
    dist: RefDist,
) -> TwoSampleResult {
    let crit_two_sided = dist.upper_quantile_at(0.5 * alpha);
    let crit_one_sided = dist.upper_quantile_at(alpha);
    let t_stat = delta_hat / se;
    let p_value = (2.0 * dist.sf_at(t_stat.abs())).min(1.0);
    let ci_1m_alpha = Interval::centered(delta_hat, crit_two_sided * se);
    let ci_1m_2alpha = Interval::centered(delta_hat, crit_one_sided * se);
    let b_value = ci_1m_2alpha.lower.abs().max(ci_1m_2alpha.upper.abs());
    TwoSampleResult {
        delta_hat,
        se,
        dof,
        alpha,
        t_stat,
        p_value,
        ci_1m_alpha,
        ci_1m_2alpha,
        b_value,
        dist,
    }
}

/// `max(|L|, |U|)` over the 100(1-2α)% interval.
pub fn b_value(r: &TwoSampleResult) -> f64 {
    r.ci_1m_2alpha.lower.abs().max(r.ci_1m_2alpha.upper.abs())
}

pub fn stage1_verdict(r: &TwoSampleResult) -> Stage1 {
    if r.ci_1m_alpha.contains(0.0) {
        Stage1::Accept
    } else {
        Stage1::Reject
    }
}

impl TwoSampleResult {
    pub fn stage1(&self) -> Stage1 {
        stage1_verdict(self)
    }

    /// `t_{ν,1-α}` (or `z_{1-α}`).
    pub fn crit_one_sided(&self) -> f64 {
        self.dist.upper_quantile_at(self.alpha)
    }

    /// `t_{ν,1-α/2}` (or `z_{1-α/2}`).
    pub fn crit_two_sided(&self) -> f64 {
        self.dist.upper_quantile_at(0.5 * self.alpha)
    }
}
