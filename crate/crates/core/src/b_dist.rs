//! Distribution of the B-value.
//!
//! Write `T = (δ̂ - δ)/S`, `k1 = t_{ν,1-α}`, `k2 = t_{ν,1-α/2}`. Since
//! `B = |δ̂| + k1·S`, the event `B <= b` is `|δ/S + T| <= b/S - k1`, and the
//! first-stage verdict is Accept exactly when `|δ/S + T| <= k2`. Every CDF
//! below is a ratio of probabilities of such events, evaluated with the
//! reference distribution of `T`.
//!
//! Under `δ = 0` the three CDFs collapse to short closed forms; those are
//! evaluated directly and, in debug builds, checked against the general
//! expressions.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::special_fns::RefDist;
use crate::two_sample::TwoSampleResult;

/// Conditioning event on the first-stage verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// No conditioning.
    Marginal,
    /// The 100(1-α)% interval covers zero.
    Accept,
    /// The 100(1-α)% interval excludes zero.
    Reject,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Marginal, Condition::Accept, Condition::Reject];
}

impl From<crate::two_sample::Stage1> for Condition {
    fn from(s: crate::two_sample::Stage1) -> Self {
        match s {
            crate::two_sample::Stage1::Accept => Condition::Accept,
            crate::two_sample::Stage1::Reject => Condition::Reject,
        }
    }
}

/// Parameters of one B-value distribution. The critical values are computed
/// once at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BDistParams {
    delta: f64,
    se: f64,
    alpha: f64,
    condition: Condition,
    dist: RefDist,
    crit_one: f64,
    crit_two: f64,
}

impl BDistParams {
    pub fn new(
        delta: f64,
        se: f64,
        dist: RefDist,
        alpha: f64,
        condition: Condition,
    ) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::domain(format!("delta must be finite, got {delta}")));
        }
        if !(se.is_finite() && se > 0.0) {
            return Err(Error::domain(format!(
                "standard error must be positive and finite, got {se}"
            )));
        }
        check_alpha(alpha)?;
        if let RefDist::StudentT { dof } = dist {
            RefDist::student_t(dof)?;
        }
        Ok(Self {
            delta,
            se,
            alpha,
            condition,
            dist,
            crit_one: dist.upper_quantile_at(alpha),
            crit_two: dist.upper_quantile_at(0.5 * alpha),
        })
    }

    /// Null (`δ = 0`) parameters.
    pub fn null(se: f64, dist: RefDist, alpha: f64, condition: Condition) -> Result<Self> {
        Self::new(0.0, se, dist, alpha, condition)
    }

    /// Null parameters sharing the standard error, reference distribution
    /// and α of an observed comparison.
    pub fn null_for(result: &TwoSampleResult, condition: Condition) -> Result<Self> {
        Self::null(result.se, result.dist, result.alpha, condition)
    }

    pub fn with_condition(mut self, condition: Condition) -> Self {
        self.condition = condition;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn se(&self) -> f64 {
        self.se
    }

    pub fn dof(&self) -> Option<f64> {
        self.dist.dof()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn dist(&self) -> RefDist {
        self.dist
    }

    /// `t_{ν,1-α}`.
    pub fn crit_one_sided(&self) -> f64 {
        self.crit_one
    }

    /// `t_{ν,1-α/2}`.
    pub fn crit_two_sided(&self) -> f64 {
        self.crit_two
    }

    /// Smallest value the B-value can take under this condition.
    pub fn support_lower(&self) -> f64 {
        match self.condition {
            Condition::Marginal | Condition::Accept => self.se * self.crit_one,
            Condition::Reject => self.se * (self.crit_one + self.crit_two),
        }
    }

    /// P(B <= b | condition).
    pub fn cdf(&self, b: f64) -> f64 {
        if b.is_nan() {
            return f64::NAN;
        }
        if self.delta == 0.0 {
            let v = self.cdf_null_form(b);
            debug_assert!(
                (v - self.cdf_general(b)).abs() < 1e-9,
                "null-form and general CDF disagree at b={b}: {v} vs {}",
                self.cdf_general(b)
            );
            v
        } else {
            self.cdf_general(b)
        }
    }

    /// The CDF for arbitrary δ, written as ratios of event probabilities.
    pub fn cdf_general(&self, b: f64) -> f64 {
        let d = &self.dist;
        let z = self.delta / self.se;
        let (k1, k2) = (self.crit_one, self.crit_two);
        let r = b / self.se - k1;
        if r.is_nan() || r < 0.0 {
            return 0.0;
        }
        if r == f64::INFINITY {
            return 1.0;
        }
        let v = match self.condition {
            Condition::Marginal => d.mass_between(-r - z, r - z),
            Condition::Accept => {
                let m = r.min(k2);
                d.mass_between(-m - z, m - z) / d.mass_between(-k2 - z, k2 - z)
            }
            Condition::Reject => {
                if r < k2 {
                    return 0.0;
                }
                let joint = d.mass_between(k2 - z, r - z) + d.mass_between(-r - z, -k2 - z);
                joint / (d.sf_at(k2 - z) + d.cdf_at(-k2 - z))
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// The three `δ = 0` closed forms. Errors when `δ != 0`.
    pub fn cdf_null_closed(&self, b: f64) -> Result<f64> {
        if self.delta != 0.0 {
            return Err(Error::Unsupported(
                "closed-form B-value CDF requires delta = 0".into(),
            ));
        }
        Ok(self.cdf_null_form(b))
    }

    fn cdf_null_form(&self, b: f64) -> f64 {
        let d = &self.dist;
        let (k1, k2, a) = (self.crit_one, self.crit_two, self.alpha);
        let u = b / self.se;
        if u < k1 {
            return 0.0;
        }
        if u == f64::INFINITY {
            return 1.0;
        }
        let v = match self.condition {
            Condition::Marginal => 1.0 - 2.0 * d.sf_at(u - k1),
            Condition::Accept => {
                if u >= k1 + k2 {
                    1.0
                } else {
                    (1.0 - 2.0 * d.sf_at(u - k1)) / (1.0 - a)
                }
            }
            Condition::Reject => {
                if u < k1 + k2 {
                    0.0
                } else {
                    // {F(u - k1) - (1 - α/2)} / (α/2)
                    (0.5 * a - d.sf_at(u - k1)) / (0.5 * a)
                }
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// Density of the marginal B-value. Conditional densities are not provided.
    pub fn pdf_marginal(&self, b: f64) -> Result<f64> {
        if self.condition != Condition::Marginal {
            return Err(Error::Unsupported(
                "density is only available for the marginal B-value distribution".into(),
            ));
        }
        if !b.is_finite() {
            return Err(Error::domain(format!("b must be finite, got {b}")));
        }
        let r = b / self.se - self.crit_one;
        if r <= 0.0 {
            return Ok(0.0);
        }
        let z = self.delta / self.se;
        Ok((self.dist.pdf_at(r - z) + self.dist.pdf_at(-r - z)) / self.se)
    }

    /// Probability of the conditioning event itself (1 for Marginal).
    pub fn stage1_probability(&self) -> f64 {
        let d = &self.dist;
        let z = self.delta / self.se;
        let k2 = self.crit_two;
        match self.condition {
            Condition::Marginal => 1.0,
            Condition::Accept => d.mass_between(-k2 - z, k2 - z),
            Condition::Reject => d.sf_at(k2 - z) + d.cdf_at(-k2 - z),
        }
    }
}
