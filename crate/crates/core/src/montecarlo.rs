//! Seeded simulation of the two-stage procedure.
//!
//! Every replicate owns a ChaCha8 stream keyed by `(seed, replicate index)`,
//! so results do not depend on how replicates are spread over threads.
//! Normal and Student-t variates come from the inverse-CDF transform in
//! [`crate::special_fns`].
//!
//! B-values are recorded in standard-error units (`B / S`). With raw data `S`
//! varies between replicates, but `δ̂/S` is exactly t-distributed under
//! `μ1 = μ2`, so the analytic law with `S = 1` is the right reference.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::b_dist::{BDistParams, Condition};
use crate::eeb::{eeb_closed, EebQuery, Solver};
use crate::error::{check_alpha, check_probability_open, Error, Result};
use crate::procedure::{classify_geometry, classify_stage2, Stage2};
use crate::special_fns::RefDist;
use crate::two_sample::{pooled_se, Interval, SampleSummary, Stage1};

/// How each replicate's estimate and standard error are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationMode {
    /// Draw `n1 + n2` normal observations and analyse them.
    #[default]
    Raw,
    /// Hold `S = σ·sqrt(1/n1 + 1/n2)` fixed and draw `δ̂ = δ + S·T`, `T ~ t(ν)`.
    Summary,
}

fn default_cdf_points() -> usize {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub n1: usize,
    pub n2: usize,
    pub mu1: f64,
    pub mu2: f64,
    /// Common standard deviation of both groups.
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: GenerationMode,
    /// Number of grid points in the emitted empirical CDF.
    #[serde(default = "default_cdf_points")]
    pub cdf_points: usize,
}

impl SimScenario {
    /// Scenario with the defaults for `mode` and `cdf_points`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n1: usize,
        n2: usize,
        mu1: f64,
        mu2: f64,
        sigma: f64,
        alpha: f64,
        beta: f64,
        reps: usize,
        seed: u64,
    ) -> Self {
        Self {
            n1,
            n2,
            mu1,
            mu2,
            sigma,
            alpha,
            beta,
            reps,
            seed,
            mode: GenerationMode::Raw,
            cdf_points: default_cdf_points(),
        }
    }

    pub fn with_mode(mut self, mode: GenerationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::domain("n1 and n2 must both be at least 2"));
        }
        if !(self.mu1.is_finite() && self.mu2.is_finite()) {
            return Err(Error::domain("mu1 and mu2 must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        check_alpha(self.alpha)?;
        check_probability_open("beta", self.beta)?;
        if self.reps == 0 {
            return Err(Error::domain("reps must be at least 1"));
        }
        if !(2..=10_000).contains(&self.cdf_points) {
            return Err(Error::domain("cdf_points must lie in [2, 10000]"));
        }
        Ok(())
    }

    fn dof(&self) -> f64 {
        (self.n1 + self.n2 - 2) as f64
    }

    fn nominal_se(&self) -> f64 {
        self.sigma * (1.0 / self.n1 as f64 + 1.0 / self.n2 as f64).sqrt()
    }

    /// `δ/S` of the analytic reference, when the simulated law matches it exactly.
    fn reference_shift(&self) -> Option<f64> {
        let delta = self.mu1 - self.mu2;
        match self.mode {
            GenerationMode::Summary => Some(delta / self.nominal_se()),
            GenerationMode::Raw if delta == 0.0 => Some(0.0),
            GenerationMode::Raw => None,
        }
    }
}

/// One simulated comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub delta_hat: f64,
    pub se: f64,
    /// B-value divided by the standard error.
    pub b_std: f64,
    pub stage1: Stage1,
    pub stage2: Stage2,
}

/// Per-condition quantities shared by all replicates.
struct Kernel {
    dist: RefDist,
    crit_one: f64,
    crit_two: f64,
    /// EEB at level β for unit standard error, per condition.
    unit_eeb: [f64; 3],
}

fn condition_index(c: Condition) -> usize {
    match c {
        Condition::Marginal => 0,
        Condition::Accept => 1,
        Condition::Reject => 2,
    }
}

impl Kernel {
    fn new(s: &SimScenario) -> Result<Self> {
        let dist = RefDist::student_t(s.dof())?;
        let base = BDistParams::null(1.0, dist, s.alpha, Condition::Marginal)?;
        let mut unit_eeb = [0.0; 3];
        for c in Condition::ALL {
            let q = EebQuery::new(base.with_condition(c), s.beta, Solver::ClosedForm)?;
            unit_eeb[condition_index(c)] = eeb_closed(&q)?.bound;
        }
        Ok(Self {
            dist,
            crit_one: base.crit_one_sided(),
            crit_two: base.crit_two_sided(),
            unit_eeb,
        })
    }

    fn classify(&self, delta_hat: f64, se: f64) -> Draw {
        let ci0 = Interval::centered(delta_hat, self.crit_two * se);
        let stage1 = if ci0.contains(0.0) {
            Stage1::Accept
        } else {
            Stage1::Reject
        };
        let ci = Interval::centered(delta_hat, self.crit_one * se);
        let bound = se * self.unit_eeb[condition_index(stage1.into())];
        let geometry = classify_geometry(&ci, &Interval::centered(0.0, bound));
        let b = ci.lower.abs().max(ci.upper.abs());
        Draw {
            delta_hat,
            se,
            b_std: b / se,
            stage1,
            stage2: classify_stage2(stage1, geometry),
        }
    }
}

/// Uniform variate on the open interval (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn replicate_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn draw_one(s: &SimScenario, k: &Kernel, rep: usize) -> Result<Draw> {
    let mut rng = replicate_rng(s.seed, rep);
    match s.mode {
        GenerationMode::Raw => {
            let mut sample = |n: usize, mu: f64| -> Vec<f64> {
                (0..n)
                    .map(|_| mu + s.sigma * RefDist::Normal.quantile_at(open_unit(&mut rng)))
                    .collect()
            };
            let x1 = sample(s.n1, s.mu1);
            let x2 = sample(s.n2, s.mu2);
            let g1 = SampleSummary::from_observations(&x1)?;
            let g2 = SampleSummary::from_observations(&x2)?;
            let se = pooled_se(&g1, &g2)?;
            Ok(k.classify(g1.mean() - g2.mean(), se))
        }
        GenerationMode::Summary => {
            let se = s.nominal_se();
            let t = k.dist.quantile_at(open_unit(&mut rng));
            Ok(k.classify(s.mu1 - s.mu2 + se * t, se))
        }
    }
}

/// All replicates of a scenario, in replicate order.
pub fn simulate_draws(s: &SimScenario) -> Result<Vec<Draw>> {
    s.validate()?;
    let kernel = Kernel::new(s)?;
    (0..s.reps)
        .into_par_iter()
        .map(|rep| draw_one(s, &kernel, rep))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionCounts {
    pub accept: usize,
    pub reject: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub equivalence: usize,
    pub inconclusive: usize,
    pub difference_confirmed: usize,
    pub false_positive_corrected: usize,
}

impl OutcomeCounts {
    fn add(&mut self, s: Stage2) {
        match s {
            Stage2::Equivalence => self.equivalence += 1,
            Stage2::Inconclusive => self.inconclusive += 1,
            Stage2::DifferenceConfirmed => self.difference_confirmed += 1,
            Stage2::FalsePositiveCorrected => self.false_positive_corrected += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.equivalence + self.inconclusive + self.difference_confirmed + self.false_positive_corrected
    }
}

/// A value per conditioning event; `None` where it is undefined (no
/// replicates in the condition, or no exact analytic reference).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerCondition {
    pub marginal: Option<f64>,
    pub accept: Option<f64>,
    pub reject: Option<f64>,
}

impl PerCondition {
    pub fn get(&self, c: Condition) -> Option<f64> {
        match c {
            Condition::Marginal => self.marginal,
            Condition::Accept => self.accept,
            Condition::Reject => self.reject,
        }
    }

    fn set(&mut self, c: Condition, v: Option<f64>) {
        match c {
            Condition::Marginal => self.marginal = v,
            Condition::Accept => self.accept = v,
            Condition::Reject => self.reject = v,
        }
    }
}

/// Empirical (and, when available, analytic) CDFs of `B / S` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub b: f64,
    pub empirical: PerCondition,
    pub analytic: PerCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: SimScenario,
    pub condition_counts: ConditionCounts,
    pub outcome_counts: OutcomeCounts,
    pub accept_fraction: f64,
    pub reject_fraction: f64,
    /// `δ/S` of the analytic reference law, when it is exact for this scenario.
    pub reference_shift: Option<f64>,
    /// EEB at level β in standard-error units, per condition.
    pub unit_eeb: PerCondition,
    /// Kolmogorov-Smirnov distance between empirical and analytic CDFs of `B / S`.
    pub ks_distance: PerCondition,
    /// Observed `P(B <= EEB(β|C) | C)`.
    pub calibration: PerCondition,
    pub empirical_cdf_points: Vec<CdfPoint>,
}

/// Sup-distance between the empirical CDF of `sorted` and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

fn empirical_fraction(sorted: &[f64], b: f64) -> Option<f64> {
    if sorted.is_empty() {
        None
    } else {
        Some(sorted.partition_point(|&x| x <= b) as f64 / sorted.len() as f64)
    }
}

/// Aggregate replicates into a report.
pub fn summarize(s: &SimScenario, draws: &[Draw]) -> Result<SimReport> {
    s.validate()?;
    let kernel = Kernel::new(s)?;

    let mut condition_counts = ConditionCounts::default();
    let mut outcome_counts = OutcomeCounts::default();
    let mut samples: [Vec<f64>; 3] = Default::default();
    for d in draws {
        match d.stage1 {
            Stage1::Accept => condition_counts.accept += 1,
            Stage1::Reject => condition_counts.reject += 1,
        }
        outcome_counts.add(d.stage2);
        samples[0].push(d.b_std);
        samples[condition_index(d.stage1.into())].push(d.b_std);
    }
    for v in samples.iter_mut() {
        v.sort_by(f64::total_cmp);
    }

    let reference_shift = s.reference_shift();
    let reference = |c: Condition| -> Result<Option<BDistParams>> {
        reference_shift
            .map(|z| BDistParams::new(z, 1.0, kernel.dist, s.alpha, c))
            .transpose()
    };

    let mut unit_eeb = PerCondition::default();
    let mut ks = PerCondition::default();
    let mut calibration = PerCondition::default();
    let mut refs = Vec::with_capacity(3);
    for c in Condition::ALL {
        let sorted = &samples[condition_index(c)];
        let k = kernel.unit_eeb[condition_index(c)];
        unit_eeb.set(c, Some(k));
        calibration.set(c, empirical_fraction(sorted, k));
        let r = reference(c)?;
        if let (Some(p), false) = (&r, sorted.is_empty()) {
            ks.set(c, Some(ks_distance(sorted, |b| p.cdf(b))));
        }
        refs.push(r);
    }

    let marginal = &samples[0];
    let lo = kernel.crit_one;
    let hi = if marginal.is_empty() {
        lo + 1.0
    } else {
        let top = marginal[((marginal.len() - 1) as f64 * 0.999) as usize];
        if top > lo {
            top
        } else {
            lo + 1.0
        }
    };
    let step = (hi - lo) / (s.cdf_points - 1) as f64;
    let empirical_cdf_points = (0..s.cdf_points)
        .map(|i| {
            let b = lo + i as f64 * step;
            let mut empirical = PerCondition::default();
            let mut analytic = PerCondition::default();
            for (j, c) in Condition::ALL.into_iter().enumerate() {
                empirical.set(c, empirical_fraction(&samples[j], b));
                analytic.set(c, refs[j].as_ref().map(|p| p.cdf(b)));
            }
            CdfPoint {
                b,
                empirical,
                analytic,
            }
        })
        .collect();

    let n = draws.len().max(1) as f64;
    Ok(SimReport {
        scenario: s.clone(),
        condition_counts,
        outcome_counts,
        accept_fraction: condition_counts.accept as f64 / n,
        reject_fraction: condition_counts.reject as f64 / n,
        reference_shift,
        unit_eeb,
        ks_distance: ks,
        calibration,
        empirical_cdf_points,
    })
}

/// Simulate one scenario and aggregate it.
pub fn simulate(s: &SimScenario) -> Result<SimReport> {
    let draws = simulate_draws(s)?;
    summarize(s, &draws)
}

/// Simulate several scenarios independently, preserving order.
pub fn sweep(scenarios: &[SimScenario]) -> Result<Vec<SimReport>> {
    if scenarios.is_empty() {
        return Err(Error::domain("sweep needs at least one scenario"));
    }
    scenarios.iter().map(simulate).collect()
}
