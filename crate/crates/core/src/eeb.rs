//! Empirical equivalence bounds: the β-quantile of the (conditional) null
//! distribution of the B-value.
//!
//! With `δ = 0` all three conditions invert in closed form. Any other
//! parameterisation goes through bisection on the monotone CDF.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::b_dist::{BDistParams, Condition};
use crate::error::{check_probability_open, Error, Result};
use crate::two_sample::Interval;

/// Grids passed to [`eeb_curve`] are clamped into `[BETA_CLAMP, 1 - BETA_CLAMP]`.
pub const BETA_CLAMP: f64 = 1e-6;

/// Absolute tolerance on the bound for unit standard error; scaled down for
/// smaller standard errors.
pub const BISECTION_TOL: f64 = 1e-9;

/// The upper bracket may not grow beyond this many standard errors.
const MAX_BRACKET_SE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    ClosedForm,
    Bisection,
    /// Closed form whenever `δ = 0`, bisection otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EebQuery {
    pub params: BDistParams,
    pub beta: f64,
    pub solver: Solver,
}

impl EebQuery {
    pub fn new(params: BDistParams, beta: f64, solver: Solver) -> Result<Self> {
        check_probability_open("beta", beta)?;
        Ok(Self {
            params,
            beta,
            solver,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EebResult {
    pub bound: f64,
    /// The symmetric equivalence interval `[-bound, bound]`.
    pub interval: Interval,
    pub beta: f64,
    pub condition: Condition,
    /// CDF of the B-value at `bound`.
    pub achieved_cdf: f64,
    pub solver_used: Solver,
    pub iterations: usize,
}

fn finish(q: &EebQuery, bound: f64, solver_used: Solver, iterations: usize) -> EebResult {
    EebResult {
        bound,
        interval: Interval::centered(0.0, bound),
        beta: q.beta,
        condition: q.params.condition(),
        achieved_cdf: q.params.cdf(bound),
        solver_used,
        iterations,
    }
}

/// Dispatch on `q.solver`.
pub fn eeb(q: &EebQuery) -> Result<EebResult> {
    match q.solver {
        Solver::ClosedForm => eeb_closed(q),
        Solver::Bisection => eeb_bisect(q),
        Solver::Auto if q.params.delta() == 0.0 => eeb_closed(q),
        Solver::Auto => eeb_bisect(q),
    }
}

/// Closed-form inversion of the null CDF.
pub fn eeb_closed(q: &EebQuery) -> Result<EebResult> {
    check_probability_open("beta", q.beta)?;
    let p = &q.params;
    if p.delta() != 0.0 {
        return Err(Error::Unsupported(
            "closed-form EEB requires delta = 0; use bisection".into(),
        ));
    }
    let (alpha, beta) = (p.alpha(), q.beta);
    // Upper-tail probability whose quantile is added to t_{ν,1-α}.
    let tail = match p.condition() {
        Condition::Marginal => 0.5 * (1.0 - beta),
        Condition::Accept => 0.5 * (1.0 - beta * (1.0 - alpha)),
        Condition::Reject => 0.5 * alpha * (1.0 - beta),
    };
    let bound = p.se() * (p.dist().upper_quantile_at(tail) + p.crit_one_sided());
    Ok(finish(q, bound, Solver::ClosedForm, 0))
}

/// Smallest `b` with `cdf(b) >= beta`, by bisection.
pub fn eeb_bisect(q: &EebQuery) -> Result<EebResult> {
    check_probability_open("beta", q.beta)?;
    let p = &q.params;
    let se = p.se();
    let tol = BISECTION_TOL * se.min(1.0);

    let mut lo = p.support_lower();
    let mut width = se;
    let mut hi = lo + width;
    let mut iterations = 0;
    while p.cdf(hi) < q.beta {
        lo = hi;
        width *= 2.0;
        hi = p.support_lower() + width;
        iterations += 1;
        if width > MAX_BRACKET_SE * se {
            return Err(Error::Convergence(format!(
                "no upper bracket for beta = {} within {MAX_BRACKET_SE} standard errors",
                q.beta
            )));
        }
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.cdf(mid) >= q.beta {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(finish(q, hi, Solver::Bisection, iterations))
}

/// `(beta, bound)` pairs sorted by beta, using the automatic solver.
pub fn eeb_curve(params: &BDistParams, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(bad) = betas.iter().find(|b| b.is_nan()) {
        return Err(Error::domain(format!("beta grid contains {bad}")));
    }
    let mut grid: Vec<f64> = betas
        .iter()
        .map(|b| b.clamp(BETA_CLAMP, 1.0 - BETA_CLAMP))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.par_iter()
        .map(|&beta| {
            let r = eeb(&EebQuery::new(*params, beta, Solver::Auto)?)?;
            Ok((beta, r.bound))
        })
        .collect()
}

/// Smallest β at which an observed B-value `b` falls inside the EEB interval,
/// found by bisection on the EEB curve. `Some(0.0)` when `b` is at or below
/// the support; `None` when no β < 1 reaches `b`.
pub fn min_beta_for_equivalence(params: &BDistParams, b: f64) -> Result<Option<f64>> {
    if !b.is_finite() {
        return Err(Error::domain(format!("b must be finite, got {b}")));
    }
    if b <= params.support_lower() {
        return Ok(Some(0.0));
    }
    let bound_at = |beta: f64| -> Result<f64> {
        Ok(eeb(&EebQuery::new(*params, beta, Solver::Auto)?)?.bound)
    };
    let top = 1.0 - f64::EPSILON;
    if bound_at(top)? < b {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0_f64, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-13 {
            break;
        }
        if bound_at(mid)? >= b {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fns::RefDist;

    const T18: RefDist = RefDist::StudentT { dof: 18.0 };

    fn query(se: f64, cond: Condition, beta: f64) -> EebQuery {
        EebQuery::new(BDistParams::null(se, T18, 0.05, cond).unwrap(), beta, Solver::Auto)
            .unwrap()
    }

    #[test]
    fn plant_growth_bounds() {
        let trt1_se = 0.311_434_851_400_203_3;
        let trt2_se = 0.231_487_940_652_406_2;
        let acc = eeb_closed(&query(trt1_se, Condition::Accept, 0.792)).unwrap();
        assert!((acc.bound - 0.911).abs() < 5e-3);
        let marg = eeb_closed(&query(trt1_se, Condition::Marginal, 0.752)).unwrap();
        assert!((marg.bound - 0.911).abs() < 5e-3);
        let rej = eeb_bisect(&query(trt2_se, Condition::Reject, 0.5)).unwrap();
        assert!((rej.bound - 0.967).abs() < 5e-3);
        assert!(rej.bound >= 0.895);
    }

    #[test]
    fn small_beta_approaches_support() {
        let q = query(1.0, Condition::Accept, 1e-9);
        let r = eeb_closed(&q).unwrap();
        assert!((r.bound - q.params.support_lower()).abs() < 1e-6);
    }

    #[test]
    fn result_invariants() {
        for cond in Condition::ALL {
            let q = query(0.7, cond, 0.63);
            let r = eeb_bisect(&q).unwrap();
            assert!(r.achieved_cdf >= q.beta);
            assert!(q.params.cdf(r.bound - BISECTION_TOL * 0.7) < q.beta);
            assert_eq!(r.interval.lower, -r.bound);
            assert_eq!(r.solver_used, Solver::Bisection);
            let c = eeb_closed(&q).unwrap();
            assert!((c.bound - r.bound).abs() < 1e-7);
            assert!((c.achieved_cdf - q.beta).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_endpoints_rejected() {
        let p = BDistParams::null(1.0, T18, 0.05, Condition::Marginal).unwrap();
        assert!(EebQuery::new(p, 0.0, Solver::Auto).is_err());
        assert!(EebQuery::new(p, 1.0, Solver::Auto).is_err());
        let bad = EebQuery {
            params: p,
            beta: 1.5,
            solver: Solver::Bisection,
        };
        assert!(eeb_bisect(&bad).is_err());
        assert!(eeb_closed(&bad).is_err());
    }

    #[test]
    fn high_beta_is_finite_and_larger() {
        for cond in Condition::ALL {
            let hi = eeb(&query(1.0, cond, 0.999)).unwrap().bound;
            let mid = eeb(&query(1.0, cond, 0.5)).unwrap().bound;
            assert!(hi.is_finite() && hi >= mid);
        }
    }

    #[test]
    fn auto_picks_bisection_off_null() {
        let p = BDistParams::new(0.4, 1.0, T18, 0.05, Condition::Accept).unwrap();
        let q = EebQuery::new(p, 0.6, Solver::Auto).unwrap();
        assert!(eeb_closed(&q).is_err());
        let r = eeb(&q).unwrap();
        assert_eq!(r.solver_used, Solver::Bisection);
        assert!(r.achieved_cdf >= 0.6);
    }

    #[test]
    fn curve_sorted_and_clamped() {
        let p = BDistParams::null(1.0, T18, 0.05, Condition::Marginal).unwrap();
        let c = eeb_curve(&p, &[0.75, 0.25, 0.5, 0.0, 1.0]).unwrap();
        let betas: Vec<f64> = c.iter().map(|x| x.0).collect();
        assert_eq!(betas, [BETA_CLAMP, 0.25, 0.5, 0.75, 1.0 - BETA_CLAMP]);
        assert!(c.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(eeb_curve(&p, &[f64::NAN]).is_err());
    }

    #[test]
    fn min_beta_matches_cdf() {
        for cond in Condition::ALL {
            let p = BDistParams::null(0.3, T18, 0.05, cond).unwrap();
            let b = p.support_lower() + 0.2;
            let beta = min_beta_for_equivalence(&p, b).unwrap().unwrap();
            assert!((beta - p.cdf(b)).abs() < 1e-9, "{cond:?}");
        }
        let p = BDistParams::null(1.0, T18, 0.05, Condition::Accept).unwrap();
        assert_eq!(min_beta_for_equivalence(&p, 100.0).unwrap(), None);
        assert_eq!(min_beta_for_equivalence(&p, 0.1).unwrap(), Some(0.0));
    }
}
