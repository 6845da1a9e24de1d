use bvalue::montecarlo::{simulate, simulate_draws, summarize, sweep, GenerationMode, SimScenario};
use bvalue::{BDistParams, Condition, RefDist, Stage1};

const REPS: usize = 20_000;

fn scenario(mu1: f64, mode: GenerationMode) -> SimScenario {
    SimScenario::new(10, 10, mu1, 0.0, 1.0, 0.05, 0.8, REPS, 7).with_mode(mode)
}

#[test]
fn null_accept_fraction_and_ks() {
    for mode in [GenerationMode::Raw, GenerationMode::Summary] {
        let r = simulate(&scenario(0.0, mode)).unwrap();
        // binomial sd at 0.95 with 2e4 reps is 0.0015
        assert!((r.accept_fraction - 0.95).abs() < 0.006, "{mode:?}: {}", r.accept_fraction);
        assert_eq!(r.reference_shift, Some(0.0));
        let ks = r.ks_distance;
        assert!(ks.marginal.unwrap() < 0.015, "{mode:?} {ks:?}");
        assert!(ks.accept.unwrap() < 0.015, "{mode:?} {ks:?}");
        assert!(ks.reject.unwrap() < 0.06, "{mode:?} {ks:?}");
        for c in Condition::ALL {
            assert!((r.calibration.get(c).unwrap() - 0.8).abs() < 0.04, "{mode:?} {c:?}");
        }
    }
}

#[test]
fn raw_mode_without_null_has_no_reference() {
    let r = simulate(&scenario(0.5, GenerationMode::Raw)).unwrap();
    assert_eq!(r.reference_shift, None);
    assert_eq!(r.ks_distance.marginal, None);
    assert!(r.empirical_cdf_points.iter().all(|p| p.analytic.marginal.is_none()));
}

#[test]
fn reject_fraction_grows_with_effect() {
    let sigma = 1.0;
    let scenarios: Vec<_> = [0.0, 0.5 * sigma, sigma]
        .into_iter()
        .map(|mu| scenario(mu, GenerationMode::Summary))
        .collect();
    let reports = sweep(&scenarios).unwrap();
    let fractions: Vec<f64> = reports.iter().map(|r| r.reject_fraction).collect();
    assert!(fractions.windows(2).all(|w| w[0] < w[1]), "{fractions:?}");
    let se = (0.2f64).sqrt();
    let dist = RefDist::student_t(18.0).unwrap();
    for (s, f) in scenarios.iter().zip(&fractions) {
        let p = BDistParams::new(s.mu1 - s.mu2, se, dist, 0.05, Condition::Reject).unwrap();
        assert!((p.stage1_probability() - f).abs() < 0.012, "{} vs {f}", p.stage1_probability());
    }
    assert!(sweep(&[]).is_err());
}

#[test]
fn rejection_probability_at_three_standard_errors() {
    let se = (0.2f64).sqrt();
    let s = scenario(3.0 * se, GenerationMode::Summary);
    let r = simulate(&s).unwrap();
    let p = BDistParams::new(3.0 * se, se, RefDist::student_t(18.0).unwrap(), 0.05, Condition::Reject)
        .unwrap();
    assert!((p.stage1_probability() - r.reject_fraction).abs() < 0.01);
    assert!(r.ks_distance.reject.unwrap() < 0.02);
}

#[test]
fn conditional_cdfs_reconstruct_the_marginal() {
    let s = scenario(0.0, GenerationMode::Raw);
    let r = simulate(&s).unwrap();
    for p in &r.empirical_cdf_points {
        let m = p.empirical.marginal.unwrap();
        let a = p.empirical.accept.unwrap();
        let j = p.empirical.reject.unwrap();
        let total = a * r.accept_fraction + j * r.reject_fraction;
        assert!((m - total).abs() < 1e-12, "b={}", p.b);
        assert!(a >= m - 1e-12 && m >= j - 1e-12, "b={}", p.b);
    }
    assert_eq!(r.condition_counts.accept + r.condition_counts.reject, REPS);
    assert_eq!(r.outcome_counts.total(), REPS);
}

#[test]
fn draws_are_reproducible_and_seed_dependent() {
    let s = scenario(0.0, GenerationMode::Raw);
    let a = simulate_draws(&s).unwrap();
    assert_eq!(a, simulate_draws(&s).unwrap());
    let mut t = s.clone();
    t.seed = 8;
    assert_ne!(a, simulate_draws(&t).unwrap());
    // a prefix of a longer run is the shorter run
    let mut longer = s.clone();
    longer.reps = REPS + 100;
    assert_eq!(a[..], simulate_draws(&longer).unwrap()[..REPS]);
    assert_eq!(summarize(&s, &a).unwrap(), simulate(&s).unwrap());
    // a rejected draw has |δ̂|/S > t_{0.975}, so B/S exceeds both critical values
    let edge = 1.7340636066175388 + 2.1009220402410385;
    for d in &a {
        assert_eq!(d.stage1 == Stage1::Reject, d.b_std > edge, "{d:?}");
    }
}
