use std::path::PathBuf;
use std::process::{Command, Output};

use bvalue::report::parse_report;

fn bvalue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvalue"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn ttest_json_round_trips() {
    let o = bvalue(&["ttest", "trt1", "ctrl", "--format", "json"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let env = parse_report(&text).unwrap();
    assert_eq!(env.command, "ttest");
    assert_eq!(env.schema_version, 1);
    let r = env.two_sample.unwrap();
    assert!((r.delta_hat + 0.371).abs() < 1e-12);
    assert!((r.p_value - 0.249).abs() < 0.002);
    assert_eq!(format!("{}\n", env_json(&text)), text);
}

fn env_json(text: &str) -> String {
    parse_report(text).unwrap().to_json()
}

#[test]
fn ttest_text_uses_six_decimals() {
    let o = bvalue(&["ttest", "trt2", "ctrl"]);
    let s = stdout(&o);
    assert!(s.contains("0.494000 (SE 0.231488)"), "{s}");
    assert!(s.contains("[0.092585, 0.895415]"), "{s}");
}

#[test]
fn group_against_itself() {
    let o = bvalue(&["ttest", "ctrl", "ctrl", "--format", "json"]);
    let r = parse_report(&stdout(&o)).unwrap().two_sample.unwrap();
    assert_eq!(r.delta_hat, 0.0);
    assert_eq!(r.p_value, 1.0);
}

#[test]
fn user_errors_exit_with_2() {
    let o = bvalue(&["ttest", "trt1", "missing"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
    assert!(o.stdout.is_empty());

    let bad = scratch("bad.csv");
    std::fs::write(&bad, "group,value\na,1\nb,oops\n").unwrap();
    let o = bvalue(&["ttest", "--data", bad.to_str().unwrap(), "a", "b"]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(bvalue(&["eeb", "trt1", "ctrl", "--beta", "1.5"]).status.code(), Some(2));
    assert_eq!(bvalue(&["eeb", "trt1", "ctrl", "--beta", "0"]).status.code(), Some(2));
    assert_eq!(bvalue(&["ttest", "trt1", "ctrl", "--alpha", "0.7"]).status.code(), Some(2));
    assert_eq!(bvalue(&["ttest", "--data", "/nonexistent.csv", "a", "b"]).status.code(), Some(2));
    assert_eq!(bvalue(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bvalue(&["ttest", "trt1"]).status.code(), Some(2));
    assert_eq!(bvalue(&["--help"]).status.code(), Some(0));
}

#[test]
fn eeb_auto_condition_follows_stage1() {
    let o = bvalue(&["eeb", "trt1", "ctrl", "--beta", "0.85", "--format", "json"]);
    let env = parse_report(&stdout(&o)).unwrap();
    let e = env.eeb[0];
    assert_eq!(e.condition, bvalue::Condition::Accept);
    assert!((e.bound - 0.961_723_8).abs() < 1e-6);
    assert_eq!(e.interval.lower, -e.bound);

    let o = bvalue(&["eeb", "trt2", "ctrl", "--beta", "0.5", "--format", "json"]);
    let e = parse_report(&stdout(&o)).unwrap().eeb[0];
    assert_eq!(e.condition, bvalue::Condition::Reject);
    assert!((e.bound - 0.967_404_1).abs() < 1e-6);
}

#[test]
fn eeb_from_summaries_needs_both() {
    let o = bvalue(&[
        "eeb", "--summary1", "10,4.661,0.7936", "--summary2", "10,5.032,0.5830", "--condition",
        "marginal", "--format", "json",
    ]);
    assert!(o.status.success());
    assert_eq!(bvalue(&["eeb", "--summary1", "10,1,1"]).status.code(), Some(2));
    assert_eq!(
        bvalue(&["eeb", "--summary1", "10,1", "--summary2", "10,1,1"]).status.code(),
        Some(2)
    );
}

#[test]
fn curve_csv_is_nondecreasing() {
    let o = bvalue(&["eeb", "trt1", "ctrl", "--curve", "0.05:0.99:0.01"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("beta,eeb"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 95);
    assert_eq!(rows[0].0, 0.05);
    assert_eq!(rows[94].0, 0.99);
    assert!(rows.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn procedure_verdicts() {
    let verdict = |args: &[&str]| {
        let o = bvalue(args);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .find_map(|l| l.strip_prefix("verdict").map(|v| v.trim().to_string()))
            .unwrap()
    };
    assert_eq!(verdict(&["procedure", "trt1", "ctrl", "--beta", "0.85"]), "Equivalence");
    assert_eq!(verdict(&["procedure", "trt2", "ctrl", "--beta", "0.5"]), "FalsePositiveCorrected");
    assert_eq!(
        verdict(&["procedure", "trt2", "ctrl", "--beta", "0.5", "--delta", "0.05"]),
        "DifferenceConfirmed"
    );
    let o = bvalue(&["procedure", "trt1", "ctrl", "--beta", "0.85", "--format", "json"]);
    let env = parse_report(&stdout(&o)).unwrap();
    assert_eq!(env.procedure.unwrap().stage2, bvalue::Stage2::Equivalence);
}

#[test]
fn simulate_is_reproducible() {
    let scenario = scratch("null.toml");
    std::fs::write(
        &scenario,
        "n1 = 10\nn2 = 10\nmu1 = 0.0\nmu2 = 0.0\nsigma = 1.0\nalpha = 0.05\nbeta = 0.8\nreps = 20000\nseed = 11\n",
    )
    .unwrap();
    let (a, b, csv) = (scratch("a.json"), scratch("b.json"), scratch("cdf.csv"));
    let run = |out: &PathBuf| {
        let o = bvalue(&[
            "simulate",
            "--scenario",
            scenario.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--cdf-csv",
            csv.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let first = run(&a);
    let second = run(&a);
    assert_eq!(first, second);
    let _ = run(&b);
    let env = parse_report(&first).unwrap();
    let sim = env.simulation.unwrap();
    assert!((sim.accept_fraction - 0.95).abs() < 0.005);
    for c in bvalue::Condition::ALL {
        assert!(sim.ks_distance.get(c).is_some(), "{c:?}");
    }
    let cdf = std::fs::read_to_string(&csv).unwrap();
    assert!(cdf.starts_with("b,empirical_marginal"));
    assert_eq!(cdf.lines().count(), 102);

    std::fs::write(&scenario, "n1 = 10\nbogus = 3\n").unwrap();
    let o = bvalue(&["simulate", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plant_growth_reports_thresholds() {
    let o = bvalue(&["plant-growth", "--format", "json"]);
    let env = parse_report(&stdout(&o)).unwrap();
    assert_eq!(env.comparisons.len(), 2);
    let trt1 = &env.comparisons[0];
    assert_eq!(trt1.groups, ("trt1".to_string(), "ctrl".to_string()));
    assert_eq!(trt1.curves.len(), 3);
    assert!(trt1.curves.iter().all(|(_, c)| c.len() == 95));
    let o = bvalue(&["plant-growth", "--format", "csv"]);
    assert!(stdout(&o).starts_with("comparison,condition,beta,eeb\ntrt1-ctrl,marginal,0.05,"));
}

#[test]
fn manual_page_lists_flags() {
    let o = bvalue(&["man"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(".TH bvalue"));
    for flag in ["format", "ttest", "eeb", "procedure", "simulate"] {
        assert!(s.contains(flag), "{flag}");
    }
}
