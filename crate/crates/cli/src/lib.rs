//! Command-line front end: argument parsing, command dispatch and rendering.
//!
//! Every `cmd_*` function returns a [`ReportEnvelope`]; rendering to text,
//! CSV or JSON happens afterwards in [`render`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bvalue::eeb::{eeb, eeb_curve, min_beta_for_equivalence};
use bvalue::io::{parse_curve_spec, parse_dataset, parse_scenario, parse_summary, Dataset};
use bvalue::montecarlo::{simulate, SimReport};
use bvalue::procedure::{run_two_stage, EquivalenceBound};
use bvalue::report::{BetaThreshold, ComparisonReport, CurvePoint, ReportConfig, ReportEnvelope};
use bvalue::two_sample::analyze;
use bvalue::{
    BDistParams, Condition, DistMode, EebQuery, ProcedureConfig, SampleSummary, Solver,
    TwoSampleResult,
};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid used for the curves in the plant-growth reproduction.
pub const DEFAULT_CURVE: &str = "0.05:0.99:0.01";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<bvalue::Error> for CliError {
    fn from(e: bvalue::Error) -> Self {
        if e.is_user_error() {
            CliError::User(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    T,
    Z,
}

impl From<TestArg> for DistMode {
    fn from(t: TestArg) -> Self {
        match t {
            TestArg::T => DistMode::T,
            TestArg::Z => DistMode::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Auto,
    Marginal,
    Accept,
    Reject,
}

impl ConditionArg {
    fn resolve(self, r: &TwoSampleResult) -> Condition {
        match self {
            ConditionArg::Auto => r.stage1().into(),
            ConditionArg::Marginal => Condition::Marginal,
            ConditionArg::Accept => Condition::Accept,
            ConditionArg::Reject => Condition::Reject,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            ConditionArg::Auto => "auto",
            ConditionArg::Marginal => "marginal",
            ConditionArg::Accept => "accept",
            ConditionArg::Reject => "reject",
        }
    }
}

/// B-values, empirical equivalence bounds and the two-stage test for two means.
#[derive(Debug, Parser)]
#[command(name = "bvalue", version, about, max_term_width = 100)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pooled two-sample test, both confidence intervals and the B-value.
    Ttest(TtestArgs),
    /// Empirical equivalence bound, optionally as a curve over beta.
    Eeb(EebArgs),
    /// Run the two-stage procedure.
    Procedure(ProcedureArgs),
    /// Monte Carlo simulation from a scenario file.
    Simulate(SimulateArgs),
    /// Reproduce the analysis of the bundled plant-growth data.
    PlantGrowth(PlantGrowthArgs),
    /// Print the manual page (roff) to stdout.
    Man,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Significance level of the first-stage test, in (0, 0.5).
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Reference distribution: Student t with pooled degrees of freedom, or normal.
    #[arg(long = "test", value_enum, default_value_t = TestArg::T)]
    pub test: TestArg,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset with header `group,value`. Defaults to the bundled plant-growth data.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Label of the first group; the difference is first minus second.
    pub group1: Option<String>,
    /// Label of the second group.
    pub group2: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TtestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EebArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// First group as `n,mean,sd` instead of a dataset.
    #[arg(long, requires = "summary2", conflicts_with_all = ["data", "group1", "group2"])]
    pub summary1: Option<String>,
    /// Second group as `n,mean,sd`.
    #[arg(long, requires = "summary1")]
    pub summary2: Option<String>,
    /// Quantile level of the bound, in (0, 1).
    #[arg(long, default_value_t = 0.8)]
    pub beta: f64,
    /// Conditioning event; `auto` uses the realized first-stage verdict.
    #[arg(long, value_enum, default_value_t = ConditionArg::Auto)]
    pub condition: ConditionArg,
    /// Emit the bound over a beta grid `start:stop:step` as CSV `beta,eeb`.
    #[arg(long)]
    pub curve: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ProcedureArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Quantile level of the empirical equivalence bound, in (0, 1).
    #[arg(long, default_value_t = 0.8)]
    pub beta: f64,
    /// Fixed equivalence bound used instead of the empirical one.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the empirical and analytic CDF points as CSV.
    #[arg(long)]
    pub cdf_csv: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct PlantGrowthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Beta grid for the curves, `start:stop:step`.
    #[arg(long, default_value = DEFAULT_CURVE)]
    pub curve: String,
}

/// Text written to stdout, plus the report it was rendered from.
#[derive(Debug)]
pub struct Output {
    pub report: Option<ReportEnvelope>,
    pub stdout: String,
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))
}

pub fn load_dataset(path: Option<&Path>) -> CliResult<Dataset> {
    let text = match path {
        Some(p) => read_file(p)?,
        None => bvalue::fixtures::PLANT_GROWTH_CSV.to_string(),
    };
    parse_dataset(&text).map_err(|e| match path {
        Some(p) => CliError::User(format!("{}: {e}", p.display())),
        None => e.into(),
    })
}

fn groups(args: &DataArgs) -> CliResult<(String, String)> {
    match (&args.group1, &args.group2) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(CliError::User("two group labels are required".into())),
    }
}

fn config(common: &CommonArgs, data: Option<&DataArgs>) -> ReportConfig {
    ReportConfig {
        alpha: Some(common.alpha),
        test: Some(common.test.into()),
        input: data.map(|d| {
            d.data
                .as_ref()
                .map_or_else(|| "plant-growth (bundled)".to_string(), |p| p.display().to_string())
        }),
        groups: data.and_then(|d| groups(d).ok()),
        ..Default::default()
    }
}

/// Two-sample test of `groups.0 - groups.1`.
pub fn cmd_ttest(
    data: &Dataset,
    groups: (&str, &str),
    alpha: f64,
    mode: DistMode,
) -> CliResult<ReportEnvelope> {
    let r = analyze(&data.summary(groups.0)?, &data.summary(groups.1)?, alpha, mode)?;
    let mut env = ReportEnvelope::new(
        "ttest",
        VERSION,
        ReportConfig {
            alpha: Some(alpha),
            test: Some(mode),
            groups: Some((groups.0.to_string(), groups.1.to_string())),
            ..Default::default()
        },
    );
    env.two_sample = Some(r);
    env.b_value = Some(r.b_value);
    Ok(env)
}

/// Empirical equivalence bound for one comparison given as summaries.
pub fn cmd_eeb(
    g1: &SampleSummary,
    g2: &SampleSummary,
    alpha: f64,
    mode: DistMode,
    beta: f64,
    condition: ConditionArg,
    curve: Option<&[f64]>,
) -> CliResult<ReportEnvelope> {
    let r = analyze(g1, g2, alpha, mode)?;
    let params = BDistParams::null_for(&r, condition.resolve(&r))?;
    let result = eeb(&EebQuery::new(params, beta, Solver::Auto)?)?;
    let mut env = ReportEnvelope::new(
        "eeb",
        VERSION,
        ReportConfig {
            alpha: Some(alpha),
            beta: Some(beta),
            test: Some(mode),
            condition: Some(condition.as_str().to_string()),
            ..Default::default()
        },
    );
    env.two_sample = Some(r);
    env.b_value = Some(r.b_value);
    env.eeb.push(result);
    if let Some(grid) = curve {
        env.curve = eeb_curve(&params, grid)?
            .into_iter()
            .map(|(beta, eeb)| CurvePoint { beta, eeb })
            .collect();
    }
    Ok(env)
}

pub fn cmd_procedure(
    g1: &SampleSummary,
    g2: &SampleSummary,
    alpha: f64,
    mode: DistMode,
    beta: f64,
    delta: Option<f64>,
) -> CliResult<ReportEnvelope> {
    let cfg = ProcedureConfig::new(alpha, beta, mode, delta)?;
    let out = run_two_stage(g1, g2, &cfg)?;
    let mut env = ReportEnvelope::new(
        "procedure",
        VERSION,
        ReportConfig {
            alpha: Some(alpha),
            beta: Some(beta),
            test: Some(mode),
            delta,
            ..Default::default()
        },
    );
    env.two_sample = Some(out.result);
    env.b_value = Some(out.result.b_value);
    if let EquivalenceBound::Empirical(e) = out.bound {
        env.eeb.push(e);
    }
    env.procedure = Some(out);
    Ok(env)
}

pub fn cmd_simulate(scenario_text: &str, seed: Option<u64>) -> CliResult<ReportEnvelope> {
    let mut scenario = parse_scenario(scenario_text)?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    let report = simulate(&scenario)?;
    let mut env = ReportEnvelope::new(
        "simulate",
        VERSION,
        ReportConfig {
            alpha: Some(scenario.alpha),
            beta: Some(scenario.beta),
            seed: Some(scenario.seed),
            ..Default::default()
        },
    );
    env.simulation = Some(report);
    Ok(env)
}

/// Both treatment-versus-control comparisons of the bundled data, with the
/// minimal β for equivalence and the EEB curve under each condition.
pub fn cmd_plant_growth(alpha: f64, mode: DistMode, grid: &[f64]) -> CliResult<ReportEnvelope> {
    let data = load_dataset(None)?;
    let mut env = ReportEnvelope::new(
        "plant-growth",
        VERSION,
        ReportConfig {
            alpha: Some(alpha),
            test: Some(mode),
            input: Some("plant-growth (bundled)".into()),
            ..Default::default()
        },
    );
    for treatment in ["trt1", "trt2"] {
        let r = analyze(&data.summary(treatment)?, &data.summary("ctrl")?, alpha, mode)?;
        let mut thresholds = Vec::new();
        let mut curves = Vec::new();
        for c in Condition::ALL {
            let p = BDistParams::null_for(&r, c)?;
            thresholds.push(BetaThreshold {
                condition: c,
                min_beta: min_beta_for_equivalence(&p, r.b_value)?,
            });
            let pts = eeb_curve(&p, grid)?
                .into_iter()
                .map(|(beta, eeb)| CurvePoint { beta, eeb })
                .collect();
            curves.push((c, pts));
        }
        env.comparisons.push(ComparisonReport {
            groups: (treatment.to_string(), "ctrl".to_string()),
            two_sample: r,
            thresholds,
            curves,
        });
    }
    Ok(env)
}

pub fn manpage() -> CliResult<String> {
    let mut buf = Vec::new();
    clap_mangen::Man::new(Cli::command())
        .render(&mut buf)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))
}

fn summaries_for(args: &EebArgs) -> CliResult<(SampleSummary, SampleSummary, Option<DataArgs>)> {
    match (&args.summary1, &args.summary2) {
        (Some(a), Some(b)) => Ok((parse_summary(a)?, parse_summary(b)?, None)),
        _ => {
            let ds = load_dataset(args.data.data.as_deref())?;
            let (a, b) = groups(&args.data)?;
            Ok((ds.summary(&a)?, ds.summary(&b)?, Some(args.data.clone())))
        }
    }
}

/// Execute a parsed command line. `argv` is echoed into the report.
pub fn run(cli: &Cli, argv: &[String]) -> CliResult<Output> {
    let format = cli.format;
    let mut env = match &cli.command {
        Command::Man => {
            return Ok(Output {
                report: None,
                stdout: manpage()?,
            })
        }
        Command::Ttest(a) => {
            let ds = load_dataset(a.data.data.as_deref())?;
            let (g1, g2) = groups(&a.data)?;
            let mut env = cmd_ttest(&ds, (&g1, &g2), a.common.alpha, a.common.test.into())?;
            env.config = config(&a.common, Some(&a.data));
            env
        }
        Command::Eeb(a) => {
            let (g1, g2, data) = summaries_for(a)?;
            let grid = a.curve.as_deref().map(parse_curve_spec).transpose()?;
            let mut env = cmd_eeb(
                &g1,
                &g2,
                a.common.alpha,
                a.common.test.into(),
                a.beta,
                a.condition,
                grid.as_deref(),
            )?;
            env.config = ReportConfig {
                beta: Some(a.beta),
                condition: Some(a.condition.as_str().to_string()),
                ..config(&a.common, data.as_ref())
            };
            env
        }
        Command::Procedure(a) => {
            let ds = load_dataset(a.data.data.as_deref())?;
            let (g1, g2) = groups(&a.data)?;
            let mut env = cmd_procedure(
                &ds.summary(&g1)?,
                &ds.summary(&g2)?,
                a.common.alpha,
                a.common.test.into(),
                a.beta,
                a.delta,
            )?;
            env.config = ReportConfig {
                beta: Some(a.beta),
                delta: a.delta,
                ..config(&a.common, Some(&a.data))
            };
            env
        }
        Command::Simulate(a) => {
            let mut env = cmd_simulate(&read_file(&a.scenario)?, a.seed)?;
            env.config.input = Some(a.scenario.display().to_string());
            if let Some(path) = &a.cdf_csv {
                let sim = env.simulation.as_ref().expect("simulate sets the report");
                write_file(path, &cdf_csv(sim))?;
            }
            env
        }
        Command::PlantGrowth(a) => {
            let grid = parse_curve_spec(&a.curve)?;
            cmd_plant_growth(a.common.alpha, a.common.test.into(), &grid)?
        }
    };
    env.argv = argv.to_vec();
    let text = render(&env, format);
    if let Command::Simulate(SimulateArgs {
        output: Some(path), ..
    }) = &cli.command
    {
        write_file(path, &text)?;
        return Ok(Output {
            report: Some(env),
            stdout: String::new(),
        });
    }
    Ok(Output {
        report: Some(env),
        stdout: text,
    })
}

pub fn render(env: &ReportEnvelope, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = env.to_json();
            s.push('\n');
            s
        }
        Format::Csv => render_csv(env),
        Format::Text => render_text(env),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

fn cond_name(c: Condition) -> &'static str {
    match c {
        Condition::Marginal => "marginal",
        Condition::Accept => "accept",
        Condition::Reject => "reject",
    }
}

const TTEST_HEADER: &str =
    "estimate,se,t,df,p_value,ci95_lower,ci95_upper,ci90_lower,ci90_upper,b_value";

fn ttest_row(r: &TwoSampleResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.delta_hat,
        r.se,
        r.t_stat,
        r.dof,
        r.p_value,
        r.ci_1m_alpha.lower,
        r.ci_1m_alpha.upper,
        r.ci_1m_2alpha.lower,
        r.ci_1m_2alpha.upper,
        r.b_value
    )
}

fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("beta,eeb\n");
    for p in points {
        let _ = writeln!(s, "{},{}", p.beta, p.eeb);
    }
    s
}

pub fn cdf_csv(sim: &SimReport) -> String {
    let mut s = String::from(
        "b,empirical_marginal,empirical_accept,empirical_reject,analytic_marginal,analytic_accept,analytic_reject\n",
    );
    let f = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for p in &sim.empirical_cdf_points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.b,
            f(p.empirical.marginal),
            f(p.empirical.accept),
            f(p.empirical.reject),
            f(p.analytic.marginal),
            f(p.analytic.accept),
            f(p.analytic.reject)
        );
    }
    s
}

fn render_csv(env: &ReportEnvelope) -> String {
    if !env.curve.is_empty() {
        return curve_csv(&env.curve);
    }
    if let Some(sim) = &env.simulation {
        return cdf_csv(sim);
    }
    if !env.comparisons.is_empty() {
        let mut s = String::from("comparison,condition,beta,eeb\n");
        for c in &env.comparisons {
            for (cond, pts) in &c.curves {
                for p in pts {
                    let _ = writeln!(s, "{}-{},{},{},{}", c.groups.0, c.groups.1, cond_name(*cond), p.beta, p.eeb);
                }
            }
        }
        return s;
    }
    let mut s = String::new();
    if let Some(r) = &env.two_sample {
        let mut header = TTEST_HEADER.to_string();
        let mut row = ttest_row(r);
        if let Some(e) = env.eeb.first() {
            header.push_str(",condition,beta,eeb");
            let _ = write!(row, ",{},{},{}", cond_name(e.condition), e.beta, e.bound);
        }
        if let Some(p) = &env.procedure {
            header.push_str(",stage1,stage2");
            let _ = write!(row, ",{:?},{}", p.stage1, p.stage2.as_str());
        }
        let _ = writeln!(s, "{header}\n{row}");
    }
    s
}

fn text_two_sample(s: &mut String, r: &TwoSampleResult) {
    let level = |a: f64| 100.0 * (1.0 - a);
    let _ = writeln!(s, "estimate      {:.6} (SE {:.6})", r.delta_hat, r.se);
    let _ = writeln!(s, "t statistic   {:.6} on {} df", r.t_stat, r.dof);
    let _ = writeln!(s, "p-value       {:.6}", r.p_value);
    let _ = writeln!(
        s,
        "{:.0}% CI        [{:.6}, {:.6}]",
        level(r.alpha),
        r.ci_1m_alpha.lower,
        r.ci_1m_alpha.upper
    );
    let _ = writeln!(
        s,
        "{:.0}% CI        [{:.6}, {:.6}]",
        level(2.0 * r.alpha),
        r.ci_1m_2alpha.lower,
        r.ci_1m_2alpha.upper
    );
    let _ = writeln!(s, "B-value       {:.6}", r.b_value);
    let _ = writeln!(s, "stage 1       {:?}", r.stage1());
}

fn render_text(env: &ReportEnvelope) -> String {
    let mut s = String::new();
    if !env.curve.is_empty() {
        return curve_csv(&env.curve);
    }
    if let Some(r) = &env.two_sample {
        text_two_sample(&mut s, r);
    }
    for e in &env.eeb {
        let _ = writeln!(
            s,
            "EEB           {:.6} ({} condition, beta {:.6}, achieved cdf {:.6}, {:?})",
            e.bound,
            cond_name(e.condition),
            e.beta,
            e.achieved_cdf,
            e.solver_used
        );
        let _ = writeln!(
            s,
            "equivalence   [{:.6}, {:.6}]",
            e.interval.lower, e.interval.upper
        );
    }
    if let Some(p) = &env.procedure {
        if let EquivalenceBound::Fixed { bound } = p.bound {
            let _ = writeln!(s, "fixed bound   {bound:.6}");
        }
        let _ = writeln!(s, "geometry      {:?}", p.geometry);
        let _ = writeln!(s, "verdict       {}", p.stage2.as_str());
    }
    if let Some(sim) = &env.simulation {
        text_simulation(&mut s, sim);
    }
    for c in &env.comparisons {
        let _ = writeln!(s, "== {} - {}", c.groups.0, c.groups.1);
        text_two_sample(&mut s, &c.two_sample);
        for t in &c.thresholds {
            let _ = writeln!(
                s,
                "min beta for equivalence ({}): {}",
                cond_name(t.condition),
                opt(t.min_beta)
            );
        }
    }
    s
}

fn text_simulation(s: &mut String, sim: &SimReport) {
    let sc = &sim.scenario;
    let _ = writeln!(
        s,
        "scenario      n1={} n2={} mu1={} mu2={} sigma={} alpha={} beta={} reps={} seed={} mode={:?}",
        sc.n1, sc.n2, sc.mu1, sc.mu2, sc.sigma, sc.alpha, sc.beta, sc.reps, sc.seed, sc.mode
    );
    let _ = writeln!(
        s,
        "stage 1       accept {:.6}  reject {:.6}",
        sim.accept_fraction, sim.reject_fraction
    );
    let o = &sim.outcome_counts;
    let _ = writeln!(
        s,
        "stage 2       Equivalence {}  Inconclusive {}  DifferenceConfirmed {}  FalsePositiveCorrected {}",
        o.equivalence, o.inconclusive, o.difference_confirmed, o.false_positive_corrected
    );
    for c in Condition::ALL {
        let _ = writeln!(
            s,
            "{:<13} unit EEB {}  calibration {}  KS {}",
            cond_name(c),
            opt(sim.unit_eeb.get(c)),
            opt(sim.calibration.get(c)),
            opt(sim.ks_distance.get(c))
        );
    }
}
