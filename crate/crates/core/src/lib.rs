//! B-values, empirical equivalence bounds (EEB) and a two-stage procedure for
//! comparing two means.
//!
//! The first stage is an ordinary pooled-variance two-sample t (or z) test.
//! The second stage is an equivalence test whose bound is not fixed in advance
//! but read off the distribution of the B-value under the null hypothesis,
//! optionally conditioned on the first-stage verdict.
//!
//! Module map:
//!
//! - [`special_fns`]: Student-t and standard normal CDF, density and quantile.
//! - [`two_sample`]: summaries, pooled standard error, intervals, B-value.
//! - [`b_dist`]: marginal and conditional distributions of the B-value.
//! - [`eeb`]: empirical equivalence bounds (closed form and bisection).
//! - [`procedure`]: the two-stage decision procedure.
//! - [`montecarlo`]: seeded simulation harness.
//! - [`io`] and [`report`]: dataset/scenario parsers and the JSON report schema.

pub mod b_dist;
pub mod eeb;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod montecarlo;
pub mod procedure;
pub mod report;
pub mod special_fns;
pub mod two_sample;

pub use b_dist::{BDistParams, Condition};
pub use eeb::{EebQuery, EebResult, Solver};
pub use error::{Error, Result};
pub use procedure::{ProcedureConfig, ProcedureOutcome, Stage2};
pub use special_fns::RefDist;
pub use two_sample::{DistMode, Interval, SampleSummary, Stage1, TwoSampleResult};
