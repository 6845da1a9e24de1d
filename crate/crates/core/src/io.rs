//! Text parsers for every input the library accepts: `group,value` datasets,
//! `n,mean,sd` summaries, `start:stop:step` β grids and simulation scenarios.
//!
//! All of them take untrusted text and must return an error, never panic.

use crate::error::{Error, Result};
use crate::montecarlo::SimScenario;
use crate::two_sample::SampleSummary;

/// Upper limit on the number of points a curve specification may expand to.
pub const MAX_CURVE_POINTS: usize = 100_000;

/// Observations grouped by label, in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    groups: Vec<(String, Vec<f64>)>,
}

impl Dataset {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|(l, _)| l.as_str())
    }

    pub fn values(&self, label: &str) -> Option<&[f64]> {
        self.groups
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }

    /// Summary of one group; errors when the label is absent or has < 2 rows.
    pub fn summary(&self, label: &str) -> Result<SampleSummary> {
        let values = self
            .values(label)
            .ok_or_else(|| Error::domain(format!("group '{label}' not found in dataset")))?;
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "group '{label}' has {} row(s); at least 2 are required",
                values.len()
            )));
        }
        SampleSummary::from_observations(values)
    }
}

/// Parse a `group,value` CSV document with exactly that header line.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "group" || &headers[1] != "value" {
        return Err(Error::parse(1, "header must be exactly 'group,value'"));
    }

    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        if record.len() != 2 {
            return Err(Error::parse(line, "expected 2 fields"));
        }
        let label = &record[0];
        if label.is_empty() {
            return Err(Error::parse(line, "empty group label"));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid number '{}'", &record[1])))?;
        if !value.is_finite() {
            return Err(Error::parse(line, "value must be finite"));
        }
        match groups.iter_mut().find(|(l, _)| l == label) {
            Some((_, v)) => v.push(value),
            None => groups.push((label.to_string(), vec![value])),
        }
    }

    if groups.len() < 2 {
        return Err(Error::parse(
            0,
            format!("need at least 2 distinct groups, found {}", groups.len()),
        ));
    }
    Ok(Dataset { groups })
}

/// Parse `n,mean,sd`.
pub fn parse_summary(text: &str) -> Result<SampleSummary> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    let [n, mean, sd] = fields[..] else {
        return Err(Error::parse(0, "summary must be 'n,mean,sd'"));
    };
    let n: usize = n
        .parse()
        .map_err(|_| Error::parse(0, format!("invalid sample size '{n}'")))?;
    let mean: f64 = mean
        .parse()
        .map_err(|_| Error::parse(0, format!("invalid mean '{mean}'")))?;
    let sd: f64 = sd
        .parse()
        .map_err(|_| Error::parse(0, format!("invalid standard deviation '{sd}'")))?;
    SampleSummary::new(n, mean, sd)
}

/// Expand `start:stop:step` into an inclusive, increasing grid.
pub fn parse_curve_spec(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, step] = parts[..] else {
        return Err(Error::parse(0, "curve must be 'start:stop:step'"));
    };
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .parse()
            .map_err(|_| Error::parse(0, format!("invalid number '{s}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::parse(0, format!("'{s}' is not finite")))
        }
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step <= 0.0 {
        return Err(Error::parse(0, "curve step must be positive"));
    }
    if stop < start {
        return Err(Error::parse(0, "curve stop must not be below start"));
    }
    let span = (stop - start) / step;
    if span.is_nan() || span >= MAX_CURVE_POINTS as f64 {
        return Err(Error::parse(
            0,
            format!("curve expands to more than {MAX_CURVE_POINTS} points"),
        ));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            // strip accumulated representation noise, e.g. 0.05 + 94 * 0.01
            let r = (v * 1e12).round() / 1e12;
            if r.is_finite() {
                r
            } else {
                v
            }
        })
        .collect())
}

/// Parse a flat `key = value` scenario file (TOML syntax).
pub fn parse_scenario(text: &str) -> Result<SimScenario> {
    let scenario: SimScenario = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::parse(line, e.message().to_string())
    })?;
    scenario.validate()?;
    Ok(scenario)
}
