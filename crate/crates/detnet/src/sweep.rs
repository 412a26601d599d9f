//! Angle-sweep driver with stable text output.
//!
//! Sweeps evaluate one scenario over an inclusive theta grid and tabulate the
//! named curves. CSV output is byte-stable: 15 significant digits, `.`
//! decimal separator, `\n` line endings, fixed column order per scenario.
//! With the `parallel` feature (default) grid points are evaluated with
//! rayon; [`run_sequential`] is always available and produces the same
//! table.

use serde::Serialize;

use crate::error::{DetnetError, Result};
use crate::scenarios::{evaluate, ScenarioId, ScenarioParams, ScenarioResult};

/// Environment variable holding an override path for the regression
/// fixture file; when unset the embedded copy is used.
pub const FIXTURE_ENV: &str = "DETNET_FIXTURES";

const EMBEDDED_FIXTURES: &str = include_str!("../fixtures/regression.csv");
const FIXTURE_HEADER: &str = "scenario,theta,name,value";

/// Where a named output column reads its value from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSource {
    Closed(&'static str),
    Numeric(&'static str),
    /// `1 - closed_form[key]`, for failure-probability columns.
    OneMinusClosed(&'static str),
    /// `1 - numeric[key]`.
    OneMinusNumeric(&'static str),
}

/// Fixed, documented column order for each scenario (after `theta`).
pub fn columns(id: ScenarioId) -> &'static [(&'static str, ColumnSource)] {
    use ColumnSource::*;
    match id {
        ScenarioId::TwoDetMinErr => &[
            ("ps1_closed", Closed("ps1")),
            ("ps2_closed", Closed("ps2")),
            ("ps2_numeric", Numeric("ps2")),
        ],
        ScenarioId::NDetUnambiguous => {
            &[("pf_closed", Closed("pf")), ("pf_numeric", Numeric("pf"))]
        }
        ScenarioId::SingleFireTwoDet
        | ScenarioId::GroupedSingleFire
        | ScenarioId::GroupedMultiFireEntangled
        | ScenarioId::GroupedWithNoFirePgm => {
            &[("ps_closed", Closed("ps")), ("ps_numeric", Numeric("ps"))]
        }
        ScenarioId::GroupedMultiFireProduct => &[("ps_numeric", Numeric("ps"))],
        ScenarioId::ClusterUnambiguous => &[
            ("pf_collective", OneMinusNumeric("ps_collective")),
            ("pf_individual", OneMinusClosed("ps_individual")),
        ],
        ScenarioId::OverlapAnalysis => &[
            ("pair_overlap_uniform", Closed("pair_overlap_uniform")),
            ("double_overlap_uniform", Closed("double_overlap_uniform")),
            ("pair_overlap_numeric", Numeric("pair_overlap_uniform")),
            ("double_overlap_numeric", Numeric("double_overlap_uniform")),
        ],
    }
}

/// One sweep request: scenario, inclusive theta range, point count, and the
/// extra scenario parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub scenario: ScenarioId,
    pub theta_start: f64,
    pub theta_end: f64,
    pub steps: usize,
    pub params: ScenarioParams,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.theta_start.is_finite() || !self.theta_end.is_finite() {
            return Err(DetnetError::Invalid("theta range must be finite".into()));
        }
        if self.theta_start >= self.theta_end {
            return Err(DetnetError::Invalid(format!(
                "theta_start {} must be below theta_end {}",
                self.theta_start, self.theta_end
            )));
        }
        if self.steps < 2 {
            return Err(DetnetError::Invalid(format!(
                "steps {} below the minimum of 2",
                self.steps
            )));
        }
        Ok(())
    }

    /// Inclusive grid; the final point is exactly `theta_end`.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.theta_end - self.theta_start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.theta_end
                } else {
                    self.theta_start + i as f64 * step
                }
            })
            .collect()
    }
}

/// Tabulated sweep: `columns[0]` is always `theta` and each row starts
/// with its grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub scenario: ScenarioId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn extract(result: &ScenarioResult, source: ColumnSource, name: &str) -> Result<f64> {
    let fetch = |map: &std::collections::BTreeMap<String, f64>, key: &str| {
        map.get(key).copied().ok_or_else(|| {
            DetnetError::Invalid(format!("scenario result lacks value '{key}' for column {name}"))
        })
    };
    Ok(match source {
        ColumnSource::Closed(key) => fetch(&result.closed_form, key)?,
        ColumnSource::Numeric(key) => fetch(&result.numeric, key)?,
        ColumnSource::OneMinusClosed(key) => 1.0 - fetch(&result.closed_form, key)?,
        ColumnSource::OneMinusNumeric(key) => 1.0 - fetch(&result.numeric, key)?,
    })
}

fn row_at(config: &SweepConfig, theta: f64) -> Result<Vec<f64>> {
    let result = evaluate(config.scenario, theta, &config.params)?;
    let layout = columns(config.scenario);
    let mut row = Vec::with_capacity(layout.len() + 1);
    row.push(theta);
    for (name, source) in layout {
        row.push(extract(&result, *source, name)?);
    }
    Ok(row)
}

fn table_from_rows(config: &SweepConfig, rows: Vec<Vec<f64>>) -> SweepTable {
    let mut cols = vec!["theta".to_string()];
    cols.extend(columns(config.scenario).iter().map(|(n, _)| n.to_string()));
    SweepTable {
        scenario: config.scenario,
        columns: cols,
        rows,
    }
}

/// Evaluates the grid with rayon when the `parallel` feature is enabled;
/// rows stay in theta order either way.
pub fn run(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let rows: Result<Vec<Vec<f64>>> = config
            .grid()
            .par_iter()
            .map(|&theta| row_at(config, theta))
            .collect();
        Ok(table_from_rows(config, rows?))
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sequential(config)
    }
}

/// Single-threaded evaluation; compiled regardless of features so the
/// two paths can be compared.
pub fn run_sequential(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let rows: Result<Vec<Vec<f64>>> = config
        .grid()
        .iter()
        .map(|&theta| row_at(config, theta))
        .collect();
    Ok(table_from_rows(config, rows?))
}

impl SweepTable {
    /// Header plus one line per grid point, `\n` endings, values printed
    /// with [`fmt_sig15`].
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| fmt_sig15(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Compact JSON document; numbers round-trip to the same values.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            scenario: &'a str,
            columns: &'a [String],
            rows: &'a [Vec<f64>],
        }
        let doc = Doc {
            scenario: self.scenario.id_str(),
            columns: &self.columns,
            rows: &self.rows,
        };
        serde_json::to_string(&doc)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| DetnetError::Invalid(format!("json encoding failed: {e}")))
    }
}

/// Formats with 15 significant digits, trimming trailing zeros, matching
/// the fixed-versus-scientific switch of C's `%.15g`.
pub fn fmt_sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp_part) = sci.split_once('e').expect("exponent separator");
    let exp: i32 = exp_part.parse().expect("exponent digits");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 15);

    let body = if (-4..15).contains(&exp) {
        let mut s = String::new();
        if exp < 0 {
            s.push_str("0.");
            for _ in 0..(-exp - 1) {
                s.push('0');
            }
            s.push_str(&digits);
        } else {
            let split = exp as usize + 1;
            s.push_str(&digits[..split]);
            if split < digits.len() {
                s.push('.');
                s.push_str(&digits[split..]);
            }
        }
        if s.contains('.') {
            let trimmed = s.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        } else {
            s
        }
    } else {
        let head = &digits[..1];
        let tail = digits[1..].trim_end_matches('0');
        let mant = if tail.is_empty() {
            head.to_string()
        } else {
            format!("{head}.{tail}")
        };
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// One parsed line of the regression fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureRow {
    pub scenario: String,
    pub theta_text: String,
    pub theta: f64,
    pub name: String,
    pub value_text: String,
    pub value: f64,
}

/// The canonical fixture grid: theta values written with 15 significant
/// digits so they re-parse to the exact f64 they were evaluated at.
pub const FIXTURE_THETA_TEXTS: [&str; 16] = [
    "0.1",
    "0.2",
    "0.3",
    "0.4",
    "0.5",
    "0.6",
    "0.7",
    "0.8",
    "0.9",
    "1",
    "1.1",
    "1.2",
    "1.3",
    "1.4",
    "1.5",
    "1.5707963267948",
];

/// Loads the fixture from the [`FIXTURE_ENV`] override path when set,
/// otherwise from the embedded copy.
pub fn fixture_rows() -> Result<Vec<FixtureRow>> {
    let text = match std::env::var(FIXTURE_ENV) {
        Ok(path) => std::fs::read_to_string(&path).map_err(|e| {
            DetnetError::Invalid(format!("fixture override {path} unreadable: {e}"))
        })?,
        Err(_) => EMBEDDED_FIXTURES.to_string(),
    };
    parse_fixtures(&text)
}

fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == FIXTURE_HEADER => {}
        other => {
            return Err(DetnetError::Invalid(format!(
                "fixture header must be '{FIXTURE_HEADER}', found {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(DetnetError::Invalid(format!(
                "fixture line '{line}' does not have 4 fields"
            )));
        }
        let theta: f64 = fields[1]
            .parse()
            .map_err(|_| DetnetError::Invalid(format!("bad fixture theta '{}'", fields[1])))?;
        let value: f64 = fields[3]
            .parse()
            .map_err(|_| DetnetError::Invalid(format!("bad fixture value '{}'", fields[3])))?;
        rows.push(FixtureRow {
            scenario: fields[0].to_string(),
            theta_text: fields[1].to_string(),
            theta,
            name: fields[2].to_string(),
            value_text: fields[3].to_string(),
            value,
        });
    }
    Ok(rows)
}
