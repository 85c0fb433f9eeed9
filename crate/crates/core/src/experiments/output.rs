use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::runner::{aggregate, ScenarioResult};
use super::ExperimentError;

pub const RAW_HEADER: [&str; 8] = ["scenario", "algorithm", "seed", "t", "action", "reward", "cum_regret", "simple_regret"];
pub const AGGREGATE_HEADER: [&str; 7] = ["scenario", "algorithm", "t", "mean_cum", "std_cum", "mean_simple", "std_simple"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub scenario: String,
    pub algorithm: String,
    pub seed: u64,
    pub t: u64,
    pub action: String,
    pub reward: f64,
    pub cum_regret: f64,
    pub simple_regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub algorithm: String,
    pub t: u64,
    pub mean_cum: f64,
    pub std_cum: f64,
    pub mean_simple: f64,
    pub std_simple: f64,
}

/// Decimal with 12 significant digits and no trailing zeros. Scientific
/// notation outside 1e-5 ≤ |x| < 1e15.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Csv { path: path.display().to_string(), source }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, ExperimentError> {
    let file = fs::File::create(path).map_err(|source| ExperimentError::Io { path: path.display().to_string(), source })?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// Writes `<dir>/<id>_raw.csv` and `<dir>/<id>_aggregate.csv` and returns
/// their paths. The directory is created if needed.
pub fn emit_results(result: &ScenarioResult, dir: &Path) -> Result<(PathBuf, PathBuf), ExperimentError> {
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.display().to_string(), source })?;
    let raw_path = dir.join(format!("{}_raw.csv", result.id));
    let agg_path = dir.join(format!("{}_aggregate.csv", result.id));

    let mut w = writer(&raw_path)?;
    w.write_record(RAW_HEADER).map_err(csv_err(&raw_path))?;
    for rec in &result.records {
        let (alg, seed) = (rec.algorithm.name(), rec.seed.to_string());
        for (i, s) in rec.trace.steps.iter().enumerate() {
            w.write_record([
                rec.scenario.as_str(),
                alg,
                &seed,
                &(i + 1).to_string(),
                &rec.action_names[s.action],
                &fmt_sig12(s.reward),
                &fmt_sig12(s.cum_regret),
                &fmt_sig12(s.simple_regret),
            ])
            .map_err(csv_err(&raw_path))?;
        }
    }
    w.flush().map_err(|source| ExperimentError::Io { path: raw_path.display().to_string(), source })?;

    let mut w = writer(&agg_path)?;
    w.write_record(AGGREGATE_HEADER).map_err(csv_err(&agg_path))?;
    for row in aggregate(result) {
        w.write_record([
            row.scenario.as_str(),
            &row.algorithm,
            &row.t.to_string(),
            &fmt_sig12(row.mean_cum),
            &fmt_sig12(row.std_cum),
            &fmt_sig12(row.mean_simple),
            &fmt_sig12(row.std_simple),
        ])
        .map_err(csv_err(&agg_path))?;
    }
    w.flush().map_err(|source| ExperimentError::Io { path: agg_path.display().to_string(), source })?;
    Ok((raw_path, agg_path))
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(ExperimentError::InvalidConfig(format!("{}: unexpected header {found:?}", path.display())));
    }
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>, ExperimentError> {
    read_rows(path, &AGGREGATE_HEADER)
}

pub fn read_raw(path: &Path) -> Result<Vec<RawRow>, ExperimentError> {
    read_rows(path, &RAW_HEADER)
}
