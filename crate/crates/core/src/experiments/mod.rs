//! Scenario registry, seeded batch runner and CSV output.

pub mod output;
pub mod random;
pub mod registry;
pub mod runner;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abstraction::AbstractionError;
use crate::transfer::TransferError;

pub use output::{emit_results, fmt_sig12, read_aggregate, read_raw, AggregateRow, RawRow};
pub use registry::{all_scenarios, load_scenario, scenario_ids, ScenarioSpec, Variant};
pub use runner::{aggregate, run_scenario, RunConfig, RunRecord, ScenarioResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ucb,
    Topt,
    Imit,
    Texp,
    Rtrans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Self::Ucb, Self::Topt, Self::Imit, Self::Texp, Self::Rtrans];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ucb => "ucb",
            Self::Topt => "topt",
            Self::Imit => "imit",
            Self::Texp => "texp",
            Self::Rtrans => "rtrans",
        }
    }

    /// RNG stream of the algorithm's abstract-side draws. Stream 0 belongs
    /// to the base learner.
    pub fn stream(self) -> u64 {
        match self {
            Self::Ucb => 1,
            Self::Topt => 2,
            Self::Imit => 3,
            Self::Texp => 4,
            Self::Rtrans => 5,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected ucb, topt, imit, texp or rtrans)"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: String, source: csv::Error },
}
