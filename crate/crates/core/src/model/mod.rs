//! Finite-domain structural causal models: mechanisms as column-stochastic
//! CPTs, the do-operator, exact inference by enumeration and ancestral sampling.
//!
//! CPT rows are indexed by child values; columns enumerate parent tuples with
//! the first listed parent varying slowest.

mod domain;
mod inference;
mod json;
mod scm;

use std::collections::BTreeMap;
use std::fmt;

pub use domain::{DiscreteDistribution, FiniteDomain, MASS_TOL};
pub use json::{validate_scm, ModelSpec};
pub use scm::{Mechanism, ModelWarning, Scm, Variable};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain labels must be finite")]
    NonFiniteLabel,
    #[error("domain labels are not strictly increasing: {0:?}")]
    UnorderedDomain(Vec<f64>),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has no mechanism")]
    MissingMechanism(String),
    #[error("variable `{0}` has more than one mechanism")]
    DuplicateMechanism(String),
    #[error("CPT of `{var}` must be {rows}x{cols}, found {found}")]
    CptShape { var: String, rows: usize, cols: usize, found: String },
    #[error("CPT of `{var}` has entry {value} at row {row}, column {col} outside [0, 1]")]
    InvalidCptEntry { var: String, row: usize, col: usize, value: f64 },
    #[error("CPT of `{var}`: column {col} sums to {sum}, expected 1")]
    NonStochasticColumn { var: String, col: usize, sum: f64 },
    #[error("parent graph has a cycle through {0:?}")]
    CyclicGraph(Vec<String>),
    #[error("reward variable `{0}` is not declared")]
    UnknownReward(String),
    #[error("value index {index} is outside the domain of `{var}` (size {size})")]
    ValueOutOfDomain { var: String, index: usize, size: usize },
    #[error("label {label} is not in the domain of `{var}`")]
    UnknownLabel { var: String, label: f64 },
    #[error("expected {expected} probabilities, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
}

/// Assignment of constant value indices to a set of variables. The empty
/// intervention is the observational action.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intervention {
    assignments: BTreeMap<String, usize>,
}

impl Intervention {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(var: impl Into<String>, value: usize) -> Self {
        Self::from_pairs([(var.into(), value)])
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Self {
        Self { assignments: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.assignments.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignments.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.assignments.keys().map(String::as_str)
    }
}

/// Renders as `do(T=0)` with value indices, `do(A=0;B=1)` for several
/// targets and `do()` for the observational action.
impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("do(")?;
        for (i, (k, v)) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str(")")
    }
}
