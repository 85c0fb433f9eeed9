//! Distances between reward distributions and the abstraction-quality
//! measures built on them: IC error e(α), reward discrepancy s(α), the
//! expected-reward gap bound and two sufficient conditions for the abstract
//! argmax to match the base one.

mod distance;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::abstraction::{AbstractionError, Camab};
use crate::model::DiscreteDistribution;

pub use distance::{jsd_distance, w2_distance};

/// Distances at or below this count as zero IC error.
pub const ZERO_TOL: f64 = 1e-12;
/// Relative cutoff for singular values in the pseudoinverse.
pub const PINV_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "w2")]
    Wasserstein2,
    #[serde(rename = "jsd")]
    JensenShannon,
}

impl MetricKind {
    pub fn distance(self, p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
        match self {
            Self::Wasserstein2 => w2_distance(p, q),
            Self::JensenShannon => jsd_distance(p, q),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Wasserstein2 => "w2",
            Self::JensenShannon => "jsd",
        })
    }
}

impl FromStr for MetricKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "w2" => Ok(Self::Wasserstein2),
            "jsd" => Ok(Self::JensenShannon),
            other => Err(format!("unknown metric `{other}` (expected w2 or jsd)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error("the expected-reward bound holds for w2 only, not {0}")]
    UnsupportedMetric(MetricKind),
    #[error("all base actions have the same expected reward")]
    AllGapsZero,
    #[error("IC error is {0}, the algebraic condition needs an exact abstraction")]
    NonZeroICError(f64),
    #[error("pseudoinverse failed: {0}")]
    Linalg(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionDistance {
    pub action: String,
    pub ic: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbstractionReport {
    pub metric: MetricKind,
    pub ic_error: f64,
    pub reward_discrepancy: f64,
    pub per_action: Vec<ActionDistance>,
}

/// Per-base-action IC distance and reward discrepancy, with their maxima.
pub fn audit(c: &Camab, metric: MetricKind) -> Result<AbstractionReport, MetricError> {
    let mut per_action = Vec::with_capacity(c.base_actions().len());
    for (a, base) in c.base_distributions().iter().enumerate() {
        let pushed = c.pushforward(base)?;
        let abstract_dist = &c.abstract_distributions()[c.map_action(a)?];
        per_action.push(ActionDistance {
            action: c.base_actions()[a].to_string(),
            ic: metric.distance(&pushed, abstract_dist),
            discrepancy: metric.distance(base, &pushed),
        });
    }
    let ic_error = per_action.iter().map(|d| d.ic).fold(0.0, f64::max);
    let reward_discrepancy = per_action.iter().map(|d| d.discrepancy).fold(0.0, f64::max);
    Ok(AbstractionReport { metric, ic_error, reward_discrepancy, per_action })
}

/// e(α): the largest distance between "intervene then abstract" and
/// "abstract then intervene" over the base actions.
pub fn ic_error(c: &Camab, metric: MetricKind) -> Result<f64, MetricError> {
    Ok(audit(c, metric)?.ic_error)
}

/// s(α): the largest distance between a base reward distribution and its
/// own pushforward.
pub fn reward_discrepancy(c: &Camab, metric: MetricKind) -> Result<f64, MetricError> {
    Ok(audit(c, metric)?.reward_discrepancy)
}

/// e(α) + s(α), an upper bound on |μ_a − μ′_α(a)| for every base action.
pub fn expected_reward_gap_bound(c: &Camab, metric: MetricKind) -> Result<f64, MetricError> {
    if metric != MetricKind::Wasserstein2 {
        return Err(MetricError::UnsupportedMetric(metric));
    }
    let r = audit(c, metric)?;
    Ok(r.ic_error + r.reward_discrepancy)
}

/// True when e(α) + s(α) (W2) is at most half the smallest positive base gap.
pub fn max_preservation_sufficient(c: &Camab) -> Result<bool, MetricError> {
    let min_gap = c
        .base_gaps()
        .into_iter()
        .filter(|&g| g > ZERO_TOL)
        .fold(f64::INFINITY, f64::min);
    if !min_gap.is_finite() {
        return Err(MetricError::AllGapsZero);
    }
    Ok(expected_reward_gap_bound(c, MetricKind::Wasserstein2)? <= 0.5 * min_gap)
}

/// Moore-Penrose pseudoinverse; singular values below `PINV_RTOL` times the
/// largest one are treated as zero.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricError> {
    let svd = m.clone().svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.pseudo_inverse(PINV_RTOL * largest).map_err(|e| MetricError::Linalg(e.to_string()))
}

/// Algebraic check for an exact abstraction (e(α) = 0 under W2).
///
/// With D the |D[Y]|×|I| matrix of base reward distributions, A_Y′ the
/// reward value map and A_I the |I′|×|I| action map, the abstract means
/// implied by the base are r = y′ A_Y′ D A_I⁺. The condition holds unless
/// some base action b with α(b) ≠ α(a*) has r[α(a*)] − r[α(b)] ≤ 0.
pub fn algebraic_max_condition(c: &Camab) -> Result<bool, MetricError> {
    let e = ic_error(c, MetricKind::Wasserstein2)?;
    if e > ZERO_TOL {
        return Err(MetricError::NonZeroICError(e));
    }
    let n_y = c.base().reward_domain().len();
    let n_yp = c.abstract_model().reward_domain().len();
    let (n_i, n_ip) = (c.base_actions().len(), c.abstract_actions().len());

    let ymap = c.reward_index_map();
    let a_y = DMatrix::from_fn(n_yp, n_y, |k, j| if ymap[j] == k { 1.0 } else { 0.0 });
    let d = DMatrix::from_fn(n_y, n_i, |j, a| c.base_distributions()[a].probs()[j]);
    let a_i = DMatrix::from_fn(n_ip, n_i, |k, a| if c.action_map()[a] == k { 1.0 } else { 0.0 });
    let y_row = DMatrix::from_row_slice(1, n_yp, c.abstract_model().reward_domain().labels());
    let r = y_row * a_y * d * pseudo_inverse(&a_i)?;

    let best = argmax(&c.base_means());
    let target = c.action_map()[best];
    let violated = (0..n_i)
        .map(|b| c.action_map()[b])
        .filter(|&k| k != target)
        .any(|k| r[(0, target)] - r[(0, k)] <= 0.0);
    Ok(!violated)
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
