use crate::abstraction::Camab;
use crate::bandit::RegretTrace;

use super::TransferError;

const GAP_TOL: f64 = 1e-12;

fn inv_sq(gap: f64) -> f64 {
    1.0 / (gap * gap)
}

/// N·(K(a′) − 1) + Σ_{a ∈ α⁻¹(a′)} 1/Δ(a)² − 1/Δ(a′)², with zero-gap
/// actions contributing no reciprocal term.
pub fn imit_confidence_margin(c: &Camab, abstract_action: usize, n: f64) -> Result<f64, TransferError> {
    let pre = c.preimage_actions(abstract_action)?;
    let base_gaps = c.base_gaps();
    let gap = c.abstract_gaps()[abstract_action];
    let base_terms: f64 = pre.iter().map(|&a| base_gaps[a]).filter(|&g| g > GAP_TOL).map(inv_sq).sum();
    let own = if gap > GAP_TOL { inv_sq(gap) } else { 0.0 };
    Ok(n * (pre.len() as f64 - 1.0) + base_terms - own)
}

/// Whether imitation reaches the confidence of direct play on `a′`.
pub fn imit_confidence_check(c: &Camab, abstract_action: usize, n: f64) -> Result<bool, TransferError> {
    Ok(imit_confidence_margin(c, abstract_action, n)? >= 0.0)
}

/// Difference of the two UCB regret bounds, direct minus imitation:
/// 3 Σ Δ(a′)(1 − K(a′)) + 16 ln T Σ [1/Δ(a′) − Σ_{a ∈ α⁻¹(a′)} Δ(a′)/Δ(a)²],
/// summed over abstract actions with positive gap. A zero-gap base action
/// inside such a cluster is pulled linearly often by the base learner, so
/// its 1/Δ(a)² is infinite and the margin is −∞.
pub fn imit_regret_bound_margin(c: &Camab, horizon: u64) -> Result<f64, TransferError> {
    if horizon < 2 {
        return Err(TransferError::InvalidHorizon(horizon));
    }
    let base_gaps = c.base_gaps();
    let log_t = (horizon as f64).ln();
    let mut linear = 0.0;
    let mut logarithmic = 0.0;
    for (j, &gap) in c.abstract_gaps().iter().enumerate() {
        if gap <= GAP_TOL {
            continue;
        }
        let pre = c.preimage_actions(j)?;
        linear += gap * (1.0 - pre.len() as f64);
        let imitated: f64 = pre
            .iter()
            .map(|&a| if base_gaps[a] > GAP_TOL { gap * inv_sq(base_gaps[a]) } else { f64::INFINITY })
            .sum();
        logarithmic += 1.0 / gap - imitated;
    }
    Ok(3.0 * linear + 16.0 * log_t * logarithmic)
}

pub fn imit_regret_bound_check(c: &Camab, horizon: u64) -> Result<bool, TransferError> {
    Ok(imit_regret_bound_margin(c, horizon)? >= 0.0)
}

/// Per-step mean cumulative regret of the direct runs minus that of the
/// imitation runs.
pub fn regret_difference_estimate(ucb_runs: &[RegretTrace], imit_runs: &[RegretTrace]) -> Result<Vec<f64>, TransferError> {
    if ucb_runs.len() != imit_runs.len() {
        return Err(TransferError::LengthMismatch(format!("{} direct runs vs {} imitation runs", ucb_runs.len(), imit_runs.len())));
    }
    let Some(first) = ucb_runs.first() else { return Ok(Vec::new()) };
    let horizon = first.len();
    if let Some(r) = ucb_runs.iter().chain(imit_runs).find(|r| r.len() != horizon) {
        return Err(TransferError::LengthMismatch(format!("horizon {} vs {}", r.len(), horizon)));
    }
    let n = ucb_runs.len() as f64;
    Ok((0..horizon)
        .map(|t| {
            let direct: f64 = ucb_runs.iter().map(|r| r.steps[t].cum_regret).sum();
            let imitated: f64 = imit_runs.iter().map(|r| r.steps[t].cum_regret).sum();
            (direct - imitated) / n
        })
        .collect())
}
