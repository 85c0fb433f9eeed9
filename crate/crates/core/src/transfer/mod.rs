//! Transfer from a solved base bandit to its abstraction: optimum transfer
//! (TOpt), action imitation (IMIT), expected-value transfer with action
//! elimination (TExp) and reward transfer, plus the inequality checks that
//! predict when imitation pays off.

mod checks;
mod warm;

use rand::Rng;

use crate::abstraction::{AbstractionError, Camab};
use crate::bandit::{ArmStats, BanditEnv, BanditError, Pull, RegretTrace};
use crate::metrics::MetricError;

pub use checks::{
    imit_confidence_check, imit_confidence_margin, imit_regret_bound_check, imit_regret_bound_margin,
    regret_difference_estimate,
};
pub use warm::{
    eliminate_actions, fit_alpha_e, kappa_bounds, reward_transfer, rtrans, texp, transfer_expected_values,
    EpsilonMode, LinearRewardMap, RewardTransfer, TExpConfig, TransferReport, TransferredArm, TransferredMean,
    WarmRun,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransferError {
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Bandit(#[from] BanditError),
    #[error("unknown action index {0}")]
    UnknownAction(usize),
    #[error("abstract action {0} has no pulled preimage")]
    UncoveredAbstractAction(String),
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("action {0} has zero pulls")]
    ZeroCount(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("horizon must be at least 2, got {0}")]
    InvalidHorizon(u64),
}

/// Plays one abstract action with probability 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterministicPolicy {
    pub action: usize,
}

impl DeterministicPolicy {
    pub fn prob(&self, a: usize) -> f64 {
        if a == self.action {
            1.0
        } else {
            0.0
        }
    }
}

/// TOpt: play the image of the base optimum.
pub fn topt(c: &Camab, base_optimal: usize) -> Result<DeterministicPolicy, TransferError> {
    let action = c.map_action(base_optimal).map_err(|_| TransferError::UnknownAction(base_optimal))?;
    Ok(DeterministicPolicy { action })
}

/// Plays a fixed action per round on `env` and records regret; the played
/// action doubles as the recommendation.
pub fn play_schedule<R: Rng + ?Sized>(env: &BanditEnv, schedule: &[usize], rng: &mut R) -> (ArmStats, RegretTrace) {
    let mut stats = ArmStats::new(env.len());
    let mut trace = RegretTrace::default();
    for &a in schedule {
        let y = env.pull(a, rng);
        stats.update(a, y);
        trace.push(env, a, y, Some(a));
    }
    (stats, trace)
}

#[derive(Clone, Debug)]
pub struct ImitRun {
    pub stats: ArmStats,
    pub trace: RegretTrace,
    /// Greedy arm over the final estimates.
    pub policy: Option<usize>,
}

/// IMIT: replay the base trajectory's actions through α on the abstract
/// bandit, drawing fresh abstract rewards.
pub fn imit<R: Rng + ?Sized>(c: &Camab, base_trajectory: &[Pull], rng: &mut R) -> Result<ImitRun, TransferError> {
    let env = BanditEnv::abstract_of(c);
    let mut stats = ArmStats::new(env.len());
    let mut trace = RegretTrace::default();
    for p in base_trajectory {
        let a = c.map_action(p.action).map_err(|_| TransferError::UnknownAction(p.action))?;
        let y = env.pull(a, rng);
        stats.update(a, y);
        trace.push(&env, a, y, stats.greedy());
    }
    let policy = stats.greedy();
    Ok(ImitRun { stats, trace, policy })
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::bandit::simple_regret;
    use crate::experiments::random::random_camab;
    use crate::metrics::argmax;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn topt_is_optimal_iff_the_argmax_is_preserved(seed in any::<u64>()) {
            let c = random_camab(&mut ChaCha8Rng::seed_from_u64(seed));
            let env = BanditEnv::abstract_of(&c);
            let best = argmax(&c.base_means());
            let policy = topt(&c, best).unwrap();
            let zero = simple_regret(&env, policy.action).unwrap() == 0.0;
            let abs_means = c.abstract_means();
            let preserved = abs_means[c.action_map()[best]] == abs_means[argmax(&abs_means)];
            prop_assert_eq!(zero, preserved);
        }
    }
}
