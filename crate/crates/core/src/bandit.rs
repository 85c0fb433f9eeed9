//! Causal bandit environments, UCB and round-robin arm selection, and regret
//! bookkeeping.

use rand::Rng;

use crate::abstraction::Camab;
use crate::model::{DiscreteDistribution, Intervention, ModelError, Scm};

/// Default UCB exploration constant.
pub const DEFAULT_C: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BanditError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("action set is empty")]
    EmptyActions,
    #[error("action {0} is listed twice")]
    DuplicateAction(String),
    #[error("unknown action index {0}")]
    UnknownAction(usize),
    #[error("{0} actions but {1} distributions")]
    LengthMismatch(usize, usize),
}

/// Arms with their exact reward distributions. Rewards are drawn from the
/// reward marginal of each arm, which matches ancestral sampling of the
/// full model for reward purposes.
#[derive(Clone, Debug)]
pub struct BanditEnv {
    actions: Vec<Intervention>,
    dists: Vec<DiscreteDistribution>,
    means: Vec<f64>,
    best: f64,
}

impl BanditEnv {
    pub fn new(scm: &Scm, actions: Vec<Intervention>) -> Result<Self, BanditError> {
        let dists = actions.iter().map(|a| scm.reward_distribution(a)).collect::<Result<Vec<_>, _>>()?;
        Self::from_distributions(actions, dists)
    }

    pub fn from_distributions(actions: Vec<Intervention>, dists: Vec<DiscreteDistribution>) -> Result<Self, BanditError> {
        if actions.is_empty() {
            return Err(BanditError::EmptyActions);
        }
        if actions.len() != dists.len() {
            return Err(BanditError::LengthMismatch(actions.len(), dists.len()));
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].contains(a) {
                return Err(BanditError::DuplicateAction(a.to_string()));
            }
        }
        let means: Vec<f64> = dists.iter().map(DiscreteDistribution::mean).collect();
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { actions, dists, means, best })
    }

    pub fn base_of(c: &Camab) -> Self {
        Self::from_distributions(c.base_actions().to_vec(), c.base_distributions().to_vec()).expect("validated CAMAB")
    }

    pub fn abstract_of(c: &Camab) -> Self {
        Self::from_distributions(c.abstract_actions().to_vec(), c.abstract_distributions().to_vec())
            .expect("validated CAMAB")
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn actions(&self) -> &[Intervention] {
        &self.actions
    }

    pub fn distribution(&self, a: usize) -> &DiscreteDistribution {
        &self.dists[a]
    }

    pub fn true_means(&self) -> &[f64] {
        &self.means
    }

    pub fn optimal_mean(&self) -> f64 {
        self.best
    }

    /// Lowest-indexed arm with the largest true mean.
    pub fn optimal_action(&self) -> usize {
        self.means.iter().position(|&m| m == self.best).expect("non-empty")
    }

    pub fn gap(&self, a: usize) -> f64 {
        self.best - self.means[a]
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.means.iter().map(|m| self.best - m).collect()
    }

    pub fn pull<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> f64 {
        self.dists[a].sample(rng)
    }

    /// Index of the sampled reward label, for callers that relabel rewards.
    pub fn pull_index<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> usize {
        self.dists[a].sample_index(rng)
    }
}

/// Per-arm pull counts and running mean estimates. A warm-started arm
/// carries a prior mean with a pseudo-count; the estimate is the
/// count-weighted blend of prior and observed rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmStats {
    pulls: Vec<u64>,
    means: Vec<f64>,
    pseudo: Vec<f64>,
    prior: Vec<f64>,
}

impl ArmStats {
    pub fn new(arms: usize) -> Self {
        Self { pulls: vec![0; arms], means: vec![0.0; arms], pseudo: vec![0.0; arms], prior: vec![0.0; arms] }
    }

    pub fn warm(prior: Vec<f64>, pseudo: Vec<f64>) -> Self {
        assert_eq!(prior.len(), pseudo.len(), "prior and pseudo-count lengths differ");
        assert!(pseudo.iter().all(|&w| w >= 0.0), "pseudo-counts must be non-negative");
        let means = prior.iter().zip(&pseudo).map(|(&m, &w)| if w > 0.0 { m } else { 0.0 }).collect();
        Self { pulls: vec![0; prior.len()], means, pseudo, prior }
    }

    pub fn arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn pulls(&self, a: usize) -> u64 {
        self.pulls[a]
    }

    pub fn all_pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn pseudo_count(&self, a: usize) -> f64 {
        self.pseudo[a]
    }

    pub fn prior_mean(&self, a: usize) -> f64 {
        self.prior[a]
    }

    /// N(a) plus the pseudo-count.
    pub fn weight(&self, a: usize) -> f64 {
        self.pulls[a] as f64 + self.pseudo[a]
    }

    pub fn total_weight(&self) -> f64 {
        (0..self.arms()).map(|a| self.weight(a)).sum()
    }

    /// μ̂(a), or `None` before any observation or prior.
    pub fn mean(&self, a: usize) -> Option<f64> {
        (self.weight(a) > 0.0).then_some(self.means[a])
    }

    pub fn update(&mut self, a: usize, reward: f64) {
        self.pulls[a] += 1;
        self.means[a] += (reward - self.means[a]) / self.weight(a);
    }

    /// Arm with the largest estimate among those that have one.
    pub fn greedy(&self) -> Option<usize> {
        self.greedy_among(&(0..self.arms()).collect::<Vec<_>>())
    }

    pub fn greedy_among(&self, arms: &[usize]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &a in arms {
            if let Some(m) = self.mean(a) {
                if best.is_none_or(|b| m > self.means[b]) {
                    best = Some(a);
                }
            }
        }
        best
    }
}

/// UCB1-style selection: unvisited arms first (lowest index), then the
/// largest μ̂ + sqrt(c ln t / (N + pseudo)), ties to the lowest index.
pub fn ucb_select(stats: &ArmStats, t: u64, c: f64) -> usize {
    ucb_select_among(stats, t, c, &(0..stats.arms()).collect::<Vec<_>>())
}

pub fn ucb_select_among(stats: &ArmStats, t: u64, c: f64, arms: &[usize]) -> usize {
    assert!(!arms.is_empty(), "no arms to select from");
    if let Some(&a) = arms.iter().find(|&&a| stats.weight(a) == 0.0) {
        return a;
    }
    let log_t = (t.max(1) as f64).ln();
    let mut best = arms[0];
    let mut best_index = f64::NEG_INFINITY;
    for &a in arms {
        let index = stats.means[a] + (c * log_t / stats.weight(a)).sqrt();
        if index > best_index {
            best = a;
            best_index = index;
        }
    }
    best
}

/// Non-adaptive schedule (t − 1) mod |A|.
pub fn round_robin_select(stats: &ArmStats, t: u64) -> usize {
    ((t.max(1) - 1) % stats.arms() as u64) as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selector {
    Ucb { c: f64 },
    RoundRobin,
}

impl Selector {
    pub fn select(&self, stats: &ArmStats, t: u64) -> usize {
        match *self {
            Self::Ucb { c } => ucb_select(stats, t, c),
            Self::RoundRobin => round_robin_select(stats, t),
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, Self::Ucb { .. })
    }
}

impl Default for Selector {
    fn default() -> Self {
        Self::Ucb { c: DEFAULT_C }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pull {
    pub action: usize,
    pub reward: f64,
}

pub type Trajectory = Vec<Pull>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceStep {
    pub action: usize,
    pub reward: f64,
    pub gap: f64,
    pub cum_regret: f64,
    /// Arm the learner would recommend after this step.
    pub recommended: Option<usize>,
    /// Gap of `recommended`; the optimal mean when there is none yet.
    pub simple_regret: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegretTrace {
    pub steps: Vec<TraceStep>,
    pub recommended: Option<usize>,
}

impl RegretTrace {
    pub fn push(&mut self, env: &BanditEnv, action: usize, reward: f64, recommended: Option<usize>) {
        let gap = env.gap(action);
        let cum_regret = self.final_cum_regret() + gap;
        let simple_regret = recommended.map_or(env.optimal_mean(), |r| env.gap(r));
        self.steps.push(TraceStep { action, reward, gap, cum_regret, recommended, simple_regret });
        self.recommended = recommended;
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_cum_regret(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cum_regret)
    }

    pub fn final_simple_regret(&self) -> Option<f64> {
        self.steps.last().map(|s| s.simple_regret)
    }
}

#[derive(Clone, Debug)]
pub struct DirectRun {
    pub stats: ArmStats,
    pub trajectory: Trajectory,
    pub trace: RegretTrace,
    pub selector: Selector,
}

impl DirectRun {
    pub fn recommended(&self) -> Option<usize> {
        self.trace.recommended
    }
}

/// Plays `horizon` rounds: select, draw a reward from the arm's exact
/// distribution, update the running mean. The recommendation is the greedy
/// arm after each round.
pub fn run_direct<R: Rng + ?Sized>(env: &BanditEnv, horizon: usize, selector: Selector, rng: &mut R) -> DirectRun {
    let mut stats = ArmStats::new(env.len());
    let mut trajectory = Vec::with_capacity(horizon);
    let mut trace = RegretTrace::default();
    for t in 1..=horizon as u64 {
        let a = selector.select(&stats, t);
        let y = env.pull(a, rng);
        stats.update(a, y);
        trajectory.push(Pull { action: a, reward: y });
        trace.push(env, a, y, stats.greedy());
    }
    DirectRun { stats, trajectory, trace, selector }
}

/// μ* − μ(recommended).
pub fn simple_regret(env: &BanditEnv, recommended: usize) -> Result<f64, BanditError> {
    if recommended >= env.len() {
        return Err(BanditError::UnknownAction(recommended));
    }
    Ok(env.gap(recommended))
}

/// Running sum of true-mean gaps along a trajectory.
pub fn cumulative_regret(env: &BanditEnv, trajectory: &[Pull]) -> Result<Vec<f64>, BanditError> {
    let mut acc = 0.0;
    trajectory
        .iter()
        .map(|p| {
            if p.action >= env.len() {
                return Err(BanditError::UnknownAction(p.action));
            }
            acc += env.gap(p.action);
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FiniteDomain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bernoulli_env(ps: &[f64]) -> BanditEnv {
        let actions = (0..ps.len()).map(|i| Intervention::single("X", i)).collect();
        let dists = ps
            .iter()
            .map(|&p| DiscreteDistribution::new(FiniteDomain::indices(2), vec![1.0 - p, p]).unwrap())
            .collect();
        BanditEnv::from_distributions(actions, dists).unwrap()
    }

    fn stats(means: &[f64], pulls: &[u64]) -> ArmStats {
        let mut s = ArmStats::new(means.len());
        for (a, (&m, &n)) in means.iter().zip(pulls).enumerate() {
            for _ in 0..n {
                s.update(a, m);
            }
        }
        s
    }

    #[test]
    fn ucb_examples() {
        assert_eq!(ucb_select(&ArmStats::new(3), 1, 2.0), 0);
        assert_eq!(ucb_select(&stats(&[0.5, 0.5], &[10, 2]), 20, 2.0), 1);
        assert_eq!(ucb_select(&stats(&[0.9, 0.1], &[50, 50]), 100, 2.0), 0);
        assert_eq!(ucb_select(&stats(&[0.5, 0.0, 0.5], &[3, 0, 3]), 10, 2.0), 1);
        // Exact tie goes to the lowest index.
        assert_eq!(ucb_select(&stats(&[0.5, 0.5], &[4, 4]), 10, 2.0), 0);
    }

    #[test]
    fn ucb_counts_pseudo_observations() {
        let s = ArmStats::warm(vec![0.2, 0.0], vec![5.0, 0.0]);
        assert_eq!(ucb_select(&s, 1, 2.0), 1);
        let s = ArmStats::warm(vec![0.2, 0.9], vec![5.0, 5.0]);
        assert_eq!(ucb_select(&s, 1, 2.0), 1);
    }

    #[test]
    fn round_robin_examples() {
        let s3 = ArmStats::new(3);
        assert_eq!((1..=4).map(|t| round_robin_select(&s3, t)).collect::<Vec<_>>(), vec![0, 1, 2, 0]);
        assert_eq!(round_robin_select(&ArmStats::new(1), 9), 0);
        assert_eq!(round_robin_select(&ArmStats::new(2), 7), 0);
    }

    #[test]
    fn warm_blend_is_count_weighted() {
        let mut s = ArmStats::warm(vec![0.5], vec![3.0]);
        s.update(0, 1.0);
        assert!((s.mean(0).unwrap() - (3.0 * 0.5 + 1.0) / 4.0).abs() < 1e-15);
        assert_eq!(s.pulls(0), 1);
        assert_eq!(ArmStats::new(2).mean(0), None);
    }

    #[test]
    fn deterministic_rewards_find_best() {
        let env = bernoulli_env(&[1.0, 0.0]);
        for seed in 0..10 {
            let run = run_direct(&env, 200, Selector::default(), &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(run.recommended(), Some(0));
        }
    }

    #[test]
    fn round_robin_visits_each_once() {
        let env = bernoulli_env(&[0.3, 0.6, 0.9]);
        let run = run_direct(&env, 3, Selector::RoundRobin, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(run.stats.all_pulls(), &[1, 1, 1]);
    }

    #[test]
    fn trace_accounting() {
        let env = bernoulli_env(&[0.62, 0.38]);
        let run = run_direct(&env, 300, Selector::default(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(run.trace.len(), 300);
        let cum = cumulative_regret(&env, &run.trajectory).unwrap();
        for (s, c) in run.trace.steps.iter().zip(&cum) {
            assert!((s.cum_regret - c).abs() < 1e-12);
        }
        assert!(run.trace.steps.windows(2).all(|w| w[1].cum_regret >= w[0].cum_regret));
        for a in 0..2 {
            let rewards: Vec<f64> = run.trajectory.iter().filter(|p| p.action == a).map(|p| p.reward).collect();
            let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
            assert!((run.stats.mean(a).unwrap() - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn regret_helpers() {
        let env = bernoulli_env(&[0.62, 0.38]);
        assert_eq!(simple_regret(&env, 0).unwrap(), 0.0);
        assert!((simple_regret(&env, 1).unwrap() - 0.24).abs() < 1e-12);
        assert!(matches!(simple_regret(&env, 2), Err(BanditError::UnknownAction(2))));
        let traj = vec![Pull { action: 1, reward: 0.0 }; 10];
        assert!((cumulative_regret(&env, &traj).unwrap()[9] - 2.4).abs() < 1e-12);
        assert!(cumulative_regret(&env, &[]).unwrap().is_empty());
        let best = vec![Pull { action: 0, reward: 1.0 }; 4];
        assert!(cumulative_regret(&env, &best).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn same_seed_same_trace() {
        let env = bernoulli_env(&[0.4, 0.5, 0.6]);
        let a = run_direct(&env, 100, Selector::default(), &mut ChaCha8Rng::seed_from_u64(5));
        let b = run_direct(&env, 100, Selector::default(), &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn env_rejects_bad_action_sets() {
        assert!(matches!(BanditEnv::from_distributions(vec![], vec![]), Err(BanditError::EmptyActions)));
        let d = DiscreteDistribution::point_mass(FiniteDomain::indices(2), 0);
        let a = Intervention::single("X", 0);
        assert!(matches!(
            BanditEnv::from_distributions(vec![a.clone(), a], vec![d.clone(), d]),
            Err(BanditError::DuplicateAction(_))
        ));
    }
}
