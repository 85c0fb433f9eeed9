use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abstraction::Camab;
use crate::bandit::{ucb_select_among, ArmStats, BanditEnv, DirectRun, Pull, RegretTrace, DEFAULT_C};
use crate::metrics::{argmax, ic_error, MetricKind};
use crate::model::DiscreteDistribution;

use super::TransferError;

/// Least-squares line α_E from base reward labels to abstract reward
/// labels, with the per-label residual ε(y) = α_Y′(y) − α_E(y).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRewardMap {
    pub slope: f64,
    pub intercept: f64,
    pub labels: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl LinearRewardMap {
    /// Ordinary least squares through (x, y); a single point or constant x
    /// gives slope 0 and the mean target as intercept.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Self {
        assert!(!xs.is_empty() && xs.len() == ys.len(), "need paired, non-empty samples");
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let (slope, intercept) = if sxx > 0.0 { (sxy / sxx, my - sxy / sxx * mx) } else { (0.0, my) };
        let residuals = xs.iter().zip(ys).map(|(x, y)| y - (slope * x + intercept)).collect();
        Self { slope, intercept, labels: xs.to_vec(), residuals }
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// E[ε(Y)] under a distribution over the base reward domain.
    pub fn residual_expectation(&self, d: &DiscreteDistribution) -> f64 {
        d.expect_by_index(|j| self.residuals[j])
    }
}

/// Fits α_E to the pairs (y, α_Y′(y)) over the base reward domain.
pub fn fit_alpha_e(c: &Camab) -> LinearRewardMap {
    let xs = c.base().reward_domain().labels();
    let abs_labels = c.abstract_model().reward_domain().labels();
    let ys: Vec<f64> = c.reward_index_map().iter().map(|&k| abs_labels[k]).collect();
    LinearRewardMap::fit(xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferredMean {
    pub mu_hat: f64,
    pub source: usize,
}

/// For each abstract action, α_E of the estimate of its most-pulled
/// preimage (lowest index on ties).
pub fn transfer_expected_values(c: &Camab, base_stats: &ArmStats, map: &LinearRewardMap) -> Result<Vec<TransferredMean>, TransferError> {
    (0..c.abstract_actions().len())
        .map(|j| {
            let pre = c.preimage_actions(j)?;
            let source = pre.iter().copied().fold(pre[0], |best, a| if base_stats.pulls(a) > base_stats.pulls(best) { a } else { best });
            let mu = base_stats
                .mean(source)
                .filter(|_| base_stats.pulls(source) > 0)
                .ok_or_else(|| TransferError::UncoveredAbstractAction(c.abstract_actions()[j].to_string()))?;
            Ok(TransferredMean { mu_hat: map.apply(mu), source })
        })
        .collect()
}

/// κ_i = sqrt(2 ln(2/δ) / N_i) + |E[ε]| + e(α), the ε-expectation taken
/// under `source_dists[i]`.
pub fn kappa_bounds(
    counts: &[u64],
    map: &LinearRewardMap,
    source_dists: &[&DiscreteDistribution],
    e_alpha: f64,
    delta: f64,
) -> Result<Vec<f64>, TransferError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TransferError::InvalidDelta(delta));
    }
    if counts.len() != source_dists.len() {
        return Err(TransferError::LengthMismatch(format!("{} counts vs {} distributions", counts.len(), source_dists.len())));
    }
    let log_term = 2.0 * (2.0 / delta).ln();
    counts
        .iter()
        .zip(source_dists)
        .enumerate()
        .map(|(i, (&n, d))| {
            if n == 0 {
                return Err(TransferError::ZeroCount(i));
            }
            Ok((log_term / n as f64).sqrt() + map.residual_expectation(d).abs() + e_alpha)
        })
        .collect()
}

/// Survivors of the interval test: i is dropped iff some j ≠ i has
/// μ̂_i + κ_i ≤ μ̂_j − κ_j. The largest estimate always survives.
pub fn eliminate_actions(mu: &[f64], kappa: &[f64]) -> Result<Vec<usize>, TransferError> {
    if mu.is_empty() {
        return Err(TransferError::EmptyInput);
    }
    if mu.len() != kappa.len() {
        return Err(TransferError::LengthMismatch(format!("{} estimates vs {} radii", mu.len(), kappa.len())));
    }
    let best = argmax(mu);
    Ok((0..mu.len())
        .filter(|&i| i == best || !(0..mu.len()).any(|j| j != i && mu[i] + kappa[i] <= mu[j] - kappa[j]))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonMode {
    /// Exact base interventional distribution (model access).
    Exact,
    /// Empirical reward histogram of the source action.
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TExpConfig {
    pub delta: f64,
    pub c: f64,
    pub epsilon: EpsilonMode,
}

impl Default for TExpConfig {
    fn default() -> Self {
        Self { delta: 0.05, c: DEFAULT_C, epsilon: EpsilonMode::Exact }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferredArm {
    pub action: String,
    pub mu_hat: f64,
    pub kappa: f64,
    pub pseudo_count: f64,
    pub eliminated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub algorithm: String,
    /// "adaptive" when the base learner chose arms from its own estimates.
    pub base_sampling: String,
    pub per_action: Vec<TransferredArm>,
    pub survivors: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct WarmRun {
    pub stats: ArmStats,
    pub trace: RegretTrace,
    pub report: TransferReport,
}

fn empirical_histogram(c: &Camab, trajectory: &[Pull], action: usize) -> DiscreteDistribution {
    let domain = c.base().reward_domain().clone();
    let mut counts = vec![0.0; domain.len()];
    let mut n = 0.0;
    for p in trajectory.iter().filter(|p| p.action == action) {
        let j = domain.index_of(p.reward).expect("trajectory rewards lie in the reward domain");
        counts[j] += 1.0;
        n += 1.0;
    }
    let probs: Vec<f64> = counts.iter().map(|k| k / n).collect();
    DiscreteDistribution::new(domain, probs).expect("histogram of a non-empty sample")
}

/// TExp: fit α_E, transfer the base estimates, bound their error by κ,
/// drop dominated abstract actions and run UCB over the survivors, each
/// warm-started with its transferred mean and its source's pull count.
pub fn texp<R: Rng + ?Sized>(c: &Camab, base: &DirectRun, horizon: usize, cfg: TExpConfig, rng: &mut R) -> Result<WarmRun, TransferError> {
    let map = fit_alpha_e(c);
    let transferred = transfer_expected_values(c, &base.stats, &map)?;
    let e_alpha = ic_error(c, MetricKind::Wasserstein2)?;
    let counts: Vec<u64> = transferred.iter().map(|t| base.stats.pulls(t.source)).collect();
    let empirical: Vec<DiscreteDistribution> = match cfg.epsilon {
        EpsilonMode::Exact => Vec::new(),
        EpsilonMode::Empirical => transferred.iter().map(|t| empirical_histogram(c, &base.trajectory, t.source)).collect(),
    };
    let dists: Vec<&DiscreteDistribution> = match cfg.epsilon {
        EpsilonMode::Exact => transferred.iter().map(|t| &c.base_distributions()[t.source]).collect(),
        EpsilonMode::Empirical => empirical.iter().collect(),
    };
    let kappa = kappa_bounds(&counts, &map, &dists, e_alpha, cfg.delta)?;
    let mu: Vec<f64> = transferred.iter().map(|t| t.mu_hat).collect();
    let pseudo: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    warm_ucb(c, "texp", base.selector.is_adaptive(), mu, pseudo, kappa, horizon, cfg.c, rng)
}

#[derive(Clone, Debug)]
pub struct RewardTransfer {
    pub stats: ArmStats,
    /// Infinite for abstract actions without transported samples.
    pub kappa: Vec<f64>,
}

/// Transports each base sample (a, y) to (α(a), α_Y′(y)) and bounds the
/// resulting means by sqrt(2 ln(2/δ)/N) + e(α).
pub fn reward_transfer(c: &Camab, base_trajectory: &[Pull], delta: f64) -> Result<RewardTransfer, TransferError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TransferError::InvalidDelta(delta));
    }
    let base_domain = c.base().reward_domain();
    let abs_labels = c.abstract_model().reward_domain().labels();
    let ymap = c.reward_index_map();
    let mut stats = ArmStats::new(c.abstract_actions().len());
    for p in base_trajectory {
        let a = c.map_action(p.action).map_err(|_| TransferError::UnknownAction(p.action))?;
        let j = base_domain
            .index_of(p.reward)
            .ok_or_else(|| TransferError::LengthMismatch(format!("reward {} is not a base reward label", p.reward)))?;
        stats.update(a, abs_labels[ymap[j]]);
    }
    let e_alpha = ic_error(c, MetricKind::Wasserstein2)?;
    let log_term = 2.0 * (2.0 / delta).ln();
    let kappa = (0..stats.arms())
        .map(|a| match stats.pulls(a) {
            0 => f64::INFINITY,
            n => (log_term / n as f64).sqrt() + e_alpha,
        })
        .collect();
    Ok(RewardTransfer { stats, kappa })
}

/// Reward transfer followed by elimination and warm-started UCB, the
/// counterpart of [`texp`] that needs no interpolation map.
pub fn rtrans<R: Rng + ?Sized>(c: &Camab, base: &DirectRun, horizon: usize, cfg: TExpConfig, rng: &mut R) -> Result<WarmRun, TransferError> {
    let rt = reward_transfer(c, &base.trajectory, cfg.delta)?;
    let arms = rt.stats.arms();
    let mu: Vec<f64> = (0..arms).map(|a| rt.stats.mean(a).unwrap_or(0.0)).collect();
    let pseudo: Vec<f64> = (0..arms).map(|a| rt.stats.pulls(a) as f64).collect();
    warm_ucb(c, "rtrans", base.selector.is_adaptive(), mu, pseudo, rt.kappa, horizon, cfg.c, rng)
}

#[allow(clippy::too_many_arguments)]
fn warm_ucb<R: Rng + ?Sized>(
    c: &Camab,
    algorithm: &str,
    adaptive: bool,
    mu: Vec<f64>,
    pseudo: Vec<f64>,
    kappa: Vec<f64>,
    horizon: usize,
    c_ucb: f64,
    rng: &mut R,
) -> Result<WarmRun, TransferError> {
    let survivors = eliminate_actions(&mu, &kappa)?;
    let env = BanditEnv::abstract_of(c);
    let names: Vec<String> = c.abstract_actions().iter().map(ToString::to_string).collect();
    let report = TransferReport {
        algorithm: algorithm.to_string(),
        base_sampling: if adaptive { "adaptive" } else { "non-adaptive" }.to_string(),
        per_action: (0..mu.len())
            .map(|j| TransferredArm {
                action: names[j].clone(),
                mu_hat: mu[j],
                kappa: kappa[j],
                pseudo_count: pseudo[j],
                eliminated: !survivors.contains(&j),
            })
            .collect(),
        survivors: survivors.iter().map(|&j| names[j].clone()).collect(),
    };
    let mut stats = ArmStats::warm(mu, pseudo);
    // Pseudo-observations count towards the UCB clock.
    let prior_rounds: f64 = survivors.iter().map(|&a| stats.pseudo_count(a)).sum();
    let mut trace = RegretTrace::default();
    for t in 1..=horizon as u64 {
        let a = ucb_select_among(&stats, t + prior_rounds as u64, c_ucb, &survivors);
        let y = env.pull(a, rng);
        stats.update(a, y);
        trace.push(&env, a, y, stats.greedy_among(&survivors));
    }
    Ok(WarmRun { stats, trace, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::{run_direct, Selector};
    use crate::experiments::registry::load_scenario;
    use crate::model::FiniteDomain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn camab(id: &str, variant: usize) -> Camab {
        load_scenario(id).unwrap().variants.swap_remove(variant).camab
    }

    /// Normal-equation oracle for a line through three points.
    fn ols3(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
        let n = 3.0;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        (slope, (sy - slope * sx) / n)
    }

    #[test]
    fn fit_identity_and_merge() {
        let m = LinearRewardMap::fit(&[0.0, 1.0], &[0.0, 1.0]);
        assert_eq!((m.slope, m.intercept), (1.0, 0.0));
        assert!(m.residuals.iter().all(|&e| e == 0.0));

        let m = LinearRewardMap::fit(&[1.0, 1.1, 1.2], &[0.0, 0.0, 1.0]);
        let (s, i) = ols3([1.0, 1.1, 1.2], [0.0, 0.0, 1.0]);
        assert!((m.slope - 5.0).abs() < 1e-9 && (m.slope - s).abs() < 1e-9);
        assert!((m.intercept + 31.0 / 6.0).abs() < 1e-9 && (m.intercept - i).abs() < 1e-9);
        let expect = [1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0];
        for (r, e) in m.residuals.iter().zip(expect) {
            assert!((r - e).abs() < 1e-9, "{r} vs {e}");
        }
        for (j, &x) in [1.0, 1.1, 1.2].iter().enumerate() {
            assert!((m.apply(x) + m.residuals[j] - [0.0, 0.0, 1.0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_degenerate_inputs() {
        let m = LinearRewardMap::fit(&[3.0], &[7.0]);
        assert_eq!((m.slope, m.intercept), (0.0, 7.0));
        let m = LinearRewardMap::fit(&[1.0, 1.0], &[0.0, 1.0]);
        assert_eq!((m.slope, m.intercept), (0.0, 0.5));
    }

    #[test]
    fn fit_on_registry_maps() {
        let m = fit_alpha_e(&camab("6", 0));
        assert_eq!((m.slope, m.intercept), (1.0, 0.0));
        assert!(m.residuals.iter().all(|&e| e == 0.0));
        let m = fit_alpha_e(&camab("7", 0));
        let (s, i) = ols3([0.0, 1.0, 2.0], [0.4, 0.5, 10.0]);
        assert!((m.slope - s).abs() < 1e-12 && (m.intercept - i).abs() < 1e-12);
    }

    #[test]
    fn transferred_means() {
        let c = camab("6", 0);
        let map = fit_alpha_e(&c);
        let mut stats = ArmStats::new(2);
        stats.update(0, 1.38);
        stats.update(1, 0.5);
        let t = transfer_expected_values(&c, &stats, &map).unwrap();
        assert!((t[0].mu_hat - 1.38).abs() < 1e-12);
        assert_eq!(t[0].source, 0);
        assert!(matches!(
            transfer_expected_values(&c, &ArmStats::new(2), &map),
            Err(TransferError::UncoveredAbstractAction(_))
        ));
    }

    #[test]
    fn most_pulled_preimage_is_the_source() {
        // Scenario-5 α₁ sends T=1 and T=2 to T′=1.
        let c = camab("5", 0);
        let map = fit_alpha_e(&c);
        let mut stats = ArmStats::new(4);
        for a in 0..4 {
            stats.update(a, 0.5);
        }
        for _ in 0..99 {
            stats.update(3, 1.0);
        }
        for _ in 0..2 {
            stats.update(2, 0.0);
        }
        let t = transfer_expected_values(&c, &stats, &map).unwrap();
        assert_eq!(t[2].source, 3);
        // Ties go to the lower index.
        let mut even = ArmStats::new(4);
        for a in 0..4 {
            even.update(a, 0.5);
        }
        assert_eq!(transfer_expected_values(&c, &even, &map).unwrap()[2].source, 2);
    }

    #[test]
    fn kappa_examples() {
        let map = LinearRewardMap::fit(&[0.0, 1.0], &[0.0, 1.0]);
        let d = DiscreteDistribution::new(FiniteDomain::indices(2), vec![0.5, 0.5]).unwrap();
        let k = kappa_bounds(&[2], &map, &[&d], 0.0, 2.0 / std::f64::consts::E).unwrap();
        assert!((k[0] - 1.0).abs() < 1e-12);
        let k = kappa_bounds(&[200], &map, &[&d], 0.0, 0.05).unwrap();
        assert!((k[0] - 0.19207).abs() < 1e-5);
        let k = kappa_bounds(&[1_000_000_000], &map, &[&d], 0.0, 0.05).unwrap();
        assert!(k[0] < 1e-3);
        assert!(matches!(kappa_bounds(&[2], &map, &[&d], 0.0, 1.0), Err(TransferError::InvalidDelta(_))));
        assert!(matches!(kappa_bounds(&[2], &map, &[&d], 0.0, 0.0), Err(TransferError::InvalidDelta(_))));
        assert!(matches!(kappa_bounds(&[0], &map, &[&d], 0.0, 0.1), Err(TransferError::ZeroCount(0))));
    }

    #[test]
    fn kappa_includes_residual_and_ic_terms() {
        let map = LinearRewardMap::fit(&[1.0, 1.1, 1.2], &[0.0, 0.0, 1.0]);
        let d = DiscreteDistribution::new(FiniteDomain::new(vec![1.0, 1.1, 1.2]).unwrap(), vec![0.25, 0.35, 0.4]).unwrap();
        let eps: f64 = 0.25 / 6.0 - 0.35 / 3.0 + 0.4 / 6.0;
        let k = kappa_bounds(&[50], &map, &[&d], 0.1, 0.1).unwrap();
        assert!((k[0] - ((2.0 * 20f64.ln() / 50.0).sqrt() + eps.abs() + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn elimination_examples() {
        assert_eq!(eliminate_actions(&[0.9, 0.2], &[0.1, 0.1]).unwrap(), vec![0]);
        assert_eq!(eliminate_actions(&[0.6, 0.5], &[0.2, 0.2]).unwrap(), vec![0, 1]);
        assert_eq!(eliminate_actions(&[0.5, 0.5], &[0.0, 0.0]).unwrap(), vec![0]);
        assert_eq!(eliminate_actions(&[0.1, 0.9], &[f64::INFINITY, 0.1]).unwrap(), vec![0, 1]);
        assert!(matches!(eliminate_actions(&[], &[]), Err(TransferError::EmptyInput)));
        assert!(matches!(eliminate_actions(&[0.1], &[]), Err(TransferError::LengthMismatch(_))));
    }

    #[test]
    fn singleton_survivor_plays_alone() {
        let c = camab("6", 0);
        let mut stats = ArmStats::new(2);
        for _ in 0..5000 {
            stats.update(0, 0.9);
            stats.update(1, 0.6);
        }
        let base = DirectRun { stats, trajectory: Vec::new(), trace: RegretTrace::default(), selector: Selector::RoundRobin };
        let run = texp(&c, &base, 50, TExpConfig::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(run.report.survivors, vec!["do(T'=0)".to_string()]);
        assert!(run.trace.steps.iter().all(|s| s.action == 0));
        assert_eq!(run.trace.final_cum_regret(), 0.0);
        assert_eq!(run.report.base_sampling, "non-adaptive");
    }

    #[test]
    fn texp_report_and_json() {
        let c = camab("6", 0);
        let base = run_direct(&BanditEnv::base_of(&c), 500, Selector::default(), &mut ChaCha8Rng::seed_from_u64(1));
        let run = texp(&c, &base, 100, TExpConfig::default(), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(run.trace.len(), 100);
        assert_eq!(run.report.per_action.len(), 2);
        assert!(run.report.per_action.iter().all(|a| a.kappa >= 0.0));
        assert!(!run.report.survivors.is_empty());
        for (j, a) in run.report.per_action.iter().enumerate() {
            assert_eq!(a.pseudo_count, base.stats.pulls(j) as f64);
        }
        let json = serde_json::to_value(&run.report).unwrap();
        for key in ["algorithm", "per_action", "survivors"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        for key in ["action", "mu_hat", "kappa", "pseudo_count", "eliminated"] {
            assert!(json["per_action"][0].get(key).is_some(), "{key}");
        }
        let empirical = texp(&c, &base, 10, TExpConfig { epsilon: EpsilonMode::Empirical, ..TExpConfig::default() }, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        // Identity α_E has zero residuals, so both modes agree on κ.
        for (a, b) in empirical.report.per_action.iter().zip(&run.report.per_action) {
            assert!((a.kappa - b.kappa).abs() < 1e-12);
        }
    }

    #[test]
    fn reward_transfer_identity_reproduces_base_stats() {
        let c = camab("4", 0);
        let base = run_direct(&BanditEnv::base_of(&c), 200, Selector::default(), &mut ChaCha8Rng::seed_from_u64(3));
        let rt = reward_transfer(&c, &base.trajectory, 0.1).unwrap();
        assert_eq!(rt.stats, base.stats);
        assert!(rt.kappa.iter().all(|k| k.is_finite()));
    }

    #[test]
    fn reward_transfer_merges_labels() {
        let c = load_scenario("ce2").unwrap().variants.swap_remove(0).camab;
        let env = BanditEnv::base_of(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let traj: Vec<Pull> = (0..20_000).map(|i| {
            let a = i % 2;
            Pull { action: a, reward: env.pull(a, &mut rng) }
        }).collect();
        let rt = reward_transfer(&c, &traj, 0.05).unwrap();
        assert!((rt.stats.mean(0).unwrap() - 0.4).abs() < 0.02);
        assert!(matches!(reward_transfer(&c, &traj, 1.5), Err(TransferError::InvalidDelta(_))));
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::experiments::random::random_camab;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn interpolation_error_bound(seed in any::<u64>()) {
            let c = random_camab(&mut ChaCha8Rng::seed_from_u64(seed));
            let map = fit_alpha_e(&c);
            let e = ic_error(&c, MetricKind::Wasserstein2).unwrap();
            let (b, a) = (c.base_means(), c.abstract_means());
            for (i, &k) in c.action_map().iter().enumerate() {
                let eps = map.residual_expectation(&c.base_distributions()[i]).abs();
                prop_assert!((map.apply(b[i]) - a[k]).abs() <= eps + e + 1e-9);
            }
        }

        #[test]
        fn residuals_close_the_fit(seed in any::<u64>()) {
            let c = random_camab(&mut ChaCha8Rng::seed_from_u64(seed));
            let map = fit_alpha_e(&c);
            let abs = c.abstract_model().reward_domain().labels();
            for (j, &k) in c.reward_index_map().iter().enumerate() {
                prop_assert!((map.apply(map.labels[j]) + map.residuals[j] - abs[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn elimination_keeps_a_dominating_survivor(
            mu in proptest::collection::vec(-1.0f64..1.0, 1..8),
            k in proptest::collection::vec(0.0f64..0.5, 8),
        ) {
            let kappa = &k[..mu.len()];
            let kept = eliminate_actions(&mu, kappa).unwrap();
            prop_assert!(!kept.is_empty());
            prop_assert!(kept.contains(&argmax(&mu)));
            for i in (0..mu.len()).filter(|i| !kept.contains(i)) {
                prop_assert!(kept.iter().any(|&j| mu[i] + kappa[i] <= mu[j] - kappa[j]));
            }
        }
    }
}
