use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::abstraction::Camab;
use crate::bandit::{run_direct, ArmStats, BanditEnv, RegretTrace, Selector, DEFAULT_C};
use crate::transfer::{imit, play_schedule, rtrans, texp, topt, EpsilonMode, TExpConfig, TransferReport};

use super::{Algorithm, ExperimentError, ScenarioSpec};

/// Overrides applied on top of a scenario's defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub base_seed: u64,
    pub repeats: Option<usize>,
    pub horizon: Option<usize>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub base_selector: Option<Selector>,
    pub c: f64,
    pub delta: f64,
    pub epsilon: EpsilonMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            base_seed: 0,
            repeats: None,
            horizon: None,
            algorithms: None,
            base_selector: None,
            c: DEFAULT_C,
            delta: 0.05,
            epsilon: EpsilonMode::Exact,
        }
    }
}

/// One algorithm's run on one variant for one seed.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub trace: RegretTrace,
    pub stats: ArmStats,
    pub report: Option<TransferReport>,
    /// Action names of the abstract bandit, indexed like `trace` actions.
    pub action_names: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub id: String,
    /// Ordered by variant, then algorithm, then seed.
    pub records: Vec<RunRecord>,
}

impl ScenarioResult {
    pub fn empty(id: &str) -> Self {
        Self { id: id.to_string(), records: Vec::new() }
    }

    pub fn runs<'a>(&'a self, scenario: &'a str, algorithm: Algorithm) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.records.iter().filter(move |r| r.scenario == scenario && r.algorithm == algorithm)
    }

    /// Mean final cumulative regret over seeds.
    pub fn mean_final_cum_regret(&self, scenario: &str, algorithm: Algorithm) -> Option<f64> {
        mean(self.runs(scenario, algorithm).map(|r| r.trace.final_cum_regret()))
    }

    pub fn mean_final_simple_regret(&self, scenario: &str, algorithm: Algorithm) -> Option<f64> {
        mean(self.runs(scenario, algorithm).filter_map(|r| r.trace.final_simple_regret()))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs every variant and algorithm of `spec` for each repeat r with seed
/// `base_seed + r`. Repeats run in parallel; records come back in a fixed
/// order regardless of scheduling.
pub fn run_scenario(spec: &ScenarioSpec, cfg: &RunConfig) -> Result<ScenarioResult, ExperimentError> {
    let repeats = cfg.repeats.unwrap_or(spec.repeats);
    let horizon = cfg.horizon.unwrap_or(spec.horizon);
    if repeats == 0 {
        return Err(ExperimentError::InvalidConfig("repeats must be at least 1".into()));
    }
    if horizon == 0 {
        return Err(ExperimentError::InvalidConfig("horizon must be at least 1".into()));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(ExperimentError::InvalidConfig(format!("delta must lie in (0, 1), got {}", cfg.delta)));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(ExperimentError::InvalidConfig(format!("UCB constant must be positive, got {}", cfg.c)));
    }
    let algorithms = cfg.algorithms.clone().unwrap_or_else(|| spec.algorithms.clone());
    let base_selector = cfg.base_selector.unwrap_or(spec.base_selector);
    let anytime_topt = spec.n_steps_grid.is_some();

    let mut records = Vec::new();
    for variant in &spec.variants {
        let per_seed: Vec<Vec<RunRecord>> = (0..repeats as u64)
            .into_par_iter()
            .map(|r| {
                let seed = cfg.base_seed.wrapping_add(r);
                run_repeat(&variant.label, &variant.camab, &algorithms, seed, horizon, base_selector, anytime_topt, cfg)
            })
            .collect::<Result<_, _>>()?;
        for alg in &algorithms {
            for seed_runs in &per_seed {
                records.extend(seed_runs.iter().filter(|rec| rec.algorithm == *alg).cloned());
            }
        }
    }
    Ok(ScenarioResult { id: spec.id.clone(), records })
}

#[allow(clippy::too_many_arguments)]
fn run_repeat(
    label: &str,
    c: &Camab,
    algorithms: &[Algorithm],
    seed: u64,
    horizon: usize,
    base_selector: Selector,
    anytime_topt: bool,
    cfg: &RunConfig,
) -> Result<Vec<RunRecord>, ExperimentError> {
    let base_env = BanditEnv::base_of(c);
    let abs_env = BanditEnv::abstract_of(c);
    let base = run_direct(&base_env, horizon, base_selector, &mut stream(seed, 0));
    let names: Vec<String> = c.abstract_actions().iter().map(ToString::to_string).collect();
    let tcfg = TExpConfig { delta: cfg.delta, c: cfg.c, epsilon: cfg.epsilon };

    let mut out = Vec::with_capacity(algorithms.len());
    for &alg in algorithms {
        let mut rng = stream(seed, alg.stream());
        let (stats, trace, report) = match alg {
            Algorithm::Ucb => {
                let run = run_direct(&abs_env, horizon, Selector::Ucb { c: cfg.c }, &mut rng);
                (run.stats, run.trace, None)
            }
            Algorithm::Topt => {
                // Anytime mode reads the base recommendation after t base
                // steps, which is the same as a fresh base run of t steps
                // on the repeat's seed.
                let schedule: Vec<usize> = if anytime_topt {
                    base.trace
                        .steps
                        .iter()
                        .map(|s| topt(c, s.recommended.expect("a pulled arm exists after step 1")).map(|p| p.action))
                        .collect::<Result<_, _>>()?
                } else {
                    let rec = base.recommended().expect("horizon is at least 1");
                    vec![topt(c, rec)?.action; horizon]
                };
                let (stats, trace) = play_schedule(&abs_env, &schedule, &mut rng);
                (stats, trace, None)
            }
            Algorithm::Imit => {
                let run = imit(c, &base.trajectory, &mut rng)?;
                (run.stats, run.trace, None)
            }
            Algorithm::Texp => {
                let run = texp(c, &base, horizon, tcfg, &mut rng)?;
                (run.stats, run.trace, Some(run.report))
            }
            Algorithm::Rtrans => {
                let run = rtrans(c, &base, horizon, tcfg, &mut rng)?;
                (run.stats, run.trace, Some(run.report))
            }
        };
        out.push(RunRecord {
            scenario: label.to_string(),
            algorithm: alg,
            seed,
            trace,
            stats,
            report,
            action_names: names.clone(),
        });
    }
    Ok(out)
}

/// Per-(scenario, algorithm, t) mean and population standard deviation of
/// cumulative and simple regret.
pub fn aggregate(result: &ScenarioResult) -> Vec<super::AggregateRow> {
    let mut groups: Vec<(&str, Algorithm, Vec<&RunRecord>)> = Vec::new();
    for rec in &result.records {
        match groups.iter_mut().find(|(s, a, _)| *s == rec.scenario && *a == rec.algorithm) {
            Some(g) => g.2.push(rec),
            None => groups.push((&rec.scenario, rec.algorithm, vec![rec])),
        }
    }
    let mut rows = Vec::new();
    for (scenario, algorithm, runs) in groups {
        let horizon = runs.iter().map(|r| r.trace.len()).min().unwrap_or(0);
        for t in 0..horizon {
            let (mean_cum, std_cum) = mean_std(runs.iter().map(|r| r.trace.steps[t].cum_regret));
            let (mean_simple, std_simple) = mean_std(runs.iter().map(|r| r.trace.steps[t].simple_regret));
            rows.push(super::AggregateRow {
                scenario: scenario.to_string(),
                algorithm: algorithm.name().to_string(),
                t: t as u64 + 1,
                mean_cum,
                std_cum,
                mean_simple,
                std_simple,
            });
        }
    }
    rows
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let m = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    (m, var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::load_scenario;

    fn small(id: &str, repeats: usize, horizon: usize) -> ScenarioResult {
        let spec = load_scenario(id).unwrap();
        run_scenario(&spec, &RunConfig { repeats: Some(repeats), horizon: Some(horizon), base_seed: 11, ..RunConfig::default() }).unwrap()
    }

    #[test]
    fn record_layout() {
        let res = small("5", 3, 40);
        assert_eq!(res.records.len(), 2 * 2 * 3);
        let keys: Vec<(String, Algorithm, u64)> = res.records.iter().map(|r| (r.scenario.clone(), r.algorithm, r.seed)).collect();
        assert_eq!(keys[0], ("5a".to_string(), Algorithm::Ucb, 11));
        assert_eq!(keys[2], ("5a".to_string(), Algorithm::Ucb, 13));
        assert_eq!(keys[3], ("5a".to_string(), Algorithm::Imit, 11));
        assert_eq!(keys[6].0, "5b");
        assert!(res.records.iter().all(|r| r.trace.len() == 40));
    }

    #[test]
    fn same_seed_same_traces() {
        let a = small("task1", 4, 60);
        let b = small("task1", 4, 60);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.trace, y.trace);
        }
    }

    #[test]
    fn adding_algorithms_keeps_streams() {
        let spec = load_scenario("6").unwrap();
        let only = run_scenario(&spec, &RunConfig { repeats: Some(2), horizon: Some(50), algorithms: Some(vec![Algorithm::Texp]), ..RunConfig::default() }).unwrap();
        let all = run_scenario(&spec, &RunConfig { repeats: Some(2), horizon: Some(50), ..RunConfig::default() }).unwrap();
        let a: Vec<_> = only.runs("6", Algorithm::Texp).map(|r| r.trace.clone()).collect();
        let b: Vec<_> = all.runs("6", Algorithm::Texp).map(|r| r.trace.clone()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn topt_grid_mode_tracks_base_recommendation() {
        let res = small("2", 2, 30);
        for r in res.runs("2", Algorithm::Topt) {
            assert_eq!(r.trace.len(), 30);
            // Anti-diagonal map: a correct base recommendation is sent to the
            // worse abstract arm.
            assert!(r.trace.steps.iter().all(|s| s.simple_regret == 0.0 || (s.simple_regret - 0.24).abs() < 1e-12));
        }
    }

    #[test]
    fn invalid_configs() {
        let spec = load_scenario("3").unwrap();
        for cfg in [
            RunConfig { repeats: Some(0), ..RunConfig::default() },
            RunConfig { horizon: Some(0), ..RunConfig::default() },
            RunConfig { delta: 1.0, ..RunConfig::default() },
            RunConfig { c: 0.0, ..RunConfig::default() },
        ] {
            assert!(matches!(run_scenario(&spec, &cfg), Err(ExperimentError::InvalidConfig(_))));
        }
    }

    #[test]
    fn aggregate_statistics() {
        let res = small("3", 5, 20);
        let rows = aggregate(&res);
        assert_eq!(rows.len(), 2 * 20);
        let last_ucb = rows.iter().find(|r| r.algorithm == "ucb" && r.t == 20).unwrap();
        let finals: Vec<f64> = res.runs("3", Algorithm::Ucb).map(|r| r.trace.final_cum_regret()).collect();
        let m = finals.iter().sum::<f64>() / 5.0;
        let sd = (finals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 5.0).sqrt();
        assert!((last_ucb.mean_cum - m).abs() < 1e-12);
        assert!((last_ucb.std_cum - sd).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.std_cum >= 0.0 && r.std_simple >= 0.0));
        assert!(aggregate(&ScenarioResult::empty("3")).is_empty());
    }

    #[test]
    fn mean_std_of_constants() {
        let (m, s) = mean_std([2.0, 2.0, 2.0].into_iter());
        assert_eq!((m, s), (2.0, 0.0));
        let (m, s) = mean_std([1.0, 3.0].into_iter());
        assert_eq!((m, s), (2.0, 1.0));
    }
}
