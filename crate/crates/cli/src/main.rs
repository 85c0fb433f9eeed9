use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use camab::abstraction::{AbstractionSpec, Camab};
use camab::bandit::Selector;
use camab::experiments::{
    aggregate, emit_results, load_scenario, run_scenario, scenario_ids, Algorithm, ExperimentError, RunConfig,
    ScenarioSpec, Variant,
};
use camab::metrics::{
    algebraic_max_condition, audit, expected_reward_gap_bound, max_preservation_sufficient, MetricError, MetricKind,
};
use camab::model::ModelSpec;
use camab::transfer::EpsilonMode;
use clap::{Parser, Subcommand};
use serde_json::json;

const OUT_ENV: &str = "CAMAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "camab", version, about = "Causally abstracted multi-armed bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure how well an abstraction preserves interventional rewards.
    Audit {
        base: PathBuf,
        #[arg(value_name = "ABSTRACT")]
        abstract_model: PathBuf,
        alpha: PathBuf,
        #[arg(long, default_value = "jsd")]
        metric: MetricKind,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run bandit experiments and write raw and aggregate CSVs.
    Run {
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        scenario: Option<String>,
        /// Base model, abstract model and abstraction files.
        #[arg(long, num_args = 3, value_names = ["BASE", "ABSTRACT", "ALPHA"])]
        model: Option<Vec<PathBuf>>,
        /// ucb, topt, imit, texp, rtrans, or all (the scenario's list).
        #[arg(long, default_value = "all")]
        alg: String,
        #[arg(long = "T", visible_alias = "horizon")]
        horizon: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = camab::bandit::DEFAULT_C)]
        c: f64,
        /// Use empirical residuals instead of exact ones in TExp.
        #[arg(long)]
        empirical_epsilon: bool,
        /// Base policy used to generate transfer data: ucb or round-robin.
        #[arg(long)]
        base_policy: Option<String>,
    },
    /// List the built-in scenarios.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Write a scenario's models and abstraction as JSON files.
    Export {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit 2 for bad input, 3 for failures while running.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io { .. } | ExperimentError::Csv { .. } => Failure::Runtime(e.to_string()),
            ExperimentError::Transfer(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Audit { base, abstract_model, alpha, metric, json } => cmd_audit(&base, &abstract_model, &alpha, metric, json),
        Command::Run { scenario, model, alg, horizon, repeats, seed, out, delta, c, empirical_epsilon, base_policy } => {
            let out = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or(out);
            let cfg = RunConfig {
                base_seed: seed,
                repeats,
                horizon,
                algorithms: None,
                base_selector: None,
                c,
                delta,
                epsilon: if empirical_epsilon { EpsilonMode::Empirical } else { EpsilonMode::Exact },
            };
            cmd_run(scenario.as_deref(), model.as_deref(), &alg, base_policy.as_deref(), cfg, &out)
        }
        Command::List { json } => {
            cmd_list(json);
            Ok(())
        }
        Command::Export { scenario, out } => cmd_export(&scenario, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_camab(base: &Path, abs: &Path, alpha: &Path) -> Result<Camab, Failure> {
    let b: ModelSpec = read_json(base)?;
    let a: ModelSpec = read_json(abs)?;
    let al: AbstractionSpec = read_json(alpha)?;
    let c = Camab::from_specs(&b, &a, &al).map_err(|e| Failure::Config(e.to_string()))?;
    for (side, scm) in [("base", c.base()), ("abstract", c.abstract_model())] {
        for w in scm.warnings() {
            eprintln!("warning: {side} model: {w}");
        }
    }
    Ok(c)
}

fn metric_failure(e: MetricError) -> Failure {
    match e {
        MetricError::Abstraction(_) => Failure::Config(e.to_string()),
        _ => Failure::Runtime(e.to_string()),
    }
}

fn cmd_audit(base: &Path, abs: &Path, alpha: &Path, metric: MetricKind, as_json: bool) -> Result<(), Failure> {
    let c = load_camab(base, abs, alpha)?;
    let report = audit(&c, metric).map_err(metric_failure)?;
    let bound = expected_reward_gap_bound(&c, MetricKind::Wasserstein2).map_err(metric_failure)?;
    let sufficient = max_preservation_sufficient(&c);
    let algebraic = algebraic_max_condition(&c);
    let clusters: Vec<(String, usize)> = c
        .abstract_actions()
        .iter()
        .enumerate()
        .map(|(k, a)| Ok((a.to_string(), c.cluster_size(k)?)))
        .collect::<Result<_, camab::abstraction::AbstractionError>>()
        .map_err(|e| Failure::Config(e.to_string()))?;

    let verdict = |r: &Result<bool, MetricError>| match r {
        Ok(b) => json!(b),
        Err(e) => json!(e.to_string()),
    };
    if as_json {
        let out = json!({
            "metric": metric,
            "ic_error": report.ic_error,
            "reward_discrepancy": report.reward_discrepancy,
            "per_action": report.per_action,
            "expected_reward_bound_w2": bound,
            "sufficient_condition": verdict(&sufficient),
            "algebraic_condition": verdict(&algebraic),
            "cluster_sizes": clusters.iter().map(|(a, n)| json!({"action": a, "size": n})).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("report serializes"));
        return Ok(());
    }
    println!("metric              {metric}");
    println!("ic_error            {:.6}", report.ic_error);
    println!("reward_discrepancy  {:.6}", report.reward_discrepancy);
    println!("reward bound (w2)   {bound:.6}");
    match &sufficient {
        Ok(b) => println!("sufficient cond. w2 {b}"),
        Err(e) => println!("sufficient cond. w2 n/a ({e})"),
    }
    match &algebraic {
        Ok(b) => println!("algebraic cond. w2  {b}"),
        Err(e) => println!("algebraic cond. w2  n/a ({e})"),
    }
    for d in &report.per_action {
        println!("  {:<24} ic {:.6}  discrepancy {:.6}", d.action, d.ic, d.discrepancy);
    }
    for (a, n) in &clusters {
        println!("  cluster {a:<16} size {n}");
    }
    Ok(())
}

fn parse_algorithms(alg: &str, spec: &ScenarioSpec) -> Result<Vec<Algorithm>, Failure> {
    if alg == "all" {
        return Ok(spec.algorithms.clone());
    }
    alg.split(',').map(|s| s.trim().parse::<Algorithm>().map_err(Failure::Config)).collect()
}

fn cmd_run(
    scenario: Option<&str>,
    model: Option<&[PathBuf]>,
    alg: &str,
    base_policy: Option<&str>,
    mut cfg: RunConfig,
    out: &Path,
) -> Result<(), Failure> {
    let spec = match (scenario, model) {
        (Some(id), _) => load_scenario(id)?,
        (None, Some([base, abs, alpha])) => {
            let camab = load_camab(base, abs, alpha)?;
            let id = base.file_stem().and_then(|s| s.to_str()).unwrap_or("model").to_string();
            ScenarioSpec {
                id: id.clone(),
                title: format!("models from {}", base.display()),
                variants: vec![Variant { label: id, camab }],
                horizon: 500,
                repeats: 20,
                algorithms: Algorithm::ALL.to_vec(),
                n_steps_grid: None,
                base_selector: Selector::default(),
            }
        }
        _ => return Err(Failure::Config("pass --scenario ID or --model BASE ABSTRACT ALPHA".into())),
    };
    cfg.algorithms = Some(parse_algorithms(alg, &spec)?);
    cfg.base_selector = match base_policy {
        None => match spec.base_selector {
            Selector::Ucb { .. } => Some(Selector::Ucb { c: cfg.c }),
            other => Some(other),
        },
        Some("ucb") => Some(Selector::Ucb { c: cfg.c }),
        Some("round-robin") => Some(Selector::RoundRobin),
        Some(other) => return Err(Failure::Config(format!("unknown base policy `{other}` (expected ucb or round-robin)"))),
    };

    let result = run_scenario(&spec, &cfg)?;
    let (raw, agg) = emit_results(&result, out)?;
    println!("wrote {}", raw.display());
    println!("wrote {}", agg.display());

    let rows = aggregate(&result);
    for variant in &spec.variants {
        for &a in cfg.algorithms.as_deref().unwrap_or_default() {
            let cum = result.mean_final_cum_regret(&variant.label, a).unwrap_or(f64::NAN);
            let simple = result.mean_final_simple_regret(&variant.label, a).unwrap_or(f64::NAN);
            println!("{:<12} {:<7} mean final cumulative regret {cum:.4}  simple regret {simple:.4}", variant.label, a.name());
        }
        if let (Some(grid), true) = (&spec.n_steps_grid, cfg.algorithms.as_deref().unwrap_or_default().contains(&Algorithm::Topt)) {
            let topt = Algorithm::Topt.name();
            let cells: Vec<String> = grid
                .iter()
                .filter_map(|&n| {
                    rows.iter()
                        .find(|r| r.scenario == variant.label && r.algorithm == topt && r.t == n as u64)
                        .map(|r| format!("{n}:{:.4}", r.mean_simple))
                })
                .collect();
            println!("{:<12} topt simple regret by n_steps  {}", variant.label, cells.join("  "));
        }
    }
    Ok(())
}

fn cmd_list(as_json: bool) {
    let specs: Vec<ScenarioSpec> = scenario_ids().iter().map(|id| load_scenario(id).expect("registry scenarios load")).collect();
    if as_json {
        let list: Vec<_> = specs
            .iter()
            .map(|s| {
                json!({
                    "id": s.id,
                    "title": s.title,
                    "variants": s.variants.iter().map(|v| json!({
                        "label": v.label,
                        "base_actions": v.camab.base_actions().len(),
                        "abstract_actions": v.camab.abstract_actions().len(),
                        "base_variables": v.camab.base().variables().len(),
                        "abstract_variables": v.camab.abstract_model().variables().len(),
                    })).collect::<Vec<_>>(),
                    "algorithms": s.algorithms.iter().map(|a| a.name()).collect::<Vec<_>>(),
                    "horizon": s.horizon,
                    "repeats": s.repeats,
                    "n_steps_grid": s.n_steps_grid,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&list).expect("listing serializes"));
        return;
    }
    println!("{:<12} {:<10} {:<10} {:<7} {:<24} title", "id", "base", "abstract", "T", "algorithms");
    for s in &specs {
        let v = &s.variants[0].camab;
        let algs: Vec<&str> = s.algorithms.iter().map(|a| a.name()).collect();
        println!(
            "{:<12} {:<10} {:<10} {:<7} {:<24} {}",
            s.id,
            format!("{}v/{}a", v.base().variables().len(), v.base_actions().len()),
            format!("{}v/{}a", v.abstract_model().variables().len(), v.abstract_actions().len()),
            s.horizon,
            algs.join(","),
            s.title
        );
    }
}

fn cmd_export(scenario: &str, out: &Path) -> Result<(), Failure> {
    let spec = load_scenario(scenario)?;
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    for v in &spec.variants {
        let (base, abs, alpha) = v.camab.to_specs();
        let files = [
            (format!("{}_base.json", v.label), serde_json::to_string_pretty(&base)),
            (format!("{}_abstract.json", v.label), serde_json::to_string_pretty(&abs)),
            (format!("{}_alpha.json", v.label), serde_json::to_string_pretty(&alpha)),
        ];
        for (name, text) in files {
            let path = out.join(name);
            let text = text.map_err(|e| Failure::Runtime(e.to_string()))?;
            fs::write(&path, text + "\n").map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
