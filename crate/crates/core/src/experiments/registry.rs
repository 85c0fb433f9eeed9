use crate::abstraction::{identity_matrix, Abstraction, AbstractionError, AbstractionSpec, Camab};
use crate::bandit::Selector;
use crate::model::{FiniteDomain, Intervention, Mechanism, Scm, Variable};

use super::{Algorithm, ExperimentError};

const IDS: [&str; 10] = ["1", "2", "3", "4", "5", "6", "7", "task1", "task2", "advertising"];
const GRID: [usize; 6] = [10, 25, 50, 100, 250, 500];

#[derive(Clone, Debug)]
pub struct Variant {
    /// Value of the `scenario` column in result files.
    pub label: String,
    pub camab: Camab,
}

#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub id: String,
    pub title: String,
    pub variants: Vec<Variant>,
    pub horizon: usize,
    pub repeats: usize,
    pub algorithms: Vec<Algorithm>,
    /// Base budgets at which TOpt's simple regret is read off.
    pub n_steps_grid: Option<Vec<usize>>,
    pub base_selector: Selector,
}

/// The experiment ids, in listing order.
pub fn scenario_ids() -> &'static [&'static str] {
    &IDS
}

pub fn all_scenarios() -> Vec<ScenarioSpec> {
    IDS.iter().map(|id| load_scenario(id).expect("registry scenarios are valid")).collect()
}

/// Builds a registry scenario. Besides the listed ids, `ce2` loads the
/// second counterexample (an exact, order-preserving abstraction that still
/// moves the optimum).
pub fn load_scenario(id: &str) -> Result<ScenarioSpec, ExperimentError> {
    use Algorithm::*;
    let build = |title: &str, variants: Vec<(&str, Camab)>, algorithms: Vec<Algorithm>| ScenarioSpec {
        id: id.to_string(),
        title: title.to_string(),
        variants: variants.into_iter().map(|(label, camab)| Variant { label: label.to_string(), camab }).collect(),
        horizon: 500,
        repeats: 20,
        algorithms,
        n_steps_grid: None,
        base_selector: Selector::default(),
    };
    let spec = match id {
        "1" => ScenarioSpec {
            n_steps_grid: Some(GRID.to_vec()),
            ..build("exact, max-preserving abstraction (identity maps)", vec![("1", ce1(false)?)], vec![Ucb, Topt])
        },
        "2" => ScenarioSpec {
            n_steps_grid: Some(GRID.to_vec()),
            ..build("exact abstraction that moves the optimum (anti-diagonal maps)", vec![("2", ce1(true)?)], vec![Ucb, Topt])
        },
        "3" => build("inexact abstraction, IC error about 0.229 (JSD)", vec![("3", scenario3()?)], vec![Ucb, Imit]),
        "4" => build("exact abstraction (identity maps)", vec![("4", ce1(false)?)], vec![Ucb, Imit]),
        "5" => build(
            "three-valued treatment merged two ways",
            vec![("5a", scenario5(false)?), ("5b", scenario5(true)?)],
            vec![Ucb, Imit],
        ),
        "6" => build("reward on {0,1,2}, identity reward map", vec![("6", scenario6(&[0.0, 1.0, 2.0])?)], vec![Ucb, Texp, Rtrans]),
        "7" => build("abstract reward relabelled to {0.4,0.5,10}", vec![("7", scenario6(&[0.4, 0.5, 10.0])?)], vec![Ucb, Texp, Rtrans]),
        "task1" => build("transfer task 1 (confounded X)", vec![("task1", task1()?)], Algorithm::ALL.to_vec()),
        "task2" => build("transfer task 2 (confounded X with instrument Z)", vec![("task2", task2()?)], Algorithm::ALL.to_vec()),
        "advertising" => ScenarioSpec {
            horizon: 1000,
            ..build("email campaign: 6 base actions onto 4", vec![("advertising", advertising()?)], Algorithm::ALL.to_vec())
        },
        "ce2" => build("relabelled reward domain moves the optimum", vec![("ce2", ce2()?)], vec![Ucb, Topt]),
        other => return Err(ExperimentError::UnknownScenario(other.to_string())),
    };
    Ok(spec)
}

fn indices(n: usize) -> FiniteDomain {
    FiniteDomain::indices(n)
}

fn labels(values: &[f64]) -> Result<FiniteDomain, AbstractionError> {
    Ok(FiniteDomain::new(values.to_vec())?)
}

fn rows(m: &[&[f64]]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn ninths(m: &[&[u32]]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&k| f64::from(k) / 9.0).collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn scm(vars: Vec<Variable>, mechs: Vec<Mechanism>, reward: &str) -> Result<Scm, AbstractionError> {
    Ok(Scm::new(vars, mechs, reward)?)
}

fn single_actions(var: &str, n: usize) -> Vec<Intervention> {
    (0..n).map(|x| Intervention::single(var, x)).collect()
}

/// Abstraction over `(base, abstract, value map)` triples.
fn alpha(maps: Vec<(&str, &str, Vec<Vec<u8>>)>) -> AbstractionSpec {
    AbstractionSpec {
        relevant: maps.iter().map(|(b, _, _)| b.to_string()).collect(),
        var_map: maps.iter().map(|(b, a, _)| (b.to_string(), a.to_string())).collect(),
        value_maps: maps.into_iter().map(|(_, a, m)| (a.to_string(), m)).collect(),
    }
}

fn camab(
    base: Scm,
    base_actions: Vec<Intervention>,
    abs: Scm,
    abs_actions: Vec<Intervention>,
    spec: AbstractionSpec,
) -> Result<Camab, AbstractionError> {
    let a = Abstraction::new(spec, &base, &abs)?;
    Camab::new(base, base_actions, abs, abs_actions, a)
}

fn anti_diagonal(n: usize) -> Vec<Vec<u8>> {
    (0..n).map(|i| (0..n).map(|j| u8::from(i + j == n - 1)).collect()).collect()
}

const F_M: [&[f64]; 2] = [&[0.2, 0.8], &[0.8, 0.2]];
const F_Y: [&[f64]; 2] = [&[0.7, 0.3], &[0.3, 0.7]];

/// T → M → Y with the first counterexample's mechanisms.
fn tmy(f_t: &[f64], f_m: Vec<Vec<f64>>, y_domain: FiniteDomain, f_y: Vec<Vec<f64>>) -> Result<Scm, AbstractionError> {
    scm(
        vec![Variable::new("T", indices(f_t.len())), Variable::new("M", indices(2)), Variable::new("Y", y_domain)],
        vec![Mechanism::root("T", f_t), Mechanism::new("M", ["T"], f_m), Mechanism::new("Y", ["M"], f_y)],
        "Y",
    )
}

/// T′ → Y′.
fn ty(f_t: &[f64], y_domain: FiniteDomain, f_y: Vec<Vec<f64>>) -> Result<Scm, AbstractionError> {
    scm(
        vec![Variable::new("T'", indices(f_t.len())), Variable::new("Y'", y_domain)],
        vec![Mechanism::root("T'", f_t), Mechanism::new("Y'", ["T'"], f_y)],
        "Y'",
    )
}

fn ce1_with(f_y_abs: Vec<Vec<f64>>, anti: bool) -> Result<Camab, AbstractionError> {
    let base = tmy(&[0.8, 0.2], rows(&F_M), indices(2), rows(&F_Y))?;
    let abs = ty(&[0.8, 0.2], indices(2), f_y_abs)?;
    let map = if anti { anti_diagonal(2) } else { identity_matrix(2) };
    camab(
        base,
        single_actions("T", 2),
        abs,
        single_actions("T'", 2),
        alpha(vec![("T", "T'", map.clone()), ("Y", "Y'", map)]),
    )
}

fn ce1(anti: bool) -> Result<Camab, AbstractionError> {
    ce1_with(matmul(&rows(&F_Y), &rows(&F_M)), anti)
}

fn scenario3() -> Result<Camab, AbstractionError> {
    ce1_with(rows(&F_Y), false)
}

fn scenario5(second: bool) -> Result<Camab, AbstractionError> {
    let base = tmy(&[0.7, 0.2, 0.1], rows(&[&[0.2, 0.8, 0.7], &[0.8, 0.2, 0.3]]), indices(2), rows(&F_Y))?;
    let abs = ty(&[0.8, 0.2], indices(2), rows(&[&[0.55, 0.45], &[0.45, 0.55]]))?;
    let t_map = if second { vec![vec![0, 1, 0], vec![1, 0, 1]] } else { vec![vec![1, 0, 0], vec![0, 1, 1]] };
    let mut base_actions = vec![Intervention::empty()];
    base_actions.extend(single_actions("T", 3));
    let mut abs_actions = vec![Intervention::empty()];
    abs_actions.extend(single_actions("T'", 2));
    camab(base, base_actions, abs, abs_actions, alpha(vec![("T", "T'", t_map), ("Y", "Y'", identity_matrix(2))]))
}

fn scenario6(abs_labels: &[f64]) -> Result<Camab, AbstractionError> {
    let f_y = rows(&[&[0.6, 0.3], &[0.3, 0.4], &[0.1, 0.3]]);
    let base = tmy(&[0.8, 0.2], rows(&F_M), labels(&[0.0, 1.0, 2.0])?, f_y.clone())?;
    let abs = ty(&[0.8, 0.2], labels(abs_labels)?, matmul(&f_y, &rows(&F_M)))?;
    camab(
        base,
        single_actions("T", 2),
        abs,
        single_actions("T'", 2),
        alpha(vec![("T", "T'", identity_matrix(2)), ("Y", "Y'", identity_matrix(3))]),
    )
}

fn ce2() -> Result<Camab, AbstractionError> {
    let base = scm(
        vec![Variable::new("T", indices(2)), Variable::new("Y", labels(&[1.0, 1.1, 1.2])?)],
        vec![Mechanism::root("T", &[0.8, 0.2]), Mechanism::new("Y", ["T"], rows(&[&[0.25, 0.45], &[0.35, 0.1], &[0.4, 0.45]]))],
        "Y",
    )?;
    let abs = ty(&[0.8, 0.2], indices(2), rows(&[&[0.6, 0.55], &[0.4, 0.45]]))?;
    camab(
        base,
        single_actions("T", 2),
        abs,
        single_actions("T'", 2),
        alpha(vec![("T", "T'", identity_matrix(2)), ("Y", "Y'", vec![vec![1, 1, 0], vec![0, 0, 1]])]),
    )
}

/// U, X → Y with X′ a fair coin in the target model.
fn transfer_task(base: Scm, f_u: &[f64], f_y: Vec<Vec<f64>>) -> Result<Camab, AbstractionError> {
    let b = || indices(2);
    let abs = scm(
        vec![Variable::new("U'", b()), Variable::new("X'", b()), Variable::new("Y'", b())],
        vec![Mechanism::root("U'", f_u), Mechanism::root("X'", &[0.5, 0.5]), Mechanism::new("Y'", ["U'", "X'"], f_y)],
        "Y'",
    )?;
    let id = || identity_matrix(2);
    camab(
        base,
        single_actions("X", 2),
        abs,
        single_actions("X'", 2),
        alpha(vec![("U", "U'", id()), ("X", "X'", id()), ("Y", "Y'", id())]),
    )
}

fn task1() -> Result<Camab, AbstractionError> {
    let f_y = rows(&[&[0.9, 0.5, 0.1, 0.7], &[0.1, 0.5, 0.9, 0.3]]);
    let b = || indices(2);
    let base = scm(
        vec![Variable::new("U", b()), Variable::new("X", b()), Variable::new("Y", b())],
        vec![
            Mechanism::root("U", &[0.3, 0.7]),
            Mechanism::new("X", ["U"], identity_matrix(2).into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect()),
            Mechanism::new("Y", ["U", "X"], f_y.clone()),
        ],
        "Y",
    )?;
    transfer_task(base, &[0.3, 0.7], f_y)
}

fn task2() -> Result<Camab, AbstractionError> {
    let f_y = rows(&[&[0.1, 0.9, 0.5, 0.1], &[0.9, 0.1, 0.5, 0.9]]);
    let b = || indices(2);
    let base = scm(
        vec![Variable::new("U", b()), Variable::new("Z", b()), Variable::new("X", b()), Variable::new("Y", b())],
        vec![
            Mechanism::root("U", &[0.2, 0.8]),
            Mechanism::root("Z", &[0.1, 0.9]),
            Mechanism::new("X", ["U", "Z"], rows(&[&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]])),
            Mechanism::new("Y", ["U", "X"], f_y.clone()),
        ],
        "Y",
    )?;
    transfer_task(base, &[0.2, 0.8], f_y)
}

fn advertising() -> Result<Camab, AbstractionError> {
    let base = scm(
        vec![
            Variable::new("Pr", indices(3)),
            Variable::new("Pu", indices(4)),
            Variable::new("SL", indices(2)),
            Variable::new("BT", indices(2)),
            Variable::new("ST", indices(3)),
            Variable::new("CK", indices(2)),
        ],
        vec![
            Mechanism::root("Pr", &[0.2, 0.2, 0.6]),
            Mechanism::root("Pu", &[0.05, 0.6, 0.3, 0.05]),
            Mechanism::new("SL", ["Pu"], rows(&[&[0.3, 0.3, 0.7, 0.7], &[0.7, 0.7, 0.3, 0.3]])),
            Mechanism::new(
                "BT",
                ["Pr", "Pu"],
                rows(&[
                    &[0.2, 0.1, 0.5, 0.8, 0.2, 0.1, 0.5, 0.8, 0.4, 0.3, 0.4, 0.5],
                    &[0.8, 0.9, 0.5, 0.2, 0.8, 0.9, 0.5, 0.2, 0.6, 0.7, 0.6, 0.5],
                ]),
            ),
            Mechanism::root("ST", &[0.5, 0.2, 0.3]),
            Mechanism::new(
                "CK",
                ["SL", "BT", "ST"],
                ninths(&[&[3, 4, 5, 4, 5, 6, 4, 5, 6, 5, 6, 7], &[6, 5, 4, 5, 4, 3, 5, 4, 3, 4, 3, 2]]),
            ),
        ],
        "CK",
    )?;
    let abs = scm(
        vec![
            Variable::new("Pr'", indices(2)),
            Variable::new("Pu'", indices(2)),
            Variable::new("SL'", indices(2)),
            Variable::new("BT'", indices(2)),
            Variable::new("CK'", indices(2)),
        ],
        vec![
            Mechanism::root("Pr'", &[0.8, 0.2]),
            Mechanism::root("Pu'", &[0.65, 0.35]),
            Mechanism::new("SL'", ["Pu'"], rows(&[&[0.3, 0.7], &[0.7, 0.3]])),
            Mechanism::new("BT'", ["Pr'", "Pu'"], rows(&[&[0.3, 0.5, 0.15, 0.65], &[0.7, 0.5, 0.85, 0.35]])),
            // Row order swapped relative to the printed table so that row 0
            // is P(CK′=0), as in the base CK table.
            Mechanism::new("CK'", ["SL'", "BT'"], ninths(&[&[4, 5, 5, 6], &[5, 4, 4, 3]])),
        ],
        "CK'",
    )?;
    let mut base_actions = single_actions("Pu", 4);
    base_actions.extend(single_actions("Pr", 2));
    let mut abs_actions = single_actions("Pu'", 2);
    abs_actions.extend(single_actions("Pr'", 2));
    let id = || identity_matrix(2);
    camab(
        base,
        base_actions,
        abs,
        abs_actions,
        alpha(vec![
            ("Pr", "Pr'", vec![vec![1, 0, 1], vec![0, 1, 0]]),
            ("Pu", "Pu'", vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]),
            ("SL", "SL'", id()),
            ("BT", "BT'", id()),
            ("CK", "CK'", id()),
        ]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{ic_error, MetricKind};

    fn camab_of(id: &str, v: usize) -> Camab {
        load_scenario(id).unwrap().variants.swap_remove(v).camab
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn registry_lists_ten_scenarios() {
        assert_eq!(scenario_ids().len(), 10);
        let all = all_scenarios();
        assert_eq!(all.len(), 10);
        for s in &all {
            assert!(s.repeats >= 1 && s.horizon >= 1 && !s.variants.is_empty());
        }
        assert!(matches!(load_scenario("8"), Err(ExperimentError::UnknownScenario(_))));
    }

    #[test]
    fn horizons_and_algorithms() {
        let ad = load_scenario("advertising").unwrap();
        assert_eq!((ad.horizon, ad.repeats), (1000, 20));
        assert_eq!(ad.algorithms.len(), 5);
        assert_eq!(load_scenario("1").unwrap().n_steps_grid, Some(vec![10, 25, 50, 100, 250, 500]));
        assert_eq!(load_scenario("3").unwrap().algorithms, vec![Algorithm::Ucb, Algorithm::Imit]);
        let s5 = load_scenario("5").unwrap();
        assert_eq!(s5.variants.iter().map(|v| v.label.as_str()).collect::<Vec<_>>(), ["5a", "5b"]);
    }

    #[test]
    fn domains_and_mechanisms_match_the_tables() {
        let ad = camab_of("advertising", 0);
        assert_eq!(ad.base().mechanism("Pu").unwrap().cpt, rows(&[&[0.05], &[0.6], &[0.3], &[0.05]]));
        assert_eq!(ad.base_actions().len(), 6);
        assert_eq!(ad.abstract_actions().len(), 4);
        assert_eq!(camab_of("6", 0).base().reward_domain().labels(), &[0.0, 1.0, 2.0]);
        assert_eq!(camab_of("7", 0).abstract_model().reward_domain().labels(), &[0.4, 0.5, 10.0]);
    }

    #[test]
    fn counterexample_means() {
        let c = camab_of("1", 0);
        assert_close(&c.base_means(), &[0.62, 0.38], 1e-12);
        assert_close(&c.abstract_means(), &[0.62, 0.38], 1e-12);
        let c = camab_of("ce2", 0);
        assert_close(&c.base_means(), &[1.115, 1.10], 1e-12);
        assert_close(&c.abstract_means(), &[0.40, 0.45], 1e-12);
    }

    #[test]
    fn scenario_five_means() {
        let c = camab_of("5", 0);
        // 0.7·0.62 + 0.2·0.38 + 0.1·0.42 from the printed tables.
        assert_close(&c.base_means(), &[0.552, 0.62, 0.38, 0.42], 1e-12);
        assert_close(&c.abstract_means(), &[0.47, 0.45, 0.55], 1e-12);
        assert_eq!(c.action_map(), &[0, 1, 2, 2]);
        assert_eq!(camab_of("5", 1).action_map(), &[0, 2, 1, 2]);
    }

    #[test]
    fn scenario_six_and_seven_means() {
        assert_close(&camab_of("6", 0).base_means(), &[0.9, 0.6], 1e-12);
        assert_close(&camab_of("6", 0).abstract_means(), &[0.9, 0.6], 1e-12);
        // 0.36·0.4 + 0.38·0.5 + 0.26·10 and 0.54·0.4 + 0.32·0.5 + 0.14·10.
        assert_close(&camab_of("7", 0).abstract_means(), &[2.934, 1.776], 1e-12);
    }

    #[test]
    fn transfer_task_means() {
        // Task 1: E[Y | do(X=x)] = Σ_u P(u) P(Y=1 | u, x).
        assert_close(&camab_of("task1", 0).base_means(), &[0.3 * 0.1 + 0.7 * 0.9, 0.3 * 0.5 + 0.7 * 0.3], 1e-12);
        assert_close(&camab_of("task2", 0).base_means(), &[0.2 * 0.9 + 0.8 * 0.5, 0.2 * 0.1 + 0.8 * 0.9], 1e-12);
        let t1 = camab_of("task1", 0);
        assert_close(&t1.abstract_means(), &t1.base_means(), 1e-12);
    }

    #[test]
    fn advertising_preserves_the_optimum() {
        let c = camab_of("advertising", 0);
        let b = c.base_means();
        let a = c.abstract_means();
        let best = crate::metrics::argmax(&b);
        assert_eq!(c.action_map()[best], crate::metrics::argmax(&a));
        assert!(b.iter().chain(&a).all(|m| (0.0..=1.0).contains(m)));
    }

    #[test]
    fn exact_abstractions_have_zero_ic_error() {
        for (id, v) in [("1", 0), ("2", 0), ("4", 0), ("6", 0), ("7", 0), ("ce2", 0), ("task1", 0), ("task2", 0)] {
            for m in [MetricKind::Wasserstein2, MetricKind::JensenShannon] {
                let e = ic_error(&camab_of(id, v), m).unwrap();
                assert!(e <= 1e-12, "{id} {m}: {e}");
            }
        }
        let e = ic_error(&camab_of("3", 0), MetricKind::JensenShannon).unwrap();
        assert!((e - 0.229).abs() < 1e-3, "{e}");
    }

    #[test]
    fn anti_diagonal_shape() {
        assert_eq!(anti_diagonal(2), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(anti_diagonal(3)[0], vec![0, 0, 1]);
    }

    #[test]
    fn matmul_matches_hand_product() {
        let p = matmul(&rows(&F_Y), &rows(&F_M));
        assert_close(&p[0], &[0.38, 0.62], 1e-15);
        assert_close(&p[1], &[0.62, 0.38], 1e-15);
    }
}
