use std::collections::BTreeSet;

use crate::model::{DiscreteDistribution, Intervention, ModelSpec, Scm};

use super::{Abstraction, AbstractionError, AbstractionSpec};

/// Two causal bandits linked by an abstraction. Construction validates the
/// pairing and caches every arm's exact reward distribution.
#[derive(Clone, Debug)]
pub struct Camab {
    base: Scm,
    base_actions: Vec<Intervention>,
    abstract_model: Scm,
    abstract_actions: Vec<Intervention>,
    abstraction: Abstraction,
    action_map: Vec<usize>,
    base_dists: Vec<DiscreteDistribution>,
    abstract_dists: Vec<DiscreteDistribution>,
}

fn check_actions(scm: &Scm, actions: &[Intervention]) -> Result<(), AbstractionError> {
    if actions.is_empty() {
        return Err(AbstractionError::EmptyActions);
    }
    let mut seen = BTreeSet::new();
    for a in actions {
        scm.check_intervention(a)?;
        if !seen.insert(a) {
            return Err(AbstractionError::DuplicateAction(a.to_string()));
        }
    }
    Ok(())
}

/// Checks the action sets and the abstraction against each other: base
/// actions stay inside the relevant variables and map into I′, every
/// abstract action has a preimage, the reward variables correspond one to
/// one, and the variable and value maps are surjective.
pub fn validate_camab(
    base: &Scm,
    base_actions: &[Intervention],
    abstract_model: &Scm,
    abstract_actions: &[Intervention],
    abstraction: &Abstraction,
) -> Result<Vec<usize>, AbstractionError> {
    check_actions(base, base_actions)?;
    check_actions(abstract_model, abstract_actions)?;
    for a in base_actions {
        if let Some(var) = a.targets().find(|v| !abstraction.is_relevant(v)) {
            return Err(AbstractionError::ActionOutsideRelevantVars { action: a.to_string(), var: var.to_string() });
        }
    }
    let mut action_map = Vec::with_capacity(base_actions.len());
    for a in base_actions {
        let image = abstraction.abstract_intervention(a)?;
        let j = abstract_actions
            .iter()
            .position(|b| *b == image)
            .ok_or_else(|| AbstractionError::UnmappedAction(a.to_string()))?;
        action_map.push(j);
    }
    if let Some(j) = (0..abstract_actions.len()).find(|j| !action_map.contains(j)) {
        return Err(AbstractionError::OrphanAbstractAction(abstract_actions[j].to_string()));
    }
    let (y, y_abs) = (base.reward_var(), abstract_model.reward_var());
    match abstraction.map_variable(y) {
        Ok(t) if t == y_abs => {}
        Ok(t) => return Err(AbstractionError::TargetMismatch(format!("m({y}) = {t}, abstract reward is {y_abs}"))),
        Err(_) => return Err(AbstractionError::TargetMismatch(format!("reward `{y}` is not relevant"))),
    }
    if abstraction.preimage_vars(y_abs).len() != 1 {
        return Err(AbstractionError::TargetMismatch(format!("`{y_abs}` conflates several base variables")));
    }
    abstraction.check_surjective(abstract_model)?;
    Ok(action_map)
}

impl Camab {
    pub fn new(
        base: Scm,
        base_actions: Vec<Intervention>,
        abstract_model: Scm,
        abstract_actions: Vec<Intervention>,
        abstraction: Abstraction,
    ) -> Result<Self, AbstractionError> {
        let action_map = validate_camab(&base, &base_actions, &abstract_model, &abstract_actions, &abstraction)?;
        let base_dists = base_actions.iter().map(|a| base.reward_distribution(a)).collect::<Result<_, _>>()?;
        let abstract_dists =
            abstract_actions.iter().map(|a| abstract_model.reward_distribution(a)).collect::<Result<_, _>>()?;
        Ok(Self { base, base_actions, abstract_model, abstract_actions, abstraction, action_map, base_dists, abstract_dists })
    }

    /// Builds from the on-disk formats. Missing action lists default to
    /// every single-variable intervention on a relevant non-reward base
    /// variable, and to the images of the base actions.
    pub fn from_specs(base: &ModelSpec, abs: &ModelSpec, alpha: &AbstractionSpec) -> Result<Self, AbstractionError> {
        let base_scm = base.build()?;
        let abs_scm = abs.build()?;
        let abstraction = Abstraction::new(alpha.clone(), &base_scm, &abs_scm)?;
        let base_actions = match base.interventions(&base_scm)? {
            Some(a) => a,
            None => {
                let mut acts = Vec::new();
                for v in abstraction.relevant() {
                    if v == base_scm.reward_var() {
                        continue;
                    }
                    for x in 0..base_scm.domain(v)?.len() {
                        acts.push(Intervention::single(v.clone(), x));
                    }
                }
                acts
            }
        };
        let abstract_actions = match abs.interventions(&abs_scm)? {
            Some(a) => a,
            None => {
                let mut acts: Vec<Intervention> = Vec::new();
                for a in &base_actions {
                    let image = abstraction.abstract_intervention(a)?;
                    if !acts.contains(&image) {
                        acts.push(image);
                    }
                }
                acts
            }
        };
        Self::new(base_scm, base_actions, abs_scm, abstract_actions, abstraction)
    }

    pub fn base(&self) -> &Scm {
        &self.base
    }

    pub fn base_actions(&self) -> &[Intervention] {
        &self.base_actions
    }

    pub fn abstract_model(&self) -> &Scm {
        &self.abstract_model
    }

    pub fn abstract_actions(&self) -> &[Intervention] {
        &self.abstract_actions
    }

    pub fn abstraction(&self) -> &Abstraction {
        &self.abstraction
    }

    /// Index in I′ of α(a) for each base action index a.
    pub fn action_map(&self) -> &[usize] {
        &self.action_map
    }

    pub fn map_action(&self, a: usize) -> Result<usize, AbstractionError> {
        self.action_map.get(a).copied().ok_or(AbstractionError::UnknownAction(a))
    }

    /// α⁻¹(a′) as base action indices, ascending.
    pub fn preimage_actions(&self, abstract_action: usize) -> Result<Vec<usize>, AbstractionError> {
        if abstract_action >= self.abstract_actions.len() {
            return Err(AbstractionError::UnknownAction(abstract_action));
        }
        Ok((0..self.action_map.len()).filter(|&a| self.action_map[a] == abstract_action).collect())
    }

    /// K(a′).
    pub fn cluster_size(&self, abstract_action: usize) -> Result<usize, AbstractionError> {
        Ok(self.preimage_actions(abstract_action)?.len())
    }

    pub fn base_distributions(&self) -> &[DiscreteDistribution] {
        &self.base_dists
    }

    pub fn abstract_distributions(&self) -> &[DiscreteDistribution] {
        &self.abstract_dists
    }

    /// Pushforward of a base reward distribution onto D[Y′].
    pub fn pushforward(&self, d: &DiscreteDistribution) -> Result<DiscreteDistribution, AbstractionError> {
        self.abstraction.pushforward_var(self.base.reward_var(), d)
    }

    /// α_{Y′} as a base-label-index to abstract-label-index table.
    pub fn reward_index_map(&self) -> Vec<usize> {
        (0..self.base.reward_domain().len())
            .map(|j| self.abstraction.abstract_value_index(self.base.reward_var(), j).expect("validated reward map"))
            .collect()
    }

    pub fn base_means(&self) -> Vec<f64> {
        self.base_dists.iter().map(DiscreteDistribution::mean).collect()
    }

    pub fn abstract_means(&self) -> Vec<f64> {
        self.abstract_dists.iter().map(DiscreteDistribution::mean).collect()
    }

    pub fn base_gaps(&self) -> Vec<f64> {
        gaps(&self.base_means())
    }

    pub fn abstract_gaps(&self) -> Vec<f64> {
        gaps(&self.abstract_means())
    }

    pub fn to_specs(&self) -> (ModelSpec, ModelSpec, AbstractionSpec) {
        (
            ModelSpec::from_scm(&self.base, Some(&self.base_actions)),
            ModelSpec::from_scm(&self.abstract_model, Some(&self.abstract_actions)),
            self.abstraction.spec().clone(),
        )
    }
}

pub(crate) fn gaps(means: &[f64]) -> Vec<f64> {
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    means.iter().map(|m| best - m).collect()
}
