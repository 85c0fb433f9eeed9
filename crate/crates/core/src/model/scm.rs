use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteDomain, Intervention, ModelError, MASS_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub domain: FiniteDomain,
}

impl Variable {
    pub fn new(id: impl Into<String>, domain: FiniteDomain) -> Self {
        Self { id: id.into(), domain }
    }
}

/// Conditional probability table of one variable given its ordered parents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub child: String,
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

impl Mechanism {
    pub fn new<S: Into<String>>(child: impl Into<String>, parents: impl IntoIterator<Item = S>, cpt: Vec<Vec<f64>>) -> Self {
        Self { child: child.into(), parents: parents.into_iter().map(Into::into).collect(), cpt }
    }

    pub fn root(child: impl Into<String>, probs: &[f64]) -> Self {
        Self::new(child, Vec::<String>::new(), probs.iter().map(|&p| vec![p]).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelWarning {
    /// Reward labels outside [0, 1]; bandit analyses assume bounded rewards.
    RewardOutsideUnitInterval { var: String, min: f64, max: f64 },
}

impl std::fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RewardOutsideUnitInterval { var, min, max } => {
                write!(f, "reward `{var}` takes values in [{min}, {max}], outside [0, 1]")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Node {
    pub parents: Vec<usize>,
    pub strides: Vec<usize>,
    pub cols: usize,
    /// Row-major, `rows = domain size`.
    pub cpt: Vec<f64>,
}

impl Node {
    pub fn column(&self, values: &[usize]) -> usize {
        self.parents.iter().zip(&self.strides).map(|(&p, &s)| values[p] * s).sum()
    }

    pub fn prob(&self, child_value: usize, col: usize) -> f64 {
        self.cpt[child_value * self.cols + col]
    }
}

/// A validated SCM. Immutable; all operations return new values.
#[derive(Clone, Debug)]
pub struct Scm {
    variables: Vec<Variable>,
    mechanisms: Vec<Mechanism>,
    index: BTreeMap<String, usize>,
    pub(super) nodes: Vec<Node>,
    pub(super) order: Vec<usize>,
    reward: usize,
}

impl Scm {
    pub fn new(variables: Vec<Variable>, mechanisms: Vec<Mechanism>, reward: &str) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.id.clone()));
            }
        }
        let mut slots: Vec<Option<Mechanism>> = vec![None; variables.len()];
        for m in mechanisms {
            let i = *index.get(&m.child).ok_or_else(|| ModelError::UnknownVariable(m.child.clone()))?;
            if slots[i].is_some() {
                return Err(ModelError::DuplicateMechanism(m.child));
            }
            slots[i] = Some(m);
        }
        let mut ordered = Vec::with_capacity(variables.len());
        for (v, slot) in variables.iter().zip(slots) {
            ordered.push(slot.ok_or_else(|| ModelError::MissingMechanism(v.id.clone()))?);
        }
        let nodes = ordered
            .iter()
            .map(|m| compile(m, &variables, &index))
            .collect::<Result<Vec<_>, _>>()?;
        let order = topological_order(&nodes, &variables)?;
        let reward = *index.get(reward).ok_or_else(|| ModelError::UnknownReward(reward.to_string()))?;
        Ok(Self { variables, mechanisms: ordered, index, nodes, order, reward })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn mechanism(&self, id: &str) -> Option<&Mechanism> {
        self.index.get(id).map(|&i| &self.mechanisms[i])
    }

    pub fn var_index(&self, id: &str) -> Result<usize, ModelError> {
        self.index.get(id).copied().ok_or_else(|| ModelError::UnknownVariable(id.to_string()))
    }

    pub fn domain(&self, id: &str) -> Result<&FiniteDomain, ModelError> {
        Ok(&self.variables[self.var_index(id)?].domain)
    }

    pub fn reward_var(&self) -> &str {
        &self.variables[self.reward].id
    }

    pub fn reward_domain(&self) -> &FiniteDomain {
        &self.variables[self.reward].domain
    }

    /// Variable indices in a fixed topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Size of the full joint state space.
    pub fn joint_size(&self) -> usize {
        self.variables.iter().map(|v| v.domain.len()).product()
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        let d = self.reward_domain().labels();
        let (min, max) = (d[0], d[d.len() - 1]);
        if min < 0.0 || max > 1.0 {
            vec![ModelWarning::RewardOutsideUnitInterval { var: self.reward_var().to_string(), min, max }]
        } else {
            Vec::new()
        }
    }

    pub fn check_intervention(&self, iv: &Intervention) -> Result<(), ModelError> {
        for (var, value) in iv.iter() {
            let size = self.domain(var)?.len();
            if value >= size {
                return Err(ModelError::ValueOutOfDomain { var: var.to_string(), index: value, size });
            }
        }
        Ok(())
    }

    /// Point-mass overrides per variable index.
    pub(super) fn overrides(&self, iv: &Intervention) -> Result<Vec<Option<usize>>, ModelError> {
        self.check_intervention(iv)?;
        let mut fixed = vec![None; self.variables.len()];
        for (var, value) in iv.iter() {
            fixed[self.index[var]] = Some(value);
        }
        Ok(fixed)
    }

    /// The mutilated model: every targeted variable gets a parentless
    /// point-mass mechanism on its assigned value.
    pub fn intervene(&self, iv: &Intervention) -> Result<Scm, ModelError> {
        self.check_intervention(iv)?;
        let mut out = self.clone();
        for (var, value) in iv.iter() {
            let i = self.index[var];
            let n = self.variables[i].domain.len();
            let probs: Vec<f64> = (0..n).map(|k| if k == value { 1.0 } else { 0.0 }).collect();
            let m = Mechanism::root(var, &probs);
            out.nodes[i] = compile(&m, &self.variables, &self.index)?;
            out.mechanisms[i] = m;
        }
        // Removing edges keeps the old order topological.
        Ok(out)
    }
}

fn compile(m: &Mechanism, variables: &[Variable], index: &BTreeMap<String, usize>) -> Result<Node, ModelError> {
    let child = index[&m.child];
    let rows = variables[child].domain.len();
    let parents = m
        .parents
        .iter()
        .map(|p| index.get(p).copied().ok_or_else(|| ModelError::UnknownVariable(p.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let sizes: Vec<usize> = parents.iter().map(|&p| variables[p].domain.len()).collect();
    let cols: usize = sizes.iter().product();
    let mut strides = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }

    let shape_err = |found: String| ModelError::CptShape { var: m.child.clone(), rows, cols, found };
    if m.cpt.len() != rows {
        return Err(shape_err(format!("{} rows", m.cpt.len())));
    }
    if let Some(r) = m.cpt.iter().find(|r| r.len() != cols) {
        return Err(shape_err(format!("a row of length {}", r.len())));
    }
    let mut cpt = Vec::with_capacity(rows * cols);
    for (row, values) in m.cpt.iter().enumerate() {
        for (col, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::InvalidCptEntry { var: m.child.clone(), row, col, value });
            }
            cpt.push(value);
        }
    }
    for col in 0..cols {
        let sum: f64 = (0..rows).map(|r| cpt[r * cols + col]).sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(ModelError::NonStochasticColumn { var: m.child.clone(), col, sum });
        }
    }
    Ok(Node { parents, strides, cols, cpt })
}

/// Kahn's algorithm; among ready nodes the earliest declared goes first.
fn topological_order(nodes: &[Node], variables: &[Variable]) -> Result<Vec<usize>, ModelError> {
    let n = nodes.len();
    let mut indegree: Vec<usize> = nodes.iter().map(|nd| nd.parents.len()).collect();
    let mut children = vec![Vec::new(); n];
    for (c, nd) in nodes.iter().enumerate() {
        for &p in &nd.parents {
            children[p].push(c);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).filter(|&i| indegree[i] > 0).map(|i| variables[i].id.clone()).collect();
        return Err(ModelError::CyclicGraph(stuck));
    }
    Ok(order)
}
