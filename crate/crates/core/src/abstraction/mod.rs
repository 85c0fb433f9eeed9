//! α-abstractions between a base and an abstract SCM, and the CAMAB pairing
//! of two causal bandits through such an abstraction.

mod camab;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{DiscreteDistribution, FiniteDomain, Intervention, ModelError, Scm};

pub use camab::{validate_camab, Camab};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AbstractionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("relevant variable `{0}` is not in the base model")]
    UnknownBaseVariable(String),
    #[error("relevant variable `{0}` is listed twice")]
    DuplicateRelevant(String),
    #[error("relevant variable `{0}` has no entry in var_map")]
    UnmappedVariable(String),
    #[error("var_map entry for `{0}`, which is not relevant")]
    MapOutsideRelevant(String),
    #[error("abstract variable `{0}` is not in the abstract model")]
    UnknownAbstractVariable(String),
    #[error("no value map for abstract variable `{0}`")]
    MissingValueMap(String),
    #[error("value map given for `{0}`, which no relevant variable maps to")]
    UnexpectedValueMap(String),
    #[error("value map of `{var}` must be {rows}x{cols}, found {found}")]
    ValueMapShape { var: String, rows: usize, cols: usize, found: String },
    #[error("value map of `{var}` has entry {value} at row {row}, column {col}; entries must be 0 or 1")]
    NonBinaryValueMap { var: String, row: usize, col: usize, value: u8 },
    #[error("value map of `{var}`: column {col} must contain exactly one 1")]
    NonDeterministicValueMap { var: String, col: usize },
    #[error("abstract variable `{0}` has no preimage under var_map")]
    NonSurjectiveVarMap(String),
    #[error("value map of `{var}`: abstract value index {row} has no preimage")]
    NonSurjectiveValueMap { var: String, row: usize },
    #[error("variable `{0}` is not relevant")]
    VariableNotRelevant(String),
    #[error("value {value} is not in the domain of `{var}`")]
    ValueOutOfDomain { var: String, value: f64 },
    #[error("`{0}` shares its abstract variable with other base variables; map the whole cluster")]
    ClusteredVariable(String),
    #[error("intervention assigns only part of the cluster mapped to `{0}`")]
    PartialClusterAssignment(String),
    #[error("distribution support does not match the base reward domain")]
    SupportMismatch,
    #[error("base action {action} targets `{var}`, which is not relevant")]
    ActionOutsideRelevantVars { action: String, var: String },
    #[error("base action {0} has no image in the abstract action set")]
    UnmappedAction(String),
    #[error("abstract action {0} has no preimage in the base action set")]
    OrphanAbstractAction(String),
    #[error("reward variables do not agree: {0}")]
    TargetMismatch(String),
    #[error("unknown action index {0}")]
    UnknownAction(usize),
    #[error("action set is empty")]
    EmptyActions,
    #[error("action {0} is listed twice")]
    DuplicateAction(String),
}

/// On-disk abstraction format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractionSpec {
    pub relevant: Vec<String>,
    pub var_map: BTreeMap<String, String>,
    pub value_maps: BTreeMap<String, Vec<Vec<u8>>>,
}

impl AbstractionSpec {
    /// Identity abstraction of the listed variables onto same-named
    /// abstract variables of the same domain sizes.
    pub fn identity(vars: &[(&str, usize)]) -> Self {
        let relevant = vars.iter().map(|(v, _)| v.to_string()).collect();
        let var_map = vars.iter().map(|(v, _)| (v.to_string(), v.to_string())).collect();
        let value_maps = vars.iter().map(|&(v, n)| (v.to_string(), identity_matrix(n))).collect();
        Self { relevant, var_map, value_maps }
    }
}

pub fn identity_matrix(n: usize) -> Vec<Vec<u8>> {
    (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect()
}

/// Base variables mapped onto one abstract variable, with the compiled
/// column-to-abstract-value table.
#[derive(Clone, Debug)]
struct Cluster {
    members: Vec<String>,
    strides: Vec<usize>,
    image: Vec<usize>,
    rows: usize,
}

/// A shape-checked abstraction bound to the domains of its two models.
/// Surjectivity is checked by [`validate_camab`].
#[derive(Clone, Debug)]
pub struct Abstraction {
    spec: AbstractionSpec,
    clusters: BTreeMap<String, Cluster>,
    base_domains: BTreeMap<String, FiniteDomain>,
    abstract_domains: BTreeMap<String, FiniteDomain>,
}

impl Abstraction {
    pub fn new(spec: AbstractionSpec, base: &Scm, abs: &Scm) -> Result<Self, AbstractionError> {
        let mut seen = BTreeSet::new();
        let mut base_domains = BTreeMap::new();
        for v in &spec.relevant {
            if !seen.insert(v.as_str()) {
                return Err(AbstractionError::DuplicateRelevant(v.clone()));
            }
            let d = base.domain(v).map_err(|_| AbstractionError::UnknownBaseVariable(v.clone()))?;
            base_domains.insert(v.clone(), d.clone());
        }
        if let Some(k) = spec.var_map.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(AbstractionError::MapOutsideRelevant(k.clone()));
        }
        let mut members: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for v in &spec.relevant {
            let target = spec.var_map.get(v).ok_or_else(|| AbstractionError::UnmappedVariable(v.clone()))?;
            abs.domain(target).map_err(|_| AbstractionError::UnknownAbstractVariable(target.clone()))?;
            members.entry(target.clone()).or_default().push(v.clone());
        }
        if let Some(k) = spec.value_maps.keys().find(|k| !members.contains_key(*k)) {
            return Err(AbstractionError::UnexpectedValueMap(k.clone()));
        }

        let mut clusters = BTreeMap::new();
        for (target, members) in members {
            let matrix = spec.value_maps.get(&target).ok_or_else(|| AbstractionError::MissingValueMap(target.clone()))?;
            let rows = abs.domain(&target)?.len();
            let sizes: Vec<usize> = members.iter().map(|m| base_domains[m].len()).collect();
            let cols: usize = sizes.iter().product();
            let shape_err = |found: String| AbstractionError::ValueMapShape { var: target.clone(), rows, cols, found };
            if matrix.len() != rows {
                return Err(shape_err(format!("{} rows", matrix.len())));
            }
            if let Some(r) = matrix.iter().find(|r| r.len() != cols) {
                return Err(shape_err(format!("a row of length {}", r.len())));
            }
            for (row, r) in matrix.iter().enumerate() {
                if let Some((col, &value)) = r.iter().enumerate().find(|(_, &x)| x > 1) {
                    return Err(AbstractionError::NonBinaryValueMap { var: target.clone(), row, col, value });
                }
            }
            let mut image = Vec::with_capacity(cols);
            #[allow(clippy::needless_range_loop)]
            for col in 0..cols {
                let ones: Vec<usize> = (0..rows).filter(|&r| matrix[r][col] == 1).collect();
                match ones.as_slice() {
                    [r] => image.push(*r),
                    _ => return Err(AbstractionError::NonDeterministicValueMap { var: target.clone(), col }),
                }
            }
            let mut strides = vec![1; sizes.len()];
            for k in (0..sizes.len().saturating_sub(1)).rev() {
                strides[k] = strides[k + 1] * sizes[k + 1];
            }
            clusters.insert(target, Cluster { members, strides, image, rows });
        }
        let abstract_domains = abs.variables().iter().map(|v| (v.id.clone(), v.domain.clone())).collect();
        Ok(Self { spec, clusters, base_domains, abstract_domains })
    }

    pub fn spec(&self) -> &AbstractionSpec {
        &self.spec
    }

    pub fn relevant(&self) -> &[String] {
        &self.spec.relevant
    }

    pub fn is_relevant(&self, var: &str) -> bool {
        self.base_domains.contains_key(var)
    }

    /// m(var) for a relevant base variable.
    pub fn map_variable(&self, var: &str) -> Result<&str, AbstractionError> {
        self.spec
            .var_map
            .get(var)
            .map(String::as_str)
            .ok_or_else(|| AbstractionError::VariableNotRelevant(var.to_string()))
    }

    /// Base variables mapped onto `abstract_var`, in relevance order.
    pub fn preimage_vars(&self, abstract_var: &str) -> &[String] {
        self.clusters.get(abstract_var).map(|c| c.members.as_slice()).unwrap_or(&[])
    }

    /// Value-index form of α for a single-variable cluster.
    pub fn abstract_value_index(&self, var: &str, index: usize) -> Result<usize, AbstractionError> {
        let target = self.map_variable(var)?;
        let c = &self.clusters[target];
        if c.members.len() > 1 {
            return Err(AbstractionError::ClusteredVariable(var.to_string()));
        }
        let size = self.base_domains[var].len();
        if index >= size {
            return Err(ModelError::ValueOutOfDomain { var: var.to_string(), index, size }.into());
        }
        Ok(c.image[index])
    }

    /// α applied to a real base label; the abstract label is looked up by
    /// abstract-domain index.
    pub fn abstract_value(&self, var: &str, value: f64) -> Result<f64, AbstractionError> {
        let target = self.map_variable(var)?;
        let index = self.base_domains[var]
            .index_of(value)
            .ok_or_else(|| AbstractionError::ValueOutOfDomain { var: var.to_string(), value })?;
        let k = self.abstract_value_index(var, index)?;
        Ok(self.abstract_domains[target].label(k))
    }

    pub fn abstract_intervention(&self, iv: &Intervention) -> Result<Intervention, AbstractionError> {
        if let Some(v) = iv.targets().find(|v| !self.is_relevant(v)) {
            return Err(AbstractionError::VariableNotRelevant(v.to_string()));
        }
        let mut pairs = Vec::new();
        for (target, c) in &self.clusters {
            let assigned: Vec<Option<usize>> = c.members.iter().map(|m| iv.get(m)).collect();
            if assigned.iter().all(Option::is_none) {
                continue;
            }
            if assigned.iter().any(Option::is_none) {
                return Err(AbstractionError::PartialClusterAssignment(target.clone()));
            }
            let mut col = 0;
            for ((m, x), s) in c.members.iter().zip(&assigned).zip(&c.strides) {
                let x = x.expect("checked above");
                let size = self.base_domains[m].len();
                if x >= size {
                    return Err(ModelError::ValueOutOfDomain { var: m.clone(), index: x, size }.into());
                }
                col += x * s;
            }
            pairs.push((target.clone(), c.image[col]));
        }
        Ok(Intervention::from_pairs(pairs))
    }

    /// Pushforward through the value map of the abstract variable that
    /// `base_var` forms on its own.
    pub fn pushforward_var(&self, base_var: &str, d: &DiscreteDistribution) -> Result<DiscreteDistribution, AbstractionError> {
        let target = self.map_variable(base_var)?;
        let c = &self.clusters[target];
        if c.members.len() > 1 {
            return Err(AbstractionError::ClusteredVariable(base_var.to_string()));
        }
        if d.support() != &self.base_domains[base_var] {
            return Err(AbstractionError::SupportMismatch);
        }
        let mut probs = vec![0.0; c.rows];
        for (j, p) in d.probs().iter().enumerate() {
            probs[c.image[j]] += p;
        }
        Ok(DiscreteDistribution::new(self.abstract_domains[target].clone(), probs)?)
    }

    /// 0/1 matrix α_{X′} as stored.
    pub fn value_map(&self, abstract_var: &str) -> Option<&Vec<Vec<u8>>> {
        self.spec.value_maps.get(abstract_var)
    }

    pub(crate) fn check_surjective(&self, abs: &Scm) -> Result<(), AbstractionError> {
        for v in abs.variables() {
            let Some(c) = self.clusters.get(&v.id) else {
                return Err(AbstractionError::NonSurjectiveVarMap(v.id.clone()));
            };
            if let Some(row) = (0..c.rows).find(|r| !c.image.contains(r)) {
                return Err(AbstractionError::NonSurjectiveValueMap { var: v.id.clone(), row });
            }
        }
        Ok(())
    }
}
