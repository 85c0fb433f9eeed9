use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Intervention, Mechanism, ModelError, Scm, Variable};

/// On-disk model format. `actions` is an optional extension listing the
/// bandit arms as `{variable: label}` maps; `{}` is the observational arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub variables: Vec<Variable>,
    pub mechanisms: Vec<Mechanism>,
    pub reward: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<BTreeMap<String, f64>>>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<Scm, ModelError> {
        Scm::new(self.variables.clone(), self.mechanisms.clone(), &self.reward)
    }

    /// Resolves the label-valued action list against a built model.
    pub fn interventions(&self, scm: &Scm) -> Result<Option<Vec<Intervention>>, ModelError> {
        let Some(actions) = &self.actions else { return Ok(None) };
        actions
            .iter()
            .map(|a| {
                let pairs = a
                    .iter()
                    .map(|(var, &label)| {
                        let idx = scm
                            .domain(var)?
                            .index_of(label)
                            .ok_or_else(|| ModelError::UnknownLabel { var: var.clone(), label })?;
                        Ok((var.clone(), idx))
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                Ok(Intervention::from_pairs(pairs))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn from_scm(scm: &Scm, actions: Option<&[Intervention]>) -> Self {
        let actions = actions.map(|list| {
            list.iter()
                .map(|iv| {
                    iv.iter()
                        .map(|(var, idx)| (var.to_string(), scm.domain(var).expect("valid action").label(idx)))
                        .collect()
                })
                .collect()
        });
        Self {
            variables: scm.variables().to_vec(),
            mechanisms: scm.mechanisms().to_vec(),
            reward: scm.reward_var().to_string(),
            actions,
        }
    }
}

/// Checks every SCM invariant of a parsed model.
pub fn validate_scm(spec: &ModelSpec) -> Result<(), ModelError> {
    let scm = spec.build()?;
    spec.interventions(&scm)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CE2: &str = r#"{
        "variables": [{"id": "T", "domain": [0, 1]}, {"id": "Y", "domain": [1, 1.1, 1.2]}],
        "mechanisms": [
            {"child": "T", "parents": [], "cpt": [[0.8], [0.2]]},
            {"child": "Y", "parents": ["T"], "cpt": [[0.25, 0.45], [0.35, 0.1], [0.4, 0.45]]}
        ],
        "reward": "Y",
        "actions": [{"T": 0}, {"T": 1}]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let spec: ModelSpec = serde_json::from_str(CE2).unwrap();
        validate_scm(&spec).unwrap();
        let scm = spec.build().unwrap();
        let acts = spec.interventions(&scm).unwrap().unwrap();
        assert_eq!(acts, vec![Intervention::single("T", 0), Intervention::single("T", 1)]);
        let d = scm.reward_distribution(&acts[1]).unwrap();
        assert!((d.probs()[1] - 0.10).abs() < 1e-12);
        let back = ModelSpec::from_scm(&scm, Some(&acts));
        let text = serde_json::to_string(&back).unwrap();
        let again: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn bad_domain_rejected_at_parse() {
        let text = CE2.replace("[1, 1.1, 1.2]", "[1, 1, 1.2]");
        assert!(serde_json::from_str::<ModelSpec>(&text).is_err());
    }

    #[test]
    fn unknown_action_label() {
        let text = CE2.replace(r#"{"T": 1}"#, r#"{"T": 3}"#);
        let spec: ModelSpec = serde_json::from_str(&text).unwrap();
        assert!(matches!(validate_scm(&spec), Err(ModelError::UnknownLabel { .. })));
    }

    #[test]
    fn non_stochastic_column_from_json() {
        let text = CE2.replace("[[0.8], [0.2]]", "[[0.7], [0.2]]");
        let spec: ModelSpec = serde_json::from_str(&text).unwrap();
        let err = validate_scm(&spec).unwrap_err();
        assert!(matches!(err, ModelError::NonStochasticColumn { col: 0, .. }));
    }
}
