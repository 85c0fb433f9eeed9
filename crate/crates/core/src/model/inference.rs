use rand::Rng;

use super::{DiscreteDistribution, Intervention, ModelError, Scm};

impl Scm {
    /// Visits every joint assignment with non-zero probability under the
    /// model with `fixed` variables clamped, walking the topological order.
    fn enumerate(&self, fixed: &[Option<usize>], visit: &mut dyn FnMut(&[usize], f64)) {
        let mut values = vec![0; self.variables().len()];
        self.descend(0, &mut values, 1.0, fixed, visit);
    }

    fn descend(&self, k: usize, values: &mut Vec<usize>, w: f64, fixed: &[Option<usize>], visit: &mut dyn FnMut(&[usize], f64)) {
        let Some(&v) = self.order.get(k) else {
            visit(values, w);
            return;
        };
        if let Some(x) = fixed[v] {
            values[v] = x;
            self.descend(k + 1, values, w, fixed, visit);
            return;
        }
        let node = &self.nodes[v];
        let col = node.column(values);
        for x in 0..self.variables()[v].domain.len() {
            let p = node.prob(x, col);
            if p > 0.0 {
                values[v] = x;
                self.descend(k + 1, values, w * p, fixed, visit);
            }
        }
    }

    /// Exact marginal of `target` under `do(iv)`.
    pub fn interventional_distribution(&self, iv: &Intervention, target: &str) -> Result<DiscreteDistribution, ModelError> {
        let t = self.var_index(target)?;
        let fixed = self.overrides(iv)?;
        let domain = self.variables()[t].domain.clone();
        let mut probs = vec![0.0; domain.len()];
        self.enumerate(&fixed, &mut |values, w| probs[values[t]] += w);
        DiscreteDistribution::new(domain, probs)
    }

    pub fn reward_distribution(&self, iv: &Intervention) -> Result<DiscreteDistribution, ModelError> {
        self.interventional_distribution(iv, self.reward_var())
    }

    /// E[Y | do(iv)] from the exact interventional distribution.
    pub fn expected_reward(&self, iv: &Intervention) -> Result<f64, ModelError> {
        Ok(self.reward_distribution(iv)?.mean())
    }

    /// One ancestral sample of the full assignment (value indices, in
    /// declaration order).
    pub fn sample<R: Rng + ?Sized>(&self, iv: &Intervention, rng: &mut R) -> Result<Vec<usize>, ModelError> {
        let fixed = self.overrides(iv)?;
        let mut values = vec![0; self.variables().len()];
        for &v in &self.order {
            values[v] = match fixed[v] {
                Some(x) => x,
                None => {
                    let node = &self.nodes[v];
                    let col = node.column(&values);
                    let rows = self.variables()[v].domain.len();
                    let u = rng.random::<f64>();
                    let mut acc = 0.0;
                    let mut pick = None;
                    for x in 0..rows {
                        let p = node.prob(x, col);
                        if p <= 0.0 {
                            continue;
                        }
                        acc += p;
                        pick = Some(x);
                        if u < acc {
                            break;
                        }
                    }
                    pick.expect("validated column has positive mass")
                }
            };
        }
        Ok(values)
    }
}
