use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-12;

/// Ordered real labels of a finite variable domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FiniteDomain {
    labels: Vec<f64>,
}

impl FiniteDomain {
    pub fn new(labels: Vec<f64>) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        if labels.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::NonFiniteLabel);
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::UnorderedDomain(labels));
        }
        Ok(Self { labels })
    }

    /// The domain {0, 1, ..., n-1}.
    pub fn indices(n: usize) -> Self {
        assert!(n > 0, "domain must be non-empty");
        Self { labels: (0..n).map(|i| i as f64).collect() }
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, index: usize) -> f64 {
        self.labels[index]
    }

    /// Index of a label; labels closer than 1e-9 (relative) count as equal.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        self.labels
            .iter()
            .position(|&l| l == value || (l - value).abs() <= 1e-9 * value.abs().max(1.0))
    }
}

impl TryFrom<Vec<f64>> for FiniteDomain {
    type Error = ModelError;
    fn try_from(labels: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(labels)
    }
}

impl From<FiniteDomain> for Vec<f64> {
    fn from(d: FiniteDomain) -> Self {
        d.labels
    }
}

/// Probability vector over a real-labelled finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    support: FiniteDomain,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: FiniteDomain, probs: Vec<f64>) -> Result<Self, ModelError> {
        if probs.len() != support.len() {
            return Err(ModelError::LengthMismatch { expected: support.len(), found: probs.len() });
        }
        if let Some(&p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(ModelError::InvalidProbability(p));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(ModelError::NotNormalized(total));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(support: FiniteDomain, index: usize) -> Self {
        let mut probs = vec![0.0; support.len()];
        probs[index] = 1.0;
        Self { support, probs }
    }

    pub fn support(&self) -> &FiniteDomain {
        &self.support
    }

    pub fn labels(&self) -> &[f64] {
        self.support.labels()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.labels().iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    /// Expectation of an arbitrary function of the label index.
    pub fn expect_by_index(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| p * f(i)).sum()
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        draw(&self.probs, rng.random::<f64>())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.support.label(self.sample_index(rng))
    }
}

/// Inverse-CDF draw from a probability column given a uniform `u` in [0, 1).
fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn domain_rejects_bad_labels() {
        assert!(matches!(FiniteDomain::new(vec![]), Err(ModelError::EmptyDomain)));
        assert!(matches!(FiniteDomain::new(vec![1.0, 1.0]), Err(ModelError::UnorderedDomain(_))));
        assert!(matches!(FiniteDomain::new(vec![2.0, 1.0]), Err(ModelError::UnorderedDomain(_))));
        assert!(FiniteDomain::new(vec![1.0, 1.1, 1.2]).is_ok());
    }

    #[test]
    fn index_lookup_tolerates_parse_noise() {
        let d = FiniteDomain::new(vec![1.0, 1.1, 1.2]).unwrap();
        assert_eq!(d.index_of(1.1), Some(1));
        assert_eq!(d.index_of(1.1 + 1e-12), Some(1));
        assert_eq!(d.index_of(1.15), None);
    }

    #[test]
    fn distribution_checks_mass() {
        let d = FiniteDomain::indices(2);
        assert!(matches!(
            DiscreteDistribution::new(d.clone(), vec![0.5, 0.4]),
            Err(ModelError::NotNormalized(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(d.clone(), vec![1.5, -0.5]),
            Err(ModelError::InvalidProbability(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(d, vec![1.0]),
            Err(ModelError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mean_uses_real_labels() {
        let d = FiniteDomain::new(vec![1.0, 1.1, 1.2]).unwrap();
        let p = DiscreteDistribution::new(d, vec![0.25, 0.35, 0.4]).unwrap();
        assert!((p.mean() - 1.115).abs() < 1e-12);
    }

    #[test]
    fn draw_skips_zero_atoms() {
        assert_eq!(draw(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(draw(&[0.0, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(draw(&[0.3, 0.7], 0.29), 0);
        assert_eq!(draw(&[0.3, 0.7], 0.31), 1);
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = DiscreteDistribution::new(FiniteDomain::indices(3), vec![0.2, 0.3, 0.5]).unwrap();
        let a: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| d.sample_index(&mut r)).collect()
        };
        let b: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| d.sample_index(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
