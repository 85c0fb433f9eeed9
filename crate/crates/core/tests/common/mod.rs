//! Oracles shared by the integration targets.

use camab::model::{DiscreteDistribution, FiniteDomain, Intervention, Scm};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// P(reward | do(iv)) by listing every joint assignment with an odometer
/// and multiplying table entries, clamping intervened variables.
pub fn enumerate_reward(scm: &Scm, iv: &Intervention) -> Vec<f64> {
    let vars = scm.variables();
    let sizes: Vec<usize> = vars.iter().map(|v| v.domain.len()).collect();
    let pos = |id: &str| vars.iter().position(|v| v.id == id).unwrap();
    let reward = pos(scm.reward_var());
    let mut out = vec![0.0; sizes[reward]];
    let mut x = vec![0usize; vars.len()];
    loop {
        let mut p = 1.0;
        for (i, v) in vars.iter().enumerate() {
            if let Some(forced) = iv.get(&v.id) {
                if x[i] != forced {
                    p = 0.0;
                }
                continue;
            }
            let mech = scm.mechanism(&v.id).unwrap();
            let mut col = 0;
            for parent in &mech.parents {
                let j = pos(parent);
                col = col * sizes[j] + x[j];
            }
            p *= mech.cpt[x[i]][col];
        }
        out[x[reward]] += p;
        // Odometer increment, last variable fastest.
        let mut k = vars.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            x[k] += 1;
            if x[k] < sizes[k] {
                break;
            }
            x[k] = 0;
        }
    }
}

/// min Σ π_ij (x_i − y_j)² subject to the marginals; W2 is its square root.
pub fn lp_w2(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let (xs, ys) = (p.labels(), q.labels());
    let mut plan = vec![vec![]; xs.len()];
    for (i, x) in xs.iter().enumerate() {
        for y in ys {
            plan[i].push(lp.add_var((x - y) * (x - y), (0.0, f64::INFINITY)));
        }
    }
    for (i, row) in plan.iter().enumerate() {
        let terms: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(&terms, ComparisonOp::Eq, p.probs()[i]);
    }
    for j in 0..ys.len() {
        let terms: Vec<_> = plan.iter().map(|row| (row[j], 1.0)).collect();
        lp.add_constraint(&terms, ComparisonOp::Eq, q.probs()[j]);
    }
    lp.solve().unwrap().objective().max(0.0).sqrt()
}

pub fn random_dist(rng: &mut ChaCha8Rng) -> DiscreteDistribution {
    let n = rng.random_range(1..=5);
    let mut labels: Vec<f64> = Vec::new();
    while labels.len() < n {
        let l = f64::from(rng.random_range(-20..=20)) / 4.0;
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    labels.sort_by(f64::total_cmp);
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
    let total: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|v| v / total).collect();
    let rest: f64 = probs[1..].iter().sum();
    probs[0] = 1.0 - rest;
    DiscreteDistribution::new(FiniteDomain::new(labels).unwrap(), probs).unwrap()
}
