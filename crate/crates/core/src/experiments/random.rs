//! Random small CAMABs for property tests: a T → M → Y base, a T′ → Y′
//! abstraction with random surjective value maps, and an abstract reward
//! table that interpolates between the exact pushforward and noise.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::abstraction::{Abstraction, AbstractionSpec, Camab};
use crate::model::{FiniteDomain, Intervention, Mechanism, Scm, Variable};

fn simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
    // Absorb rounding so the column sums to 1 to the last bit.
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    p
}

/// CPT with `rows` child values and `cols` parent columns.
fn cpt<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let columns: Vec<Vec<f64>> = (0..cols).map(|_| simplex(rng, rows)).collect();
    (0..rows).map(|i| columns.iter().map(|c| c[i]).collect()).collect()
}

/// Surjective map from `n` base values onto `k` abstract values, as the
/// abstract index of each base value.
fn surjection<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut image: Vec<usize> = (0..k).chain((k..n).map(|_| rng.random_range(0..k))).collect();
    image.shuffle(rng);
    image
}

fn matrix(image: &[usize], k: usize) -> Vec<Vec<u8>> {
    (0..k).map(|r| image.iter().map(|&v| u8::from(v == r)).collect()).collect()
}

fn sorted_labels<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=20).map(|k| f64::from(k) / 20.0).collect();
    grid.shuffle(rng);
    let mut l = grid[..n].to_vec();
    l.sort_by(f64::total_cmp);
    l
}

pub fn random_camab<R: Rng + ?Sized>(rng: &mut R) -> Camab {
    let nt = rng.random_range(2..=4);
    let nm = rng.random_range(2..=3);
    let ny = rng.random_range(2..=4);
    let y_labels = sorted_labels(rng, ny);
    let base = Scm::new(
        vec![
            Variable::new("T", FiniteDomain::indices(nt)),
            Variable::new("M", FiniteDomain::indices(nm)),
            Variable::new("Y", FiniteDomain::new(y_labels.clone()).expect("distinct sorted labels")),
        ],
        vec![Mechanism::root("T", &simplex(rng, nt)), Mechanism::new("M", ["T"], cpt(rng, nm, nt)), Mechanism::new("Y", ["M"], cpt(rng, ny, nm))],
        "Y",
    )
    .expect("valid random base");

    let kt = rng.random_range(2..=nt);
    let ky = rng.random_range(2..=ny);
    let t_img = surjection(rng, nt, kt);
    let y_img = if ky == ny && rng.random_bool(0.5) { (0..ny).collect() } else { surjection(rng, ny, ky) };

    // Abstract labels: preimage means (small discrepancy) or fresh labels.
    let abs_labels = if rng.random_bool(0.5) {
        let mut l: Vec<f64> = (0..ky)
            .map(|k| {
                let pre: Vec<f64> = (0..ny).filter(|&j| y_img[j] == k).map(|j| y_labels[j]).collect();
                pre.iter().sum::<f64>() / pre.len() as f64
            })
            .collect();
        l.sort_by(f64::total_cmp);
        l.dedup();
        if l.len() == ky { l } else { sorted_labels(rng, ky) }
    } else {
        sorted_labels(rng, ky)
    };

    // Exact column for T′ = k: the average pushforward of P(Y | do(T=t))
    // over t in the preimage of k, mixed with noise of a random weight.
    let lambda = [0.0, 0.0, 0.01, 0.1, 1.0][rng.random_range(0..5)];
    let mut y_cpt = vec![vec![0.0; kt]; ky];
    #[allow(clippy::needless_range_loop)]
    for k in 0..kt {
        let pre: Vec<usize> = (0..nt).filter(|&t| t_img[t] == k).collect();
        let mut col = vec![0.0; ky];
        for &t in &pre {
            let d = base.reward_distribution(&Intervention::single("T", t)).expect("valid action");
            for (j, p) in d.probs().iter().enumerate() {
                col[y_img[j]] += p / pre.len() as f64;
            }
        }
        let noise = simplex(rng, ky);
        let mut mixed: Vec<f64> = col.iter().zip(&noise).map(|(c, n)| (1.0 - lambda) * c + lambda * n).collect();
        let rest: f64 = mixed[1..].iter().sum();
        mixed[0] = (1.0 - rest).max(0.0);
        for j in 0..ky {
            y_cpt[j][k] = mixed[j];
        }
    }
    let mut t_marginal = vec![0.0; kt];
    let f_t = base.mechanism("T").expect("T exists");
    for t in 0..nt {
        t_marginal[t_img[t]] += f_t.cpt[t][0];
    }
    let rest: f64 = t_marginal[1..].iter().sum();
    t_marginal[0] = 1.0 - rest;

    let abs = Scm::new(
        vec![
            Variable::new("T'", FiniteDomain::indices(kt)),
            Variable::new("Y'", FiniteDomain::new(abs_labels).expect("distinct sorted labels")),
        ],
        vec![Mechanism::root("T'", &t_marginal), Mechanism::new("Y'", ["T'"], y_cpt)],
        "Y'",
    )
    .expect("valid random abstract model");

    let spec = AbstractionSpec {
        relevant: vec!["T".into(), "Y".into()],
        var_map: [("T".to_string(), "T'".to_string()), ("Y".to_string(), "Y'".to_string())].into(),
        value_maps: [("T'".to_string(), matrix(&t_img, kt)), ("Y'".to_string(), matrix(&y_img, ky))].into(),
    };
    let alpha = Abstraction::new(spec, &base, &abs).expect("shapes match");
    let base_actions = (0..nt).map(|t| Intervention::single("T", t)).collect();
    let abs_actions = (0..kt).map(|k| Intervention::single("T'", k)).collect();
    Camab::new(base, base_actions, abs, abs_actions, alpha).expect("valid random CAMAB")
}
