use crate::model::DiscreteDistribution;

/// Cumulative levels closer than this are the same breakpoint. Without it,
/// rounding residue of order 1e-16 in a CDF becomes a W2 of order 1e-8.
const LEVEL_TOL: f64 = 1e-12;

/// Exact 1-D Wasserstein-2 distance: integrates the squared difference of
/// the two quantile functions over the merged CDF breakpoints.
pub fn w2_distance(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let (xs, fp) = (p.labels(), cumulative(p.probs()));
    let (ys, fq) = (q.labels(), cumulative(q.probs()));
    let (mut i, mut j) = (0, 0);
    let mut level = 0.0;
    let mut total = 0.0;
    while i < xs.len() && j < ys.len() {
        let next = fp[i].min(fq[j]);
        let width = next - level;
        if width > LEVEL_TOL {
            let d = xs[i] - ys[j];
            total += width * d * d;
            level = next;
        }
        if fp[i] - next <= LEVEL_TOL {
            i += 1;
        }
        if fq[j] - next <= LEVEL_TOL {
            j += 1;
        }
    }
    total.max(0.0).sqrt()
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Jensen-Shannon distance with natural logarithms on the union of the two
/// supports. Terms are evaluated through `ln_1p` so that nearly equal inputs
/// do not lose their second-order difference to cancellation.
pub fn jsd_distance(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let mut sum = 0.0;
    for (a, b) in union_masses(p, q) {
        if a + b <= 0.0 {
            continue;
        }
        let d = (a - b) / (a + b);
        if a > 0.0 {
            sum += a * d.ln_1p();
        }
        if b > 0.0 {
            sum += b * (-d).ln_1p();
        }
    }
    (0.5 * sum).max(0.0).sqrt()
}

/// Paired masses of p and q over the merged, sorted label set. Labels equal
/// within 1e-12 (relative) share an atom.
fn union_masses(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Vec<(f64, f64)> {
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    let (xs, ys) = (p.labels(), q.labels());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    while i < xs.len() || j < ys.len() {
        if i < xs.len() && j < ys.len() && same(xs[i], ys[j]) {
            out.push((p.probs()[i], q.probs()[j]));
            i += 1;
            j += 1;
        } else if j >= ys.len() || (i < xs.len() && xs[i] < ys[j]) {
            out.push((p.probs()[i], 0.0));
            i += 1;
        } else {
            out.push((0.0, q.probs()[j]));
            j += 1;
        }
    }
    out
}
