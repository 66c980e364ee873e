//! Clustering of latent rows and agreement metrics against ground truth:
//! Lloyd's k-means with k-means++ seeding and restarts, normalized mutual
//! information, and optimal-matching clustering accuracy.

use std::collections::HashMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::daimc::derive_seed;
use crate::error::{Error, Result};
use crate::numerics::ensure_finite;

/// Hard assignments from the best restart, with its centroids and inertia.
#[derive(Debug, Clone)]
pub struct ClusterResult {
    pub assignments: Vec<usize>,
    /// One centroid per row, `k x dim`.
    pub centroids: Array2<f64>,
    /// Sum of squared distances to assigned centroids.
    pub inertia: f64,
    /// Inertia after each Lloyd iteration of the winning restart.
    pub inertia_trace: Vec<f64>,
    /// Clusters that ended with no members (only possible when duplicates
    /// force it; they are reported, not hidden).
    pub empty_clusters: Vec<usize>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
}

fn nearest(point: &[f64], centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let d = sq_dist(point, row.as_slice().expect("contiguous row"));
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    (best, best_d)
}

fn kmeans_pp_init(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = points.nrows();
    let dim = points.ncols();
    let mut centroids = Array2::<f64>::zeros((k, dim));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|j| sq_dist(points.row(j).as_slice().unwrap(), centroids.row(0).as_slice().unwrap()))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (j, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = j;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        for j in 0..n {
            let d = sq_dist(
                points.row(j).as_slice().unwrap(),
                centroids.row(c).as_slice().unwrap(),
            );
            if d < d2[j] {
                d2[j] = d;
            }
        }
    }
    centroids
}

const LLOYD_MAX_ITER: usize = 300;
const LLOYD_TOL: f64 = 1e-9;

fn lloyd(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> ClusterResult {
    let n = points.nrows();
    let dim = points.ncols();
    let mut centroids = kmeans_pp_init(points, k, rng);
    let mut assignments = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    let mut trace = Vec::new();

    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        let mut inertia = 0.0;
        for j in 0..n {
            let (c, d) = nearest(points.row(j).as_slice().unwrap(), &centroids);
            if assignments[j] != c {
                assignments[j] = c;
                changed = true;
            }
            inertia += d;
        }

        // Re-seed empty clusters from the point farthest from its centroid
        // (among clusters that can spare one).
        let mut counts = vec![0usize; k];
        for &a in &assignments {
            counts[a] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far_j = None;
            let mut far_d = -1.0;
            for j in 0..n {
                if counts[assignments[j]] < 2 {
                    continue;
                }
                let d = sq_dist(
                    points.row(j).as_slice().unwrap(),
                    centroids.row(assignments[j]).as_slice().unwrap(),
                );
                if d > far_d {
                    far_d = d;
                    far_j = Some(j);
                }
            }
            if let Some(j) = far_j {
                inertia -= far_d;
                counts[assignments[j]] -= 1;
                assignments[j] = c;
                counts[c] = 1;
                centroids.row_mut(c).assign(&points.row(j));
                changed = true;
            }
        }

        trace.push(inertia);
        let done = !changed || (prev_inertia - inertia).abs() < LLOYD_TOL;
        prev_inertia = inertia;

        // Update step: means of the members.
        let mut sums = Array2::<f64>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for j in 0..n {
            let c = assignments[j];
            counts[c] += 1;
            for (s, &p) in sums.row_mut(c).iter_mut().zip(points.row(j)) {
                *s += p;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                centroids
                    .row_mut(c)
                    .assign(&sums.row(c).mapv(|s| s * inv));
            }
        }
        if done {
            break;
        }
    }

    // Final assignment against the final centroids.
    let mut inertia = 0.0;
    for j in 0..n {
        let (c, d) = nearest(points.row(j).as_slice().unwrap(), &centroids);
        assignments[j] = c;
        inertia += d;
    }
    trace.push(inertia);
    let mut counts = vec![0usize; k];
    for &a in &assignments {
        counts[a] += 1;
    }
    let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
    ClusterResult {
        assignments,
        centroids,
        inertia,
        inertia_trace: trace,
        empty_clusters: empty,
    }
}

/// K-means on the rows of `points`: k-means++ seeding, Lloyd iterations,
/// best of `restarts` runs by inertia (ties keep the earliest restart).
/// Deterministic for a fixed seed.
pub fn kmeans(points: &Array2<f64>, k: usize, restarts: usize, seed: u64) -> Result<ClusterResult> {
    ensure_finite("points", points)?;
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "k = {k} must lie in [1, {n}] for {n} points"
        )));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts must be at least 1"));
    }
    let mut best: Option<ClusterResult> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let run = lloyd(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Relabels by first occurrence so equal partitions get identical ids
/// regardless of the label alphabet. Returns the dense labels and the
/// number of distinct classes.
fn canonicalize(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        let next = map.len();
        out.push(*map.entry(l).or_insert(next));
    }
    (out, map.len())
}

fn contingency(truth: &[usize], t: usize, pred: &[usize], p: usize) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((t, p));
    for (&a, &b) in truth.iter().zip(pred) {
        c[(a, b)] += 1.0;
    }
    c
}

/// Order-independent sum: sorting first makes the result invariant to how
/// the terms were enumerated, which keeps the metrics exactly symmetric
/// and relabeling-invariant.
fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Normalized mutual information between two partitions: mutual
/// information over the geometric mean of the entropies, natural log.
/// Both entropies zero gives 1, exactly one zero gives 0.
pub fn nmi(truth: &[usize], pred: &[usize]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::invalid(format!(
            "label lengths differ: {} vs {}",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("labels must be nonempty"));
    }
    let n = truth.len() as f64;
    let (t_lab, t) = canonicalize(truth);
    let (p_lab, p) = canonicalize(pred);
    let c = contingency(&t_lab, t, &p_lab, p);
    let row_sums: Vec<f64> = (0..t).map(|i| c.row(i).sum()).collect();
    let col_sums: Vec<f64> = (0..p).map(|j| c.column(j).sum()).collect();

    let h_t = stable_sum(
        row_sums
            .iter()
            .map(|&a| (a / n) * (n / a).ln())
            .collect(),
    );
    let h_p = stable_sum(
        col_sums
            .iter()
            .map(|&b| (b / n) * (n / b).ln())
            .collect(),
    );
    if h_t == 0.0 && h_p == 0.0 {
        return Ok(1.0);
    }
    if h_t == 0.0 || h_p == 0.0 {
        return Ok(0.0);
    }

    let mut terms = Vec::with_capacity(t * p);
    for i in 0..t {
        for j in 0..p {
            let nij = c[(i, j)];
            if nij > 0.0 {
                terms.push((nij / n) * ((nij * n) / (row_sums[i] * col_sums[j])).ln());
            }
        }
    }
    let mi = stable_sum(terms);
    // Equal entropies: the geometric mean is that entropy, exactly.
    let denom = if h_t == h_p { h_t } else { (h_t * h_p).sqrt() };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Largest contingency side the assignment solver will accept.
pub const MATCHING_CAP: usize = 64;

/// Minimum-cost perfect matching on a square cost matrix (Jonker-Volgenant
/// style shortest augmenting paths). Returns, for each column, the matched
/// row. Exact for integer-valued costs.
fn hungarian_min(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    let none = usize::MAX;
    let mut u = vec![0.0f64; n];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![none; n + 1]; // per column; index n is the virtual column
    let mut way = vec![0usize; n + 1];

    for i in 0..n {
        matched_row[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0, j)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    if matched_row[j] != none {
                        u[matched_row[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == none {
                break;
            }
        }
        // Augment along the recorded path.
        while j0 != n {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }
    matched_row.truncate(n);
    matched_row
}

/// Clustering accuracy: the largest fraction of instances on which the
/// partitions agree, over all injective mappings from predicted clusters
/// to true classes (optimal assignment on the negated contingency table,
/// padded square).
pub fn accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::invalid(format!(
            "label lengths differ: {} vs {}",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("labels must be nonempty"));
    }
    let (t_lab, t) = canonicalize(truth);
    let (p_lab, p) = canonicalize(pred);
    if t > MATCHING_CAP || p > MATCHING_CAP {
        return Err(Error::invalid(format!(
            "class counts {t} x {p} exceed the matching cap {MATCHING_CAP}"
        )));
    }
    let c = contingency(&t_lab, t, &p_lab, p);
    let n = t.max(p);
    let mut cost = Array2::<f64>::zeros((n, n));
    for i in 0..t {
        for j in 0..p {
            cost[(i, j)] = -c[(i, j)];
        }
    }
    let matched_row = hungarian_min(&cost);
    let mut agreements = 0.0;
    for (j, &i) in matched_row.iter().enumerate() {
        if i < t && j < p {
            agreements += c[(i, j)];
        }
    }
    Ok(agreements / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn kmeans_separated_pairs() {
        let pts = array![
            [0.0, 0.0],
            [0.1, 0.0],
            [10.0, 10.0],
            [10.1, 10.0],
        ];
        let res = kmeans(&pts, 2, 5, 3).unwrap();
        assert_eq!(res.assignments[0], res.assignments[1]);
        assert_eq!(res.assignments[2], res.assignments[3]);
        assert_ne!(res.assignments[0], res.assignments[2]);
    }

    #[test]
    fn kmeans_k_equals_n() {
        let pts = array![[0.0], [1.0], [2.0], [5.0]];
        let res = kmeans(&pts, 4, 3, 1).unwrap();
        assert!(res.inertia < 1e-12);
        let mut sorted = res.assignments.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn kmeans_rejects_k_above_n() {
        let pts = array![[0.0], [1.0]];
        assert!(kmeans(&pts, 3, 1, 0).is_err());
    }

    #[test]
    fn kmeans_deterministic() {
        let pts = array![
            [0.0, 1.0],
            [0.4, 0.8],
            [3.0, 2.0],
            [2.8, 2.2],
            [9.0, 0.1],
        ];
        let a = kmeans(&pts, 2, 4, 11).unwrap();
        let b = kmeans(&pts, 2, 4, 11).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn nmi_identical_partitions_is_one() {
        assert_eq!(nmi(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_relabeled_partition_is_one() {
        assert_eq!(nmi(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_independent_uniform_is_zero() {
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_single_class_rules() {
        // One side constant, other not: 0. Both constant: 1.
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 1, 2], &[5, 5, 5]).unwrap(), 0.0);
        assert_eq!(nmi(&[7, 7, 7], &[1, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_length_mismatch() {
        assert!(nmi(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn accuracy_pure_relabeling_is_one() {
        assert_eq!(accuracy(&[0, 0, 1], &[1, 1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_two_thirds_case() {
        let ac = accuracy(&[0, 0, 1], &[0, 1, 1]).unwrap();
        assert!((ac - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn accuracy_rectangular_more_clusters_than_classes() {
        // Three predicted clusters onto two classes: best two win.
        let ac = accuracy(&[0, 0, 1, 1], &[0, 1, 2, 2]).unwrap();
        assert!((ac - 0.75).abs() < 1e-15);
    }

    #[test]
    fn accuracy_cap_enforced() {
        let truth: Vec<usize> = (0..65).collect();
        let pred: Vec<usize> = (0..65).collect();
        assert!(accuracy(&truth, &pred).is_err());
    }
}
