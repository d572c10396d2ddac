//! Lloyd's k-means on 2-D points with seeded k-means++ initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTERS: usize = 5;
pub const MAX_ITERATIONS: usize = 100;

/// Partition of a point list into `k` disjoint clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    /// Cluster id of each input point, in input order.
    pub assignments: Vec<usize>,
    /// Mean position of each cluster. An empty cluster keeps the last
    /// position it had.
    pub centroids: Vec<[f64; 2]>,
    pub sizes: Vec<usize>,
    /// Effective cluster count, `min(k, points)`.
    pub k: usize,
    /// Sum of squared distances to the assigned centroid.
    pub objective: f64,
    /// Objective after every Lloyd iteration.
    pub objective_history: Vec<f64>,
}

impl ClusterSet {
    /// Sum of squared distances of each cluster's members to its centroid.
    pub fn cluster_costs(&self, points: &[[f64; 2]]) -> Vec<f64> {
        let mut costs = vec![0.0; self.k];
        for (p, &a) in points.iter().zip(&self.assignments) {
            costs[a] += dist2(p, &self.centroids[a]);
        }
        costs
    }

    /// Indices of the points assigned to `cluster`, in input order.
    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignments.iter().enumerate().filter(move |(_, &a)| a == cluster).map(|(i, _)| i)
    }
}

#[inline]
fn dist2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (dr, dc) = (a[0] - b[0], a[1] - b[1]);
    dr * dr + dc * dc
}

fn nearest(p: &[f64; 2], centroids: &[[f64; 2]]) -> usize {
    let mut best = 0;
    let mut best_d = dist2(p, &centroids[0]);
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = dist2(p, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn plus_plus_init(points: &[[f64; 2]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                acc += d;
                chosen = Some(i);
                if acc > target {
                    break;
                }
            }
            chosen.expect("positive total implies a positive weight")
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick];
        centroids.push(c);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
    }
    centroids
}

/// Clusters 2-D points with Lloyd iterations.
///
/// Initialization is k-means++ driven by a ChaCha8 stream seeded with `seed`,
/// so the result depends only on `(points, k, seed)`. Iteration stops when
/// no assignment changes or after [`MAX_ITERATIONS`]. A cluster left empty is
/// re-seeded with the point farthest from its current centroid; if every
/// point already sits on its centroid the cluster stays empty.
pub fn kmeans(points: &[[f64; 2]], k: usize, seed: u64) -> Result<ClusterSet> {
    if points.is_empty() {
        return Err(Error::invalid("k-means needs at least one point"));
    }
    if k == 0 {
        return Err(Error::invalid("k-means needs k >= 1"));
    }
    let n = points.len();
    let k = k.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);

    let mut assignments = vec![usize::MAX; n];
    let mut sizes = vec![0usize; k];
    let mut history = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (a, p) in assignments.iter_mut().zip(points) {
            let best = nearest(p, &centroids);
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        sizes.iter_mut().for_each(|s| *s = 0);
        assignments.iter().for_each(|&a| sizes[a] += 1);

        for empty in 0..k {
            if sizes[empty] != 0 {
                continue;
            }
            // Only donors from clusters with more than one member, so that
            // re-seeding never empties another cluster.
            let mut far: Option<(usize, f64)> = None;
            for (i, p) in points.iter().enumerate() {
                let a = assignments[i];
                if sizes[a] < 2 {
                    continue;
                }
                let d = dist2(p, &centroids[a]);
                if d > 0.0 && far.is_none_or(|(_, best)| d > best) {
                    far = Some((i, d));
                }
            }
            let Some((i, _)) = far else { break };
            sizes[assignments[i]] -= 1;
            assignments[i] = empty;
            sizes[empty] = 1;
            centroids[empty] = points[i];
            changed = true;
        }

        let mut sums = vec![[0.0f64; 2]; k];
        for (p, &a) in points.iter().zip(&assignments) {
            sums[a][0] += p[0];
            sums[a][1] += p[1];
        }
        for j in 0..k {
            if sizes[j] > 0 {
                centroids[j] = [sums[j][0] / sizes[j] as f64, sums[j][1] / sizes[j] as f64];
            }
        }
        history.push(points.iter().zip(&assignments).map(|(p, &a)| dist2(p, &centroids[a])).sum());

        if !changed {
            break;
        }
    }

    Ok(ClusterSet {
        assignments,
        centroids,
        sizes,
        k,
        objective: *history.last().expect("at least one iteration"),
        objective_history: history,
    })
}
