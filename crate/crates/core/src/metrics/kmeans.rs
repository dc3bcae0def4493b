//! Seeded k-means over the columns of a coefficient matrix.
//!
//! Squared-Euclidean assignment, mean update, k-means++ initialization, and
//! best-of-restarts selection with a deterministic (objective, restart index)
//! tie-break. Empty clusters are reseeded with the point farthest from its
//! centroid so the cluster count never collapses.

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NmfError, Result};
use crate::seeding::derive_seed;

use super::ClusterAssignment;

/// Restart and iteration budget for [`cluster_coefficients`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iterations: 300,
        }
    }
}

/// Clusters the columns of `h` into `k` groups with the default
/// [`KMeansConfig`]; deterministic per seed.
pub fn cluster_coefficients(h: &Array2<f64>, k: usize, seed: u64) -> Result<ClusterAssignment> {
    cluster_coefficients_with(h, k, seed, &KMeansConfig::default())
}

/// As [`cluster_coefficients`], with an explicit restart/iteration budget.
pub fn cluster_coefficients_with(
    h: &Array2<f64>,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<ClusterAssignment> {
    let n = h.ncols();
    if k < 1 {
        return Err(NmfError::InvalidArgument(
            "cluster count must be at least 1".into(),
        ));
    }
    if k > n {
        return Err(NmfError::Dimension(format!(
            "cluster count {k} exceeds the number of points {n}"
        )));
    }
    if config.restarts < 1 || config.max_iterations < 1 {
        return Err(NmfError::InvalidArgument(
            "k-means needs at least one restart and one iteration".into(),
        ));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[restart as u64]));
        let run = kmeans_single(h, k, config.max_iterations, &mut rng);
        // Strict comparison keeps the earliest restart on ties.
        if best.as_ref().is_none_or(|(w, _)| run.wcss < *w) {
            best = Some((run.wcss, run.assignment));
        }
    }
    let (_, labels) = best.expect("at least one restart ran");
    ClusterAssignment::new(labels, k)
}

pub(crate) struct KMeansRun {
    pub assignment: Vec<usize>,
    pub wcss: f64,
    /// Total within-cluster sum of squares observed at each assignment pass.
    pub wcss_history: Vec<f64>,
}

fn dist_sq(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

pub(crate) fn kmeans_single(
    points: &Array2<f64>,
    k: usize,
    max_iterations: usize,
    rng: &mut ChaCha8Rng,
) -> KMeansRun {
    let (dim, n) = points.dim();
    let mut centers = plus_plus_init(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut point_dist = vec![0.0f64; n];
    let mut wcss_history = Vec::new();

    for _ in 0..max_iterations {
        // Assignment pass; ties go to the lowest cluster index.
        let mut changed = false;
        let mut total = 0.0;
        for i in 0..n {
            let point = points.column(i);
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = dist_sq(point, centers.column(c));
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if assignment[i] != best_c {
                assignment[i] = best_c;
                changed = true;
            }
            point_dist[i] = best_d;
            total += best_d;
        }
        wcss_history.push(total);

        let mut counts = vec![0usize; k];
        for &a in &assignment {
            counts[a] += 1;
        }

        // Reseed empty clusters with the farthest point whose donor cluster
        // keeps at least one member.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[assignment[i]] > 1 && point_dist[i] > far_d {
                    far_d = point_dist[i];
                    far = Some(i);
                }
            }
            let far = far.expect("a donor cluster with two members exists when k <= n");
            counts[assignment[far]] -= 1;
            assignment[far] = c;
            counts[c] = 1;
            point_dist[far] = 0.0;
            changed = true;
        }

        // Mean update.
        centers.fill(0.0);
        for i in 0..n {
            let c = assignment[i];
            for d in 0..dim {
                centers[[d, c]] += points[[d, i]];
            }
        }
        for c in 0..k {
            let count = counts[c] as f64;
            for d in 0..dim {
                centers[[d, c]] /= count;
            }
        }

        if !changed {
            break;
        }
    }

    // Exact objective against the final centers.
    let wcss = (0..n)
        .map(|i| dist_sq(points.column(i), centers.column(assignment[i])))
        .sum();
    KMeansRun {
        assignment,
        wcss,
        wcss_history,
    }
}

/// k-means++ seeding: first center uniform, then proportional to the squared
/// distance to the nearest chosen center.
fn plus_plus_init(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let (dim, n) = points.dim();
    let mut centers = Array2::zeros((dim, k));
    let first = rng.random_range(0..n);
    centers.column_mut(0).assign(&points.column(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| dist_sq(points.column(i), centers.column(0)))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut cumulative = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                cumulative += w;
                if cumulative > target {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // All remaining mass is zero (duplicate points); any index works.
            rng.random_range(0..n)
        };
        centers.column_mut(c).assign(&points.column(pick));
        for i in 0..n {
            d2[i] = d2[i].min(dist_sq(points.column(i), centers.column(c)));
        }
    }
    centers
}
