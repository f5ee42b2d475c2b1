use rand::seq::index::sample;

use super::Embedding;
use crate::error::{check_dim, Error, Result};
use crate::latent::squared_distance;
use crate::rng::stream_rng;

/// A representative picked from a cluster, before any latent is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeStub {
    /// Index into the input list.
    pub source: usize,
    pub text: String,
    pub embedding: Embedding,
    pub cluster_size: usize,
}

#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub representatives: Vec<RepresentativeStub>,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after each assignment step.
    pub wcss_history: Vec<f64>,
}

/// Lloyd's algorithm on raw embeddings, seeded with `k` distinct random input
/// points. Each cluster is represented by its member closest to the final
/// centroid (ties to the lower input index), returned in cluster order.
///
/// An empty cluster is reseeded with the point farthest from its current
/// centroid, which never increases the within-cluster sum of squares.
pub fn kmeans_representatives(
    embeddings: &[Embedding],
    texts: &[String],
    k: usize,
    iters: usize,
    seed: u64,
) -> Result<KMeansOutcome> {
    let n = embeddings.len();
    check_dim(n, texts.len())?;
    if k == 0 || k > n {
        return Err(Error::Config(format!("cluster count {k} must be in 1..={n}")));
    }
    let dim = embeddings[0].dim();
    for e in embeddings {
        check_dim(dim, e.dim())?;
    }
    let points: Vec<&[f64]> = embeddings.iter().map(|e| e.as_slice()).collect();

    let mut rng = stream_rng(seed, 0);
    let mut init: Vec<usize> = sample(&mut rng, n, k).into_vec();
    init.sort_unstable();
    let mut centroids: Vec<Vec<f64>> = init.iter().map(|&i| points[i].to_vec()).collect();
    let mut assignments = vec![usize::MAX; n];
    let mut wcss_history = Vec::new();

    for _ in 0..iters.max(1) {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let nearest = nearest(&centroids, p);
            if assignments[i] != nearest {
                assignments[i] = nearest;
                changed = true;
            }
        }
        reseed_empty(&points, &mut centroids, &mut assignments);
        wcss_history.push(wcss(&points, &centroids, &assignments));
        if !changed && wcss_history.len() > 1 {
            break;
        }
        centroids = means(&points, &assignments, &centroids);
    }

    let representatives = (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..n).filter(|&i| assignments[i] == c).collect();
            let best = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    squared_distance(points[a], &centroids[c])
                        .total_cmp(&squared_distance(points[b], &centroids[c]))
                        .then(a.cmp(&b))
                })
                .expect("clusters are never empty after reseeding");
            RepresentativeStub {
                source: best,
                text: texts[best].clone(),
                embedding: embeddings[best].clone(),
                cluster_size: members.len(),
            }
        })
        .collect();

    Ok(KMeansOutcome {
        representatives,
        assignments,
        centroids,
        wcss_history,
    })
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn reseed_empty(points: &[&[f64]], centroids: &mut [Vec<f64>], assignments: &mut [usize]) {
    for c in 0..centroids.len() {
        if assignments.contains(&c) {
            continue;
        }
        let mut counts = vec![0usize; centroids.len()];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        // Take the worst-fit point from a cluster that can spare it.
        let donor = (0..points.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .max_by(|&a, &b| {
                squared_distance(points[a], &centroids[assignments[a]])
                    .total_cmp(&squared_distance(points[b], &centroids[assignments[b]]))
                    .then(b.cmp(&a))
            });
        if let Some(i) = donor {
            assignments[i] = c;
            centroids[c] = points[i].to_vec();
        }
    }
}

fn means(points: &[&[f64]], assignments: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; previous.len()];
    let mut counts = vec![0usize; previous.len()];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p.iter()) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(previous)
        .map(|((s, n), old)| {
            if n == 0 {
                old.clone()
            } else {
                s.into_iter().map(|v| v / n as f64).collect()
            }
        })
        .collect()
}

fn wcss(points: &[&[f64]], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum()
}
