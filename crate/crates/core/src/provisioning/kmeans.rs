use crate::scalar::Scalar;

use super::ProvisionError;

pub const MAX_LLOYD_ITERATIONS: usize = 100;

/// Result of a one-dimensional k-means run. Cluster indices are ordered by
/// ascending centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans1d<T> {
    pub centroids: Vec<T>,
    pub assignment: Vec<usize>,
    pub iterations: usize,
}

/// Picks the `(2i+1)/(2k)` quantiles of a sorted slice.
fn quantile_seeds<T: Scalar>(sorted: &[T], k: usize) -> Vec<T> {
    let n = sorted.len();
    (0..k)
        .map(|i| {
            let idx = ((2 * i + 1) * n) / (2 * k);
            sorted[idx.min(n - 1)]
        })
        .collect()
}

fn nearest<T: Scalar>(value: T, centroids: &[T]) -> usize {
    let mut best = 0;
    for (i, &c) in centroids.iter().enumerate().skip(1) {
        if (value - c).abs() < (value - centroids[best]).abs() {
            best = i;
        }
    }
    best
}

/// Lloyd's algorithm on scalars with deterministic quantile seeding.
///
/// Centroids start at the 1/(2k), 3/(2k), ... quantiles of the sorted
/// input. If duplicates make two seeds coincide, the same quantiles of the
/// distinct values are used instead. Iterates until the assignment stops
/// changing or [`MAX_LLOYD_ITERATIONS`] is reached; an emptied cluster keeps
/// its previous centroid.
pub fn kmeans_1d<T: Scalar>(values: &[T], k: usize) -> Result<KMeans1d<T>, ProvisionError> {
    if k == 0 || values.iter().any(|v| !v.is_finite()) {
        return Err(ProvisionError::Degenerate(format!("k-means needs k >= 1 and finite values (k = {k})")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < k {
        return Err(ProvisionError::Degenerate(format!(
            "{} distinct values cannot form {k} clusters",
            distinct.len()
        )));
    }

    let mut centroids = quantile_seeds(&sorted, k);
    if centroids.windows(2).any(|w| w[0] >= w[1]) {
        centroids = quantile_seeds(&distinct, k);
    }

    let mut assignment: Vec<usize> = values.iter().map(|&v| nearest(v, &centroids)).collect();
    let mut iterations = 0;
    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        let mut sums = vec![T::zero(); k];
        let mut counts = vec![0u64; k];
        for (&v, &a) in values.iter().zip(&assignment) {
            sums[a] = sums[a] + v;
            counts[a] += 1;
        }
        for i in 0..k {
            if counts[i] > 0 {
                centroids[i] = sums[i] / T::from_count(counts[i]);
            }
        }
        let next: Vec<usize> = values.iter().map(|&v| nearest(v, &centroids)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centroids[a].partial_cmp(&centroids[b]).expect("finite").then(a.cmp(&b)));
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    Ok(KMeans1d {
        centroids: order.iter().map(|&c| centroids[c]).collect(),
        assignment: assignment.iter().map(|&a| rank[a]).collect(),
        iterations,
    })
}
