//! Topic initialization: k-means on hashed n-gram counts, then the nearest
//! observed row of each centroid in exact n-gram space.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SMOOTHING;
use crate::error::{Error, Result};
use crate::textprep::{self, CountMatrix, NGramRange, Vocabulary};
use crate::Scalar;

const LLOYD_MAX_ITER: usize = 100;

/// How the initial topics were obtained; persisted with the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitInfo {
    pub hashed_dim: usize,
    pub distinct_rows: usize,
    /// Fewer distinct rows than topics: some topics are jittered copies.
    pub fallback: bool,
}

/// Result of a k-means run.
#[derive(Debug, Clone)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index drawn with probability proportional to `mass`; `None` if all zero.
fn draw(mass: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    let mut pick = None;
    for (i, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            pick = Some(i);
            if target < m {
                break;
            }
        }
        target -= m;
    }
    pick
}

fn kmeans_pp(points: &[Vec<f64>], weights: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let first = draw(weights, rng).unwrap_or(0);
    let mut centroids = vec![points[first].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let mass: Vec<f64> = dist.iter().zip(weights).map(|(d, w)| d * w).collect();
        let next = if let Some(mut pick) = draw(&mass, rng) {
            // Rounding can fall through to a point already chosen.
            if dist[pick] == 0.0 {
                pick = dist
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .unwrap();
            }
            pick
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[next].clone();
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], weights: &[f64], mut centroids: Vec<Vec<f64>>) -> KMeans {
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        for (p, a) in points.iter().zip(assignment.iter_mut()) {
            let best = nearest(p, &centroids).0;
            if best != *a {
                *a = best;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0.0f64; k];
        for ((p, &a), &w) in points.iter().zip(&assignment).zip(weights) {
            sizes[a] += w;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += w * v;
            }
        }
        for c in 0..k {
            if sizes[c] == 0.0 {
                // Reseed an empty cluster at the point farthest from its centroid.
                let far = points
                    .iter()
                    .zip(&assignment)
                    .enumerate()
                    .max_by(|(_, (p, &a)), (_, (q, &b))| {
                        sq_dist(p, &centroids[a]).total_cmp(&sq_dist(q, &centroids[b]))
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centroids[c] = points[far].clone();
                assignment[far] = c;
                changed = true;
            } else {
                centroids[c] = sums[c].iter().map(|s| s / sizes[c]).collect();
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points
        .iter()
        .zip(&assignment)
        .zip(weights)
        .map(|((p, &a), w)| w * sq_dist(p, &centroids[a]))
        .sum();
    KMeans {
        centroids,
        assignment,
        inertia,
    }
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Seeded k-means (k-means++ seeding, Lloyd iterations), best of `restarts`.
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> Result<KMeans> {
    kmeans_weighted(points, &vec![1.0; points.len()], k, restarts, seed)
}

/// [`kmeans`] with a non-negative weight per point.
pub fn kmeans_weighted(points: &[Vec<f64>], weights: &[f64], k: usize, restarts: usize, seed: u64) -> Result<KMeans> {
    if points.is_empty() || k == 0 || k > points.len() {
        return Err(Error::config(format!(
            "k-means needs 1 <= k <= number of points, got k = {k} for {} points",
            points.len()
        )));
    }
    if weights.len() != points.len() || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::config("k-means weights must be finite, non-negative, one per point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeans> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(points, weights, kmeans_pp(points, weights, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn dense_hashed(m: &CountMatrix) -> Vec<Vec<f64>> {
    m.to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(f64::from).collect())
        .collect()
}

/// Smoothed, row-normalized topic row from an exact count row.
fn topic_row<T: Scalar>(counts: &CountMatrix, row: usize, m: usize, jitter: Option<&mut ChaCha8Rng>) -> Vec<T> {
    let smoothing = T::from_f64_lossy(SMOOTHING);
    let mut v = vec![smoothing; m];
    for (j, c) in counts.row(row).iter() {
        v[j] += T::from_count(c);
    }
    if let Some(rng) = jitter {
        for x in v.iter_mut() {
            *x *= T::from_f64_lossy(1.0 + 0.5 * rng.random::<f64>());
        }
    }
    let total: T = v.iter().copied().sum();
    v.into_iter().map(|x| x / total).collect()
}

/// Initial `d × m` topic matrix for `corpus` over `vocab`.
///
/// The distinct normalized corpus entries, weighted by their frequency, are
/// clustered in a hashed count space of `hashed_dim` columns; topic `c` is the exact count row of the
/// entry nearest to centroid `c` (each entry used at most once), smoothed
/// and normalized to sum 1. With fewer distinct entries than topics, every
/// entry is used once and the remaining topics are jittered copies.
pub fn init_topics<T: Scalar, S: AsRef<str> + Sync>(
    corpus: &[S],
    vocab: &Vocabulary,
    range: NGramRange,
    d: usize,
    hashed_dim: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Array2<T>, InitInfo)> {
    if d == 0 {
        return Err(Error::config("number of topics must be >= 1"));
    }
    let mut occurrences: indexmap::IndexMap<String, usize> = indexmap::IndexMap::new();
    for s in corpus {
        let s = textprep::normalize(s.as_ref());
        if !s.is_empty() {
            *occurrences.entry(s).or_insert(0) += 1;
        }
    }
    let (distinct, frequency): (Vec<String>, Vec<usize>) = occurrences.into_iter().unzip();
    let exact = textprep::count_matrix(&distinct, vocab, range)?;
    let usable: Vec<usize> = (0..distinct.len()).filter(|&i| !exact.row(i).is_empty()).collect();
    if usable.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let m = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1a17);
    let mut topics = Array2::zeros((d, m));
    let mut info = InitInfo {
        hashed_dim,
        distinct_rows: usable.len(),
        fallback: false,
    };

    let chosen: Vec<(usize, bool)> = if usable.len() < d {
        info.fallback = true;
        let mut rows: Vec<(usize, bool)> = usable.iter().map(|&i| (i, false)).collect();
        let mut pool = usable.clone();
        pool.shuffle(&mut rng);
        for k in 0..d - usable.len() {
            rows.push((pool[k % pool.len()], true));
        }
        rows
    } else {
        let keys: Vec<&str> = usable.iter().map(|&i| distinct[i].as_str()).collect();
        let hashed = dense_hashed(&textprep::hashed_count_matrix(&keys, hashed_dim, range)?);
        let weights: Vec<f64> = usable.iter().map(|&i| frequency[i] as f64).collect();
        let km = kmeans_weighted(&hashed, &weights, d, restarts, seed)?;
        let mut used = vec![false; hashed.len()];
        km.centroids
            .iter()
            .map(|c| {
                let mut best = (usize::MAX, f64::INFINITY);
                for (p, point) in hashed.iter().enumerate() {
                    let dist = sq_dist(point, c);
                    if !used[p] && dist < best.1 {
                        best = (p, dist);
                    }
                }
                used[best.0] = true;
                (usable[best.0], false)
            })
            .collect()
    };

    for (c, (row, jitter)) in chosen.into_iter().enumerate() {
        let values = topic_row::<T>(&exact, row, m, if jitter { Some(&mut rng) } else { None });
        for (j, v) in values.into_iter().enumerate() {
            topics[[c, j]] = v;
        }
    }
    Ok((topics, info))
}
