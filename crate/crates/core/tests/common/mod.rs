//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringcat_core::textprep::CountMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random positive factorization problem with dense and sparse counts.
pub struct Instance {
    pub counts: CountMatrix,
    pub dense: Array2<f64>,
    pub x: Array2<f64>,
    pub topics: Array2<f64>,
}

/// `n × m` counts in `0..=max_count` at the given density, forced to have
/// a non-zero in every row and every column.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, d: usize, density: f64, max_count: u32) -> Instance {
    let mut dense = Array2::<f64>::zeros((n, m));
    for v in dense.iter_mut() {
        if rng.random_bool(density) {
            *v = f64::from(rng.random_range(1..=max_count));
        }
    }
    for j in 0..m {
        if dense.column(j).iter().all(|&v| v == 0.0) {
            dense[[rng.random_range(0..n), j]] = f64::from(rng.random_range(1..=max_count));
        }
    }
    for l in 0..n {
        if dense.row(l).iter().all(|&v| v == 0.0) {
            dense[[l, rng.random_range(0..m)]] = f64::from(rng.random_range(1..=max_count));
        }
    }
    let rows = dense
        .rows()
        .into_iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(j, &v)| (j, v as u32))
                .collect()
        })
        .collect();
    let counts = CountMatrix::from_rows(m, rows).unwrap();
    let x = Array2::from_shape_fn((n, d), |_| rng.random_range(0.5..2.0));
    let topics = Array2::from_shape_fn((d, m), |_| rng.random_range(0.5..1.5));
    Instance { counts, dense, x, topics }
}

/// One batch multiplicative topic update, written out term by term:
/// `Λ_ij ← Λ_ij Σ_l X_li F_lj / (XΛ)_lj / Σ_l X_li`.
pub fn batch_topic_update(f: &Array2<f64>, x: &Array2<f64>, topics: &Array2<f64>) -> Array2<f64> {
    let recon = x.dot(topics);
    let (d, m) = topics.dim();
    let n = f.nrows();
    Array2::from_shape_fn((d, m), |(i, j)| {
        let mut num = 0.0;
        let mut den = 0.0;
        for l in 0..n {
            num += x[[l, i]] * f[[l, j]] / recon[[l, j]];
            den += x[[l, i]];
        }
        topics[[i, j]] * num / den
    })
}

pub fn max_relative_error(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Log posterior of one row up to terms constant in `x`.
pub fn log_posterior(f: &[f64], x: &[f64], topics: &Array2<f64>, alpha: f64, beta: f64) -> f64 {
    let (d, m) = topics.dim();
    let mut total = 0.0;
    for j in 0..m {
        let r: f64 = (0..d).map(|i| x[i] * topics[[i, j]]).sum();
        if f[j] > 0.0 {
            total += f[j] * r.ln();
        }
        total -= r;
    }
    for &xi in x {
        total += (alpha - 1.0) * xi.ln() - xi / beta;
    }
    total
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let factor = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= factor * a[c][k];
            }
            b[r] -= factor * b[c];
        }
    }
    let mut out = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * out[k]).sum();
        out[r] = (b[r] - s) / a[r][r];
    }
    out
}

/// Damped Newton ascent on [`log_posterior`], which is strictly concave in
/// `x` for `alpha > 1`.
pub fn maximize_log_posterior(f: &[f64], topics: &Array2<f64>, alpha: f64, beta: f64) -> Vec<f64> {
    let (d, m) = topics.dim();
    let mut x = vec![alpha * beta; d];
    for _ in 0..500 {
        let r: Vec<f64> = (0..m).map(|j| (0..d).map(|i| x[i] * topics[[i, j]]).sum()).collect();
        let grad: Vec<f64> = (0..d)
            .map(|i| {
                (0..m).map(|j| f[j] * topics[[i, j]] / r[j] - topics[[i, j]]).sum::<f64>() + (alpha - 1.0) / x[i]
                    - 1.0 / beta
            })
            .collect();
        let neg_hess: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|k| {
                        let mut h: f64 = (0..m).map(|j| f[j] * topics[[i, j]] * topics[[k, j]] / (r[j] * r[j])).sum();
                        if i == k {
                            h += (alpha - 1.0) / (x[i] * x[i]);
                        }
                        h
                    })
                    .collect()
            })
            .collect();
        let step = solve(neg_hess, grad.clone());
        let base = log_posterior(f, &x, topics, alpha, beta);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            if cand.iter().all(|&v| v > 0.0) && log_posterior(f, &cand, topics, alpha, beta) >= base {
                x = cand;
                break;
            }
            t *= 0.5;
            if t < 1e-20 {
                return x;
            }
        }
        if grad.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-12 {
            break;
        }
    }
    x
}
