//! Log-likelihood of the Gamma-Poisson model, its gradients, and the
//! generalized KL divergence minimized by the multiplicative updates.

use ndarray::{Array2, ArrayView2};

use super::params::GammaPrior;
use crate::error::{Error, Result};
use crate::textprep::CountMatrix;
use crate::Scalar;

fn ln_gamma<T: Scalar>(v: T) -> T {
    T::from_f64_lossy(libm::lgamma(v.to_f64_lossy()))
}

fn reconstruct<T: Scalar>(x: &[T], topics: ArrayView2<'_, T>) -> Vec<T> {
    (0..topics.ncols())
        .map(|j| x.iter().enumerate().map(|(i, &xi)| xi * topics[[i, j]]).sum())
        .collect()
}

fn check_shapes<T>(f_len: usize, x_len: usize, topics: ArrayView2<'_, T>) -> Result<()> {
    if topics.nrows() != x_len {
        return Err(Error::DimensionMismatch {
            expected: topics.nrows(),
            actual: x_len,
        });
    }
    if topics.ncols() != f_len {
        return Err(Error::DimensionMismatch {
            expected: topics.ncols(),
            actual: f_len,
        });
    }
    Ok(())
}

/// Log posterior density of one dense count row `f` with activation `x`:
///
/// `sum_j [f_j ln (x Λ)_j - (x Λ)_j - ln f_j!]
///  + sum_i [(α_i - 1) ln x_i - x_i / β_i - α_i ln β_i - ln Γ(α_i)]`.
pub fn log_likelihood<T: Scalar>(
    f: &[T],
    x: &[T],
    topics: ArrayView2<'_, T>,
    prior: &GammaPrior<T>,
) -> Result<T> {
    check_shapes(f.len(), x.len(), topics)?;
    let recon = reconstruct(x, topics);
    let mut ll = T::zero();
    for (j, (&fj, &r)) in f.iter().zip(&recon).enumerate() {
        if fj < T::zero() {
            return Err(Error::Numeric {
                iteration: 0,
                detail: format!("negative count at column {j}"),
            });
        }
        if fj > T::zero() {
            if !(r > T::zero()) {
                return Err(Error::Numeric {
                    iteration: 0,
                    detail: format!("zero rate at observed column {j}"),
                });
            }
            ll += fj * r.ln() - ln_gamma(fj + T::one());
        }
        ll -= r;
    }
    for i in 0..x.len() {
        let (a, b) = (prior.shape[i], prior.scale[i]);
        let log_x = if a == T::one() {
            T::zero()
        } else if x[i] > T::zero() {
            (a - T::one()) * x[i].ln()
        } else {
            return Err(Error::Numeric {
                iteration: 0,
                detail: format!("non-positive activation at topic {i}"),
            });
        };
        ll += log_x - x[i] / b - a * b.ln() - ln_gamma(a);
    }
    Ok(ll)
}

/// `∂ log L / ∂ Λ_ij = x_i f_j / (x Λ)_j - x_i`.
pub fn grad_topics<T: Scalar>(f: &[T], x: &[T], topics: ArrayView2<'_, T>) -> Result<Array2<T>> {
    check_shapes(f.len(), x.len(), topics)?;
    let recon = reconstruct(x, topics);
    Ok(Array2::from_shape_fn(topics.dim(), |(i, j)| {
        f[j] / recon[j] * x[i] - x[i]
    }))
}

/// `∂ log L / ∂ x_i = sum_j (f_j Λ_ij / (x Λ)_j - Λ_ij) + (α_i - 1) / x_i - 1 / β_i`.
pub fn grad_activation<T: Scalar>(
    f: &[T],
    x: &[T],
    topics: ArrayView2<'_, T>,
    prior: &GammaPrior<T>,
) -> Result<Vec<T>> {
    check_shapes(f.len(), x.len(), topics)?;
    let recon = reconstruct(x, topics);
    Ok((0..x.len())
        .map(|i| {
            let mut g = T::zero();
            for j in 0..f.len() {
                g += f[j] * topics[[i, j]] / recon[j] - topics[[i, j]];
            }
            g + (prior.shape[i] - T::one()) / x[i] - T::one() / prior.scale[i]
        })
        .collect())
}

/// Generalized KL divergence `sum_ij [F ln(F / XΛ) - F + XΛ]` with
/// `0 ln 0 = 0`, computed on the non-zeros of `F`.
pub fn gkl_divergence<T: Scalar>(
    counts: &CountMatrix,
    activations: ArrayView2<'_, T>,
    topics: ArrayView2<'_, T>,
) -> Result<T> {
    if activations.nrows() != counts.rows() {
        return Err(Error::DimensionMismatch {
            expected: counts.rows(),
            actual: activations.nrows(),
        });
    }
    if activations.ncols() != topics.nrows() {
        return Err(Error::DimensionMismatch {
            expected: topics.nrows(),
            actual: activations.ncols(),
        });
    }
    if topics.ncols() != counts.cols() {
        return Err(Error::DimensionMismatch {
            expected: counts.cols(),
            actual: topics.ncols(),
        });
    }
    let row_sums: Vec<T> = topics.rows().into_iter().map(|r| r.sum()).collect();
    let mut total = T::zero();
    for (l, row) in counts.iter_rows().enumerate() {
        let x = activations.row(l);
        for (j, c) in row.iter() {
            let mut r = T::zero();
            for (i, &xi) in x.iter().enumerate() {
                r += xi * topics[[i, j]];
            }
            if !(r > T::zero()) {
                return Err(Error::Numeric {
                    iteration: 0,
                    detail: format!("zero reconstruction at ({l}, {j}) with positive count"),
                });
            }
            let fc = T::from_count(c);
            total += fc * (fc / r).ln() - fc;
        }
        for (i, &xi) in x.iter().enumerate() {
            total += xi * row_sums[i];
        }
    }
    Ok(total)
}

/// Generalized KL divergence plus the negative log Gamma prior on the
/// activations (up to constants): the quantity decreased by alternating
/// full-batch updates.
pub fn penalized_objective<T: Scalar>(
    counts: &CountMatrix,
    activations: ArrayView2<'_, T>,
    topics: ArrayView2<'_, T>,
    prior: &GammaPrior<T>,
) -> Result<T> {
    let mut obj = gkl_divergence(counts, activations, topics)?;
    for row in activations.rows() {
        for (i, &x) in row.iter().enumerate() {
            obj += x / prior.scale[i] - (prior.shape[i] - T::one()) * x.ln();
        }
    }
    Ok(obj)
}
