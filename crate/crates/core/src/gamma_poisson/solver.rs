//! Multiplicative updates: the per-row activation fixed point and the
//! discounted topic accumulators of the online solver.

use ndarray::Array2;

use super::params::GammaPrior;
use super::{GUARD, SMOOTHING};
use crate::error::{Error, Result};
use crate::textprep::CountRow;
use crate::Scalar;

/// Outcome of one activation inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationFit<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// The iteration cap was reached before the tolerance was met.
    pub capped: bool,
}

/// Activation solver bound to one topic snapshot.
///
/// Precomputes the per-topic denominators `sum_j lambda_ij + 1 / beta_i`.
#[derive(Debug, Clone)]
pub struct ActivationSolver<'a, T> {
    topics: &'a Array2<T>,
    prior: &'a GammaPrior<T>,
    denominators: Vec<T>,
    guard: T,
    floor: T,
}

impl<'a, T: Scalar> ActivationSolver<'a, T> {
    pub fn new(topics: &'a Array2<T>, prior: &'a GammaPrior<T>) -> Result<Self> {
        let d = topics.nrows();
        if prior.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: prior.dim(),
            });
        }
        let guard = T::from_f64_lossy(GUARD);
        let denominators = topics
            .rows()
            .into_iter()
            .zip(&prior.scale)
            .map(|(row, &b)| row.sum() + T::one() / b + guard)
            .collect();
        Ok(ActivationSolver {
            topics,
            prior,
            denominators,
            guard,
            floor: T::from_f64_lossy(SMOOTHING),
        })
    }

    pub fn dim(&self) -> usize {
        self.topics.nrows()
    }

    /// `(x Lambda)_j` for each column in the support of `f`.
    fn reconstruct(&self, f: CountRow<'_>, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(f.indices.iter().map(|&j| {
            let mut s = T::zero();
            for (i, &xi) in x.iter().enumerate() {
                s += xi * self.topics[[i, j as usize]];
            }
            s
        }));
    }

    /// One multiplicative update of `x` into `out`.
    pub fn step(&self, f: CountRow<'_>, x: &[T], out: &mut [T]) {
        let mut recon = Vec::with_capacity(f.indices.len());
        self.step_with(f, x, out, &mut recon);
    }

    fn step_with(&self, f: CountRow<'_>, x: &[T], out: &mut [T], recon: &mut Vec<T>) {
        self.reconstruct(f, x, recon);
        for i in 0..self.dim() {
            let mut acc = T::zero();
            for ((&j, &c), &r) in f.indices.iter().zip(f.counts).zip(recon.iter()) {
                acc += T::from_count(c) / (r + self.guard) * self.topics[[i, j as usize]];
            }
            let v = (x[i] * acc + (self.prior.shape[i] - T::one())) / self.denominators[i];
            out[i] = if v < self.floor { self.floor } else { v };
        }
    }

    /// Iterates [`Self::step`] from `x0` until the l2 change is at most `eps`
    /// or `max_iter` updates have been made. An empty row yields the prior
    /// mode.
    pub fn fit(&self, f: CountRow<'_>, x0: &[T], eps: T, max_iter: usize) -> Result<ActivationFit<T>> {
        let d = self.dim();
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x0.len(),
            });
        }
        if f.is_empty() {
            return Ok(ActivationFit {
                x: self.prior.mode(),
                iterations: 0,
                capped: false,
            });
        }
        let mut x = x0.to_vec();
        let mut next = vec![T::zero(); d];
        let mut recon = Vec::with_capacity(f.indices.len());
        for it in 1..=max_iter {
            self.step_with(f, &x, &mut next, &mut recon);
            let mut change = T::zero();
            for (a, b) in next.iter().zip(&x) {
                if !a.is_finite() {
                    return Err(Error::Numeric {
                        iteration: it,
                        detail: "non-finite activation".into(),
                    });
                }
                change += (*a - *b) * (*a - *b);
            }
            std::mem::swap(&mut x, &mut next);
            if change.sqrt() <= eps {
                return Ok(ActivationFit {
                    x,
                    iterations: it,
                    capped: false,
                });
            }
        }
        Ok(ActivationFit {
            x,
            iterations: max_iter,
            capped: true,
        })
    }
}

/// Converged activation of one count row against frozen topics, cold
/// started from the prior mean.
pub fn fit_activations<T: Scalar>(
    f: CountRow<'_>,
    topics: &Array2<T>,
    prior: &GammaPrior<T>,
    eps_inner: T,
    max_iter: usize,
) -> Result<ActivationFit<T>> {
    let solver = ActivationSolver::new(topics, prior)?;
    solver.fit(f, &prior.mean(), eps_inner, max_iter)
}

/// Discounted numerator `A` and denominator `B` of the topic update, plus
/// the contributions accumulated since the last update.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicAccumulator<T> {
    a: Array2<T>,
    b: Vec<T>,
    pending_a: Array2<T>,
    pending_b: Vec<T>,
    pending_rows: usize,
    observed: Vec<bool>,
    rho: T,
    q: usize,
}

impl<T: Scalar> TopicAccumulator<T> {
    /// Empty accumulators for `d` topics over `m` columns.
    pub fn new(d: usize, m: usize, rho: T, q: usize) -> Self {
        TopicAccumulator {
            a: Array2::zeros((d, m)),
            b: vec![T::zero(); d],
            pending_a: Array2::zeros((d, m)),
            pending_b: vec![T::zero(); d],
            pending_rows: 0,
            observed: vec![false; m],
            rho,
            q,
        }
    }

    pub fn numerator(&self) -> &Array2<T> {
        &self.a
    }

    pub fn denominator(&self) -> &[T] {
        &self.b
    }

    pub fn pending_rows(&self) -> usize {
        self.pending_rows
    }

    /// Rows still needed before the next topic update.
    pub fn rows_until_update(&self) -> usize {
        self.q - self.pending_rows.min(self.q)
    }

    pub fn ready(&self) -> bool {
        self.pending_rows >= self.q
    }

    /// Adds `lambda ∘ (xᵀ (f ⊘ x lambda))` and `x` for one row; only the
    /// columns in the support of `f` are touched.
    pub fn accumulate(&mut self, topics: &Array2<T>, f: CountRow<'_>, x: &[T]) {
        let guard = T::from_f64_lossy(GUARD);
        for (&j, &c) in f.indices.iter().zip(f.counts) {
            let j = j as usize;
            let mut r = T::zero();
            for (i, &xi) in x.iter().enumerate() {
                r += xi * topics[[i, j]];
            }
            let ratio = T::from_count(c) / (r + guard);
            for (i, &xi) in x.iter().enumerate() {
                self.pending_a[[i, j]] += topics[[i, j]] * (xi * ratio);
            }
            self.observed[j] = true;
        }
        for (pb, &xi) in self.pending_b.iter_mut().zip(x) {
            *pb += xi;
        }
        self.pending_rows += 1;
    }

    /// Folds the pending contributions into the discounted accumulators and
    /// sets `lambda = A ⊘ B` on every column observed so far. Columns never
    /// observed keep their current value. Returns the Frobenius norm of the
    /// change of `lambda`.
    pub fn apply(&mut self, topics: &mut Array2<T>) -> T {
        let guard = T::from_f64_lossy(GUARD);
        let rho = self.rho;
        self.a.zip_mut_with(&self.pending_a, |a, &p| *a = rho * *a + p);
        for (b, &p) in self.b.iter_mut().zip(&self.pending_b) {
            *b = rho * *b + p;
        }
        let mut change = T::zero();
        for (i, (mut row, a_row)) in topics.rows_mut().into_iter().zip(self.a.rows()).enumerate() {
            let denom = self.b[i] + guard;
            for (j, (l, &a)) in row.iter_mut().zip(a_row.iter()).enumerate() {
                if self.observed[j] {
                    let new = a / denom;
                    change += (new - *l) * (new - *l);
                    *l = new;
                }
            }
        }
        self.pending_a.fill(T::zero());
        self.pending_b.iter_mut().for_each(|b| *b = T::zero());
        self.pending_rows = 0;
        change.sqrt()
    }
}
