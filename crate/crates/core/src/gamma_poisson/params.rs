use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::NGramRange;
use crate::Scalar;

/// A hyperparameter shared by all topics or given per topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerTopic<T> {
    Shared(T),
    PerTopic(Vec<T>),
}

impl<T: Scalar> PerTopic<T> {
    pub fn resolve(&self, d: usize, name: &str) -> Result<Vec<T>> {
        let v = match self {
            PerTopic::Shared(v) => vec![*v; d],
            PerTopic::PerTopic(v) if v.len() == d => v.clone(),
            PerTopic::PerTopic(v) => {
                return Err(Error::config(format!(
                    "{name} has {} entries but there are {d} topics",
                    v.len()
                )))
            }
        };
        if v.iter().any(|x| !(*x > T::zero() && x.is_finite())) {
            return Err(Error::config(format!("{name} must be positive and finite")));
        }
        Ok(v)
    }
}

/// Hyperparameters of the online Gamma-Poisson solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GammaPoissonParams<T> {
    /// Number of topics.
    pub d: usize,
    /// Gamma shape of the activation prior.
    pub alpha: PerTopic<T>,
    /// Gamma scale of the activation prior.
    pub beta: PerTopic<T>,
    /// Discount applied to the accumulators at each topic update.
    pub rho: T,
    /// Rows between topic updates.
    pub q: usize,
    /// Outer tolerance on the Frobenius change of the topics.
    pub eta: T,
    /// Inner tolerance on the l2 change of an activation.
    pub eps_inner: T,
    pub n_min: usize,
    pub n_max: usize,
    pub max_epochs: usize,
    /// Hard cap on inner iterations per activation.
    pub max_inner_iter: usize,
    pub rng_seed: u64,
    /// Columns of the hashed count matrix clustered at initialization.
    pub hashed_dim: usize,
    pub kmeans_restarts: usize,
}

impl<T: Scalar> GammaPoissonParams<T> {
    pub fn new(d: usize) -> Self {
        GammaPoissonParams {
            d,
            alpha: PerTopic::Shared(T::from_f64_lossy(1.1)),
            beta: PerTopic::Shared(T::one()),
            rho: T::from_f64_lossy(0.95),
            q: 256,
            eta: T::from_f64_lossy(1e-4),
            eps_inner: T::from_f64_lossy(1e-3),
            n_min: 2,
            n_max: 4,
            max_epochs: 10,
            max_inner_iter: 100,
            rng_seed: 0,
            hashed_dim: 128,
            kmeans_restarts: 10,
        }
    }

    pub fn ngram_range(&self) -> NGramRange {
        NGramRange {
            min: self.n_min,
            max: self.n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::config("number of topics must be >= 1"));
        }
        self.ngram_range().validate()?;
        self.alpha.resolve(self.d, "alpha")?;
        self.beta.resolve(self.d, "beta")?;
        if !(self.rho > T::zero() && self.rho <= T::one()) {
            return Err(Error::config(format!("rho must lie in (0, 1], got {}", self.rho)));
        }
        if self.q < 1 {
            return Err(Error::config("mini-batch size must be >= 1"));
        }
        if !(self.eta > T::zero()) || !(self.eps_inner > T::zero()) {
            return Err(Error::config("tolerances must be positive"));
        }
        if self.max_epochs < 1 || self.max_inner_iter < 1 {
            return Err(Error::config("iteration caps must be >= 1"));
        }
        if self.hashed_dim < 1 || self.kmeans_restarts < 1 {
            return Err(Error::config("initialization settings must be >= 1"));
        }
        Ok(())
    }

    pub fn prior(&self) -> Result<GammaPrior<T>> {
        Ok(GammaPrior {
            shape: self.alpha.resolve(self.d, "alpha")?,
            scale: self.beta.resolve(self.d, "beta")?,
        })
    }
}

impl<T: Scalar> Default for GammaPoissonParams<T> {
    fn default() -> Self {
        GammaPoissonParams::new(10)
    }
}

/// Per-topic Gamma prior on activations.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPrior<T> {
    pub shape: Vec<T>,
    pub scale: Vec<T>,
}

impl<T: Scalar> GammaPrior<T> {
    pub fn shared(d: usize, shape: T, scale: T) -> Self {
        GammaPrior {
            shape: vec![shape; d],
            scale: vec![scale; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    /// Prior mean `alpha * beta`, the cold-start activation.
    pub fn mean(&self) -> Vec<T> {
        self.shape.iter().zip(&self.scale).map(|(&a, &b)| a * b).collect()
    }

    /// Prior mode `(alpha - 1) * beta`, floored at the smoothing constant.
    pub fn mode(&self) -> Vec<T> {
        let floor = T::from_f64_lossy(super::SMOOTHING);
        self.shape
            .iter()
            .zip(&self.scale)
            .map(|(&a, &b)| ((a - T::one()) * b).max(floor))
            .collect()
    }
}
