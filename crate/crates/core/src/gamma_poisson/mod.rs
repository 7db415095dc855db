//! Online Gamma-Poisson factorization of character n-gram counts.
//!
//! Each string's count vector `f` is modeled as `f ≈ x Λ` with Poisson
//! counts and a Gamma prior on the activations `x`. Topics `Λ` are learned
//! by streaming mini-batches: each row's activation is solved by a
//! multiplicative fixed-point iteration, and every `q` rows the discounted
//! numerator/denominator accumulators give the new topics.

mod init;
mod model;
pub mod objective;
mod params;
mod persist;
mod solver;

pub use init::{init_topics, kmeans, kmeans_weighted, InitInfo, KMeans};
pub use model::{FitReport, GammaPoissonModel, ModelMetadata, SolverStats};
pub use objective::{gkl_divergence, grad_activation, grad_topics, log_likelihood, penalized_objective};
pub use params::{GammaPoissonParams, GammaPrior, PerTopic};
pub use persist::{read_topics, write_topics, TOPICS_MAGIC};
pub use solver::{fit_activations, ActivationFit, ActivationSolver, TopicAccumulator};

/// Added to the initial topics before normalization, and the floor of every
/// activation.
pub const SMOOTHING: f64 = 1e-10;

/// Added to every divisor of the multiplicative updates.
pub const GUARD: f64 = 1e-10;
