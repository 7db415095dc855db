use std::collections::HashMap;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::init::{init_topics, InitInfo};
use super::objective::gkl_divergence;
use super::params::{GammaPoissonParams, GammaPrior};
use super::solver::{ActivationFit, ActivationSolver, TopicAccumulator};
use crate::error::{Error, Result};
use crate::textprep::{self, CountMatrix, CountRow, Vocabulary};
use crate::{EncodedMatrix, Scalar};

/// Counters collected while fitting or transforming.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub rows_processed: usize,
    /// Rows without any in-vocabulary n-gram.
    pub empty_rows: usize,
    /// Inner loops stopped by the iteration cap.
    pub inner_cap_hits: usize,
    pub inner_iterations: usize,
    pub topic_updates: usize,
}

impl SolverStats {
    fn record(&mut self, fit: &ActivationFit<impl Scalar>) {
        self.inner_iterations += fit.iterations;
        if fit.capped {
            self.inner_cap_hits += 1;
        }
    }
}

/// Outcome of [`GammaPoissonModel::fit`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub epochs: usize,
    pub converged: bool,
    /// Last Frobenius change of the topics.
    pub last_change: f64,
    /// `(epoch, generalized KL divergence)` at the end of each epoch.
    pub trace: Vec<(usize, f64)>,
}

impl FitReport {
    /// `epoch,gkl` CSV.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("epoch,gkl\n");
        for (e, g) in &self.trace {
            out.push_str(&format!("{e},{g}\n"));
        }
        out
    }
}

/// Metadata saved alongside the parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub init: Option<InitInfo>,
    pub fit: Option<FitReport>,
    pub stats: SolverStats,
}

/// Online Gamma-Poisson factorization of n-gram counts.
#[derive(Debug, Clone)]
pub struct GammaPoissonModel<T> {
    pub(crate) params: GammaPoissonParams<T>,
    pub(crate) prior: GammaPrior<T>,
    pub(crate) vocab: Vocabulary,
    pub(crate) topics: Array2<T>,
    pub(crate) accumulator: TopicAccumulator<T>,
    pub(crate) cache: HashMap<String, Vec<T>>,
    pub(crate) metadata: ModelMetadata,
}

impl<T: Scalar> GammaPoissonModel<T> {
    /// Assembles a model from explicit topics. Accumulators start empty.
    pub fn from_parts(params: GammaPoissonParams<T>, vocab: Vocabulary, topics: Array2<T>) -> Result<Self> {
        params.validate()?;
        if topics.dim() != (params.d, vocab.len()) {
            return Err(Error::DimensionMismatch {
                expected: params.d * vocab.len(),
                actual: topics.len(),
            });
        }
        if topics.iter().any(|v| !(*v >= T::zero() && v.is_finite())) {
            return Err(Error::config("topics must be finite and non-negative"));
        }
        if topics.rows().into_iter().any(|r| !(r.sum() > T::zero())) {
            return Err(Error::config("every topic must have a positive sum"));
        }
        let prior = params.prior()?;
        let accumulator = TopicAccumulator::new(params.d, vocab.len(), params.rho, params.q);
        Ok(GammaPoissonModel {
            params,
            prior,
            vocab,
            topics,
            accumulator,
            cache: HashMap::new(),
            metadata: ModelMetadata::default(),
        })
    }

    /// Builds the vocabulary and the initial topics without streaming any row.
    pub fn initialize<S: AsRef<str> + Sync>(corpus: &[S], params: GammaPoissonParams<T>) -> Result<Self> {
        params.validate()?;
        if corpus.is_empty() {
            return Err(Error::config("cannot fit on an empty corpus"));
        }
        let range = params.ngram_range();
        let vocab = Vocabulary::build(corpus, range)?;
        let (topics, info) = init_topics(
            corpus,
            &vocab,
            range,
            params.d,
            params.hashed_dim,
            params.kmeans_restarts,
            params.rng_seed,
        )?;
        let mut model = GammaPoissonModel::from_parts(params, vocab, topics)?;
        model.metadata.init = Some(info);
        Ok(model)
    }

    /// Fits a model: vocabulary, k-means initialization, then shuffled
    /// mini-batches streamed through [`Self::partial_fit`] until the topics
    /// move by at most `eta` between two updates, or `max_epochs` passes.
    pub fn fit<S: AsRef<str> + Sync>(corpus: &[S], params: GammaPoissonParams<T>) -> Result<Self> {
        let mut model = GammaPoissonModel::initialize(corpus, params)?;
        let keys: Vec<String> = corpus.iter().map(|s| textprep::normalize(s.as_ref())).collect();
        let counts = textprep::count_matrix(&keys, &model.vocab, model.params.ngram_range())?;
        let mut rng = ChaCha8Rng::seed_from_u64(model.params.rng_seed);
        let mut order: Vec<usize> = (0..keys.len()).collect();
        let eta = model.params.eta;
        let q = model.params.q;
        let mut report = FitReport::default();

        'epochs: for epoch in 1..=model.params.max_epochs {
            order.shuffle(&mut rng);
            report.epochs = epoch;
            for batch in order.chunks(q) {
                let rows: Vec<(&str, CountRow<'_>)> =
                    batch.iter().map(|&i| (keys[i].as_str(), counts.row(i))).collect();
                let changes = model.partial_fit_rows(&rows)?;
                if let Some(&change) = changes.last() {
                    report.last_change = change.to_f64_lossy();
                }
                if changes.iter().any(|&c| c <= eta) {
                    report.converged = true;
                    report.trace.push((epoch, model.training_gkl(&keys, &counts)?));
                    break 'epochs;
                }
            }
            report.trace.push((epoch, model.training_gkl(&keys, &counts)?));
        }
        model.metadata.fit = Some(report);
        Ok(model)
    }

    fn training_gkl(&self, keys: &[String], counts: &CountMatrix) -> Result<f64> {
        let d = self.params.d;
        let mut x = Array2::zeros((keys.len(), d));
        for (l, key) in keys.iter().enumerate() {
            let v = match self.cache.get(key) {
                Some(v) => v.clone(),
                None => self.prior.mode(),
            };
            for (i, xi) in v.into_iter().enumerate() {
                x[[l, i]] = xi;
            }
        }
        // Empty rows contribute only their reconstruction mass.
        Ok(gkl_divergence(counts, x.view(), self.topics.view())?.to_f64_lossy())
    }

    /// Streams raw strings through the online solver.
    pub fn partial_fit<S: AsRef<str> + Sync>(&mut self, batch: &[S]) -> Result<Vec<T>> {
        let keys: Vec<String> = batch.iter().map(|s| textprep::normalize(s.as_ref())).collect();
        let counts = textprep::count_matrix(&keys, &self.vocab, self.params.ngram_range())?;
        let rows: Vec<(&str, CountRow<'_>)> = keys.iter().map(String::as_str).zip(counts.iter_rows()).collect();
        self.partial_fit_rows(&rows)
    }

    /// Streams `(cache key, count row)` pairs. Activations of rows seen
    /// before are warm-started from the cache. Every `q` processed rows the
    /// accumulators are discounted and the topics recomputed; the returned
    /// vector holds the Frobenius change of each such update.
    pub fn partial_fit_rows(&mut self, rows: &[(&str, CountRow<'_>)]) -> Result<Vec<T>> {
        let mut changes = Vec::new();
        let mut rest = rows;
        while !rest.is_empty() {
            let take = self.accumulator.rows_until_update().min(rest.len()).max(1);
            let (chunk, tail) = rest.split_at(take);
            rest = tail;
            self.process_chunk(chunk)?;
            if self.accumulator.ready() {
                changes.push(self.accumulator.apply(&mut self.topics));
                self.metadata.stats.topic_updates += 1;
            }
        }
        Ok(changes)
    }

    /// Activations of the distinct keys of a chunk against the current
    /// topics, then accumulation in row order.
    fn process_chunk(&mut self, chunk: &[(&str, CountRow<'_>)]) -> Result<()> {
        let mut first: indexmap::IndexMap<&str, CountRow<'_>> = indexmap::IndexMap::new();
        for &(key, row) in chunk {
            if row.is_empty() {
                self.metadata.stats.empty_rows += 1;
                continue;
            }
            first.entry(key).or_insert(row);
        }
        let solver = ActivationSolver::new(&self.topics, &self.prior)?;
        let cold = self.prior.mean();
        let (eps, cap) = (self.params.eps_inner, self.params.max_inner_iter);
        let cache = &self.cache;
        let distinct: Vec<(&str, CountRow<'_>)> = first.iter().map(|(k, r)| (*k, *r)).collect();
        let fits: Vec<ActivationFit<T>> = distinct
            .par_iter()
            .map(|(key, row)| {
                let x0 = cache.get(*key).map(Vec::as_slice).unwrap_or(&cold);
                solver.fit(*row, x0, eps, cap)
            })
            .collect::<Result<_>>()?;
        let fitted: HashMap<&str, &ActivationFit<T>> = first.keys().copied().zip(fits.iter()).collect();
        for &(key, row) in chunk {
            if row.is_empty() {
                continue;
            }
            self.accumulator.accumulate(&self.topics, row, &fitted[key].x);
            self.metadata.stats.rows_processed += 1;
        }
        for (key, fit) in first.keys().zip(fits) {
            self.metadata.stats.record(&fit);
            self.cache.insert((*key).to_owned(), fit.x);
        }
        Ok(())
    }

    /// Activations of `strings` against the frozen topics, warm-started from
    /// the cache for strings seen in training.
    pub fn transform<S: AsRef<str> + Sync>(&self, strings: &[S]) -> Result<EncodedMatrix<T>> {
        self.transform_with_stats(strings).map(|(x, _)| x)
    }

    pub fn transform_with_stats<S: AsRef<str> + Sync>(&self, strings: &[S]) -> Result<(EncodedMatrix<T>, SolverStats)> {
        let keys: Vec<String> = strings.iter().map(|s| textprep::normalize(s.as_ref())).collect();
        let counts = textprep::count_matrix(&keys, &self.vocab, self.params.ngram_range())?;
        let solver = ActivationSolver::new(&self.topics, &self.prior)?;
        let cold = self.prior.mean();
        let (eps, cap) = (self.params.eps_inner, self.params.max_inner_iter);
        let fits: Vec<ActivationFit<T>> = keys
            .par_iter()
            .enumerate()
            .map(|(l, key)| {
                let x0 = self.cache.get(key).map(Vec::as_slice).unwrap_or(&cold);
                solver.fit(counts.row(l), x0, eps, cap)
            })
            .collect::<Result<_>>()?;
        let mut stats = SolverStats::default();
        let mut out = Array2::zeros((keys.len(), self.params.d));
        for (l, fit) in fits.into_iter().enumerate() {
            if counts.row(l).is_empty() {
                stats.empty_rows += 1;
            } else {
                stats.rows_processed += 1;
            }
            stats.record(&fit);
            for (i, v) in fit.x.into_iter().enumerate() {
                out[[l, i]] = v;
            }
        }
        Ok((out, stats))
    }

    /// For each topic, the `top_k` corpus words with the largest activation
    /// on it, ties broken lexicographically.
    pub fn infer_feature_names<S: AsRef<str>>(&self, corpus: &[S], top_k: usize) -> Result<Vec<Vec<String>>> {
        if top_k == 0 {
            return Err(Error::config("top_k must be >= 1"));
        }
        let words = textprep::word_vocabulary(corpus);
        if words.is_empty() {
            return Err(Error::Evaluation("empty word vocabulary".into()));
        }
        let x = self.transform(&words)?;
        Ok((0..self.params.d)
            .map(|i| {
                let mut order: Vec<usize> = (0..words.len()).collect();
                order.sort_by(|&a, &b| x[[b, i]].partial_cmp(&x[[a, i]]).unwrap().then_with(|| words[a].cmp(&words[b])));
                order.into_iter().take(top_k).map(|w| words[w].clone()).collect()
            })
            .collect())
    }

    /// Feature names using the words of the cached training strings.
    pub fn feature_names(&self, top_k: usize) -> Result<Vec<Vec<String>>> {
        let mut corpus: Vec<&str> = self.cache.keys().map(String::as_str).collect();
        corpus.sort_unstable();
        self.infer_feature_names(&corpus, top_k)
    }

    pub fn params(&self) -> &GammaPoissonParams<T> {
        &self.params
    }

    pub fn prior(&self) -> &GammaPrior<T> {
        &self.prior
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn topics(&self) -> &Array2<T> {
        &self.topics
    }

    pub fn accumulator(&self) -> &TopicAccumulator<T> {
        &self.accumulator
    }

    pub fn cached_activation(&self, key: &str) -> Option<&[T]> {
        self.cache.get(key).map(Vec::as_slice)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    /// True when fitting stopped at `max_epochs` without meeting `eta`.
    pub fn not_converged(&self) -> bool {
        self.metadata.fit.as_ref().is_some_and(|f| !f.converged)
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }
}
