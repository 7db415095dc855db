use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minhash::{self, MinHashSignature};
use crate::textprep::{self, NGramRange, NGramSet};

/// How the set-size ratio `kx / ky` feeding the dimension formula is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioConvention {
    /// Smallest probe-word gram count over the largest entry gram count.
    GramCount,
    /// One over the largest number of words in an entry.
    InverseMaxWords,
}

impl RatioConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            RatioConvention::GramCount => "gram-count",
            RatioConvention::InverseMaxWords => "inverse-max-words",
        }
    }
}

impl std::str::FromStr for RatioConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gram-count" => Ok(RatioConvention::GramCount),
            "inverse-max-words" => Ok(RatioConvention::InverseMaxWords),
            _ => Err(Error::config(format!(
                "unknown ratio convention {s:?} (gram-count | inverse-max-words)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FprConfig {
    pub convention: RatioConvention,
    /// Replaces the largest entry gram count under [`RatioConvention::GramCount`].
    pub max_entry_grams: Option<usize>,
    pub range: NGramRange,
}

impl Default for FprConfig {
    fn default() -> Self {
        FprConfig {
            convention: RatioConvention::GramCount,
            max_entry_grams: None,
            range: NGramRange::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FprRow {
    pub word: String,
    pub epsilon: f64,
    pub ratio: f64,
    pub d: usize,
    /// Entries whose gram set does not contain the word's.
    pub negatives: usize,
    pub false_positives: usize,
    pub fpr: f64,
    /// Containing entries rejected by the test; always zero.
    pub false_negatives: usize,
}

impl FprRow {
    pub const CSV_HEADER: &'static str = "word,epsilon,ratio,d,negatives,false_positives,fpr,false_negatives";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.word,
            self.epsilon,
            self.ratio,
            self.d,
            self.negatives,
            self.false_positives,
            self.fpr,
            self.false_negatives
        )
    }
}

fn prefix_included(word: &MinHashSignature, entry: &MinHashSignature, d: usize) -> bool {
    word.digests()[..d].iter().zip(&entry.digests()[..d]).all(|(x, y)| y <= x)
}

/// For each `epsilon`, picks `d` from the inclusion bound and measures how
/// often [`minhash::inclusion_test`] accepts an entry that does not contain
/// the probe word's grams.
pub fn fpr_experiment<S: AsRef<str> + Sync>(
    corpus: &[S],
    probe_words: &[S],
    epsilons: &[f64],
    config: &FprConfig,
) -> Result<Vec<FprRow>> {
    config.range.validate()?;
    if corpus.is_empty() || probe_words.is_empty() || epsilons.is_empty() {
        return Err(Error::config("corpus, probe words and epsilon grid must be non-empty"));
    }
    let range = config.range;
    let entries: Vec<String> = corpus.iter().map(|s| textprep::normalize(s.as_ref())).collect();
    let words: Vec<String> = probe_words.iter().map(|s| textprep::normalize(s.as_ref())).collect();
    let entry_sets: Vec<NGramSet> = entries
        .par_iter()
        .map(|s| textprep::ngram_set(s, range))
        .collect::<Result<_>>()?;
    let word_sets: Vec<NGramSet> = words.iter().map(|w| textprep::ngram_set(w, range)).collect::<Result<_>>()?;
    for (w, set) in words.iter().zip(&word_sets) {
        if set.is_empty() {
            return Err(Error::EmptyGramSet {
                input: w.clone(),
                row: None,
            });
        }
        if !entries.iter().any(|e| e.contains(w.as_str())) {
            return Err(Error::Evaluation(format!("probe word {w:?} does not occur in the corpus")));
        }
    }

    let ratio = match config.convention {
        RatioConvention::GramCount => {
            let kx = word_sets.iter().map(NGramSet::len).min().unwrap_or(1);
            let ky = config
                .max_entry_grams
                .unwrap_or_else(|| entry_sets.iter().map(NGramSet::len).max().unwrap_or(1));
            if ky == 0 {
                return Err(Error::config("max_entry_grams must be >= 1"));
            }
            kx as f64 / ky as f64
        }
        RatioConvention::InverseMaxWords => {
            let words = entries.iter().map(|e| e.split_whitespace().count()).max().unwrap_or(1);
            1.0 / words.max(1) as f64
        }
    };
    let dims: Vec<usize> = epsilons
        .iter()
        .map(|&e| minhash::min_dim_for_ratio(e, ratio))
        .collect::<Result<_>>()?;
    let d_max = *dims.iter().max().unwrap();

    let entry_sigs: Vec<Option<MinHashSignature>> = entry_sets
        .par_iter()
        .map(|set| (!set.is_empty()).then(|| minhash::signature(set, d_max)).transpose())
        .collect::<Result<_>>()?;

    let per_word: Vec<Vec<FprRow>> = words
        .par_iter()
        .zip(&word_sets)
        .map(|(word, wset)| {
            let wsig = minhash::signature(wset, d_max)?;
            let rows = epsilons
                .iter()
                .zip(&dims)
                .map(|(&epsilon, &d)| {
                    let (mut negatives, mut fp, mut fnegs) = (0, 0, 0);
                    for (eset, esig) in entry_sets.iter().zip(&entry_sigs) {
                        let accepted = esig.as_ref().is_some_and(|s| prefix_included(&wsig, s, d));
                        if wset.is_subset(eset) {
                            fnegs += usize::from(!accepted);
                        } else {
                            negatives += 1;
                            fp += usize::from(accepted);
                        }
                    }
                    FprRow {
                        word: word.clone(),
                        epsilon,
                        ratio,
                        d,
                        negatives,
                        false_positives: fp,
                        fpr: if negatives == 0 { 0.0 } else { fp as f64 / negatives as f64 },
                        false_negatives: fnegs,
                    }
                })
                .collect();
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_word.into_iter().flatten().collect())
}
