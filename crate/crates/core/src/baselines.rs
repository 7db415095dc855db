//! Reference encoders: one-hot and n-gram similarity encoding.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::textprep::{self, escape_line, unescape_line, NGramRange, NGramSet};
use crate::{EncodedMatrix, Scalar};

/// Ordered list of distinct categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrototypeSet {
    prototypes: Vec<String>,
}

impl PrototypeSet {
    pub fn new(prototypes: Vec<String>) -> Result<Self> {
        if prototypes.is_empty() {
            return Err(Error::config("a prototype set needs at least one category"));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &prototypes {
            if !seen.insert(p.as_str()) {
                return Err(Error::config(format!("duplicate prototype {p:?}")));
            }
        }
        Ok(PrototypeSet { prototypes })
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.prototypes
    }

    pub fn position(&self, s: &str) -> Option<usize> {
        self.prototypes.iter().position(|p| p == s)
    }

    /// One category per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.prototypes {
            writeln!(w, "{}", escape_line(p))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut out = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            out.push(unescape_line(&line?).map_err(|detail| Error::Format {
                what: "prototype set",
                line: lineno + 1,
                detail,
            })?);
        }
        PrototypeSet::new(out)
    }
}

/// The `k` most frequent distinct values, ties broken lexicographically.
pub fn select_prototypes_frequency<S: AsRef<str>>(corpus: &[S], k: usize) -> Result<PrototypeSet> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in corpus {
        *counts.entry(s.as_ref()).or_insert(0) += 1;
    }
    if counts.len() < k || k == 0 {
        return Err(Error::config(format!(
            "cannot select {k} prototypes from {} distinct values",
            counts.len()
        )));
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    PrototypeSet::new(ranked.into_iter().take(k).map(|(s, _)| s.to_owned()).collect())
}

fn gram_set(s: &str, range: NGramRange) -> Result<NGramSet> {
    let set = textprep::ngram_set(&textprep::normalize(s), range)?;
    if set.is_empty() {
        return Err(Error::EmptyGramSet {
            input: s.to_owned(),
            row: None,
        });
    }
    Ok(set)
}

fn jaccard_of_sets<T: Scalar>(a: &NGramSet, b: &NGramSet) -> T {
    let inter = a.intersection_len(b);
    T::from_usize_lossy(inter) / T::from_usize_lossy(a.len() + b.len() - inter)
}

/// Jaccard coefficient of the n-gram sets of two strings.
pub fn ngram_jaccard<T: Scalar>(s1: &str, s2: &str, range: NGramRange) -> Result<T> {
    Ok(jaccard_of_sets(&gram_set(s1, range)?, &gram_set(s2, range)?))
}

/// Indicator of the exact category; unseen strings get the zero vector.
pub fn onehot_encode<T: Scalar, S: AsRef<str>>(strings: &[S], categories: &PrototypeSet) -> EncodedMatrix<T> {
    let index: HashMap<&str, usize> = categories
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut out = Array2::zeros((strings.len(), categories.len()));
    for (i, s) in strings.iter().enumerate() {
        if let Some(&j) = index.get(s.as_ref()) {
            out[[i, j]] = T::one();
        }
    }
    out
}

/// Row `i` holds `sim(s_i, p)` for every prototype `p`.
pub fn similarity_encode_with<T, S, F>(strings: &[S], prototypes: &PrototypeSet, sim: F) -> Result<EncodedMatrix<T>>
where
    T: Scalar,
    S: AsRef<str> + Sync,
    F: Fn(&str, &str) -> Result<T> + Sync,
{
    let rows: Vec<Vec<T>> = strings
        .par_iter()
        .map(|s| prototypes.as_slice().iter().map(|p| sim(s.as_ref(), p)).collect())
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((strings.len(), prototypes.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Similarity encoding with the n-gram Jaccard coefficient.
pub fn similarity_encode<T: Scalar, S: AsRef<str> + Sync>(
    strings: &[S],
    prototypes: &PrototypeSet,
    range: NGramRange,
) -> Result<EncodedMatrix<T>> {
    range.validate()?;
    let proto_sets: Vec<NGramSet> = prototypes
        .as_slice()
        .iter()
        .map(|p| gram_set(p, range))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<T>> = strings
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let set = gram_set(s.as_ref(), range).map_err(|e| match e {
                Error::EmptyGramSet { input, .. } => Error::EmptyGramSet { input, row: Some(i) },
                e => e,
            })?;
            Ok(proto_sets.iter().map(|p| jaccard_of_sets(&set, p)).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((strings.len(), prototypes.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}
