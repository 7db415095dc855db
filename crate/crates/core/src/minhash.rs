//! Stateless min-hash encoding of character n-gram sets.
//!
//! Component `j` of a signature is the minimum, over the n-grams of a string,
//! of MurmurHash3 seeded with `j` and mapped onto `[0, 1]`. The encoder keeps
//! no fitted state, so any row partition encodes identically.
//!
//! Two properties are used throughout:
//!
//! * the fraction of equal components of two signatures estimates the
//!   Jaccard coefficient of the underlying n-gram sets;
//! * if the n-grams of `x` are a subset of those of `y`, every component of
//!   `y`'s signature is `<=` the matching component of `x`'s. The converse
//!   holds with a false-positive probability that decays geometrically in
//!   the signature dimension, see [`min_dim_for_inclusion`].

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hashing::murmur3_32;
use crate::textprep::{self, NGramRange, NGramSet};
use crate::{EncodedMatrix, Scalar};

/// Largest digest value; digests are divided by this to land in `[0, 1]`.
pub const DIGEST_MAX: u32 = u32::MAX;

/// Raw 32-bit digest of `token` under salt `salt`.
#[inline]
pub fn salted_digest(token: &str, salt: u32) -> u32 {
    murmur3_32(token.as_bytes(), salt)
}

/// Maps a digest onto the unit interval: `0 -> 0.0`, `u32::MAX -> 1.0`.
#[inline]
pub fn normalize_digest<T: Scalar>(digest: u32) -> T {
    T::from_f64_lossy(digest as f64 / DIGEST_MAX as f64)
}

/// Salted hash of `token` on the unit interval.
pub fn salted_hash<T: Scalar>(token: &str, salt: u32) -> T {
    normalize_digest(salted_digest(token, salt))
}

/// Min-hash signature of one n-gram set.
///
/// The raw digests are kept: normalization is strictly monotone, so
/// comparisons on digests agree exactly with comparisons on the normalized
/// values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinHashSignature {
    digests: Vec<u32>,
}

impl MinHashSignature {
    pub fn from_digests(digests: Vec<u32>) -> Self {
        MinHashSignature { digests }
    }

    pub fn dim(&self) -> usize {
        self.digests.len()
    }

    pub fn digests(&self) -> &[u32] {
        &self.digests
    }

    pub fn value<T: Scalar>(&self, j: usize) -> T {
        normalize_digest(self.digests[j])
    }

    pub fn values<T: Scalar>(&self) -> Vec<T> {
        self.digests.iter().map(|&h| normalize_digest(h)).collect()
    }

    /// Signature of the union of the two underlying sets.
    pub fn union(&self, other: &MinHashSignature) -> Result<MinHashSignature> {
        check_dims(self, other)?;
        Ok(MinHashSignature {
            digests: self
                .digests
                .iter()
                .zip(&other.digests)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        })
    }
}

fn check_dims(a: &MinHashSignature, b: &MinHashSignature) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::config("signature dimension must be >= 1"));
    }
    Ok(())
}

/// Signature using salts `offset..offset + d`.
pub fn signature_with_offset<'a, I>(tokens: I, d: usize, offset: u32) -> Result<MinHashSignature>
where
    I: IntoIterator<Item = &'a str>,
{
    check_d(d)?;
    let mut digests = vec![u32::MAX; d];
    let mut any = false;
    for token in tokens {
        any = true;
        let bytes = token.as_bytes();
        for (j, slot) in digests.iter_mut().enumerate() {
            let h = murmur3_32(bytes, offset.wrapping_add(j as u32));
            if h < *slot {
                *slot = h;
            }
        }
    }
    if !any {
        return Err(Error::EmptyGramSet {
            input: String::new(),
            row: None,
        });
    }
    Ok(MinHashSignature { digests })
}

/// Min-hash signature of an n-gram set, salts `0..d`.
pub fn signature(grams: &NGramSet, d: usize) -> Result<MinHashSignature> {
    signature_with_offset(grams.iter(), d, 0)
}

/// Signature of a string: normalize, extract the n-gram set, min-hash it.
pub fn signature_of(s: &str, d: usize, range: NGramRange) -> Result<MinHashSignature> {
    let grams = textprep::ngram_set(&textprep::normalize(s), range)?;
    signature(&grams, d).map_err(|e| match e {
        Error::EmptyGramSet { row, .. } => Error::EmptyGramSet {
            input: s.to_owned(),
            row,
        },
        e => e,
    })
}

/// Encodes every string of a column; rows are computed independently.
pub fn encode_column<T, S>(strings: &[S], d: usize, range: NGramRange) -> Result<EncodedMatrix<T>>
where
    T: Scalar,
    S: AsRef<str> + Sync,
{
    check_d(d)?;
    range.validate()?;
    let rows: Vec<Vec<T>> = strings
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            signature_of(s.as_ref(), d, range)
                .map(|sig| sig.values())
                .map_err(|e| match e {
                    Error::EmptyGramSet { input, .. } => Error::EmptyGramSet { input, row: Some(i) },
                    e => e,
                })
        })
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((strings.len(), d));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Fraction of exactly equal components.
pub fn estimate_jaccard<T: Scalar>(a: &MinHashSignature, b: &MinHashSignature) -> Result<T> {
    check_dims(a, b)?;
    let equal = a.digests.iter().zip(&b.digests).filter(|(x, y)| x == y).count();
    Ok(T::from_usize_lossy(equal) / T::from_usize_lossy(a.dim()))
}

/// Returns true iff `y_sig <= x_sig` in every component, i.e. the set behind
/// `y_sig` likely contains the set behind `x_sig`.
pub fn inclusion_test(x_sig: &MinHashSignature, y_sig: &MinHashSignature) -> Result<bool> {
    check_dims(x_sig, y_sig)?;
    Ok(x_sig.digests.iter().zip(&y_sig.digests).all(|(x, y)| y <= x))
}

/// Smallest `d` for which a non-inclusion is flagged as an inclusion with
/// probability at most `epsilon`, for sets of sizes `kx` (probe) and `ky`:
/// `ceil(-ln(epsilon) / ln(1 + kx / ky))`, at least 1.
pub fn min_dim_for_inclusion(epsilon: f64, kx: usize, ky: usize) -> Result<usize> {
    if kx == 0 || ky == 0 {
        return Err(Error::config("set sizes must be positive"));
    }
    min_dim_for_ratio(epsilon, kx as f64 / ky as f64)
}

/// As [`min_dim_for_inclusion`], from the ratio `kx / ky` directly.
pub fn min_dim_for_ratio(epsilon: f64, ratio: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::config(format!("set-size ratio must be positive, got {ratio}")));
    }
    let d = (-epsilon.ln() / ratio.ln_1p()).ceil();
    Ok((d as usize).max(1))
}

/// Upper bound on the false-positive probability of [`inclusion_test`] at
/// dimension `d` for disjoint sets of sizes `kx` and `ky`.
pub fn inclusion_false_positive_bound(d: usize, kx: usize, ky: usize) -> f64 {
    (ky as f64 / (kx + ky) as f64).powi(d as i32)
}

/// Stateless min-hash column encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinHashEncoder {
    pub d: usize,
    pub range: NGramRange,
}

impl MinHashEncoder {
    pub fn new(d: usize, range: NGramRange) -> Result<Self> {
        check_d(d)?;
        range.validate()?;
        Ok(MinHashEncoder { d, range })
    }

    pub fn transform<T: Scalar, S: AsRef<str> + Sync>(&self, strings: &[S]) -> Result<EncodedMatrix<T>> {
        encode_column(strings, self.d, self.range)
    }

    /// Positional names `mh_0 .. mh_{d-1}`.
    pub fn feature_names(&self) -> Vec<String> {
        (0..self.d).map(|j| format!("mh_{j}")).collect()
    }
}
