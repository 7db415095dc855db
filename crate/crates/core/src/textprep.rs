//! String normalization, character n-grams, vocabularies and sparse count
//! matrices.
//!
//! N-grams are taken over Unicode scalar values with no padding or boundary
//! markers. A string shorter than the smallest n-gram size is represented by
//! itself as a single token so that one-character categories stay encodable.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hashing::murmur3_32;

/// Lowercases a string. No other transformation is applied.
pub fn normalize(s: &str) -> String {
    s.to_lowercase()
}

/// Inclusive range of n-gram sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NGramRange {
    pub min: usize,
    pub max: usize,
}

impl NGramRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        let range = NGramRange { min, max };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min < 1 {
            return Err(Error::config(format!("n-gram minimum must be >= 1, got {}", self.min)));
        }
        if self.max < self.min {
            return Err(Error::config(format!(
                "n-gram maximum {} is below minimum {}",
                self.max, self.min
            )));
        }
        Ok(())
    }
}

impl Default for NGramRange {
    fn default() -> Self {
        NGramRange { min: 2, max: 4 }
    }
}

/// Calls `f` on every n-gram of `s` in a fixed order: by size, then by
/// position. The short-string token is emitted when `s` has fewer than
/// `range.min` characters.
fn for_each_gram<'a>(s: &'a str, range: NGramRange, mut f: impl FnMut(&'a str)) {
    if s.is_empty() {
        return;
    }
    // Byte offset of every char boundary, including the end.
    let bounds: Vec<usize> = s
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(s.len()))
        .collect();
    let len = bounds.len() - 1;
    if len < range.min {
        f(s);
        return;
    }
    for n in range.min..=range.max.min(len) {
        for start in 0..=(len - n) {
            f(&s[bounds[start]..bounds[start + n]]);
        }
    }
}

/// Multiset of the character n-grams of one string, in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NGramCounts {
    counts: IndexMap<String, u32>,
}

impl NGramCounts {
    pub fn get(&self, gram: &str) -> u32 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(g, &c)| (g.as_str(), c))
    }

    /// Support of the multiset.
    pub fn to_set(&self) -> NGramSet {
        NGramSet {
            grams: self.counts.keys().cloned().collect(),
        }
    }
}

/// Set of distinct character n-grams of one string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NGramSet {
    grams: indexmap::IndexSet<String>,
}

impl NGramSet {
    pub fn from_grams<I, S>(grams: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        NGramSet {
            grams: grams.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn contains(&self, gram: &str) -> bool {
        self.grams.contains(gram)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.grams.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &NGramSet) -> bool {
        self.grams.iter().all(|g| other.grams.contains(g))
    }

    pub fn intersection_len(&self, other: &NGramSet) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.grams.iter().filter(|g| large.grams.contains(*g)).count()
    }

    pub fn union_len(&self, other: &NGramSet) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }
}

/// All consecutive n-grams of `s` with their multiplicities.
///
/// `s` is used as given; callers normalize beforehand.
pub fn char_ngrams(s: &str, range: NGramRange) -> Result<NGramCounts> {
    range.validate()?;
    let mut counts: IndexMap<String, u32> = IndexMap::new();
    for_each_gram(s, range, |g| {
        *counts.entry(g.to_owned()).or_insert(0) += 1;
    });
    Ok(NGramCounts { counts })
}

/// Distinct n-grams of `s`.
pub fn ngram_set(s: &str, range: NGramRange) -> Result<NGramSet> {
    range.validate()?;
    let mut grams = indexmap::IndexSet::new();
    for_each_gram(s, range, |g| {
        if !grams.contains(g) {
            grams.insert(g.to_owned());
        }
    });
    Ok(NGramSet { grams })
}

/// Bijection between n-grams and column ids, in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    index: indexmap::IndexSet<String>,
}

impl Vocabulary {
    /// Union of the n-grams of the normalized corpus entries.
    pub fn build<S: AsRef<str>>(corpus: &[S], range: NGramRange) -> Result<Self> {
        range.validate()?;
        if corpus.is_empty() {
            return Err(Error::config("cannot build a vocabulary from an empty corpus"));
        }
        let mut index = indexmap::IndexSet::new();
        for s in corpus {
            let s = normalize(s.as_ref());
            for_each_gram(&s, range, |g| {
                if !index.contains(g) {
                    index.insert(g.to_owned());
                }
            });
        }
        if index.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(Vocabulary { index })
    }

    pub fn from_grams<I, S>(grams: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut index = indexmap::IndexSet::new();
        for g in grams {
            let g = g.into();
            if !index.insert(g.clone()) {
                return Err(Error::config(format!("duplicate vocabulary entry {g:?}")));
            }
        }
        Ok(Vocabulary { index })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn id(&self, gram: &str) -> Option<usize> {
        self.index.get_index_of(gram)
    }

    pub fn gram(&self, id: usize) -> Option<&str> {
        self.index.get_index(id).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.index.iter().map(String::as_str)
    }

    /// One gram per line; line number is the column id. Control characters
    /// that would break the line structure are backslash-escaped.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for g in &self.index {
            writeln!(w, "{}", escape_line(g))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut grams = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            grams.push(unescape_line(&line).map_err(|detail| Error::Format {
                what: "vocabulary",
                line: lineno + 1,
                detail,
            })?);
        }
        Vocabulary::from_grams(grams)
    }
}

pub(crate) fn escape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_line(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            other => return Err(format!("invalid escape sequence \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

/// Sparse row-compressed matrix of positive integer counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    counts: Vec<u32>,
}

/// Borrowed view of one row of a [`CountMatrix`].
#[derive(Debug, Clone, Copy)]
pub struct CountRow<'a> {
    pub indices: &'a [u32],
    pub counts: &'a [u32],
}

impl CountRow<'_> {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.indices.iter().map(|&j| j as usize).zip(self.counts.iter().copied())
    }
}

impl CountMatrix {
    pub fn empty(cols: usize) -> Self {
        CountMatrix {
            cols,
            indptr: vec![0],
            indices: Vec::new(),
            counts: Vec::new(),
        }
    }

    /// Appends a row given as (column, count) pairs. Pairs are sorted by
    /// column, duplicates merged and zeros dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, u32)>) -> Result<()> {
        let mut row: Vec<(usize, u32)> = entries.into_iter().filter(|&(_, c)| c > 0).collect();
        row.sort_unstable_by_key(|&(j, _)| j);
        let mut last: Option<usize> = None;
        for (j, c) in row {
            if j >= self.cols {
                return Err(Error::DimensionMismatch {
                    expected: self.cols,
                    actual: j + 1,
                });
            }
            if last == Some(j) {
                *self.counts.last_mut().expect("merged entry exists") += c;
            } else {
                self.indices.push(j as u32);
                self.counts.push(c);
                last = Some(j);
            }
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        let mut m = CountMatrix::empty(cols);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> CountRow<'_> {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        CountRow {
            indices: &self.indices[a..b],
            counts: &self.counts[a..b],
        }
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = CountRow<'_>> {
        (0..self.rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        let row = self.row(i);
        match row.indices.binary_search(&(j as u32)) {
            Ok(p) => row.counts[p],
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        (0..self.rows())
            .map(|i| {
                let mut dense = vec![0; self.cols];
                for (j, c) in self.row(i).iter() {
                    dense[j] = c;
                }
                dense
            })
            .collect()
    }

    /// Coordinate triplet text: header `rows cols nnz`, then `row col count`.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows(), self.cols, self.nnz())?;
        let mut line = String::new();
        for i in 0..self.rows() {
            for (j, c) in self.row(i).iter() {
                line.clear();
                let _ = writeln!(line, "{i} {j} {c}");
                w.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let fmt_err = |line: usize, detail: String| Error::Format {
            what: "count matrix",
            line,
            detail,
        };
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| fmt_err(1, "missing header".into()))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| fmt_err(1, format!("{e}")))?;
        let [rows, cols, nnz] = dims[..] else {
            return Err(fmt_err(1, "header must be `rows cols nnz`".into()));
        };
        let mut per_row: Vec<Vec<(usize, u32)>> = vec![Vec::new(); rows];
        let mut seen = 0usize;
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = k + 2;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(fmt_err(lineno, "expected `row col count`".into()));
            }
            let i: usize = parts[0].parse().map_err(|e| fmt_err(lineno, format!("{e}")))?;
            let j: usize = parts[1].parse().map_err(|e| fmt_err(lineno, format!("{e}")))?;
            let c: u32 = parts[2].parse().map_err(|e| fmt_err(lineno, format!("{e}")))?;
            if i >= rows || j >= cols {
                return Err(fmt_err(lineno, format!("entry ({i}, {j}) out of bounds")));
            }
            if c == 0 {
                return Err(fmt_err(lineno, "stored zero".into()));
            }
            per_row[i].push((j, c));
            seen += 1;
        }
        if seen != nnz {
            return Err(fmt_err(1, format!("header declares {nnz} entries, found {seen}")));
        }
        CountMatrix::from_rows(cols, per_row)
    }
}

/// Count row of one (already normalized) string against a vocabulary;
/// out-of-vocabulary grams are dropped.
pub fn count_row(s: &str, vocab: &Vocabulary, range: NGramRange) -> Vec<(usize, u32)> {
    let mut row: IndexMap<usize, u32> = IndexMap::new();
    for_each_gram(s, range, |g| {
        if let Some(j) = vocab.id(g) {
            *row.entry(j).or_insert(0) += 1;
        }
    });
    row.into_iter().collect()
}

/// Exact count matrix of the normalized corpus against `vocab`.
pub fn count_matrix<S: AsRef<str> + Sync>(
    corpus: &[S],
    vocab: &Vocabulary,
    range: NGramRange,
) -> Result<CountMatrix> {
    range.validate()?;
    let rows: Vec<Vec<(usize, u32)>> = corpus
        .par_iter()
        .map(|s| count_row(&normalize(s.as_ref()), vocab, range))
        .collect();
    CountMatrix::from_rows(vocab.len(), rows)
}

/// Column of a gram under the hashing trick.
pub fn hashed_column(gram: &str, dim: usize) -> usize {
    (murmur3_32(gram.as_bytes(), 0) as u64 % dim as u64) as usize
}

/// Count matrix with grams bucketed by `murmur3(gram, 0) mod dim`.
pub fn hashed_count_matrix<S: AsRef<str> + Sync>(
    corpus: &[S],
    dim: usize,
    range: NGramRange,
) -> Result<CountMatrix> {
    range.validate()?;
    if dim < 1 {
        return Err(Error::config("hashed dimension must be >= 1"));
    }
    let rows: Vec<Vec<(usize, u32)>> = corpus
        .par_iter()
        .map(|s| {
            let s = normalize(s.as_ref());
            let mut row = Vec::new();
            for_each_gram(&s, range, |g| row.push((hashed_column(g, dim), 1)));
            row
        })
        .collect();
    CountMatrix::from_rows(dim, rows)
}

/// Distinct whitespace-separated words of the normalized corpus, sorted.
pub fn word_vocabulary<S: AsRef<str>>(corpus: &[S]) -> Vec<String> {
    let mut words: HashSet<String> = HashSet::new();
    for s in corpus {
        for w in normalize(s.as_ref()).split_whitespace() {
            words.insert(w.to_owned());
        }
    }
    let mut words: Vec<String> = words.into_iter().collect();
    words.sort_unstable();
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(min: usize, max: usize) -> NGramRange {
        NGramRange::new(min, max).unwrap()
    }

    // Sliding-window oracle, independent of `for_each_gram`.
    fn brute_counts(s: &str, min: usize, max: usize) -> std::collections::BTreeMap<String, u32> {
        let chars: Vec<char> = s.chars().collect();
        let mut out = std::collections::BTreeMap::new();
        if chars.is_empty() {
            return out;
        }
        if chars.len() < min {
            out.insert(s.to_string(), 1);
            return out;
        }
        for n in min..=max {
            if n > chars.len() {
                break;
            }
            for w in chars.windows(n) {
                *out.entry(w.iter().collect::<String>()).or_insert(0) += 1;
            }
        }
        out
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Senior Architect"), "senior architect");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("tiger"), "tiger");
    }

    #[test]
    fn bigrams_of_tiger() {
        let c = char_ngrams("tiger", r(2, 2)).unwrap();
        let got: Vec<_> = c.iter().collect();
        assert_eq!(got, vec![("ti", 1), ("ig", 1), ("ge", 1), ("er", 1)]);
    }

    #[test]
    fn empty_and_repeated() {
        assert!(char_ngrams("", r(2, 4)).unwrap().is_empty());
        let c = char_ngrams("aaa", r(2, 3)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("aa"), 2);
        assert_eq!(c.get("aaa"), 1);
    }

    #[test]
    fn short_string_is_its_own_token() {
        let c = char_ngrams("a", r(2, 4)).unwrap();
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![("a", 1)]);
        // Between min and max only the sizes that fit are produced.
        let c = char_ngrams("abc", r(2, 4)).unwrap();
        assert_eq!(c.total(), 3);
    }

    #[test]
    fn grams_respect_code_points() {
        let c = char_ngrams("日本語", r(2, 2)).unwrap();
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![("日本", 1), ("本語", 1)]);
    }

    #[test]
    fn invalid_ranges() {
        assert!(matches!(char_ngrams("x", NGramRange { min: 0, max: 2 }), Err(Error::Config(_))));
        assert!(matches!(char_ngrams("x", NGramRange { min: 3, max: 2 }), Err(Error::Config(_))));
    }

    #[test]
    fn vocabulary_examples() {
        let v = Vocabulary::build(&["ab"], r(2, 2)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.id("ab"), Some(0));
        let v = Vocabulary::build(&["ab", "bc"], r(2, 2)).unwrap();
        assert_eq!(v.len(), 2);
        assert!(matches!(Vocabulary::build(&["", ""], r(2, 2)), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn vocabulary_of_animals_matches_enumeration() {
        let animals = ["chicken", "eagle", "giraffe", "horse", "leopard", "lion", "tiger", "turtle"];
        let v = Vocabulary::build(&animals, r(2, 4)).unwrap();
        let mut union = std::collections::BTreeSet::new();
        for a in animals {
            union.extend(brute_counts(a, 2, 4).into_keys());
        }
        assert_eq!(v.len(), union.len());
        assert!(union.iter().all(|g| v.id(g).is_some()));
    }

    #[test]
    fn count_matrix_examples() {
        let v = Vocabulary::from_grams(["aa"]).unwrap();
        let m = count_matrix(&["aa"], &v, r(2, 2)).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1]]);
        let m = count_matrix(&["aaa"], &v, r(2, 2)).unwrap();
        assert_eq!(m.to_dense(), vec![vec![2]]);
        let m = count_matrix(&["zz"], &v, r(2, 2)).unwrap();
        assert_eq!(m.rows(), 1);
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.to_dense(), vec![vec![0]]);
    }

    #[test]
    fn hashed_examples() {
        let m = hashed_count_matrix(&["tiger"], 1, r(2, 2)).unwrap();
        assert_eq!(m.to_dense(), vec![vec![4]]);
        let a = hashed_count_matrix(&["tiger", "lion"], 16, r(2, 4)).unwrap();
        let b = hashed_count_matrix(&["tiger", "lion"], 16, r(2, 4)).unwrap();
        assert_eq!(a, b);
        assert!(hashed_count_matrix(&["tiger"], 0, r(2, 2)).is_err());
    }

    #[test]
    fn triplet_round_trip() {
        let m = CountMatrix::from_rows(3, vec![vec![(2, 1), (0, 4)], vec![], vec![(1, 7)]]).unwrap();
        let mut buf = Vec::new();
        m.write_triplets(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 3 3\n0 0 4\n0 2 1\n2 1 7\n");
        assert_eq!(CountMatrix::read_triplets(&buf[..]).unwrap(), m);
        assert!(CountMatrix::read_triplets(&b"1 1 2\n0 0 1\n"[..]).is_err());
    }

    #[test]
    fn vocabulary_file_escapes_control_characters() {
        let v = Vocabulary::from_grams(["a\nb", "c\\d", "e\tf", "plain"]).unwrap();
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 4);
        assert_eq!(Vocabulary::read_from(&buf[..]).unwrap(), v);
    }

    proptest! {
        #[test]
        fn counts_match_sliding_window(s in "[a-c ]{0,12}", min in 1usize..4, extra in 0usize..3) {
            let max = min + extra;
            let c = char_ngrams(&s, r(min, max)).unwrap();
            let oracle = brute_counts(&s, min, max);
            let got: std::collections::BTreeMap<String, u32> =
                c.iter().map(|(g, n)| (g.to_string(), n)).collect();
            prop_assert_eq!(&got, &oracle);
            let len = s.chars().count();
            let expected: u64 = if len == 0 {
                0
            } else if len < min {
                1
            } else {
                (min..=max).map(|n| (len + 1).saturating_sub(n) as u64).sum()
            };
            prop_assert_eq!(c.total(), expected);
        }

        #[test]
        fn hashed_rows_conserve_mass(corpus in proptest::collection::vec("[a-z]{1,10}", 1..8), dim in 1usize..40) {
            let v = Vocabulary::build(&corpus, r(2, 4)).unwrap();
            let exact = count_matrix(&corpus, &v, r(2, 4)).unwrap();
            let hashed = hashed_count_matrix(&corpus, dim, r(2, 4)).unwrap();
            for i in 0..corpus.len() {
                prop_assert_eq!(exact.row(i).total(), hashed.row(i).total());
            }
        }

        #[test]
        fn vocabulary_membership_is_order_insensitive(mut corpus in proptest::collection::vec("[a-e]{1,6}", 1..8)) {
            let v1 = Vocabulary::build(&corpus, r(2, 3)).unwrap();
            corpus.reverse();
            let v2 = Vocabulary::build(&corpus, r(2, 3)).unwrap();
            let s1: HashSet<&str> = v1.iter().collect();
            let s2: HashSet<&str> = v2.iter().collect();
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn count_rows_are_vocab_restricted_grams(train in proptest::collection::vec("[a-d]{1,6}", 1..5), probe in "[a-f]{1,8}") {
            let v = Vocabulary::build(&train, r(2, 3)).unwrap();
            let m = count_matrix(&[probe.clone()], &v, r(2, 3)).unwrap();
            let grams = char_ngrams(&probe, r(2, 3)).unwrap();
            for (g, n) in grams.iter() {
                let expected = if v.id(g).is_some() { n } else { 0 };
                if let Some(j) = v.id(g) {
                    prop_assert_eq!(m.get(0, j), expected);
                }
            }
            prop_assert_eq!(m.row(0).total(), grams.iter().filter(|(g, _)| v.id(g).is_some()).map(|(_, n)| n as u64).sum::<u64>());
        }
    }
}
