//! Uniform fit/transform interface over every encoder, shared by the CLI and
//! host-language bindings.

use serde::{Deserialize, Serialize};

use crate::baselines::{self, PrototypeSet};
use crate::error::{Error, Result};
use crate::gamma_poisson::{GammaPoissonModel, GammaPoissonParams};
use crate::minhash::MinHashEncoder;
use crate::textprep::{self, NGramRange};
use crate::{EncodedMatrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderKind {
    Minhash,
    GammaPoisson,
    Onehot,
    Similarity,
}

impl EncoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncoderKind::Minhash => "minhash",
            EncoderKind::GammaPoisson => "gamma-poisson",
            EncoderKind::Onehot => "onehot",
            EncoderKind::Similarity => "similarity",
        }
    }

    /// Prefix of the positional column names.
    pub fn column_prefix(&self) -> &'static str {
        match self {
            EncoderKind::Minhash => "mh",
            EncoderKind::GammaPoisson => "gp",
            EncoderKind::Onehot => "oh",
            EncoderKind::Similarity => "sim",
        }
    }
}

impl std::fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minhash" | "min-hash" => Ok(EncoderKind::Minhash),
            "gamma-poisson" | "gamma_poisson" => Ok(EncoderKind::GammaPoisson),
            "onehot" | "one-hot" => Ok(EncoderKind::Onehot),
            "similarity" => Ok(EncoderKind::Similarity),
            _ => Err(Error::config(format!(
                "unknown encoder {s:?} (minhash | gamma-poisson | onehot | similarity)"
            ))),
        }
    }
}

/// Estimator-style encoder over a column of strings.
pub trait StringEncoder<T: Scalar>: Send + Sync {
    fn kind(&self) -> EncoderKind;

    fn id(&self) -> &'static str {
        self.kind().as_str()
    }

    fn is_fitted(&self) -> bool;

    fn fit(&mut self, column: &[String]) -> Result<()>;

    fn transform(&self, column: &[String]) -> Result<EncodedMatrix<T>>;

    fn fit_transform(&mut self, column: &[String]) -> Result<EncodedMatrix<T>> {
        self.fit(column)?;
        self.transform(column)
    }

    /// One label per output column; `top_k` words joined by `", "` for
    /// gamma-poisson, positional names otherwise.
    fn feature_names(&self, top_k: usize) -> Result<Vec<String>>;
}

fn check_column(column: &[String]) -> Result<()> {
    if column.is_empty() {
        return Err(Error::config("cannot fit on an empty column"));
    }
    Ok(())
}

impl<T: Scalar> StringEncoder<T> for MinHashEncoder {
    fn kind(&self) -> EncoderKind {
        EncoderKind::Minhash
    }

    fn is_fitted(&self) -> bool {
        true
    }

    fn fit(&mut self, column: &[String]) -> Result<()> {
        check_column(column)
    }

    fn transform(&self, column: &[String]) -> Result<EncodedMatrix<T>> {
        MinHashEncoder::transform(self, column)
    }

    fn feature_names(&self, _top_k: usize) -> Result<Vec<String>> {
        Ok(MinHashEncoder::feature_names(self))
    }
}

#[derive(Debug, Clone)]
pub struct GammaPoissonEncoder<T> {
    params: GammaPoissonParams<T>,
    model: Option<GammaPoissonModel<T>>,
}

impl<T: Scalar> GammaPoissonEncoder<T> {
    pub fn new(params: GammaPoissonParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(GammaPoissonEncoder { params, model: None })
    }

    pub fn from_model(model: GammaPoissonModel<T>) -> Self {
        GammaPoissonEncoder {
            params: model.params().clone(),
            model: Some(model),
        }
    }

    pub fn model(&self) -> Option<&GammaPoissonModel<T>> {
        self.model.as_ref()
    }

    pub fn into_model(self) -> Option<GammaPoissonModel<T>> {
        self.model
    }
}

impl<T: Scalar> StringEncoder<T> for GammaPoissonEncoder<T> {
    fn kind(&self) -> EncoderKind {
        EncoderKind::GammaPoisson
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn fit(&mut self, column: &[String]) -> Result<()> {
        check_column(column)?;
        self.model = Some(GammaPoissonModel::fit(column, self.params.clone())?);
        Ok(())
    }

    fn transform(&self, column: &[String]) -> Result<EncodedMatrix<T>> {
        self.model.as_ref().ok_or(Error::NotFitted)?.transform(column)
    }

    fn feature_names(&self, top_k: usize) -> Result<Vec<String>> {
        let names = self.model.as_ref().ok_or(Error::NotFitted)?.feature_names(top_k)?;
        Ok(names.into_iter().map(|words| words.join(", ")).collect())
    }
}

/// One column per distinct fitted value, sorted.
#[derive(Debug, Clone, Default)]
pub struct OneHotEncoder {
    categories: Option<PrototypeSet>,
}

impl OneHotEncoder {
    pub fn new() -> Self {
        OneHotEncoder::default()
    }

    pub fn with_categories(categories: PrototypeSet) -> Self {
        OneHotEncoder {
            categories: Some(categories),
        }
    }

    pub fn categories(&self) -> Option<&PrototypeSet> {
        self.categories.as_ref()
    }
}

fn sorted_distinct(column: &[String]) -> Vec<String> {
    let mut values: Vec<String> = column.iter().map(|s| textprep::normalize(s)).collect();
    values.sort_unstable();
    values.dedup();
    values
}

impl<T: Scalar> StringEncoder<T> for OneHotEncoder {
    fn kind(&self) -> EncoderKind {
        EncoderKind::Onehot
    }

    fn is_fitted(&self) -> bool {
        self.categories.is_some()
    }

    fn fit(&mut self, column: &[String]) -> Result<()> {
        check_column(column)?;
        self.categories = Some(PrototypeSet::new(sorted_distinct(column))?);
        Ok(())
    }

    fn transform(&self, column: &[String]) -> Result<EncodedMatrix<T>> {
        let categories = self.categories.as_ref().ok_or(Error::NotFitted)?;
        let normalized: Vec<String> = column.iter().map(|s| textprep::normalize(s)).collect();
        Ok(baselines::onehot_encode(&normalized, categories))
    }

    fn feature_names(&self, _top_k: usize) -> Result<Vec<String>> {
        let categories = self.categories.as_ref().ok_or(Error::NotFitted)?;
        Ok(categories.as_slice().iter().map(|c| format!("oh_{c}")).collect())
    }
}

/// Similarity to the `k` most frequent fitted values.
#[derive(Debug, Clone)]
pub struct SimilarityEncoder {
    k: usize,
    range: NGramRange,
    prototypes: Option<PrototypeSet>,
}

impl SimilarityEncoder {
    pub fn new(k: usize, range: NGramRange) -> Result<Self> {
        if k < 1 {
            return Err(Error::config("similarity encoding needs at least one prototype"));
        }
        range.validate()?;
        Ok(SimilarityEncoder {
            k,
            range,
            prototypes: None,
        })
    }

    pub fn prototypes(&self) -> Option<&PrototypeSet> {
        self.prototypes.as_ref()
    }
}

impl<T: Scalar> StringEncoder<T> for SimilarityEncoder {
    fn kind(&self) -> EncoderKind {
        EncoderKind::Similarity
    }

    fn is_fitted(&self) -> bool {
        self.prototypes.is_some()
    }

    fn fit(&mut self, column: &[String]) -> Result<()> {
        check_column(column)?;
        let normalized: Vec<String> = column.iter().map(|s| textprep::normalize(s)).collect();
        self.prototypes = Some(baselines::select_prototypes_frequency(&normalized, self.k)?);
        Ok(())
    }

    fn transform(&self, column: &[String]) -> Result<EncodedMatrix<T>> {
        let prototypes = self.prototypes.as_ref().ok_or(Error::NotFitted)?;
        baselines::similarity_encode(column, prototypes, self.range)
    }

    fn feature_names(&self, _top_k: usize) -> Result<Vec<String>> {
        let prototypes = self.prototypes.as_ref().ok_or(Error::NotFitted)?;
        Ok(prototypes.as_slice().iter().map(|p| format!("sim_{p}")).collect())
    }
}

/// Everything needed to build an unfitted encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EncoderSpec<T> {
    pub kind: EncoderKind,
    /// Output dimension; ignored by one-hot, which uses the fitted categories.
    pub d: usize,
    pub range: NGramRange,
    /// Gamma-poisson settings; `d`, the n-gram range and the seed are taken
    /// from the fields above.
    pub gamma_poisson: GammaPoissonParams<T>,
    pub seed: u64,
}

impl<T: Scalar> EncoderSpec<T> {
    pub fn new(kind: EncoderKind, d: usize) -> Self {
        EncoderSpec {
            kind,
            d,
            range: NGramRange::default(),
            gamma_poisson: GammaPoissonParams::new(d),
            seed: 0,
        }
    }

    pub fn gamma_poisson_params(&self) -> GammaPoissonParams<T> {
        let mut p = self.gamma_poisson.clone();
        p.d = self.d;
        p.n_min = self.range.min;
        p.n_max = self.range.max;
        p.rng_seed = self.seed;
        p
    }

    pub fn build(&self) -> Result<Box<dyn StringEncoder<T>>> {
        self.range.validate()?;
        if self.d < 1 {
            return Err(Error::config("encoder dimension must be >= 1"));
        }
        Ok(match self.kind {
            EncoderKind::Minhash => Box::new(MinHashEncoder::new(self.d, self.range)?),
            EncoderKind::GammaPoisson => Box::new(GammaPoissonEncoder::new(self.gamma_poisson_params())?),
            EncoderKind::Onehot => Box::new(OneHotEncoder::new()),
            EncoderKind::Similarity => Box::new(SimilarityEncoder::new(self.d, self.range)?),
        })
    }
}
