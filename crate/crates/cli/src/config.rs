//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use stringcat_core::encoder::{EncoderKind, EncoderSpec};
use stringcat_core::evaluation::{FprConfig, RatioConvention, SyntheticMode, SyntheticSpec, ANIMALS};
use stringcat_core::gamma_poisson::{GammaPoissonParams, PerTopic};
use stringcat_core::NGramRange;

use crate::error::{CliError, CliResult};

pub const DEFAULT_DIM: usize = 30;
pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_EPSILONS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Binary,
}

/// Flags shared by every subcommand. All are optional so that unset flags
/// fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Input CSV file with a header row.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Column to encode, by header name or zero-based index.
    #[arg(long, global = true)]
    pub column: Option<String>,
    /// minhash, gamma-poisson, onehot or similarity.
    #[arg(long, global = true)]
    pub encoder: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub ngram_min: Option<usize>,
    #[arg(long, global = true)]
    pub ngram_max: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Copy the other input columns in front of the encoded ones.
    #[arg(long, global = true)]
    pub passthrough: bool,
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Gamma-poisson model directory.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<usize>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub eps_inner: Option<f64>,
    #[arg(long, global = true)]
    pub max_epochs: Option<usize>,

    /// multilabel or typos.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Number of simulated rows.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub poisson_rate: Option<f64>,
    #[arg(long, global = true)]
    pub typo_rate: Option<f64>,
    /// Comma-separated base labels for simulate and recover.
    #[arg(long, global = true, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,

    /// Comma-separated probe words for inclusion-bench.
    #[arg(long, global = true, value_delimiter = ',')]
    pub probes: Option<Vec<String>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// gram-count or inverse-max-words.
    #[arg(long, global = true)]
    pub ratio_convention: Option<String>,
    #[arg(long, global = true)]
    pub max_entry_grams: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub encoder: Option<String>,
    pub dim: Option<usize>,
    pub ngram_min: Option<usize>,
    pub ngram_max: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub passthrough: Option<bool>,
    pub top_k: Option<usize>,
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub gamma_poisson: GammaPoissonSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub inclusion: InclusionSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaPoissonSection {
    /// A number, or one number per topic.
    pub alpha: Option<PerTopic<f64>>,
    pub beta: Option<PerTopic<f64>>,
    pub rho: Option<f64>,
    pub q: Option<usize>,
    pub eta: Option<f64>,
    pub eps_inner: Option<f64>,
    pub max_epochs: Option<usize>,
    pub max_inner_iter: Option<usize>,
    pub hashed_dim: Option<usize>,
    pub kmeans_restarts: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub mode: Option<String>,
    pub n: Option<usize>,
    pub poisson_rate: Option<f64>,
    pub typo_rate: Option<f64>,
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionSection {
    pub probes: Option<Vec<String>>,
    pub epsilons: Option<Vec<f64>>,
    pub ratio_convention: Option<String>,
    pub max_entry_grams: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("io", format!("cannot read config {}: {e}", path.display())))?;
        Ok(toml::from_str(&text)?)
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub encoder: EncoderKind,
    pub dim: usize,
    pub range: NGramRange,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub passthrough: bool,
    pub top_k: usize,
    pub model: Option<PathBuf>,
    pub gamma_poisson: GammaPoissonParams<f64>,
    pub simulate: SyntheticSpec,
    pub labels: Vec<String>,
    pub probes: Vec<String>,
    pub epsilons: Vec<f64>,
    pub fpr: FprConfig,
}

fn parse<T: std::str::FromStr>(s: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| CliError::config(e.to_string()))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        RunConfig::layer(args, file)
    }

    pub fn layer(a: &CommonArgs, f: FileConfig) -> CliResult<Self> {
        let encoder = match a.encoder.as_deref().or(f.encoder.as_deref()) {
            Some(s) => parse(s)?,
            None => EncoderKind::Minhash,
        };
        let dim = a.dim.or(f.dim).unwrap_or(DEFAULT_DIM);
        if dim < 1 {
            return Err(CliError::config("--dim must be >= 1"));
        }
        let range = NGramRange::new(
            a.ngram_min.or(f.ngram_min).unwrap_or(2),
            a.ngram_max.or(f.ngram_max).unwrap_or(4),
        )?;
        let seed = a.seed.or(f.seed).unwrap_or(0);
        let top_k = a.top_k.or(f.top_k).unwrap_or(DEFAULT_TOP_K);
        if top_k < 1 {
            return Err(CliError::config("--top-k must be >= 1"));
        }

        let g = &f.gamma_poisson;
        let mut gp = GammaPoissonParams::new(dim);
        if let Some(v) = a.alpha.map(PerTopic::Shared).or_else(|| g.alpha.clone()) {
            gp.alpha = v;
        }
        if let Some(v) = a.beta.map(PerTopic::Shared).or_else(|| g.beta.clone()) {
            gp.beta = v;
        }
        gp.rho = a.rho.or(g.rho).unwrap_or(gp.rho);
        gp.q = a.q.or(g.q).unwrap_or(gp.q);
        gp.eta = a.eta.or(g.eta).unwrap_or(gp.eta);
        gp.eps_inner = a.eps_inner.or(g.eps_inner).unwrap_or(gp.eps_inner);
        gp.max_epochs = a.max_epochs.or(g.max_epochs).unwrap_or(gp.max_epochs);
        gp.max_inner_iter = g.max_inner_iter.unwrap_or(gp.max_inner_iter);
        gp.hashed_dim = g.hashed_dim.unwrap_or(gp.hashed_dim);
        gp.kmeans_restarts = g.kmeans_restarts.unwrap_or(gp.kmeans_restarts);
        let mut spec = EncoderSpec::new(encoder, dim);
        spec.range = range;
        spec.seed = seed;
        spec.gamma_poisson = gp;
        let gamma_poisson = spec.gamma_poisson_params();
        gamma_poisson.validate()?;

        let s = &f.simulate;
        let mode = match a.mode.as_deref().or(s.mode.as_deref()) {
            Some(m) => parse(m)?,
            None => SyntheticMode::Multilabel,
        };
        let labels: Vec<String> = a
            .labels
            .clone()
            .or_else(|| s.labels.clone())
            .unwrap_or_else(|| ANIMALS.iter().map(|s| s.to_string()).collect());
        let mut simulate = SyntheticSpec::new(mode, a.n.or(s.n).unwrap_or(1000), seed);
        simulate.base_labels = labels.clone();
        simulate.poisson_rate = a.poisson_rate.or(s.poisson_rate).unwrap_or(simulate.poisson_rate);
        simulate.typo_rate = a.typo_rate.or(s.typo_rate).unwrap_or(simulate.typo_rate);

        let inc = &f.inclusion;
        let mut fpr = FprConfig {
            range,
            ..FprConfig::default()
        };
        if let Some(c) = a.ratio_convention.as_deref().or(inc.ratio_convention.as_deref()) {
            fpr.convention = parse::<RatioConvention>(c)?;
        }
        fpr.max_entry_grams = a.max_entry_grams.or(inc.max_entry_grams);

        Ok(RunConfig {
            input: a.input.clone().or(f.input),
            column: a.column.clone().or(f.column),
            encoder,
            dim,
            range,
            seed,
            output: a.output.clone().or(f.output),
            format: a.format.or(f.format).unwrap_or(OutputFormat::Csv),
            passthrough: a.passthrough || f.passthrough.unwrap_or(false),
            top_k,
            model: a.model.clone().or(f.model),
            gamma_poisson,
            simulate,
            labels,
            probes: a.probes.clone().or_else(|| inc.probes.clone()).unwrap_or_default(),
            epsilons: a
                .epsilons
                .clone()
                .or_else(|| inc.epsilons.clone())
                .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
            fpr,
        })
    }

    pub fn encoder_spec(&self) -> EncoderSpec<f64> {
        let mut spec = EncoderSpec::new(self.encoder, self.dim);
        spec.range = self.range;
        spec.seed = self.seed;
        spec.gamma_poisson = self.gamma_poisson.clone();
        spec
    }

    pub fn require_input(&self) -> CliResult<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::config("--input is required for this command"))
    }

    pub fn require_column(&self) -> CliResult<&str> {
        self.column
            .as_deref()
            .ok_or_else(|| CliError::config("--column is required for this command"))
    }

    pub fn require_model(&self) -> CliResult<&Path> {
        self.model
            .as_deref()
            .ok_or_else(|| CliError::config("--model is required for this command"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> FileConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn defaults() {
        let c = RunConfig::layer(&CommonArgs::default(), FileConfig::default()).unwrap();
        assert_eq!(c.encoder, EncoderKind::Minhash);
        assert_eq!(c.dim, DEFAULT_DIM);
        assert_eq!((c.range.min, c.range.max), (2, 4));
        assert_eq!(c.gamma_poisson.rho, 0.95);
        assert_eq!(c.labels.len(), 8);
        assert_eq!(c.format, OutputFormat::Csv);
    }

    #[test]
    fn flags_override_file() {
        let f = file("dim = 12\nencoder = \"gamma-poisson\"\n[gamma_poisson]\nrho = 0.9\nq = 64\n");
        let a = CommonArgs {
            dim: Some(5),
            rho: Some(0.8),
            ..CommonArgs::default()
        };
        let c = RunConfig::layer(&a, f).unwrap();
        assert_eq!(c.dim, 5);
        assert_eq!(c.gamma_poisson.d, 5);
        assert_eq!(c.encoder, EncoderKind::GammaPoisson);
        assert_eq!(c.gamma_poisson.rho, 0.8);
        assert_eq!(c.gamma_poisson.q, 64);
    }

    #[test]
    fn per_topic_alpha_and_sections() {
        let f = file(
            "dim = 2\nseed = 4\n[gamma_poisson]\nalpha = [1.5, 2.0]\n\
             [simulate]\nmode = \"typos\"\nn = 50\n[inclusion]\nratio_convention = \"inverse-max-words\"\n",
        );
        let c = RunConfig::layer(&CommonArgs::default(), f).unwrap();
        assert_eq!(c.gamma_poisson.alpha, PerTopic::PerTopic(vec![1.5, 2.0]));
        assert_eq!(c.gamma_poisson.rng_seed, 4);
        assert_eq!(c.simulate.mode, SyntheticMode::Typos);
        assert_eq!(c.simulate.n, 50);
        assert_eq!(c.simulate.seed, 4);
        assert_eq!(c.fpr.convention, RatioConvention::InverseMaxWords);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(toml::from_str::<FileConfig>("dimm = 3").is_err());
        let bad = |a: CommonArgs| RunConfig::layer(&a, FileConfig::default()).is_err();
        assert!(bad(CommonArgs { dim: Some(0), ..Default::default() }));
        assert!(bad(CommonArgs { encoder: Some("pca".into()), ..Default::default() }));
        assert!(bad(CommonArgs { rho: Some(1.5), ..Default::default() }));
        assert!(bad(CommonArgs { ngram_min: Some(5), ..Default::default() }));
    }
}
