//! Model directory layout:
//!
//! * `vocab.txt`: one n-gram per line, line number = column id;
//! * `topics.mat`: magic `GPF1`, little-endian `u32 d`, `u32 m`, then
//!   `d * m` little-endian `f64` in row-major order;
//! * `params.json`: hyperparameters and fit metadata;
//! * `cache.tsv`: optional, `string TAB x_0 TAB ... x_{d-1}` per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::model::{GammaPoissonModel, ModelMetadata};
use super::params::GammaPoissonParams;
use crate::error::{Error, Result};
use crate::textprep::{escape_line, unescape_line, Vocabulary};
use crate::Scalar;

pub const TOPICS_MAGIC: &[u8; 4] = b"GPF1";

const VOCAB_FILE: &str = "vocab.txt";
const TOPICS_FILE: &str = "topics.mat";
const PARAMS_FILE: &str = "params.json";
const CACHE_FILE: &str = "cache.tsv";

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ParamsFile<T> {
    #[serde(flatten)]
    params: GammaPoissonParams<T>,
    #[serde(default)]
    metadata: ModelMetadata,
}

pub fn write_topics<T: Scalar, W: Write>(topics: &Array2<T>, mut w: W) -> Result<()> {
    let (d, m) = topics.dim();
    let dims = |n: usize| {
        u32::try_from(n).map_err(|_| Error::config(format!("dimension {n} does not fit the GPF1 header")))
    };
    w.write_all(TOPICS_MAGIC)?;
    w.write_all(&dims(d)?.to_le_bytes())?;
    w.write_all(&dims(m)?.to_le_bytes())?;
    for v in topics.iter() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_topics<T: Scalar, R: Read>(mut r: R) -> Result<Array2<T>> {
    let bad = |detail: &str| Error::Format {
        what: "topics.mat",
        line: 0,
        detail: detail.to_owned(),
    };
    let mut header = [0u8; 12];
    r.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
    if &header[..4] != TOPICS_MAGIC {
        return Err(bad("bad magic"));
    }
    let d = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != d * m * 8 {
        return Err(bad("payload size does not match header"));
    }
    let values: Vec<T> = body
        .chunks_exact(8)
        .map(|c| T::from_f64_lossy(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    Array2::from_shape_vec((d, m), values).map_err(|e| bad(&e.to_string()))
}

impl<T: Scalar> GammaPoissonModel<T> {
    /// Writes the model directory, creating it if needed. Cache rows are
    /// sorted by key so identical models give identical files.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.vocab.write_to(BufWriter::new(File::create(dir.join(VOCAB_FILE))?))?;
        write_topics(&self.topics, BufWriter::new(File::create(dir.join(TOPICS_FILE))?))?;
        let file = ParamsFile {
            params: self.params.clone(),
            metadata: self.metadata.clone(),
        };
        let mut json = serde_json::to_string_pretty(&file)?;
        json.push('\n');
        std::fs::write(dir.join(PARAMS_FILE), json)?;

        let mut keys: Vec<&String> = self.cache.keys().collect();
        keys.sort_unstable();
        let mut w = BufWriter::new(File::create(dir.join(CACHE_FILE))?);
        for key in keys {
            w.write_all(escape_line(key).as_bytes())?;
            for v in &self.cache[key] {
                write!(w, "\t{v}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a model directory. Accumulators are not persisted and restart
    /// empty; a missing `cache.tsv` gives an empty cache.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let vocab = Vocabulary::read_from(BufReader::new(File::open(dir.join(VOCAB_FILE))?))?;
        let topics: Array2<T> = read_topics(BufReader::new(File::open(dir.join(TOPICS_FILE))?))?;
        let file: ParamsFile<T> = serde_json::from_str(&std::fs::read_to_string(dir.join(PARAMS_FILE))?)?;
        let mut model = GammaPoissonModel::from_parts(file.params, vocab, topics)?;
        model.metadata = file.metadata;

        let cache_path = dir.join(CACHE_FILE);
        if cache_path.exists() {
            let d = model.params.d;
            for (lineno, line) in BufReader::new(File::open(cache_path)?).lines().enumerate() {
                let line = line?;
                let bad = |detail: String| Error::Format {
                    what: "cache.tsv",
                    line: lineno + 1,
                    detail,
                };
                let mut fields = line.split('\t');
                let key = unescape_line(fields.next().unwrap_or_default()).map_err(bad)?;
                let values: Vec<T> = fields
                    .map(|f| f.parse::<T>().map_err(|_| bad(format!("invalid number {f:?}"))))
                    .collect::<Result<_>>()?;
                if values.len() != d {
                    return Err(bad(format!("expected {d} activations, found {}", values.len())));
                }
                model.cache.insert(key, values);
            }
        }
        Ok(model)
    }
}
