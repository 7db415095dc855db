use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth animal categories used by the simulations.
pub const ANIMALS: [&str; 8] = ["chicken", "eagle", "giraffe", "horse", "leopard", "lion", "tiger", "turtle"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticMode {
    Multilabel,
    Typos,
}

impl std::str::FromStr for SyntheticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multilabel" | "multi-label" => Ok(SyntheticMode::Multilabel),
            "typos" => Ok(SyntheticMode::Typos),
            _ => Err(Error::config(format!("unknown simulation mode {s:?} (multilabel | typos)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub base_labels: Vec<String>,
    pub mode: SyntheticMode,
    pub n: usize,
    /// Rate of the Poisson number of extra labels per multi-label entry.
    pub poisson_rate: f64,
    pub typo_rate: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The eight animals, λ = 1 and a 10% typo rate.
    pub fn new(mode: SyntheticMode, n: usize, seed: u64) -> Self {
        SyntheticSpec {
            base_labels: ANIMALS.iter().map(|s| s.to_string()).collect(),
            mode,
            n,
            poisson_rate: 1.0,
            typo_rate: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_labels.is_empty() {
            return Err(Error::config("simulation needs at least one base label"));
        }
        if self.n < 1 {
            return Err(Error::config("simulation needs n >= 1"));
        }
        if !(self.poisson_rate >= 0.0 && self.poisson_rate.is_finite()) {
            return Err(Error::config(format!("poisson rate must be >= 0, got {}", self.poisson_rate)));
        }
        if !(0.0..=1.0).contains(&self.typo_rate) {
            return Err(Error::config(format!("typo rate must lie in [0, 1], got {}", self.typo_rate)));
        }
        Ok(())
    }
}

/// Each entry joins `k + 2` labels drawn with replacement, `k ~ Poisson(λ)`.
pub fn gen_multilabel(spec: &SyntheticSpec) -> Result<Vec<String>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let poisson = if spec.poisson_rate > 0.0 {
        Some(Poisson::new(spec.poisson_rate).map_err(|e| Error::config(e.to_string()))?)
    } else {
        None
    };
    let labels = &spec.base_labels;
    Ok((0..spec.n)
        .map(|_| {
            let extra = poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
            (0..extra + 2)
                .map(|_| labels[rng.random_range(0..labels.len())].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect())
}

/// Single character edit; positions index Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Typo {
    Delete { at: usize },
    /// Exchanges the characters at `at` and `at + 1`.
    Swap { at: usize },
    Insert { at: usize, ch: char },
    Replace { at: usize, ch: char },
}

pub fn apply_typo(s: &str, typo: Typo) -> Result<String> {
    let mut chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    let out_of_range = |at: usize| Error::config(format!("typo position {at} out of range for {s:?}"));
    match typo {
        Typo::Delete { at } if at < n => {
            chars.remove(at);
        }
        Typo::Swap { at } if at + 1 < n => chars.swap(at, at + 1),
        Typo::Insert { at, ch } if at <= n => chars.insert(at, ch),
        Typo::Replace { at, ch } if at < n => chars[at] = ch,
        Typo::Delete { at } | Typo::Swap { at } | Typo::Insert { at, .. } | Typo::Replace { at, .. } => {
            return Err(out_of_range(at))
        }
    }
    Ok(chars.into_iter().collect())
}

fn random_lowercase<R: Rng>(rng: &mut R) -> char {
    (b'a' + rng.random_range(0..26u8)) as char
}

/// A random edit that changes `s` and never empties it.
fn random_typo<R: Rng>(s: &str, rng: &mut R) -> Typo {
    let chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    loop {
        let typo = match rng.random_range(0..4) {
            0 if n >= 2 => Typo::Delete { at: rng.random_range(0..n) },
            1 if n >= 2 => Typo::Swap { at: rng.random_range(0..n - 1) },
            2 => Typo::Insert {
                at: rng.random_range(0..=n),
                ch: random_lowercase(rng),
            },
            3 if n >= 1 => Typo::Replace {
                at: rng.random_range(0..n),
                ch: random_lowercase(rng),
            },
            _ => continue,
        };
        let changes = match typo {
            Typo::Swap { at } => chars[at] != chars[at + 1],
            Typo::Replace { at, ch } => chars[at] != ch,
            _ => true,
        };
        if changes {
            return typo;
        }
    }
}

/// Verbatim labels drawn uniformly; each is corrupted by one random edit
/// with probability `typo_rate`.
pub fn gen_typos(spec: &SyntheticSpec) -> Result<Vec<String>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels = &spec.base_labels;
    (0..spec.n)
        .map(|_| {
            let label = labels[rng.random_range(0..labels.len())].as_str();
            if rng.random_bool(spec.typo_rate) {
                let typo = random_typo(label, &mut rng);
                apply_typo(label, typo)
            } else {
                Ok(label.to_owned())
            }
        })
        .collect()
}

pub fn generate(spec: &SyntheticSpec) -> Result<Vec<String>> {
    match spec.mode {
        SyntheticMode::Multilabel => gen_multilabel(spec),
        SyntheticMode::Typos => gen_typos(spec),
    }
}
