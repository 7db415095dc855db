//! Category recovery (NMI), synthetic corpora, relative scores and the
//! inclusion false-positive experiment.

mod inclusion;
mod nmi;
mod score;
mod synthetic;

pub use inclusion::{fpr_experiment, FprConfig, FprRow, RatioConvention};
pub use nmi::{nmi_matrix, recover_nmi, RecoveryReport};
pub use score::relative_score;
pub use synthetic::{apply_typo, gen_multilabel, gen_typos, generate, SyntheticMode, SyntheticSpec, Typo, ANIMALS};
