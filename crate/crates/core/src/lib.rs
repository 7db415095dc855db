//! Encoders for high-cardinality string categories.
//!
//! Two encoders are provided, both built on character n-grams:
//!
//! * [`minhash`]: a stateless min-hash signature encoder whose components turn
//!   substring inclusion into component-wise inequalities.
//! * [`gamma_poisson`]: an online Gamma-Poisson factorization of n-gram counts
//!   whose activations are non-negative, sparse and interpretable through
//!   inferred feature names.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix the common `f64` choice.

pub mod baselines;
pub mod encoder;
pub mod error;
pub mod evaluation;
pub mod gamma_poisson;
pub mod hashing;
pub mod matrix_io;
pub mod minhash;
pub mod textprep;

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use error::{Error, Result};
pub use textprep::{NGramRange, Vocabulary};

/// Floating-point type the encoders and solvers are generic over.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + std::str::FromStr
    + Serialize
    + DeserializeOwned
    + ndarray::ScalarOperand
    + 'static
{
    /// Lossy conversion from `f64`; exact for `f64` itself.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite float conversion")
    }

    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("float conversion")
    }

    fn from_count(c: u32) -> Self {
        <Self as FromPrimitive>::from_u32(c).expect("count conversion")
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("size conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dense row-major `n × d` feature matrix produced by an encoder.
pub type EncodedMatrix<T> = ndarray::Array2<T>;

pub type Encoded = EncodedMatrix<f64>;
pub type GammaPoissonModel = gamma_poisson::GammaPoissonModel<f64>;
pub type GammaPoissonModel32 = gamma_poisson::GammaPoissonModel<f32>;
pub type GammaPoissonParams = gamma_poisson::GammaPoissonParams<f64>;
pub type MinHashEncoder = minhash::MinHashEncoder;
pub type RecoveryReport = evaluation::RecoveryReport<f64>;
