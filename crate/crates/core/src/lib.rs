//! revft-core: a desk-scale laboratory for reversible adapter fine-tuning.
//!
//! A minimal transformer with hand-written differentiation, three reversible
//! adapter constructions whose backward pass reconstructs activations instead
//! of caching them, and analyzers that verify invertibility, gradient
//! equivalence, numerical-stability trends and O(1) activation-memory scaling.
//!
//! All numeric code is generic over [`Scalar`] (f32 or f64); pick a concrete
//! precision with the aliases below or dispatch at runtime on [`Precision`].

pub mod analysis;
pub mod blocks;
pub mod checkpoint;
pub mod error;
pub mod model;
pub mod peft;
pub mod reversible;
pub mod rng;
pub mod scalar;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use rng::Rng;
pub use scalar::{Precision, Scalar};
pub use tensor::Tensor;

/// Single-precision tensor.
pub type Tensor32 = Tensor<f32>;
/// Double-precision tensor.
pub type Tensor64 = Tensor<f64>;




