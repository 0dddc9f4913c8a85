//! Maximal biases of two-player binary games through their 2×2 anticommutation
//! representations.
//!
//! Every polynomial in two order-two generators per player reduces to the
//! basis `{1, u, v, uv}` once `uv + vu = 2s` is fixed, and every irreducible
//! pair of such generators is realized on `C²`. The norm of a bias polynomial
//! is therefore the supremum over `(s, t) ∈ [-1, 1]²` of the norm of an
//! explicit 4×4 matrix.

#![allow(clippy::needless_range_loop)]

pub mod convert;
pub mod error;
pub mod matrix;
pub mod optimize;
pub mod oracle;
pub mod output;
pub mod realize;
pub mod spectral;
pub mod state;
pub mod tilted;
pub mod word;

pub use error::{Error, ErrorClass, Result};
pub use optimize::{game_norm, optimize, OptimizationResult, OptimizeConfig};
pub use realize::{assemble, AnticommPoint, GameMatrix};
pub use word::{reduce_polynomial, reduce_word, BiasPolynomial, Term, Word};
