//! Exact q-series engine for verifying identities between tenth-order mock
//! theta functions.
//!
//! Layers, bottom up: [`exactnum`] (Eisenstein integers), [`qseries`]
//! (truncated Puiseux series), [`laurent`] (Laurent polynomials in `x`, `y`
//! with certified windows), [`special`] (every named series), [`catalog`]
//! (the registry of identities and the verifier) and [`dsl`] (a small
//! expression language for user identities).

pub mod catalog;
pub mod dsl;
pub mod error;
pub mod exactnum;
pub mod laurent;
pub mod qseries;
pub mod special;

pub use error::{Error, Result};
pub use exactnum::Eisenstein;
pub use qseries::{Mismatch, QSeries};
