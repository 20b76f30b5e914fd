//! Rank-metric (partial) unit memory convolutional codes built from Gabidulin
//! block codes.
//!
//! The crate is `no_std` (with `alloc`) and covers finite-field arithmetic,
//! rank-metric utilities, Gabidulin codes with an error-erasure decoder, the
//! (P)UM code constructions, the bounded row distance sequence decoder and
//! the lifting/operator-channel machinery for multi-shot network coding.
//! File formats and the command line live in the companion `rankconv` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod brd;
pub mod error;
pub mod field;
pub mod gabidulin;
pub mod matrix;
pub mod network;
pub mod pum;
pub mod rank;

pub use error::Error;
pub use field::{BaseField, ExtElem, ExtField, Field, FieldParams, LinearizedPoly};
pub use matrix::{BaseMatrix, Matrix};
