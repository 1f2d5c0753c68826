//! Generator for formal-language recognition benchmarks.
//!
//! Regular languages are sampled exactly from the length-conditioned
//! distribution of a probabilistic DFA ([`sampler`]); other languages use
//! hand-written samplers ([`languages`]). Negatives come from random strings
//! and random edits of positives ([`perturb`]), filtered by membership.
//! [`editdist`] computes the edit distance from a string to a regular
//! language, and [`dataset`] assembles and serializes the standard splits.

pub mod automata;
pub mod dataset;
pub mod editdist;
pub mod error;
pub mod languages;
pub mod perturb;
pub mod rng;
pub mod sampler;
pub mod semiring;

pub use automata::{Alphabet, NextSet, PartialDfa, Symbol, Word};
pub use error::{Error, Result};
pub use languages::{by_name, registry, Class, Language};
