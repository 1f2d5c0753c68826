//! The benchmark languages.
//!
//! Each language provides membership, length-constrained positive sampling
//! and next-symbol sets. Regular languages carry a hand-built DFA and are
//! sampled exactly through [`crate::sampler`]; the others use dedicated
//! samplers.

mod arith;
mod majority;
mod regular;
mod stack;
mod strings;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::automata::{Alphabet, NextSet, PartialDfa, Symbol, Word};
use crate::error::{Error, Result};

pub use arith::Arithmetic;
pub use majority::Majority;
pub use regular::RegularLanguage;
pub use stack::StackManipulation;
pub use strings::{Marked, MissingDuplicate, UnmarkedReversal};

/// Position in the Chomsky hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Regular,
    DeterministicContextFree,
    ContextFree,
    ContextSensitive,
}

impl Class {
    pub fn code(&self) -> &'static str {
        match self {
            Class::Regular => "R",
            Class::DeterministicContextFree => "DCF",
            Class::ContextFree => "CF",
            Class::ContextSensitive => "CS",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A formal language with the operations the generator needs.
pub trait Language: Send + Sync {
    /// Registry key, kebab-case.
    fn name(&self) -> &'static str;
    fn class(&self) -> Class;
    fn alphabet(&self) -> &Alphabet;
    fn contains(&self, w: &[Symbol]) -> bool;

    /// A positive example with length in `[min, max]`, following the
    /// language's own sampling distribution.
    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word>;

    /// For every prefix `w[..t]`, `t = 0..=|w|`, the symbols that can follow
    /// it in some member, plus EOS when the prefix itself is a member.
    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet>;

    fn dfa(&self) -> Option<&PartialDfa> {
        None
    }

    /// Precomputes whatever sampling at lengths up to `max` needs.
    fn prepare(&self, _max: usize) -> Result<()> {
        Ok(())
    }
}

/// Every language, in the order of the benchmark table.
pub fn registry() -> Vec<Arc<dyn Language>> {
    let mut v: Vec<Arc<dyn Language>> = regular::all()
        .into_iter()
        .map(|l| Arc::new(l) as Arc<dyn Language>)
        .collect();
    v.push(Arc::new(Majority::new()));
    v.push(Arc::new(StackManipulation::new()));
    v.push(Arc::new(Marked::reversal()));
    v.push(Arc::new(UnmarkedReversal::new()));
    v.push(Arc::new(Marked::copy()));
    v.push(Arc::new(MissingDuplicate::new()));
    v.push(Arc::new(Marked::odds_first()));
    v.push(Arc::new(Arithmetic::addition()));
    v.push(Arc::new(Arithmetic::multiplication()));
    v.push(Arc::new(Arithmetic::sqrt()));
    v.push(Arc::new(Marked::bucket_sort()));
    v
}

pub fn names() -> Vec<&'static str> {
    registry().iter().map(|l| l.name()).collect()
}

pub fn by_name(name: &str) -> Result<Arc<dyn Language>> {
    registry()
        .into_iter()
        .find(|l| l.name() == name)
        .ok_or_else(|| Error::UnknownLanguage(name.to_string()))
}

/// Uniform integer in `[lo, hi]`, or a configuration error when empty.
pub(crate) fn uniform(rng: &mut dyn RngCore, lo: usize, hi: usize, what: &str) -> Result<usize> {
    if lo > hi {
        return Err(Error::config(format!(
            "no valid {what} (range [{lo}, {hi}])"
        )));
    }
    Ok(rng.random_range(lo..=hi))
}

pub(crate) fn random_word(rng: &mut dyn RngCore, symbols: &[Symbol], n: usize) -> Word {
    (0..n)
        .map(|_| symbols[rng.random_range(0..symbols.len())])
        .collect()
}

/// Next sets for languages where a prefix can always continue with any of
/// `always`, and EOS is allowed exactly at members.
pub(crate) fn open_next_sets(
    w: &[Symbol],
    always: NextSet,
    contains: impl Fn(&[Symbol]) -> bool,
) -> Vec<NextSet> {
    (0..=w.len())
        .map(|t| {
            let mut n = always;
            if contains(&w[..t]) {
                n.set_eos();
            }
            n
        })
        .collect()
}

/// Next sets for `u SEP f(u)` languages: before the separator any of
/// `before` may follow, afterwards the continuation is forced.
pub(crate) fn marked_next_sets(
    w: &[Symbol],
    before: NextSet,
    sep: Symbol,
    target: impl Fn(&[Symbol]) -> Word,
) -> Vec<NextSet> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut dead = false;
    let mut tail: Option<(usize, Word)> = None;
    for t in 0..=w.len() {
        let n = if dead {
            NextSet::EMPTY
        } else if let Some((start, v)) = &tail {
            let k = t - start;
            if k < v.len() {
                NextSet::EMPTY.with(v[k])
            } else {
                NextSet::EMPTY.with_eos()
            }
        } else {
            before
        };
        out.push(n);
        if t == w.len() {
            break;
        }
        let a = w[t];
        if !n.contains(a) {
            dead = true;
        } else if tail.is_none() && a == sep {
            tail = Some((t + 1, target(&w[..t])));
        }
    }
    out
}
