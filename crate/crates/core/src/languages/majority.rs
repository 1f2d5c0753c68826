//! Binary strings with more 1s than 0s.

use rand::seq::SliceRandom;
use rand::RngCore;

use super::{open_next_sets, uniform, Class, Language};
use crate::automata::{Alphabet, NextSet, Symbol, Word};
use crate::error::Result;

pub struct Majority {
    alphabet: Alphabet,
}

impl Majority {
    pub fn new() -> Self {
        Self {
            alphabet: Alphabet::new(&["0", "1"]),
        }
    }
}

impl Default for Majority {
    fn default() -> Self {
        Self::new()
    }
}

impl Language for Majority {
    fn name(&self) -> &'static str {
        "majority"
    }

    fn class(&self) -> Class {
        Class::DeterministicContextFree
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let ones = w.iter().filter(|s| **s == Symbol(1)).count();
        w.iter().all(|s| s.0 < 2) && 2 * ones > w.len()
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let n = uniform(rng, min.max(1), max, "length")?;
        let c1 = uniform(rng, n / 2 + 1, n, "count of 1s")?;
        let mut w = vec![Symbol(0); n - c1];
        w.extend(std::iter::repeat_n(Symbol(1), c1));
        w.shuffle(rng);
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let always = NextSet::EMPTY.with(Symbol(0)).with(Symbol(1));
        open_next_sets(w, always, |p| self.contains(p))
    }
}
