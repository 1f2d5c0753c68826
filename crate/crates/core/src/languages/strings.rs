//! String-transformation languages: reversal, copy, shuffles and sorting.

use rand::{Rng, RngCore};

use super::{marked_next_sets, open_next_sets, random_word, uniform, Class, Language};
use crate::automata::{Alphabet, NextSet, Symbol, Word};
use crate::error::{Error, Result};

/// Languages of the form `u # f(u)` with `u` over a digit alphabet.
pub struct Marked {
    name: &'static str,
    class: Class,
    alphabet: Alphabet,
    digits: Vec<Symbol>,
    sep: Symbol,
    f: fn(&[Symbol]) -> Word,
}

impl Marked {
    fn new(name: &'static str, class: Class, digits: &[&str], f: fn(&[Symbol]) -> Word) -> Self {
        let mut glyphs = digits.to_vec();
        glyphs.push("#");
        let alphabet = Alphabet::new(&glyphs);
        Self {
            name,
            class,
            digits: (0..digits.len() as u8).map(Symbol).collect(),
            sep: alphabet.sym("#"),
            alphabet,
            f,
        }
    }

    /// `u # reverse(u)`.
    pub fn reversal() -> Self {
        Self::new(
            "marked-reversal",
            Class::DeterministicContextFree,
            &["0", "1"],
            |u| u.iter().rev().copied().collect(),
        )
    }

    /// `u # u`.
    pub fn copy() -> Self {
        Self::new("marked-copy", Class::ContextSensitive, &["0", "1"], |u| {
            u.to_vec()
        })
    }

    /// `u #` followed by the symbols of `u` at odd positions (1-indexed),
    /// then those at even positions.
    pub fn odds_first() -> Self {
        Self::new("odds-first", Class::ContextSensitive, &["0", "1"], |u| {
            u.iter()
                .step_by(2)
                .chain(u.iter().skip(1).step_by(2))
                .copied()
                .collect()
        })
    }

    /// `u # sorted(u)` over digits 1 to 5.
    pub fn bucket_sort() -> Self {
        Self::new(
            "bucket-sort",
            Class::ContextSensitive,
            &["1", "2", "3", "4", "5"],
            |u| {
                let mut v = u.to_vec();
                v.sort();
                v
            },
        )
    }
}

impl Language for Marked {
    fn name(&self) -> &'static str {
        self.name
    }

    fn class(&self) -> Class {
        self.class
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let Some(i) = w.iter().position(|s| *s == self.sep) else {
            return false;
        };
        let (u, rest) = (&w[..i], &w[i + 1..]);
        u.iter().all(|s| self.digits.contains(s)) && rest == (self.f)(u).as_slice()
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let Some(hi) = max.checked_sub(1) else {
            return Err(Error::config(format!(
                "{} needs max length >= 1",
                self.name
            )));
        };
        let m = uniform(
            rng,
            min.saturating_sub(1).div_ceil(2),
            hi / 2,
            "half length",
        )?;
        let u = random_word(rng, &self.digits, m);
        let mut w = u.clone();
        w.push(self.sep);
        w.extend((self.f)(&u));
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let before = self
            .digits
            .iter()
            .fold(NextSet::EMPTY.with(self.sep), |n, d| n.with(*d));
        marked_next_sets(w, before, self.sep, self.f)
    }
}

/// `u reverse(u)` over `{0, 1}`.
pub struct UnmarkedReversal {
    alphabet: Alphabet,
}

impl UnmarkedReversal {
    pub fn new() -> Self {
        Self {
            alphabet: Alphabet::new(&["0", "1"]),
        }
    }
}

impl Default for UnmarkedReversal {
    fn default() -> Self {
        Self::new()
    }
}

impl Language for UnmarkedReversal {
    fn name(&self) -> &'static str {
        "unmarked-reversal"
    }

    fn class(&self) -> Class {
        Class::ContextFree
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        w.len().is_multiple_of(2) && w.iter().eq(w.iter().rev())
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let m = uniform(rng, min.div_ceil(2), max / 2, "half length")?;
        let u = random_word(rng, &[Symbol(0), Symbol(1)], m);
        let mut w = u.clone();
        w.extend(u.iter().rev());
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let always = NextSet::EMPTY.with(Symbol(0)).with(Symbol(1));
        open_next_sets(w, always, |p| self.contains(p))
    }
}

/// `uu` with one of its 1s replaced by `_`.
pub struct MissingDuplicate {
    alphabet: Alphabet,
}

const BLANK: Symbol = Symbol(2);

impl MissingDuplicate {
    pub fn new() -> Self {
        Self {
            alphabet: Alphabet::new(&["0", "1", "_"]),
        }
    }
}

impl Default for MissingDuplicate {
    fn default() -> Self {
        Self::new()
    }
}

impl Language for MissingDuplicate {
    fn name(&self) -> &'static str {
        "missing-duplicate"
    }

    fn class(&self) -> Class {
        Class::ContextSensitive
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        if w.len() % 2 == 1 || w.iter().filter(|s| **s == BLANK).count() != 1 {
            return false;
        }
        let filled: Word = w
            .iter()
            .map(|s| if *s == BLANK { Symbol(1) } else { *s })
            .collect();
        let (a, b) = filled.split_at(w.len() / 2);
        a == b
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let m = uniform(rng, min.div_ceil(2).max(1), max / 2, "half length")?;
        let mut u = random_word(rng, &[Symbol(0), Symbol(1)], m);
        let i = rng.random_range(0..m);
        u[i] = Symbol(1);
        let mut w = u.clone();
        w.extend(&u);
        let ones: Vec<usize> = (0..w.len()).filter(|i| w[*i] == Symbol(1)).collect();
        w[ones[rng.random_range(0..ones.len())]] = BLANK;
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let bits = NextSet::EMPTY.with(Symbol(0)).with(Symbol(1));
        let mut blanks = 0;
        (0..=w.len())
            .map(|t| {
                if t > 0 && w[t - 1] == BLANK {
                    blanks += 1;
                }
                match blanks {
                    0 => bits.with(BLANK),
                    1 if self.contains(&w[..t]) => bits.with_eos(),
                    1 => bits,
                    _ => NextSet::EMPTY,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(l: &dyn Language, s: &str) -> Word {
        l.alphabet().parse(s).unwrap()
    }

    #[test]
    fn odds_first_transform() {
        let l = Marked::odds_first();
        assert!(l.contains(&parse(&l, "01010#00011")));
        assert!(l.contains(&parse(&l, "10011011#10110101")));
        assert!(!l.contains(&parse(&l, "010101#000110")));
    }

    #[test]
    fn marked_next_sets_forced_tail() {
        let l = Marked::reversal();
        let w = parse(&l, "01#10");
        let ns = l.next_sets(&w);
        let a = l.alphabet();
        assert_eq!(a.render_next_set(ns[0]), vec!["0", "1", "#"]);
        assert_eq!(a.render_next_set(ns[3]), vec!["1"]);
        assert_eq!(a.render_next_set(ns[4]), vec!["0"]);
        assert_eq!(a.render_next_set(ns[5]), vec!["</s>"]);
        let bad = l.next_sets(&parse(&l, "0#1#"));
        assert!(bad[3].is_empty() && bad[4].is_empty());
    }

    #[test]
    fn length_ranges_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let langs: Vec<Box<dyn Language>> = vec![
            Box::new(Marked::reversal()),
            Box::new(Marked::copy()),
            Box::new(Marked::odds_first()),
            Box::new(Marked::bucket_sort()),
            Box::new(UnmarkedReversal::new()),
            Box::new(MissingDuplicate::new()),
        ];
        for l in &langs {
            for (lo, hi) in [(0, 40), (5, 9), (0, 2), (30, 31)] {
                for _ in 0..200 {
                    let w = l.sample_positive(lo, hi, &mut rng).unwrap();
                    assert!(w.len() >= lo && w.len() <= hi, "{} {lo} {hi}", l.name());
                    assert!(l.contains(&w), "{}", l.name());
                }
            }
        }
    }

    #[test]
    fn infeasible_ranges_are_config_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(Marked::copy().sample_positive(0, 0, &mut rng).is_err());
        assert!(Marked::copy().sample_positive(2, 2, &mut rng).is_err());
        assert!(MissingDuplicate::new()
            .sample_positive(0, 1, &mut rng)
            .is_err());
        assert!(UnmarkedReversal::new()
            .sample_positive(3, 3, &mut rng)
            .is_err());
    }
}
