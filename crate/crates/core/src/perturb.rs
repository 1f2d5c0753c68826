//! Negative examples: uniform random strings and randomly edited positives,
//! kept only when membership rejects them.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Geometric};

use crate::automata::{Symbol, Word};
use crate::error::{Error, Result};
use crate::languages::Language;

/// Proposals tried before giving up on finding a non-member.
pub const MAX_NEGATIVE_ATTEMPTS: usize = 10_000;

/// A single-symbol edit. Positions are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    Insert { pos: usize, sym: Symbol },
    Replace { pos: usize, sym: Symbol },
    Delete { pos: usize },
}

impl Edit {
    pub fn apply(&self, w: &mut Word) {
        match *self {
            Edit::Insert { pos, sym } => w.insert(pos, sym),
            Edit::Replace { pos, sym } => w[pos] = sym,
            Edit::Delete { pos } => {
                w.remove(pos);
            }
        }
    }
}

/// Number of edits: geometric with success probability 1/2, support `1..`.
pub fn sample_edit_count(rng: &mut dyn RngCore) -> usize {
    let failures = Geometric::new(0.5).expect("valid p").sample(rng);
    failures as usize + 1
}

/// One uniformly chosen legal edit of `w`, or `None` when no edit keeps
/// the length inside `[min, max]`.
pub fn sample_edit(
    w: &[Symbol],
    alphabet_size: usize,
    min: usize,
    max: usize,
    rng: &mut dyn RngCore,
) -> Option<Edit> {
    let mut kinds = Vec::with_capacity(3);
    if w.len() < max {
        kinds.push(0);
    }
    if alphabet_size > 1 && !w.is_empty() {
        kinds.push(1);
    }
    if w.len() > min && !w.is_empty() {
        kinds.push(2);
    }
    if kinds.is_empty() {
        return None;
    }
    let edit = match kinds[rng.random_range(0..kinds.len())] {
        0 => Edit::Insert {
            pos: rng.random_range(0..=w.len()),
            sym: Symbol(rng.random_range(0..alphabet_size) as u8),
        },
        1 => {
            let pos = rng.random_range(0..w.len());
            // Uniform over the alphabet minus the current symbol.
            let mut s = rng.random_range(0..alphabet_size - 1) as u8;
            if s >= w[pos].0 {
                s += 1;
            }
            Edit::Replace {
                pos,
                sym: Symbol(s),
            }
        }
        _ => Edit::Delete {
            pos: rng.random_range(0..w.len()),
        },
    };
    Some(edit)
}

/// Applies `K ~ Geometric(1/2)` random edits to `w`, keeping every
/// intermediate length inside `[min, max]`.
pub fn perturb(
    w: &[Symbol],
    alphabet_size: usize,
    min: usize,
    max: usize,
    rng: &mut dyn RngCore,
) -> Word {
    let k = sample_edit_count(rng);
    let mut out = w.to_vec();
    for _ in 0..k {
        match sample_edit(&out, alphabet_size, min, max, rng) {
            Some(e) => e.apply(&mut out),
            None => break,
        }
    }
    out
}

/// A non-member with length in `[min, max]`. Each proposal is, with equal
/// probability, a uniform random string (uniform length) or a perturbed
/// positive example.
pub fn sample_negative(
    lang: &dyn Language,
    min: usize,
    max: usize,
    rng: &mut dyn RngCore,
) -> Result<Word> {
    if min > max {
        return Err(Error::config(format!("empty length range [{min}, {max}]")));
    }
    let k = lang.alphabet().len();
    for _ in 0..MAX_NEGATIVE_ATTEMPTS {
        let w = if rng.random_bool(0.5) {
            let n = rng.random_range(min..=max);
            (0..n)
                .map(|_| Symbol(rng.random_range(0..k) as u8))
                .collect()
        } else {
            let pos = lang.sample_positive(min, max, rng)?;
            perturb(&pos, k, min, max, rng)
        };
        if !lang.contains(&w) {
            return Ok(w);
        }
    }
    Err(Error::ComplementTooSmall(MAX_NEGATIVE_ATTEMPTS))
}
