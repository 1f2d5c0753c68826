//! Stack Manipulation: an initial stack (bottom to top), push/pop
//! operations, `=`, and the resulting stack (top to bottom).

use rand::{Rng, RngCore};

use super::{uniform, Class, Language};
use crate::automata::{Alphabet, NextSet, Symbol, Word};
use crate::error::Result;

const ZERO: Symbol = Symbol(0);
const ONE: Symbol = Symbol(1);
const PUSH: Symbol = Symbol(2);
const POP: Symbol = Symbol(3);
const EQ: Symbol = Symbol(4);

pub struct StackManipulation {
    alphabet: Alphabet,
}

impl StackManipulation {
    pub fn new() -> Self {
        Self {
            alphabet: Alphabet::new(&["0", "1", "PUSH", "POP", "="]),
        }
    }
}

impl Default for StackManipulation {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Phase {
    Initial,
    Ops,
    AfterPush,
    Output(usize),
    Dead,
}

/// Left-to-right scanner shared by membership and next sets.
struct Scan {
    phase: Phase,
    stack: Vec<Symbol>,
}

impl Scan {
    fn new() -> Self {
        Self {
            phase: Phase::Initial,
            stack: Vec::new(),
        }
    }

    fn next_set(&self) -> NextSet {
        let bits = NextSet::EMPTY.with(ZERO).with(ONE);
        match self.phase {
            Phase::Initial | Phase::Ops => {
                let mut n = NextSet::EMPTY.with(PUSH).with(EQ);
                if self.phase == Phase::Initial {
                    n = n.with(ZERO).with(ONE);
                }
                if !self.stack.is_empty() {
                    n.insert(POP);
                }
                n
            }
            Phase::AfterPush => bits,
            Phase::Output(k) => match self.stack.len().checked_sub(k + 1) {
                Some(i) => NextSet::EMPTY.with(self.stack[i]),
                None => NextSet::EMPTY.with_eos(),
            },
            Phase::Dead => NextSet::EMPTY,
        }
    }

    fn step(&mut self, a: Symbol) {
        if !self.next_set().contains(a) {
            self.phase = Phase::Dead;
            return;
        }
        self.phase = match (&self.phase, a) {
            (Phase::Initial, ZERO | ONE) => {
                self.stack.push(a);
                Phase::Initial
            }
            (Phase::Initial | Phase::Ops, PUSH) => Phase::AfterPush,
            (Phase::Initial | Phase::Ops, POP) => {
                self.stack.pop();
                Phase::Ops
            }
            (Phase::Initial | Phase::Ops, EQ) => Phase::Output(0),
            (Phase::AfterPush, _) => {
                self.stack.push(a);
                Phase::Ops
            }
            (Phase::Output(k), _) => Phase::Output(k + 1),
            _ => Phase::Dead,
        };
    }
}

impl Language for StackManipulation {
    fn name(&self) -> &'static str {
        "stack-manipulation"
    }

    fn class(&self) -> Class {
        Class::DeterministicContextFree
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let mut s = Scan::new();
        for a in w {
            s.step(*a);
        }
        s.next_set().has_eos()
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let hi = max
            .checked_sub(1)
            .map(|m| m / 2)
            .ok_or_else(|| crate::Error::config("stack-manipulation needs max length >= 1"))?;
        let n_stack = uniform(
            rng,
            min.saturating_sub(1).div_ceil(2),
            hi,
            "initial stack size",
        )?;
        let budget = max - 2 * n_stack - 1;
        let n_push = uniform(
            rng,
            min.saturating_sub(2 * n_stack + 1).div_ceil(3),
            budget / 3,
            "push count",
        )?;
        let mut w: Word = (0..n_stack)
            .map(|_| Symbol(rng.random_range(0..2)))
            .collect();
        let mut stack = w.clone();
        let mut pushes = 0;
        loop {
            let push = stack.is_empty() || rng.random_bool(0.5);
            if push {
                if pushes == n_push {
                    break;
                }
                let b = Symbol(rng.random_range(0..2));
                w.extend([PUSH, b]);
                stack.push(b);
                pushes += 1;
            } else {
                w.push(POP);
                stack.pop();
            }
        }
        w.push(EQ);
        w.extend(stack.iter().rev());
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let mut s = Scan::new();
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(s.next_set());
        for a in w {
            s.step(*a);
            out.push(s.next_set());
        }
        out
    }
}
