//! Regular languages backed by hand-built DFAs.

use std::sync::{Arc, Mutex};

use rand::RngCore;

use super::{Class, Language};
use crate::automata::{Alphabet, NextSet, PartialDfa, Symbol, Word};
use crate::error::Result;
use crate::sampler::SamplerTables;

/// A regular language: a trim DFA, a procedural membership predicate kept
/// as an independent cross-check, and lazily built sampler tables.
pub struct RegularLanguage {
    name: &'static str,
    alphabet: Alphabet,
    dfa: PartialDfa,
    predicate: fn(&str) -> bool,
    tables: Mutex<Option<Arc<SamplerTables>>>,
}

impl RegularLanguage {
    fn new(
        name: &'static str,
        glyphs: &[&str],
        dfa: PartialDfa,
        predicate: fn(&str) -> bool,
    ) -> Self {
        debug_assert!(dfa.check_trim().is_ok(), "{name} DFA not trim");
        Self {
            name,
            alphabet: Alphabet::new(glyphs),
            dfa,
            predicate,
            tables: Mutex::new(None),
        }
    }

    /// Membership decided without the DFA.
    pub fn predicate(&self, w: &[Symbol]) -> bool {
        (self.predicate)(&self.alphabet.render(w))
    }

    /// Sampler tables of order at least `max`, building (and caching) them
    /// when the cached order is too small.
    pub fn tables(&self, max: usize) -> Result<Arc<SamplerTables>> {
        let mut guard = self.tables.lock().unwrap();
        if let Some(t) = guard.as_ref() {
            if t.order >= max {
                return Ok(t.clone());
            }
        }
        let t = Arc::new(SamplerTables::build(&self.dfa, max)?);
        *guard = Some(t.clone());
        Ok(t)
    }
}

impl Language for RegularLanguage {
    fn name(&self) -> &'static str {
        self.name
    }

    fn class(&self) -> Class {
        Class::Regular
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        self.dfa.accepts(w)
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        Ok(self.tables(max)?.sample_positive(min, max, rng)?.0)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        self.dfa.next_sets(w)
    }

    fn dfa(&self) -> Option<&PartialDfa> {
        Some(&self.dfa)
    }

    fn prepare(&self, max: usize) -> Result<()> {
        self.tables(max).map(|_| ())
    }
}

pub(super) fn all() -> Vec<RegularLanguage> {
    vec![
        even_pairs(),
        repeat01(),
        parity(),
        cycle_navigation(),
        modular_arithmetic(),
        dyck_2_3(),
        first(),
    ]
}

const S0: Symbol = Symbol(0);
const S1: Symbol = Symbol(1);

fn even_pairs() -> RegularLanguage {
    // 0: empty; 1/2: first 0, last 0/1; 3/4: first 1, last 1/0.
    let mut d = PartialDfa::new(5, 2, 0);
    for (q, r0, r1) in [(0, 1, 3), (1, 1, 2), (2, 1, 2), (3, 4, 3), (4, 4, 3)] {
        d.add_transition(q, S0, r0);
        d.add_transition(q, S1, r1);
    }
    for q in [0, 1, 3] {
        d.set_accepting(q, true);
    }
    RegularLanguage::new("even-pairs", &["0", "1"], d, |s| {
        let b = s.as_bytes();
        b.windows(2).filter(|p| p[0] != p[1]).count() % 2 == 0
    })
}

fn repeat01() -> RegularLanguage {
    let mut d = PartialDfa::new(2, 2, 0);
    d.add_transition(0, S0, 1);
    d.add_transition(1, S1, 0);
    d.set_accepting(0, true);
    RegularLanguage::new("repeat-01", &["0", "1"], d, |s| {
        s.len() % 2 == 0 && s.as_bytes().chunks(2).all(|c| c == b"01")
    })
}

fn parity() -> RegularLanguage {
    let mut d = PartialDfa::new(2, 2, 0);
    d.add_transition(0, S0, 0);
    d.add_transition(0, S1, 1);
    d.add_transition(1, S0, 1);
    d.add_transition(1, S1, 0);
    d.set_accepting(1, true);
    RegularLanguage::new("parity", &["0", "1"], d, |s| {
        s.bytes().filter(|c| *c == b'1').count() % 2 == 1
    })
}

fn cycle_navigation() -> RegularLanguage {
    let glyphs = ["<", ">", "=", "0", "1", "2", "3", "4"];
    let a = Alphabet::new(&glyphs);
    // States 0..5 are positions on the cycle; 5 is the accepting end state.
    let mut d = PartialDfa::new(6, glyphs.len(), 0);
    for p in 0..5 {
        d.add_transition(p, a.sym("<"), (p + 4) % 5);
        d.add_transition(p, a.sym(">"), (p + 1) % 5);
        d.add_transition(p, a.sym("="), p);
        d.add_transition(p, a.sym(&p.to_string()), 5);
    }
    d.set_accepting(5, true);
    RegularLanguage::new("cycle-navigation", &glyphs, d, |s| {
        let mut pos = 0i32;
        let chars: Vec<char> = s.chars().collect();
        let Some((last, moves)) = chars.split_last() else {
            return false;
        };
        for c in moves {
            match c {
                '<' => pos -= 1,
                '>' => pos += 1,
                '=' => {}
                _ => return false,
            }
        }
        last.to_digit(10) == Some(pos.rem_euclid(5) as u32)
    })
}

fn modular_arithmetic() -> RegularLanguage {
    let glyphs = ["0", "1", "2", "3", "4", "+", "-", "×", "="];
    let a = Alphabet::new(&glyphs);
    let ops = ["+", "-", "×"];
    // 0 start; 1+v value v; 6+3v+o after operator o; 21+v after '='; 26 end.
    let val = |v: usize| 1 + v;
    let op = |v: usize, o: usize| 6 + 3 * v + o;
    let eq = |v: usize| 21 + v;
    let apply = |v: usize, o: usize, x: usize| match o {
        0 => (v + x) % 5,
        1 => (v + 5 - x) % 5,
        _ => (v * x) % 5,
    };
    let mut d = PartialDfa::new(27, glyphs.len(), 0);
    for x in 0..5 {
        let digit = a.sym(&x.to_string());
        d.add_transition(0, digit, val(x));
        for v in 0..5 {
            for o in 0..3 {
                d.add_transition(op(v, o), digit, val(apply(v, o, x)));
            }
        }
        d.add_transition(eq(x), digit, 26);
    }
    for v in 0..5 {
        for (o, g) in ops.iter().enumerate() {
            d.add_transition(val(v), a.sym(g), op(v, o));
        }
        d.add_transition(val(v), a.sym("="), eq(v));
    }
    d.set_accepting(26, true);
    RegularLanguage::new("modular-arithmetic", &glyphs, d, |s| {
        let (lhs, rhs) = match s.split_once('=') {
            Some(p) => p,
            None => return false,
        };
        let rhs: Vec<char> = rhs.chars().collect();
        if rhs.len() != 1 {
            return false;
        }
        let Some(result) = rhs[0].to_digit(5) else {
            return false;
        };
        let toks: Vec<char> = lhs.chars().collect();
        if toks.len().is_multiple_of(2) {
            return false;
        }
        let mut acc = match toks[0].to_digit(5) {
            Some(v) => v as i64,
            None => return false,
        };
        for pair in toks[1..].chunks(2) {
            let Some(x) = pair[1].to_digit(5) else {
                return false;
            };
            let x = x as i64;
            acc = match pair[0] {
                '+' => acc + x,
                '-' => acc - x,
                '×' => acc * x,
                _ => return false,
            }
            .rem_euclid(5);
        }
        acc == result as i64
    })
}

fn dyck_2_3() -> RegularLanguage {
    let glyphs = ["(", ")", "[", "]"];
    // A state is a stack of bracket types, depth <= 3, encoded by index into
    // `stacks`.
    let mut stacks: Vec<Vec<u8>> = vec![vec![]];
    let mut i = 0;
    while i < stacks.len() {
        if stacks[i].len() < 3 {
            for t in 0..2 {
                let mut s = stacks[i].clone();
                s.push(t);
                stacks.push(s);
            }
        }
        i += 1;
    }
    let index = |s: &[u8]| stacks.iter().position(|x| x == s).unwrap();
    let mut d = PartialDfa::new(stacks.len(), 4, 0);
    for (q, s) in stacks.iter().enumerate() {
        for t in 0..2u8 {
            let (open, close) = (Symbol(2 * t), Symbol(2 * t + 1));
            if s.len() < 3 {
                let mut p = s.clone();
                p.push(t);
                d.add_transition(q, open, index(&p));
            }
            if s.last() == Some(&t) {
                d.add_transition(q, close, index(&s[..s.len() - 1]));
            }
        }
    }
    d.set_accepting(0, true);
    RegularLanguage::new("dyck-2-3", &glyphs, d, |s| {
        let mut st = Vec::new();
        for c in s.chars() {
            match c {
                '(' | '[' => {
                    st.push(c);
                    if st.len() > 3 {
                        return false;
                    }
                }
                ')' => {
                    if st.pop() != Some('(') {
                        return false;
                    }
                }
                ']' => {
                    if st.pop() != Some('[') {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        st.is_empty()
    })
}

fn first() -> RegularLanguage {
    let mut d = PartialDfa::new(2, 2, 0);
    d.add_transition(0, S1, 1);
    d.add_transition(1, S0, 1);
    d.add_transition(1, S1, 1);
    d.set_accepting(1, true);
    RegularLanguage::new("first", &["0", "1"], d, |s| s.starts_with('1'))
}
