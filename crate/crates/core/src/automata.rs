//! Symbols, alphabets, partial DFAs, weighted DFAs and epsilon-WFAs.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// A symbol id, an index into its language's [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u8);

/// A string over some alphabet.
pub type Word = Vec<Symbol>;

/// Index of a DFA/WFA state.
pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("state {0} is not {1}")]
    NotTrim(StateId, &'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot tokenize {0:?}")]
    Tokenize(String),
}

/// Maximum alphabet size representable in a [`NextSet`].
pub const MAX_SYMBOLS: usize = 31;

/// A subset of `Sigma ∪ {EOS}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NextSet(u32);

impl NextSet {
    const EOS_BIT: u32 = 1 << 31;

    pub const EMPTY: NextSet = NextSet(0);

    pub fn insert(&mut self, s: Symbol) {
        self.0 |= 1 << s.0;
    }

    pub fn with(mut self, s: Symbol) -> Self {
        self.insert(s);
        self
    }

    pub fn set_eos(&mut self) {
        self.0 |= Self::EOS_BIT;
    }

    pub fn with_eos(mut self) -> Self {
        self.set_eos();
        self
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.0 & (1 << s.0) != 0
    }

    pub fn has_eos(&self) -> bool {
        self.0 & Self::EOS_BIT != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Symbols (excluding EOS) in increasing id order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..MAX_SYMBOLS as u8)
            .map(Symbol)
            .filter(|s| self.contains(*s))
    }

    pub fn bits(&self) -> u32 {
        self.0
    }
}

impl fmt::Debug for NextSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_set();
        for s in self.symbols() {
            l.entry(&s.0);
        }
        if self.has_eos() {
            l.entry(&"EOS");
        }
        l.finish()
    }
}

/// Glyph used for the end-of-string marker in rendered next sets.
pub const EOS_GLYPH: &str = "</s>";

/// Ordered glyph table mapping symbol ids to display strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    glyphs: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(glyphs: &[S]) -> Self {
        assert!(glyphs.len() <= MAX_SYMBOLS, "alphabet too large");
        let glyphs: Vec<String> = glyphs.iter().map(|g| g.as_ref().to_string()).collect();
        for g in &glyphs {
            assert!(
                !g.is_empty() && !g.chars().any(char::is_whitespace),
                "bad glyph {g:?}"
            );
        }
        Self { glyphs }
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glyphs.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.glyphs.len() as u8).map(Symbol)
    }

    pub fn glyph(&self, s: Symbol) -> &str {
        &self.glyphs[s.0 as usize]
    }

    pub fn glyphs(&self) -> &[String] {
        &self.glyphs
    }

    pub fn symbol(&self, glyph: &str) -> Option<Symbol> {
        self.glyphs
            .iter()
            .position(|g| g == glyph)
            .map(|i| Symbol(i as u8))
    }

    /// Symbol with glyph `g`, panicking if absent. For language definitions.
    pub fn sym(&self, g: &str) -> Symbol {
        self.symbol(g)
            .unwrap_or_else(|| panic!("glyph {g:?} not in alphabet"))
    }

    /// Renders a word; multi-character glyphs are space separated.
    pub fn render(&self, w: &[Symbol]) -> String {
        let sep = if self.glyphs.iter().any(|g| g.chars().count() > 1) {
            " "
        } else {
            ""
        };
        w.iter()
            .map(|s| self.glyph(*s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Tokenizes by longest glyph match, ignoring whitespace.
    pub fn parse(&self, text: &str) -> Result<Word, AutomataError> {
        let mut out = Vec::new();
        let mut rest = text;
        loop {
            rest = rest.trim_start();
            if rest.is_empty() {
                return Ok(out);
            }
            let best = self
                .glyphs
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.as_str()))
                .max_by_key(|(_, g)| g.len());
            match best {
                Some((i, g)) => {
                    out.push(Symbol(i as u8));
                    rest = &rest[g.len()..];
                }
                None => return Err(AutomataError::Tokenize(text.to_string())),
            }
        }
    }

    pub fn render_next_set(&self, n: NextSet) -> Vec<String> {
        let mut v: Vec<String> = n.symbols().map(|s| self.glyph(s).to_string()).collect();
        if n.has_eos() {
            v.push(EOS_GLYPH.to_string());
        }
        v
    }

    pub fn parse_next_set<S: AsRef<str>>(&self, items: &[S]) -> Option<NextSet> {
        let mut n = NextSet::EMPTY;
        for it in items {
            let it = it.as_ref();
            if it == EOS_GLYPH {
                n.set_eos();
            } else {
                n.insert(self.symbol(it)?);
            }
        }
        Some(n)
    }
}

/// A deterministic automaton whose transition function may be partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDfa {
    alphabet_size: usize,
    start: StateId,
    accepting: Vec<bool>,
    delta: Vec<Vec<Option<StateId>>>,
}

impl PartialDfa {
    pub fn new(num_states: usize, alphabet_size: usize, start: StateId) -> Self {
        assert!(start < num_states);
        Self {
            alphabet_size,
            start,
            accepting: vec![false; num_states],
            delta: vec![vec![None; alphabet_size]; num_states],
        }
    }

    pub fn add_transition(&mut self, q: StateId, a: Symbol, r: StateId) {
        assert!(r < self.num_states());
        self.delta[q][a.0 as usize] = Some(r);
    }

    pub fn set_accepting(&mut self, q: StateId, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: StateId, a: Symbol) -> Option<StateId> {
        self.delta[q].get(a.0 as usize).copied().flatten()
    }

    /// Defined transitions out of `q`, by increasing symbol.
    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = (Symbol, StateId)> + '_ {
        self.delta[q]
            .iter()
            .enumerate()
            .filter_map(|(a, r)| r.map(|r| (Symbol(a as u8), r)))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().filter(|r| r.is_some()).count()
    }

    /// State reached after reading `w`, if every transition is defined.
    pub fn run(&self, w: &[Symbol]) -> Option<StateId> {
        w.iter().try_fold(self.start, |q, a| self.step(q, *a))
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.run(w).is_some_and(|q| self.accepting[q])
    }

    /// Outgoing labels of `q` plus EOS when `q` accepts.
    pub fn next_set(&self, q: StateId) -> NextSet {
        let mut n = NextSet::EMPTY;
        for (a, _) in self.outgoing(q) {
            n.insert(a);
        }
        if self.accepting[q] {
            n.set_eos();
        }
        n
    }

    /// Next sets for every prefix of `w`, `|w| + 1` entries. Once the run
    /// leaves the automaton all remaining sets are empty.
    pub fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut q = Some(self.start);
        for i in 0..=w.len() {
            out.push(q.map_or(NextSet::EMPTY, |q| self.next_set(q)));
            if i < w.len() {
                q = q.and_then(|q| self.step(q, w[i]));
            }
        }
        out
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(q) = queue.pop_front() {
            for (_, r) in self.outgoing(q) {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for (_, r) in self.outgoing(q) {
                rev[r].push(q);
            }
        }
        let mut seen = self.accepting.clone();
        let mut queue: VecDeque<StateId> = (0..n).filter(|q| seen[*q]).collect();
        while let Some(r) = queue.pop_front() {
            for &q in &rev[r] {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// Ok when every state is reachable from the start and reaches an
    /// accepting state.
    pub fn check_trim(&self) -> Result<(), AutomataError> {
        let reach = self.reachable();
        if let Some(q) = reach.iter().position(|x| !x) {
            return Err(AutomataError::NotTrim(q, "reachable"));
        }
        let co = self.coreachable();
        if let Some(q) = co.iter().position(|x| !x) {
            return Err(AutomataError::NotTrim(q, "co-reachable"));
        }
        Ok(())
    }

    /// Removes useless states, renumbering the rest in order. The start
    /// state is kept even if the language is empty.
    pub fn trim(&self) -> PartialDfa {
        let reach = self.reachable();
        let co = self.coreachable();
        let keep: Vec<bool> = (0..self.num_states())
            .map(|q| q == self.start || (reach[q] && co[q]))
            .collect();
        let mut map = vec![None; self.num_states()];
        let mut next = 0;
        for q in 0..self.num_states() {
            if keep[q] {
                map[q] = Some(next);
                next += 1;
            }
        }
        let mut out = PartialDfa::new(next, self.alphabet_size, map[self.start].unwrap());
        for q in 0..self.num_states() {
            let Some(nq) = map[q] else { continue };
            out.accepting[nq] = self.accepting[q];
            for (a, r) in self.outgoing(q) {
                if let Some(nr) = map[r] {
                    if co[r] {
                        out.add_transition(nq, a, nr);
                    }
                }
            }
        }
        out
    }

    /// Serializes as: a header `states alphabet start`, one `src sym dst`
    /// line per transition in `(src, sym)` order, and a final line listing
    /// the accepting states.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {}\n",
            self.num_states(),
            self.alphabet_size,
            self.start
        );
        for q in 0..self.num_states() {
            for (a, r) in self.outgoing(q) {
                s.push_str(&format!("{q} {} {r}\n", a.0));
            }
        }
        let acc: Vec<String> = (0..self.num_states())
            .filter(|q| self.accepting[*q])
            .map(|q| q.to_string())
            .collect();
        s.push_str(&acc.join(" "));
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, AutomataError> {
        let err = |line: usize, msg: &str| AutomataError::Parse {
            line,
            msg: msg.to_string(),
        };
        let body = text.strip_suffix('\n').unwrap_or(text);
        let lines: Vec<&str> = body.split('\n').collect();
        if lines.len() < 2 {
            return Err(err(1, "expected header and accepting line"));
        }
        let nums = |i: usize| -> Result<Vec<usize>, AutomataError> {
            lines[i]
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| err(i + 1, "bad integer")))
                .collect()
        };
        let h = nums(0)?;
        let [n, k, start] = h[..] else {
            return Err(err(1, "header needs 3 integers"));
        };
        if start >= n || k > MAX_SYMBOLS {
            return Err(err(1, "start or alphabet out of range"));
        }
        let mut dfa = PartialDfa::new(n, k, start);
        for i in 1..lines.len() - 1 {
            let t = nums(i)?;
            let [q, a, r] = t[..] else {
                return Err(err(i + 1, "transition needs 3 integers"));
            };
            if q >= n || r >= n || a >= k {
                return Err(err(i + 1, "transition out of range"));
            }
            if dfa.delta[q][a].is_some() {
                return Err(err(i + 1, "duplicate transition"));
            }
            dfa.add_transition(q, Symbol(a as u8), r);
        }
        let last = lines.len() - 1;
        for q in nums(last)? {
            if q >= n {
                return Err(err(last + 1, "accepting state out of range"));
            }
            dfa.accepting[q] = true;
        }
        Ok(dfa)
    }
}

/// A deterministic automaton with weights on arcs and final weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDfa<E> {
    pub start: StateId,
    /// Per state, `(symbol, target, weight)` by increasing symbol.
    pub arcs: Vec<Vec<(Symbol, StateId, E)>>,
    pub accept: Vec<E>,
}

impl<E> WeightedDfa<E> {
    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }
}

/// A tropical-weighted automaton with epsilon arcs (`label == None`).
#[derive(Debug, Clone, PartialEq)]
pub struct Wfa {
    pub start: StateId,
    pub arcs: Vec<Vec<(Option<Symbol>, f64, StateId)>>,
    /// Final weight per state; `inf` means non-final.
    pub accept: Vec<f64>,
}

impl Wfa {
    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    fn eps_close(&self, d: &mut [f64]) {
        // Weights are nonnegative, so |Q| rounds of relaxation suffice.
        for _ in 0..self.num_states() {
            let mut changed = false;
            for q in 0..self.num_states() {
                if d[q] == f64::INFINITY {
                    continue;
                }
                for &(l, w, r) in &self.arcs[q] {
                    if l.is_none() && d[q] + w < d[r] {
                        d[r] = d[q] + w;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Minimum weight over accepting paths labelled `u`.
    pub fn stringsum(&self, u: &[Symbol]) -> f64 {
        let n = self.num_states();
        let mut d = vec![f64::INFINITY; n];
        d[self.start] = 0.0;
        self.eps_close(&mut d);
        for &a in u {
            let mut nd = vec![f64::INFINITY; n];
            for (dq, arcs) in d.iter().zip(&self.arcs) {
                if *dq == f64::INFINITY {
                    continue;
                }
                for &(l, w, r) in arcs {
                    if l == Some(a) && dq + w < nd[r] {
                        nd[r] = dq + w;
                    }
                }
            }
            self.eps_close(&mut nd);
            d = nd;
        }
        d.iter()
            .zip(&self.accept)
            .map(|(x, y)| x + y)
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> PartialDfa {
        let mut d = PartialDfa::new(2, 2, 0);
        d.add_transition(0, Symbol(0), 0);
        d.add_transition(0, Symbol(1), 1);
        d.add_transition(1, Symbol(0), 1);
        d.add_transition(1, Symbol(1), 0);
        d.set_accepting(1, true);
        d
    }

    #[test]
    fn text_roundtrip() {
        let d = parity();
        let t = d.to_text();
        assert_eq!(t, "2 2 0\n0 0 0\n0 1 1\n1 0 1\n1 1 0\n1\n");
        assert_eq!(PartialDfa::from_text(&t).unwrap(), d);
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(PartialDfa::from_text("2 2 0\n0 5 1\n1\n").is_err());
        assert!(PartialDfa::from_text("2 2 3\n\n").is_err());
        assert!(PartialDfa::from_text("2 2 0\n0 0 1\n0 0 1\n1\n").is_err());
    }

    #[test]
    fn empty_accepting_line() {
        let mut d = PartialDfa::new(1, 1, 0);
        d.add_transition(0, Symbol(0), 0);
        assert_eq!(PartialDfa::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn trim_and_check() {
        let mut d = PartialDfa::new(4, 2, 0);
        d.add_transition(0, Symbol(0), 1);
        d.add_transition(0, Symbol(1), 2);
        d.set_accepting(1, true);
        // 2 is a dead end, 3 unreachable.
        d.add_transition(3, Symbol(0), 1);
        assert_eq!(d.check_trim(), Err(AutomataError::NotTrim(3, "reachable")));
        let t = d.trim();
        assert_eq!(t.num_states(), 2);
        assert!(t.check_trim().is_ok());
        assert!(t.accepts(&[Symbol(0)]));
        assert!(!t.accepts(&[Symbol(1)]));
    }

    #[test]
    fn next_sets_go_empty_when_dead() {
        let mut d = PartialDfa::new(2, 2, 0);
        d.add_transition(0, Symbol(1), 1);
        d.add_transition(1, Symbol(0), 1);
        d.add_transition(1, Symbol(1), 1);
        d.set_accepting(1, true);
        let ns = d.next_sets(&[Symbol(0), Symbol(1)]);
        assert_eq!(ns[0], NextSet::EMPTY.with(Symbol(1)));
        assert!(ns[1].is_empty() && ns[2].is_empty());
    }

    #[test]
    fn alphabet_tokenizing() {
        let a = Alphabet::new(&["0", "1", "PUSH", "POP", "="]);
        let w = a.parse("01 PUSH 1 POP = 0").unwrap();
        assert_eq!(a.render(&w), "0 1 PUSH 1 POP = 0");
        assert_eq!(a.parse("01PUSH1POP=0").unwrap(), w);
        assert!(a.parse("0X").is_err());
        let b = Alphabet::new(&["0", "1"]);
        assert_eq!(b.render(&b.parse("0110").unwrap()), "0110");
    }

    #[test]
    fn next_set_glyphs_roundtrip() {
        let a = Alphabet::new(&["a", "b", "c"]);
        let n = NextSet::EMPTY.with(Symbol(2)).with(Symbol(0)).with_eos();
        let g = a.render_next_set(n);
        assert_eq!(g, vec!["a", "c", EOS_GLYPH]);
        assert_eq!(a.parse_next_set(&g), Some(n));
    }
}
