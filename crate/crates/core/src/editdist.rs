//! Edit distance from a string to a regular language.
//!
//! The string `w` becomes a chain WFA over the tropical semiring whose
//! stringsum on `u` is the Levenshtein distance between `u` and `w`.
//! Intersecting it with the language's DFA (lifted to zero weights) and
//! taking the shortest accepting path gives `min_{u in L} lev(u, w)`, and
//! the path's labels give a closest member.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::automata::{PartialDfa, StateId, Symbol, Wfa, Word};

/// Product automata with at most this many states are solved with
/// Floyd-Warshall; larger ones with single-source Dijkstra.
pub const FLOYD_WARSHALL_LIMIT: usize = 1024;

/// States `0..=n`; state `i` has consumed `w[..i]`. Matching `w[i]` costs 0,
/// deleting it (epsilon arc) or replacing it costs 1, and every state can
/// insert any symbol for 1. Only state `n` is final, with weight 0.
pub fn chain_wfa(w: &[Symbol], alphabet_size: usize) -> Wfa {
    let n = w.len();
    let mut arcs = vec![Vec::new(); n + 1];
    for (i, state) in arcs.iter_mut().enumerate() {
        for a in 0..alphabet_size as u8 {
            state.push((Some(Symbol(a)), 1.0, i));
        }
        if i < n {
            state.push((None, 1.0, i + 1));
            for a in 0..alphabet_size as u8 {
                let cost = if Symbol(a) == w[i] { 0.0 } else { 1.0 };
                state.push((Some(Symbol(a)), cost, i + 1));
            }
        }
    }
    let mut accept = vec![f64::INFINITY; n + 1];
    accept[n] = 0.0;
    Wfa {
        start: 0,
        arcs,
        accept,
    }
}

/// The DFA as a tropical WFA: arcs weigh 0, accepting states have final
/// weight 0.
pub fn lift_tropical(dfa: &PartialDfa) -> Wfa {
    Wfa {
        start: dfa.start(),
        arcs: (0..dfa.num_states())
            .map(|q| dfa.outgoing(q).map(|(a, r)| (Some(a), 0.0, r)).collect())
            .collect(),
        accept: (0..dfa.num_states())
            .map(|q| {
                if dfa.is_accepting(q) {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect(),
    }
}

/// Product of an epsilon-free WFA `a` with a WFA `b` that may have
/// epsilon arcs; an epsilon arc of `b` leaves `a`'s state unchanged. Only
/// states reachable from the start pair are built.
pub fn intersect(a: &Wfa, b: &Wfa) -> Wfa {
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a.start, b.start)];
    index.insert((a.start, b.start), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut arcs: Vec<Vec<(Option<Symbol>, f64, StateId)>> = vec![Vec::new()];
    let mut id = |pair: (StateId, StateId),
                  pairs: &mut Vec<(StateId, StateId)>,
                  arcs: &mut Vec<Vec<_>>,
                  queue: &mut VecDeque<usize>| {
        *index.entry(pair).or_insert_with(|| {
            pairs.push(pair);
            arcs.push(Vec::new());
            queue.push_back(pairs.len() - 1);
            pairs.len() - 1
        })
    };
    while let Some(s) = queue.pop_front() {
        let (p, q) = pairs[s];
        for &(lb, wb, q2) in &b.arcs[q] {
            match lb {
                None => {
                    let t = id((p, q2), &mut pairs, &mut arcs, &mut queue);
                    arcs[s].push((None, wb, t));
                }
                Some(sym) => {
                    for &(la, wa, p2) in &a.arcs[p] {
                        debug_assert!(la.is_some(), "left operand must be epsilon-free");
                        if la == Some(sym) {
                            let t = id((p2, q2), &mut pairs, &mut arcs, &mut queue);
                            arcs[s].push((Some(sym), wa + wb, t));
                        }
                    }
                }
            }
        }
    }
    let accept = pairs
        .iter()
        .map(|(p, q)| a.accept[*p] + b.accept[*q])
        .collect();
    Wfa {
        start: 0,
        arcs,
        accept,
    }
}

/// All-pairs shortest paths (min-plus closure with 0 on the diagonal).
///
/// Returns distances and, for each pair, the first arc `(state, arc index)`
/// of a shortest path.
#[allow(clippy::type_complexity)]
pub fn floyd_warshall(m: &Wfa) -> (Vec<Vec<f64>>, Vec<Vec<Option<(StateId, usize)>>>) {
    let n = m.num_states();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    let mut next = vec![vec![None; n]; n];
    for (q, arcs) in m.arcs.iter().enumerate() {
        for (k, &(_, w, r)) in arcs.iter().enumerate() {
            if w < d[q][r] {
                d[q][r] = w;
                next[q][r] = Some((q, k));
            }
        }
    }
    for q in 0..n {
        if d[q][q] > 0.0 {
            d[q][q] = 0.0;
            next[q][q] = None;
        }
    }
    for k in 0..n {
        let row_k = d[k].clone();
        for i in 0..n {
            let dik = d[i][k];
            if dik == f64::INFINITY {
                continue;
            }
            let hop = next[i][k];
            for j in 0..n {
                let cand = dik + row_k[j];
                if cand < d[i][j] {
                    d[i][j] = cand;
                    next[i][j] = hop;
                }
            }
        }
    }
    (d, next)
}

/// Single-source shortest paths with predecessor arcs.
#[allow(clippy::type_complexity)]
pub fn dijkstra(m: &Wfa, src: StateId) -> (Vec<f64>, Vec<Option<(StateId, usize)>>) {
    let n = m.num_states();
    let mut d = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    // Nonnegative f64 values order the same as their bit patterns.
    let mut heap = BinaryHeap::from([Reverse((0f64.to_bits(), src))]);
    d[src] = 0.0;
    while let Some(Reverse((bits, q))) = heap.pop() {
        if done[q] || f64::from_bits(bits) > d[q] {
            continue;
        }
        done[q] = true;
        for (k, &(_, w, r)) in m.arcs[q].iter().enumerate() {
            debug_assert!(w >= 0.0);
            let cand = d[q] + w;
            if cand < d[r] {
                d[r] = cand;
                pred[r] = Some((q, k));
                heap.push(Reverse((cand.to_bits(), r)));
            }
        }
    }
    (d, pred)
}

/// Shortest accepting path weight `min_r d(q0, r) + rho(r)` and the labels
/// along one such path. `None` when nothing is accepted.
pub fn shortest_allsum(m: &Wfa) -> Option<(f64, Word)> {
    let n = m.num_states();
    let mut labels = Vec::new();
    if n <= FLOYD_WARSHALL_LIMIT {
        let (d, next) = floyd_warshall(m);
        let (r, best) = best_final(&d[m.start], &m.accept)?;
        let mut cur = m.start;
        while cur != r {
            let (q, k) = next[cur][r].expect("path exists");
            let (l, _, t) = m.arcs[q][k];
            labels.extend(l);
            cur = t;
        }
        Some((best, labels))
    } else {
        let (d, pred) = dijkstra(m, m.start);
        let (r, best) = best_final(&d, &m.accept)?;
        let mut cur = r;
        while cur != m.start {
            let (q, k) = pred[cur].expect("path exists");
            labels.extend(m.arcs[q][k].0);
            cur = q;
        }
        labels.reverse();
        Some((best, labels))
    }
}

fn best_final(d: &[f64], accept: &[f64]) -> Option<(StateId, f64)> {
    let (r, best) = d
        .iter()
        .zip(accept)
        .map(|(x, y)| x + y)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    (best < f64::INFINITY).then_some((r, best))
}

/// Distance from a string to a regular language, with a closest member.
#[derive(Debug, Clone, PartialEq)]
pub struct EditDistance {
    pub distance: usize,
    pub witness: Word,
}

/// `min_{u in L(dfa)} lev(u, w)`; `None` if the language is empty.
pub fn edit_distance(dfa: &PartialDfa, w: &[Symbol]) -> Option<EditDistance> {
    let product = intersect(&lift_tropical(dfa), &chain_wfa(w, dfa.alphabet_size()));
    shortest_allsum(&product).map(|(d, witness)| EditDistance {
        distance: d as usize,
        witness,
    })
}

/// Levenshtein distance by the textbook dynamic program.
pub fn levenshtein(a: &[Symbol], b: &[Symbol]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = Vec::with_capacity(b.len() + 1);
        cur.push(i + 1);
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur.push(sub.min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::by_name;
    use proptest::prelude::*;

    fn word(s: &str) -> Word {
        s.bytes().map(|b| Symbol(b - b'0')).collect()
    }

    #[test]
    fn known_distances() {
        let cases = [
            ("parity", "00", 1),
            ("repeat-01", "0", 1),
            ("dyck-2-3", "[(])", 2),
        ];
        for (name, s, want) in cases {
            let l = by_name(name).unwrap();
            let w = l.alphabet().parse(s).unwrap();
            let r = edit_distance(l.dfa().unwrap(), &w).unwrap();
            assert_eq!(r.distance, want, "{name} {s}");
            assert!(l.contains(&r.witness));
            assert_eq!(levenshtein(&r.witness, &w), want);
        }
    }

    #[test]
    fn members_have_distance_zero() {
        let l = by_name("dyck-2-3").unwrap();
        let w = l.alphabet().parse("([])[]").unwrap();
        let r = edit_distance(l.dfa().unwrap(), &w).unwrap();
        assert_eq!(r.distance, 0);
        assert_eq!(r.witness, w);
    }

    #[test]
    fn dijkstra_and_floyd_warshall_agree() {
        let l = by_name("dyck-2-3").unwrap();
        let dfa = l.dfa().unwrap();
        for s in ["(((", "])", "([)]", "[[[[]]]]", ""] {
            let w = l.alphabet().parse(s).unwrap();
            let p = intersect(&lift_tropical(dfa), &chain_wfa(&w, 4));
            let (fw, _) = floyd_warshall(&p);
            let (dj, _) = dijkstra(&p, p.start);
            assert_eq!(fw[p.start], dj);
        }
    }

    #[test]
    fn long_inputs_use_single_source() {
        let l = by_name("repeat-01").unwrap();
        let w: Word = word(&"01".repeat(300))
            .into_iter()
            .chain([Symbol(1)])
            .collect();
        let r = edit_distance(l.dfa().unwrap(), &w).unwrap();
        assert_eq!(r.distance, 1);
        assert!(l.contains(&r.witness));
    }

    proptest! {
        #[test]
        fn chain_stringsum_is_levenshtein(
            w in proptest::collection::vec(0u8..3, 0..7),
            u in proptest::collection::vec(0u8..3, 0..7),
        ) {
            let w: Word = w.into_iter().map(Symbol).collect();
            let u: Word = u.into_iter().map(Symbol).collect();
            let c = chain_wfa(&w, 3);
            prop_assert_eq!(c.stringsum(&u), levenshtein(&u, &w) as f64);
        }
    }
}
