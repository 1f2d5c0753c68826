//! Length-constrained sampling from regular languages.
//!
//! A trim partial DFA is lifted to a weighted DFA over the log binning
//! semiring (uniform probability over the actions available in each state,
//! accepting counting as an action). Backward weights from Lehmann's
//! algorithm give, for every state and every remaining length, the total
//! probability of completing an accepted string. Pushing those weights
//! through the arcs yields per-length local distributions, and sampling a
//! string of length `n` is a walk that never needs to backtrack.

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::automata::{AutomataError, NextSet, PartialDfa, StateId, Symbol, WeightedDfa, Word};
use crate::semiring::{BinVector, Binning, ClosedSemiring, Log, Semiring, SemiringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("automaton is not trim: {0}")]
    NotTrim(#[from] AutomataError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("no string of length in [{0}, {1}]")]
    NoValidLength(usize, usize),
    #[error("length {0} is not sampleable")]
    InvalidLength(usize),
}

/// Log binning semiring used throughout the sampler.
pub type LogBins = Binning<Log>;

/// Weighted DFA over [`LogBins`]: each arc weighs `log(1/k)` in bin 1 and
/// each accepting state `log(1/k)` in bin 0, where `k` counts the state's
/// outgoing arcs plus one if it accepts.
pub fn lift_weights(dfa: &PartialDfa, order: usize) -> WeightedDfa<BinVector<f64>> {
    let s = LogBins::new(Log, order);
    let n = dfa.num_states();
    let mut arcs = Vec::with_capacity(n);
    let mut accept = Vec::with_capacity(n);
    for q in 0..n {
        let out: Vec<(Symbol, StateId)> = dfa.outgoing(q).collect();
        let k = out.len() + usize::from(dfa.is_accepting(q));
        let lp = if k > 0 { -(k as f64).ln() } else { 0.0 };
        let bin1 = if order >= 1 { s.delta(1, lp) } else { s.zero() };
        arcs.push(out.into_iter().map(|(a, r)| (a, r, bin1.clone())).collect());
        accept.push(if dfa.is_accepting(q) {
            s.delta(0, lp)
        } else {
            s.zero()
        });
    }
    WeightedDfa {
        start: dfa.start(),
        arcs,
        accept,
    }
}

/// Kleene closure `A*` of a square matrix by Lehmann's algorithm.
///
/// For each pivot `k`, every entry gains the paths through `k`
/// (`A[i][k] A[k][k]* A[k][j]`); the identity is added at the end.
pub fn lehmann<S: ClosedSemiring>(
    s: &S,
    mut a: Vec<Vec<S::Elem>>,
) -> Result<Vec<Vec<S::Elem>>, SemiringError> {
    let n = a.len();
    for k in 0..n {
        let pivot = s.star(&a[k][k])?;
        let row_k = a[k].clone();
        let col: Vec<Option<S::Elem>> = (0..n)
            .map(|i| (!s.is_zero(&a[i][k])).then(|| s.mul(&a[i][k], &pivot)))
            .collect();
        for (i, ci) in col.iter().enumerate() {
            let Some(ci) = ci else { continue };
            for (j, rkj) in row_k.iter().enumerate() {
                if s.is_zero(rkj) {
                    continue;
                }
                let t = s.mul(ci, rkj);
                s.add_assign(&mut a[i][j], &t);
            }
        }
    }
    let one = s.one();
    for (i, row) in a.iter_mut().enumerate() {
        s.add_assign(&mut row[i], &one);
    }
    Ok(a)
}

/// Backward weights `beta[q] = sum_r A*[q][r] rho(r)`.
pub fn backward<S: ClosedSemiring>(
    s: &S,
    m: &WeightedDfa<S::Elem>,
) -> Result<Vec<S::Elem>, SemiringError> {
    let n = m.num_states();
    let mut a = vec![vec![s.zero(); n]; n];
    for (q, arcs) in m.arcs.iter().enumerate() {
        for (_, r, w) in arcs {
            s.add_assign(&mut a[q][*r], w);
        }
    }
    let star = lehmann(s, a)?;
    Ok(star
        .iter()
        .map(|row| {
            let mut acc = s.zero();
            for (r, x) in row.iter().enumerate() {
                if s.is_zero(x) || s.is_zero(&m.accept[r]) {
                    continue;
                }
                let t = s.mul(x, &m.accept[r]);
                s.add_assign(&mut acc, &t);
            }
            acc
        })
        .collect())
}

/// Local distribution over a state's arcs for one remaining length.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    /// No accepted completion of this length exists from the state.
    Unavailable,
    Defined {
        probs: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

/// Arcs of a state with one column per remaining length `0..=D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PushedState {
    pub arcs: Vec<(Symbol, StateId)>,
    pub columns: Vec<Column>,
    pub next: NextSet,
    pub accepting: bool,
}

/// Everything needed to draw length-`n` strings for any `n <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerTables {
    pub order: usize,
    pub start: StateId,
    pub states: Vec<PushedState>,
    /// `allsum[n]`: log-probability that the lifted automaton emits an
    /// accepted string of length `n`.
    pub allsum: Vec<f64>,
}

/// Pushes backward weights through the arcs and normalizes per length.
///
/// For the arc `q -a-> r` and remaining length `i`, the unnormalized weight
/// is `T[a]_i = w(q,a,r)_1 + beta[r]_{i-1}`; each column is a softmax over
/// arcs.
pub fn push_weights(
    dfa: &PartialDfa,
    lifted: &WeightedDfa<BinVector<f64>>,
    beta: &[BinVector<f64>],
    order: usize,
) -> SamplerTables {
    let states = lifted
        .arcs
        .iter()
        .enumerate()
        .map(|(q, arcs)| {
            let mut columns = Vec::with_capacity(order + 1);
            columns.push(Column::Unavailable);
            for i in 1..=order {
                let t: Vec<f64> = arcs
                    .iter()
                    .map(|(_, r, w)| w.0[1] + beta[*r].0[i - 1])
                    .collect();
                let m = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if m == f64::NEG_INFINITY {
                    columns.push(Column::Unavailable);
                    continue;
                }
                let e: Vec<f64> = t.iter().map(|x| (x - m).exp()).collect();
                let z: f64 = e.iter().sum();
                let probs: Vec<f64> = e.iter().map(|x| x / z).collect();
                let cumulative = probs
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                columns.push(Column::Defined { probs, cumulative });
            }
            PushedState {
                arcs: arcs.iter().map(|(a, r, _)| (*a, *r)).collect(),
                columns,
                next: dfa.next_set(q),
                accepting: dfa.is_accepting(q),
            }
        })
        .collect();
    SamplerTables {
        order,
        start: lifted.start,
        states,
        allsum: beta[lifted.start].0.clone(),
    }
}

impl SamplerTables {
    /// Full preprocessing for lengths up to `order`.
    pub fn build(dfa: &PartialDfa, order: usize) -> Result<Self, SamplerError> {
        dfa.check_trim()?;
        let lifted = lift_weights(dfa, order);
        let beta = backward(&LogBins::new(Log, order), &lifted)?;
        Ok(push_weights(dfa, &lifted, &beta, order))
    }

    /// Lengths `n` in `[min, max]` (clipped to the order) with an accepted
    /// string of length `n`.
    pub fn valid_lengths(&self, min: usize, max: usize) -> Vec<usize> {
        (min..=max.min(self.order))
            .filter(|n| self.allsum[*n] > f64::NEG_INFINITY)
            .collect()
    }

    /// Probability of taking arc `idx` out of `q` with `i` symbols left.
    pub fn prob(&self, q: StateId, idx: usize, i: usize) -> Option<f64> {
        match &self.states[q].columns[i] {
            Column::Unavailable => None,
            Column::Defined { probs, .. } => Some(probs[idx]),
        }
    }

    /// Draws a string of length exactly `n` from the length-conditioned
    /// distribution, with the next set of every prefix.
    pub fn sample_string(
        &self,
        n: usize,
        rng: &mut dyn RngCore,
    ) -> Result<(Word, Vec<NextSet>), SamplerError> {
        if n > self.order || self.allsum[n] == f64::NEG_INFINITY {
            return Err(SamplerError::InvalidLength(n));
        }
        let mut q = self.start;
        let mut w = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n + 1);
        for i in (1..=n).rev() {
            let st = &self.states[q];
            next.push(st.next);
            let Column::Defined { cumulative, probs } = &st.columns[i] else {
                unreachable!("walk entered a state with no completion");
            };
            let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
            let mut idx = cumulative.partition_point(|c| *c <= u);
            if idx == cumulative.len() {
                idx = probs.iter().rposition(|p| *p > 0.0).unwrap();
            }
            let (a, r) = st.arcs[idx];
            w.push(a);
            q = r;
        }
        debug_assert!(self.states[q].accepting);
        next.push(self.states[q].next);
        Ok((w, next))
    }

    /// Length uniform over the valid lengths in `[min, max]`, then a
    /// conditional draw.
    pub fn sample_positive(
        &self,
        min: usize,
        max: usize,
        rng: &mut dyn RngCore,
    ) -> Result<(Word, Vec<NextSet>), SamplerError> {
        let lengths = self.valid_lengths(min, max);
        if lengths.is_empty() {
            return Err(SamplerError::NoValidLength(min, max));
        }
        let n = lengths[rng.random_range(0..lengths.len())];
        self.sample_string(n, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Real, Tropical};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parity() -> PartialDfa {
        let mut d = PartialDfa::new(2, 2, 0);
        d.add_transition(0, Symbol(0), 0);
        d.add_transition(0, Symbol(1), 1);
        d.add_transition(1, Symbol(0), 1);
        d.add_transition(1, Symbol(1), 0);
        d.set_accepting(1, true);
        d
    }

    fn repeat01() -> PartialDfa {
        let mut d = PartialDfa::new(2, 2, 0);
        d.add_transition(0, Symbol(0), 1);
        d.add_transition(1, Symbol(1), 0);
        d.set_accepting(0, true);
        d
    }

    #[test]
    fn lehmann_real_2x2() {
        let a = vec![vec![0.0, 0.5], vec![0.0, 0.0]];
        assert_eq!(
            lehmann(&Real, a).unwrap(),
            vec![vec![1.0, 0.5], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn lehmann_tropical_2x2() {
        let inf = f64::INFINITY;
        let a = vec![vec![inf, 1.0], vec![1.0, inf]];
        assert_eq!(
            lehmann(&Tropical, a).unwrap(),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn lehmann_divergent() {
        assert!(lehmann(&Real, vec![vec![1.5]]).is_err());
    }

    #[test]
    fn lehmann_real_geometric_cycle() {
        // Two-state cycle with weight 1/2 each way: (A*)[0][0] = 1/(1 - 1/4).
        let a = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        let s = lehmann(&Real, a).unwrap();
        assert!((s[0][0] - 4.0 / 3.0).abs() < 1e-15);
        assert!((s[0][1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lift_parity_weights() {
        let l = lift_weights(&parity(), 4);
        let third = -(3f64).ln();
        assert_eq!(l.arcs[1][0].2 .0[1], third);
        assert_eq!(l.accept[1].0[0], third);
        assert_eq!(l.arcs[0][0].2 .0[1], -(2f64).ln());
        assert!(Binning::new(Log, 4).is_zero(&l.accept[0]));
    }

    #[test]
    fn valid_lengths_examples() {
        let t = SamplerTables::build(&repeat01(), 10).unwrap();
        assert_eq!(t.valid_lengths(0, 10), vec![0, 2, 4, 6, 8, 10]);
        let t = SamplerTables::build(&parity(), 5).unwrap();
        assert_eq!(t.valid_lengths(0, 5), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn parity_last_step_is_forced() {
        let t = SamplerTables::build(&parity(), 6).unwrap();
        // From the even state with one symbol left, only '1' completes.
        assert_eq!(t.prob(0, 1, 1), Some(1.0));
        assert_eq!(t.prob(0, 0, 1), Some(0.0));
        assert_eq!(t.prob(1, 0, 1), Some(1.0));
        assert_eq!(t.prob(1, 0, 0), None);
    }

    #[test]
    fn invalid_length_rejected() {
        let t = SamplerTables::build(&repeat01(), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            t.sample_string(3, &mut rng),
            Err(SamplerError::InvalidLength(3))
        );
        assert_eq!(
            t.sample_string(11, &mut rng),
            Err(SamplerError::InvalidLength(11))
        );
        assert!(t.sample_positive(3, 3, &mut rng).is_err());
    }

    #[test]
    fn not_trim_rejected() {
        let mut d = parity();
        d = {
            let mut e = PartialDfa::new(3, 2, 0);
            for q in 0..2 {
                for (a, r) in d.outgoing(q) {
                    e.add_transition(q, a, r);
                }
            }
            e.set_accepting(1, true);
            e
        };
        assert!(matches!(
            SamplerTables::build(&d, 4),
            Err(SamplerError::NotTrim(_))
        ));
    }

    #[test]
    fn samples_are_members_with_scanned_next_sets() {
        let d = parity();
        let t = SamplerTables::build(&d, 30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=30 {
            let (w, next) = t.sample_string(n, &mut rng).unwrap();
            assert_eq!(w.len(), n);
            assert!(d.accepts(&w));
            assert_eq!(next, d.next_sets(&w));
        }
    }
}
