//! Little-endian binary arithmetic: addition, multiplication, square root.
//!
//! Operands are nonempty little-endian bit strings that may carry trailing
//! zeros; `0` is written `0`, never as the empty string.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Gamma};

use super::{uniform, Class, Language};
use crate::automata::{Alphabet, NextSet, Symbol, Word};
use crate::error::Result;

const ZERO: Symbol = Symbol(0);
const ONE: Symbol = Symbol(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Mul,
    Sqrt,
}

/// `u_x + u_y = u_z`, `u_x × u_y = u_z` or `u_x = u_z` with the arithmetic
/// relation holding between the encoded values.
pub struct Arithmetic {
    op: Op,
    alphabet: Alphabet,
    op_sym: Option<Symbol>,
    eq: Symbol,
}

impl Arithmetic {
    fn new(op: Op) -> Self {
        let alphabet = match op {
            Op::Add => Alphabet::new(&["0", "1", "+", "="]),
            Op::Mul => Alphabet::new(&["0", "1", "×", "="]),
            Op::Sqrt => Alphabet::new(&["0", "1", "="]),
        };
        let op_sym = (op != Op::Sqrt).then_some(Symbol(2));
        Self {
            op,
            eq: alphabet.sym("="),
            alphabet,
            op_sym,
        }
    }

    pub fn addition() -> Self {
        Self::new(Op::Add)
    }

    pub fn multiplication() -> Self {
        Self::new(Op::Mul)
    }

    pub fn sqrt() -> Self {
        Self::new(Op::Sqrt)
    }

    fn result(&self, x: &BigUint, y: Option<&BigUint>) -> BigUint {
        match (self.op, y) {
            (Op::Add, Some(y)) => x + y,
            (Op::Mul, Some(y)) => x * y,
            _ => x.sqrt(),
        }
    }

    fn is_bits(u: &[Symbol]) -> bool {
        !u.is_empty() && u.iter().all(|s| *s == ZERO || *s == ONE)
    }
}

/// Value of a little-endian bit string.
pub fn decode(bits: &[Symbol]) -> BigUint {
    let digits: Vec<u8> = bits.iter().map(|s| s.0).collect();
    BigUint::from_radix_le(&digits, 2).unwrap_or_default()
}

/// Shortest little-endian encoding, `0` for zero.
pub fn encode(v: &BigUint) -> Word {
    if v.is_zero() {
        return vec![ZERO];
    }
    v.to_radix_le(2).into_iter().map(Symbol).collect()
}

fn encode_padded(v: &BigUint, len: usize) -> Word {
    let mut w = encode(v);
    debug_assert!(w.len() <= len);
    w.resize(len, ZERO);
    w
}

fn pow2m1(bits: usize) -> BigUint {
    (BigUint::one() << bits) - 1u32
}

/// Uniform integer in `[0, hi]` by rejection over random bits.
fn uniform_big(rng: &mut dyn RngCore, hi: &BigUint) -> BigUint {
    let bits = hi.bits() as usize;
    if bits == 0 {
        return BigUint::zero();
    }
    let mut buf = vec![0u8; bits.div_ceil(8)];
    let top = bits % 8;
    loop {
        rng.fill_bytes(&mut buf);
        if top != 0 {
            *buf.last_mut().unwrap() &= (1u8 << top) - 1;
        }
        let v = BigUint::from_bytes_le(&buf);
        if v <= *hi {
            return v;
        }
    }
}

/// Splits `total` into parts proportional to a Dirichlet draw, rounded by
/// largest remainder so the parts sum to `total` exactly.
pub fn dirichlet_parts(alphas: &[f64], total: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let g: Vec<f64> = alphas
        .iter()
        .map(|a| Gamma::new(*a, 1.0).expect("positive shape").sample(rng))
        .collect();
    let s: f64 = g.iter().sum();
    let quotas: Vec<f64> = g.iter().map(|x| x / s * total as f64).collect();
    let mut parts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = parts.iter().sum();
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|a, b| {
        let fa = quotas[*a] - quotas[*a].floor();
        let fb = quotas[*b] - quotas[*b].floor();
        fb.total_cmp(&fa).then(a.cmp(b))
    });
    for i in order.into_iter().take(total.saturating_sub(assigned)) {
        parts[i] += 1;
    }
    parts
}

#[derive(Debug, Clone)]
enum Phase {
    /// Reading operand `idx` (0 for x, 1 for y) with `len` bits so far.
    Operand {
        idx: usize,
        len: usize,
    },
    /// After `=`: the shortest encoding of the result, then optional zeros.
    Result {
        target: Word,
        read: usize,
    },
    Dead,
}

struct Scan<'a> {
    lang: &'a Arithmetic,
    phase: Phase,
    operands: [Word; 2],
}

impl<'a> Scan<'a> {
    fn new(lang: &'a Arithmetic) -> Self {
        Self {
            lang,
            phase: Phase::Operand { idx: 0, len: 0 },
            operands: [vec![], vec![]],
        }
    }

    fn next_set(&self) -> NextSet {
        let bits = NextSet::EMPTY.with(ZERO).with(ONE);
        match &self.phase {
            Phase::Operand { len: 0, .. } => bits,
            Phase::Operand { idx: 0, .. } => bits.with(self.lang.op_sym.unwrap_or(self.lang.eq)),
            Phase::Operand { .. } => bits.with(self.lang.eq),
            Phase::Result { target, read } => match target.get(*read) {
                Some(b) => NextSet::EMPTY.with(*b),
                None => NextSet::EMPTY.with(ZERO).with_eos(),
            },
            Phase::Dead => NextSet::EMPTY,
        }
    }

    fn step(&mut self, a: Symbol) {
        if !self.next_set().contains(a) {
            self.phase = Phase::Dead;
            return;
        }
        let two_operands = self.lang.op_sym.is_some();
        self.phase = match std::mem::replace(&mut self.phase, Phase::Dead) {
            Phase::Operand { idx, len } if a == ZERO || a == ONE => {
                self.operands[idx].push(a);
                Phase::Operand { idx, len: len + 1 }
            }
            Phase::Operand { idx: 0, .. } if two_operands => Phase::Operand { idx: 1, len: 0 },
            Phase::Operand { .. } => {
                let x = decode(&self.operands[0]);
                let y = two_operands.then(|| decode(&self.operands[1]));
                Phase::Result {
                    target: encode(&self.lang.result(&x, y.as_ref())),
                    read: 0,
                }
            }
            Phase::Result { target, read } => Phase::Result {
                target,
                read: read + 1,
            },
            Phase::Dead => Phase::Dead,
        };
    }
}

impl Language for Arithmetic {
    fn name(&self) -> &'static str {
        match self.op {
            Op::Add => "binary-addition",
            Op::Mul => "binary-multiplication",
            Op::Sqrt => "compute-sqrt",
        }
    }

    fn class(&self) -> Class {
        Class::ContextSensitive
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let parts: Vec<&[Symbol]> = w.split(|s| *s == self.eq).collect();
        let [lhs, z] = parts[..] else { return false };
        if !Self::is_bits(z) {
            return false;
        }
        let (x, y) = match self.op_sym {
            Some(op) => {
                let ops: Vec<&[Symbol]> = lhs.split(|s| *s == op).collect();
                let [x, y] = ops[..] else { return false };
                if !Self::is_bits(y) {
                    return false;
                }
                (x, Some(decode(y)))
            }
            None => (lhs, None),
        };
        Self::is_bits(x) && self.result(&decode(x), y.as_ref()) == decode(z)
    }

    fn sample_positive(&self, min: usize, max: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let op = self.op_sym;
        if self.op == Op::Sqrt {
            let n = uniform(rng, min.max(3), max, "length")?;
            let p = dirichlet_parts(&[2.0, 1.0], n - 3, rng);
            let (nx, nz) = (p[0] + 1, p[1] + 1);
            let hi = pow2m1(nx).min(pow2m1(2 * nz));
            let x = uniform_big(rng, &hi);
            let z = x.sqrt();
            let mut w = encode_padded(&x, nx);
            w.push(self.eq);
            w.extend(encode_padded(&z, nz));
            return Ok(w);
        }
        let n = uniform(rng, min.max(5), max, "length")?;
        let alphas: &[f64] = match self.op {
            Op::Add => &[1.0, 1.0, 1.0],
            _ => &[1.0, 1.0, 2.0],
        };
        let p = dirichlet_parts(alphas, n - 5, rng);
        let (mut nx, mut ny, nz) = (p[0] + 1, p[1] + 1, p[2] + 1);
        if nx > ny {
            std::mem::swap(&mut nx, &mut ny);
        }
        let (x, y, z) = if self.op == Op::Add {
            let x = uniform_big(rng, &pow2m1(nx).min(pow2m1(nz)));
            let y = uniform_big(rng, &pow2m1(ny).min(pow2m1(nz) - &x));
            let z = &x + &y;
            (x, y, z)
        } else {
            let x = uniform_big(rng, &pow2m1(nx));
            let y_hi = if x.is_zero() {
                pow2m1(ny)
            } else {
                pow2m1(ny).min(pow2m1(nz) / &x)
            };
            let y = uniform_big(rng, &y_hi);
            let z = &x * &y;
            (x, y, z)
        };
        let mut ux = encode_padded(&x, nx);
        let mut uy = encode_padded(&y, ny);
        if rng.random_bool(0.5) {
            std::mem::swap(&mut ux, &mut uy);
        }
        let mut w = ux;
        w.push(op.unwrap());
        w.extend(uy);
        w.push(self.eq);
        w.extend(encode_padded(&z, nz));
        Ok(w)
    }

    fn next_sets(&self, w: &[Symbol]) -> Vec<NextSet> {
        let mut s = Scan::new(self);
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(s.next_set());
        for a in w {
            s.step(*a);
            out.push(s.next_set());
        }
        out
    }
}
