//! Semirings used by the sampler and the edit-distance pipeline.
//!
//! Every semiring is a small value type carrying whatever runtime parameters it
//! needs (the binning order, for instance), so operations take `&self`.

use std::fmt::Debug;

use thiserror::Error;

/// Failures of semiring operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiringError {
    #[error("star diverges at {0}")]
    Divergent(f64),
    #[error("binning order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
}

/// A commutative semiring over `Elem`.
pub trait Semiring {
    type Elem: Clone + Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add_assign(&self, acc: &mut Self::Elem, b: &Self::Elem) {
        *acc = self.add(acc, b);
    }
}

/// A semiring with a Kleene star `a* = 1 + a a*`.
pub trait ClosedSemiring: Semiring {
    fn star(&self, a: &Self::Elem) -> Result<Self::Elem, SemiringError>;
}

/// Nonnegative reals under `(+, *)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Real;

impl Semiring for Real {
    type Elem = f64;
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
}

impl ClosedSemiring for Real {
    fn star(&self, a: &f64) -> Result<f64, SemiringError> {
        if a.abs() < 1.0 {
            Ok(1.0 / (1.0 - a))
        } else {
            Err(SemiringError::Divergent(*a))
        }
    }
}

/// Log-space reals: `add` is log-sum-exp, `mul` is `+`, zero is `-inf`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Log;

/// Numerically stable `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl Semiring for Log {
    type Elem = f64;
    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        log_add_exp(*a, *b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == f64::NEG_INFINITY
    }
}

impl ClosedSemiring for Log {
    fn star(&self, a: &f64) -> Result<f64, SemiringError> {
        if *a == f64::NEG_INFINITY {
            Ok(0.0)
        } else if *a < 0.0 {
            Ok(-(-a.exp()).ln_1p())
        } else {
            Err(SemiringError::Divergent(*a))
        }
    }
}

/// `(min, +)` over `[0, inf]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tropical;

impl Semiring for Tropical {
    type Elem = f64;
    fn zero(&self) -> f64 {
        f64::INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.min(*b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == f64::INFINITY
    }
}

impl ClosedSemiring for Tropical {
    fn star(&self, a: &f64) -> Result<f64, SemiringError> {
        if *a >= 0.0 {
            Ok(0.0)
        } else {
            Err(SemiringError::Divergent(*a))
        }
    }
}

/// Base semirings usable inside [`Binning`].
///
/// `convolve` computes the truncated Cauchy product; the default is the
/// textbook `O(L^2)` loop, and [`Log`] overrides it with a faster path.
pub trait BinBase: ClosedSemiring {
    fn convolve(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        let len = a.len();
        let mut out = vec![self.zero(); len];
        for (i, ai) in a.iter().enumerate() {
            if self.is_zero(ai) {
                continue;
            }
            for (j, bj) in b[..len - i].iter().enumerate() {
                if self.is_zero(bj) {
                    continue;
                }
                let t = self.mul(ai, bj);
                self.add_assign(&mut out[i + j], &t);
            }
        }
        out
    }
}

impl BinBase for Real {}
impl BinBase for Tropical {}

impl BinBase for Log {
    fn convolve(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        log_convolve(a, b)
    }
}

/// Truncated log-space convolution: `out[i] = logsumexp_j (a[j] + b[i - j])`.
///
/// Both inputs are tilted by a common linear rate and shifted so their
/// maxima are zero, convolved in real space, and mapped back. Entries whose
/// real-space sum is too small to trust are recomputed exactly, which also
/// makes structural zeros come out as exactly `-inf`.
pub fn log_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len();
    debug_assert_eq!(len, b.len());
    let mut out = vec![f64::NEG_INFINITY; len];
    let (Some((alo, ahi)), Some((blo, bhi))) = (support(a), support(b)) else {
        return out;
    };
    if alo + blo >= len {
        return out;
    }
    let rate = if ahi > alo {
        (a[ahi] - a[alo]) / (ahi - alo) as f64
    } else if bhi > blo {
        (b[bhi] - b[blo]) / (bhi - blo) as f64
    } else {
        0.0
    };
    let tilt = |v: &[f64], lo: usize, hi: usize| -> (f64, Vec<f64>) {
        let m = (lo..=hi)
            .map(|j| v[j] - rate * j as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let t = (lo..=hi)
            .map(|j| (v[j] - rate * j as f64 - m).exp())
            .collect();
        (m, t)
    };
    let (ma, ta) = tilt(a, alo, ahi);
    let (mb, tb) = tilt(b, blo, bhi);
    let mut tb_rev = tb;
    tb_rev.reverse();
    let nb = tb_rev.len();

    for (i, slot) in out.iter_mut().enumerate().skip(alo + blo) {
        // j ranges over a's support with i - j inside b's support.
        let jlo = alo.max(i.saturating_sub(bhi));
        let jhi = ahi.min(i - blo);
        if jlo > jhi {
            continue;
        }
        let xs = &ta[jlo - alo..=jhi - alo];
        // b index k = i - j runs downward as j runs upward; in the reversed
        // buffer it runs upward starting at position nb - 1 - (i - jlo - blo).
        let start = nb - 1 - (i - jlo - blo);
        let ys = &tb_rev[start..start + xs.len()];
        let s = dot(xs, ys);
        if s > 1e-280 && s.is_finite() {
            *slot = ma + mb + rate * i as f64 + s.ln();
        } else {
            *slot = exact_entry(a, b, jlo, jhi, i);
        }
    }
    out
}

fn exact_entry(a: &[f64], b: &[f64], jlo: usize, jhi: usize, i: usize) -> f64 {
    let m = (jlo..=jhi)
        .map(|j| a[j] + b[i - j])
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = (jlo..=jhi).map(|j| (a[j] + b[i - j] - m).exp()).sum();
    m + s.ln()
}

fn support(v: &[f64]) -> Option<(usize, usize)> {
    let lo = v.iter().position(|x| *x > f64::NEG_INFINITY)?;
    let hi = v.iter().rposition(|x| *x > f64::NEG_INFINITY)?;
    Some((lo, hi))
}

#[inline]
fn dot(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let xc = xs.chunks_exact(4);
    let yc = ys.chunks_exact(4);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (x, y) in xc.zip(yc) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in xr.iter().zip(yr) {
        s += x * y;
    }
    s
}

/// A length-indexed weight vector of order `D` (`D + 1` bins).
#[derive(Debug, Clone, PartialEq)]
pub struct BinVector<E>(pub Vec<E>);

impl<E> BinVector<E> {
    /// Number of bins minus one.
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn bins(&self) -> &[E] {
        &self.0
    }
}

/// Binning semiring of order `D` over a base semiring.
///
/// Addition is elementwise; multiplication is convolution truncated at `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning<S> {
    pub base: S,
    pub order: usize,
}

impl<S: BinBase> Binning<S> {
    pub fn new(base: S, order: usize) -> Self {
        Self { base, order }
    }

    /// `x` placed in bin `i`, zeros elsewhere.
    pub fn delta(&self, i: usize, x: S::Elem) -> BinVector<S::Elem> {
        let mut v = vec![self.base.zero(); self.order + 1];
        v[i] = x;
        BinVector(v)
    }

    fn check(&self, v: &BinVector<S::Elem>) -> Result<(), SemiringError> {
        if v.0.len() == self.order + 1 {
            Ok(())
        } else {
            Err(SemiringError::OrderMismatch {
                left: self.order,
                right: v.0.len().wrapping_sub(1),
            })
        }
    }

    pub fn try_add(
        &self,
        a: &BinVector<S::Elem>,
        b: &BinVector<S::Elem>,
    ) -> Result<BinVector<S::Elem>, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn try_mul(
        &self,
        a: &BinVector<S::Elem>,
        b: &BinVector<S::Elem>,
    ) -> Result<BinVector<S::Elem>, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }
}

impl<S: BinBase> Semiring for Binning<S> {
    type Elem = BinVector<S::Elem>;

    fn zero(&self) -> Self::Elem {
        BinVector(vec![self.base.zero(); self.order + 1])
    }

    fn one(&self) -> Self::Elem {
        self.delta(0, self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        assert_eq!(a.0.len(), b.0.len(), "binning order mismatch");
        BinVector(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        )
    }

    fn add_assign(&self, acc: &mut Self::Elem, b: &Self::Elem) {
        assert_eq!(acc.0.len(), b.0.len(), "binning order mismatch");
        for (x, y) in acc.0.iter_mut().zip(&b.0) {
            if !self.base.is_zero(y) {
                self.base.add_assign(x, y);
            }
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        assert_eq!(a.0.len(), b.0.len(), "binning order mismatch");
        BinVector(self.base.convolve(&a.0, &b.0))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.iter().all(|x| self.base.is_zero(x))
    }
}

impl<S: BinBase> ClosedSemiring for Binning<S> {
    /// Solves `w = 1 + v w` bin by bin: `w_i = v_0* (1_i + sum_{j=1..i} v_j w_{i-j})`.
    fn star(&self, v: &Self::Elem) -> Result<Self::Elem, SemiringError> {
        let b = &self.base;
        let s0 = b.star(&v.0[0])?;
        let mut w: Vec<S::Elem> = Vec::with_capacity(v.0.len());
        w.push(s0.clone());
        for i in 1..v.0.len() {
            let mut acc = b.zero();
            for j in 1..=i {
                if b.is_zero(&v.0[j]) || b.is_zero(&w[i - j]) {
                    continue;
                }
                let t = b.mul(&v.0[j], &w[i - j]);
                b.add_assign(&mut acc, &t);
            }
            w.push(b.mul(&s0, &acc));
        }
        Ok(BinVector(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a == b) || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn log_add_exp_handles_zero() {
        assert_eq!(
            log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
        assert_eq!(log_add_exp(-3.0, f64::NEG_INFINITY), -3.0);
        assert!(close(log_add_exp(0.0, 0.0), 2f64.ln(), 1e-15));
        assert!(close(
            log_add_exp(-1000.0, -1000.0),
            -1000.0 + 2f64.ln(),
            1e-15
        ));
    }

    #[test]
    fn stars() {
        assert_eq!(Real.star(&0.5).unwrap(), 2.0);
        assert!(Real.star(&1.0).is_err());
        assert!(close(Log.star(&0.5f64.ln()).unwrap(), 2f64.ln(), 1e-15));
        assert_eq!(Log.star(&f64::NEG_INFINITY).unwrap(), 0.0);
        assert!(Log.star(&0.0).is_err());
        assert_eq!(Tropical.star(&3.0).unwrap(), 0.0);
    }

    #[test]
    fn real_bin_star_geometric() {
        let s = Binning::new(Real, 3);
        let w = s.star(&BinVector(vec![0.0, 0.5, 0.0, 0.0])).unwrap();
        assert_eq!(w.0, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn order_mismatch() {
        let s = Binning::new(Real, 2);
        let a = s.one();
        let b = BinVector(vec![0.0; 5]);
        assert_eq!(
            s.try_mul(&a, &b),
            Err(SemiringError::OrderMismatch { left: 2, right: 4 })
        );
    }

    #[test]
    fn log_convolve_matches_naive() {
        let a = vec![-1.0, f64::NEG_INFINITY, -2.5, -3.0, -900.0, -5.0];
        let b = vec![f64::NEG_INFINITY, -0.3, -1.2, f64::NEG_INFINITY, -4.0, -7.0];
        let fast = log_convolve(&a, &b);
        let generic: Vec<f64> = {
            let mut out = vec![f64::NEG_INFINITY; a.len()];
            for i in 0..a.len() {
                for j in 0..=i {
                    out[i] = log_add_exp(out[i], a[j] + b[i - j]);
                }
            }
            out
        };
        for (x, y) in fast.iter().zip(&generic) {
            assert!(close(*x, *y, 1e-12), "{x} vs {y}");
        }
        assert_eq!(fast[0], f64::NEG_INFINITY);
    }

    #[test]
    fn log_convolve_wide_dynamic_range() {
        // Entries spanning far more than the f64 exponent range.
        let a: Vec<f64> = (0..50).map(|i| -(i as f64).powi(2) * 3.0).collect();
        let b: Vec<f64> = (0..50).map(|i| -(i as f64) * 40.0).collect();
        let fast = log_convolve(&a, &b);
        for (i, got) in fast.iter().enumerate() {
            let want = (0..=i)
                .map(|j| a[j] + b[i - j])
                .fold(f64::NEG_INFINITY, log_add_exp);
            assert!(close(*got, want, 1e-12), "bin {i}: {got} vs {want}");
        }
    }
}
