//! Commutative rings with an embedding of the field constants; the substrate
//! for ring-generic circuit evaluation.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

use super::truncmv::TruncMV;

pub trait Ring {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Embedding of the base-field constants.
    fn embed(&self, c: FieldElem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// Scalar action of the field; rings can override with a cheaper path.
    fn scale(&self, a: &Self::Elem, c: FieldElem) -> Self::Elem {
        self.mul(a, &self.embed(c))
    }

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            if e > 1 {
                base = self.mul(&base, &base);
            }
            e >>= 1;
        }
        acc
    }
}

/// The field itself as a ring.
#[derive(Clone, Debug)]
pub struct FieldRing(pub FieldCtx);

impl Ring for FieldRing {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        self.0.zero()
    }
    fn one(&self) -> FieldElem {
        self.0.one()
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        self.0.is_zero(*a)
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.0.add(*a, *b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        self.0.neg(*a)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.0.mul(*a, *b)
    }
    fn embed(&self, c: FieldElem) -> FieldElem {
        c
    }
    fn scale(&self, a: &FieldElem, c: FieldElem) -> FieldElem {
        self.0.mul(*a, c)
    }
    fn pow(&self, a: &FieldElem, e: u64) -> FieldElem {
        self.0.pow(*a, e)
    }
}

/// Dense univariate polynomials, optionally truncated at `t^(trunc+1)`.
/// Elements are coefficient vectors in ascending order with no fixed length.
#[derive(Clone, Debug)]
pub struct UniSeriesRing {
    pub ctx: FieldCtx,
    pub trunc: Option<usize>,
}

impl UniSeriesRing {
    pub fn new(ctx: FieldCtx, trunc: Option<usize>) -> Self {
        UniSeriesRing { ctx, trunc }
    }

    fn clamp(&self, mut v: Vec<FieldElem>) -> Vec<FieldElem> {
        if let Some(d) = self.trunc {
            v.truncate(d + 1);
        }
        while v.last().map_or(false, |&c| self.ctx.is_zero(c)) {
            v.pop();
        }
        v
    }

    /// The monomial `t`.
    pub fn var(&self) -> Vec<FieldElem> {
        self.clamp(vec![self.ctx.zero(), self.ctx.one()])
    }

    pub fn from_coeffs(&self, coeffs: Vec<FieldElem>) -> Vec<FieldElem> {
        self.clamp(coeffs)
    }

    pub fn coeff(&self, a: &[FieldElem], i: usize) -> FieldElem {
        a.get(i).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn eval_at(&self, a: &[FieldElem], x: FieldElem) -> FieldElem {
        let mut acc = self.ctx.zero();
        for &c in a.iter().rev() {
            acc = self.ctx.add(self.ctx.mul(acc, x), c);
        }
        acc
    }

    /// Multiplicative inverse as a truncated series; `None` when the constant
    /// term vanishes (or the ring is not truncated).
    pub fn series_inverse(&self, a: &[FieldElem]) -> Option<Vec<FieldElem>> {
        let d = self.trunc?;
        let c0 = self.coeff(a, 0);
        let c0_inv = self.ctx.inv(c0).ok()?;
        let mut b = vec![self.ctx.zero(); d + 1];
        b[0] = c0_inv;
        for n in 1..=d {
            let mut s = self.ctx.zero();
            for i in 1..=n.min(a.len().saturating_sub(1)) {
                s = self.ctx.add(s, self.ctx.mul(a[i], b[n - i]));
            }
            b[n] = self.ctx.neg(self.ctx.mul(c0_inv, s));
        }
        Some(self.clamp(b))
    }
}

impl Ring for UniSeriesRing {
    type Elem = Vec<FieldElem>;

    fn zero(&self) -> Vec<FieldElem> {
        Vec::new()
    }
    fn one(&self) -> Vec<FieldElem> {
        vec![self.ctx.one()]
    }
    fn is_zero(&self, a: &Vec<FieldElem>) -> bool {
        a.iter().all(|&c| self.ctx.is_zero(c))
    }
    fn add(&self, a: &Vec<FieldElem>, b: &Vec<FieldElem>) -> Vec<FieldElem> {
        let n = a.len().max(b.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.ctx.add(self.coeff(a, i), self.coeff(b, i)));
        }
        self.clamp(v)
    }
    fn neg(&self, a: &Vec<FieldElem>) -> Vec<FieldElem> {
        a.iter().map(|&c| self.ctx.neg(c)).collect()
    }
    fn mul(&self, a: &Vec<FieldElem>, b: &Vec<FieldElem>) -> Vec<FieldElem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let full = a.len() + b.len() - 1;
        let n = match self.trunc {
            Some(d) => full.min(d + 1),
            None => full,
        };
        let mut v = vec![self.ctx.zero(); n];
        for (i, &ai) in a.iter().enumerate() {
            if self.ctx.is_zero(ai) || i >= n {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                v[i + j] = self.ctx.add(v[i + j], self.ctx.mul(ai, bj));
            }
        }
        self.clamp(v)
    }
    fn embed(&self, c: FieldElem) -> Vec<FieldElem> {
        if self.ctx.is_zero(c) {
            Vec::new()
        } else {
            vec![c]
        }
    }
    fn scale(&self, a: &Vec<FieldElem>, c: FieldElem) -> Vec<FieldElem> {
        if self.ctx.is_zero(c) {
            return Vec::new();
        }
        self.clamp(a.iter().map(|&x| self.ctx.mul(x, c)).collect())
    }
}

/// [`TruncMV`] values as a ring; the prototype fixes context, variable count
/// and the total-degree cap.
#[derive(Clone, Debug)]
pub struct TruncRing {
    pub ctx: FieldCtx,
    pub nvars: usize,
    pub cap: usize,
}

impl TruncRing {
    pub fn new(ctx: FieldCtx, nvars: usize, cap: usize) -> Self {
        TruncRing { ctx, nvars, cap }
    }

    pub fn var(&self, i: usize) -> TruncMV {
        TruncMV::variable(&self.ctx, self.nvars, i, self.cap)
    }
}

impl Ring for TruncRing {
    type Elem = TruncMV;

    fn zero(&self) -> TruncMV {
        TruncMV::zero(&self.ctx, self.nvars, self.cap)
    }
    fn one(&self) -> TruncMV {
        TruncMV::constant(&self.ctx, self.nvars, self.ctx.one(), self.cap)
    }
    fn is_zero(&self, a: &TruncMV) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &TruncMV, b: &TruncMV) -> TruncMV {
        a.add(b)
    }
    fn neg(&self, a: &TruncMV) -> TruncMV {
        a.neg()
    }
    fn mul(&self, a: &TruncMV, b: &TruncMV) -> TruncMV {
        a.mul(b)
    }
    fn embed(&self, c: FieldElem) -> TruncMV {
        TruncMV::constant(&self.ctx, self.nvars, c, self.cap)
    }
    fn scale(&self, a: &TruncMV, c: FieldElem) -> TruncMV {
        a.scale(c)
    }
}

/// `Esym_r` of a list of ring values, by the coefficient recurrence of
/// `prod_i (1 + t v_i)`; `Esym_0 = 1`.
pub fn esym_eval<R: Ring>(ring: &R, values: &[R::Elem], r: usize) -> Result<R::Elem> {
    if r > values.len() {
        return Err(Error::IndexOutOfRange {
            index: r,
            max: values.len(),
        });
    }
    let mut coeffs: Vec<R::Elem> = vec![ring.one()];
    for v in values {
        let new_len = (coeffs.len() + 1).min(r + 1);
        let mut next = vec![ring.zero(); new_len];
        for i in 0..coeffs.len().min(new_len) {
            next[i] = coeffs[i].clone();
        }
        for i in 0..coeffs.len() {
            if i + 1 < new_len {
                let shifted = ring.mul(&coeffs[i], v);
                next[i + 1] = ring.add(&next[i + 1], &shifted);
            }
        }
        coeffs = next;
    }
    Ok(coeffs.get(r).cloned().unwrap_or_else(|| ring.zero()))
}
