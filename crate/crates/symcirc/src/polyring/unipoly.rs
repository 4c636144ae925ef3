//! Dense univariate polynomials over a finite field, in canonical form
//! (no trailing zero coefficient; the zero polynomial has an empty vector).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

use super::binomial_in_field;

#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    ctx: FieldCtx,
    /// ascending coefficients, canonical
    coeffs: Vec<FieldElem>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if self.ctx.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cv = self.ctx.to_packed(c);
            match i {
                0 => write!(f, "{cv}")?,
                _ => {
                    if cv != 1 {
                        write!(f, "{cv}*")?;
                    }
                    if i == 1 {
                        write!(f, "y")?;
                    } else {
                        write!(f, "y^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl UniPoly {
    pub fn new(ctx: &FieldCtx, mut coeffs: Vec<FieldElem>) -> UniPoly {
        while coeffs.last().map_or(false, |&c| ctx.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn zero(ctx: &FieldCtx) -> UniPoly {
        UniPoly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &FieldCtx) -> UniPoly {
        UniPoly::constant(ctx, ctx.one())
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem) -> UniPoly {
        UniPoly::new(ctx, vec![c])
    }

    /// `c * y^e`
    pub fn monomial(ctx: &FieldCtx, c: FieldElem, e: usize) -> UniPoly {
        let mut coeffs = vec![ctx.zero(); e + 1];
        coeffs[e] = c;
        UniPoly::new(ctx, coeffs)
    }

    pub fn from_ints(ctx: &FieldCtx, ints: &[i64]) -> UniPoly {
        UniPoly::new(ctx, ints.iter().map(|&c| ctx.from_int(c)).collect())
    }

    /// Monic product of `(y - r)` over the given roots.
    pub fn from_roots(ctx: &FieldCtx, roots: &[FieldElem]) -> UniPoly {
        let mut acc = UniPoly::one(ctx);
        for &r in roots {
            let lin = UniPoly::new(ctx, vec![ctx.neg(r), ctx.one()]);
            acc = acc.mul(&lin);
        }
        acc
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` encodes degree -infinity (the zero polynomial).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(self.ctx.one())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.ctx.add(self.coeff(i), other.coeff(i)))
            .collect();
        UniPoly::new(&self.ctx, v)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(
            &self.ctx,
            self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect(),
        )
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElem) -> UniPoly {
        UniPoly::new(
            &self.ctx,
            self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(&self.ctx);
        }
        let mut v = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if self.ctx.is_zero(a) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = self.ctx.add(v[i + j], self.ctx.mul(a, b));
            }
        }
        UniPoly::new(&self.ctx, v)
    }

    pub fn pow(&self, e: usize) -> UniPoly {
        let mut acc = UniPoly::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let ctx = &self.ctx;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = ctx.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UniPoly::zero(ctx), self.clone()));
        }
        let mut quot = vec![ctx.zero(); rem.len() - dd];
        while rem.len() > dd {
            let c = *rem.last().unwrap();
            let shift = rem.len() - 1 - dd;
            if !ctx.is_zero(c) {
                let q = ctx.mul(c, lead_inv);
                quot[shift] = q;
                for (i, &dc) in divisor.coeffs.iter().enumerate() {
                    let sub = ctx.mul(q, dc);
                    rem[shift + i] = ctx.sub(rem[shift + i], sub);
                }
            }
            rem.pop();
        }
        Ok((UniPoly::new(ctx, quot), UniPoly::new(ctx, rem)))
    }

    /// Exact division; errors with [`Error::NonzeroRemainder`] otherwise.
    pub fn div_exact(&self, divisor: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(Error::NonzeroRemainder);
        }
        Ok(q)
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let mut acc = self.ctx.zero();
        for &c in self.coeffs.iter().rev() {
            acc = self.ctx.add(self.ctx.mul(acc, x), c);
        }
        acc
    }

    /// Composition `p(y + c)`.
    pub fn shift(&self, c: FieldElem) -> UniPoly {
        let ctx = &self.ctx;
        let lin = UniPoly::new(ctx, vec![c, ctx.one()]);
        let mut acc = UniPoly::zero(ctx);
        for &a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin);
            acc = acc.add(&UniPoly::constant(ctx, a));
        }
        acc
    }

    /// Classical derivative.
    pub fn derivative(&self) -> UniPoly {
        let ctx = &self.ctx;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
            .collect();
        UniPoly::new(ctx, v)
    }

    /// Hasse derivative of order `i`: the coefficient of `z^i` in `p(y + z)`,
    /// i.e. `sum_e C(e, i) p_e y^(e-i)`.
    pub fn hasse_derivative(&self, i: usize) -> UniPoly {
        let ctx = &self.ctx;
        if self.coeffs.len() <= i {
            return UniPoly::zero(ctx);
        }
        let v = (i..self.coeffs.len())
            .map(|e| {
                let b = binomial_in_field(ctx, e as u64, i as u64);
                ctx.mul(b, self.coeffs[e])
            })
            .collect();
        UniPoly::new(ctx, v)
    }

    pub fn monic(&self) -> Result<UniPoly> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(self.ctx.inv(lead)?))
    }

    /// Monic greatest common divisor by the Euclidean algorithm;
    /// `gcd(f, 0) = monic(f)`.
    pub fn euclid_gcd(&self, other: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True when the polynomial has no repeated roots over the closure.
    /// Over finite fields this is exactly `gcd(f, f') = 1` (with `f' = 0`
    /// meaning `f` is a p-th power, hence not square-free).
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None | Some(0) => true,
            Some(_) => {
                let der = self.derivative();
                if der.is_zero() {
                    return false;
                }
                self.euclid_gcd(&der)
                    .map(|g| g.degree() == Some(0))
                    .unwrap_or(false)
            }
        }
    }

    /// The p-th root of a polynomial whose derivative vanishes (every
    /// exponent a multiple of `p`; coefficients are p-th powers since the
    /// field is perfect).
    pub fn p_th_root(&self) -> Result<UniPoly> {
        let ctx = &self.ctx;
        let p = ctx.characteristic() as usize;
        let q = ctx.cardinality();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() / p + 1);
        for (e, &c) in self.coeffs.iter().enumerate() {
            if e % p == 0 {
                coeffs.push(ctx.pow(c, q / p as u64));
            } else if !ctx.is_zero(c) {
                return Err(Error::DegenerateInput(
                    "polynomial is not a p-th power".into(),
                ));
            }
        }
        Ok(UniPoly::new(ctx, coeffs))
    }

    /// The radical: the monic product of the distinct irreducible factors,
    /// valid in any characteristic (descends through p-th powers).
    pub fn radical(&self) -> Result<UniPoly> {
        let ctx = &self.ctx;
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.degree() == Some(0) {
            return Ok(UniPoly::one(ctx));
        }
        let der = self.derivative();
        if der.is_zero() {
            return self.p_th_root()?.radical();
        }
        // factors with multiplicity not divisible by p survive in f/gcd(f, f')
        let w = self.div_exact(&self.euclid_gcd(&der)?)?;
        let w = w.monic()?;
        // strip those factors entirely; what remains is a p-th power
        let mut rest = self.monic()?;
        loop {
            let g = rest.euclid_gcd(&w)?;
            if g.degree() == Some(0) {
                break;
            }
            rest = rest.div_exact(&g)?;
        }
        if rest.degree() == Some(0) {
            return Ok(w);
        }
        Ok(w.mul(&rest.radical()?).monic()?)
    }

    /// All roots in the coefficient field, found by enumeration, with
    /// multiplicities (repeated in the output).
    pub fn roots_by_enumeration(&self) -> Vec<FieldElem> {
        let ctx = &self.ctx;
        let mut roots = Vec::new();
        let mut cur = self.clone();
        for i in 0..ctx.cardinality() {
            let x = ctx.element(i);
            while !cur.is_zero() && cur.degree() > Some(0) && ctx.is_zero(cur.eval(x)) {
                roots.push(x);
                let lin = UniPoly::new(ctx, vec![ctx.neg(x), ctx.one()]);
                cur = cur.div_exact(&lin).expect("x is a root");
            }
            if cur.degree() == Some(0) || cur.is_zero() {
                break;
            }
        }
        roots
    }
}
