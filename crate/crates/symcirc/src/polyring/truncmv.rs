//! Sparse multivariate polynomials with a total-degree cap; every
//! multiplication drops terms beyond the cap, which is exactly the
//! `mod <vars>^(D+1)` arithmetic the constructions reason in. A cap of
//! [`TruncMV::NO_CAP`] gives exact polynomial arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

use super::{binomial_in_field, UniPoly};

#[derive(Clone)]
pub struct TruncMV {
    ctx: FieldCtx,
    nvars: usize,
    cap: usize,
    /// exponent vector (length `nvars`) -> nonzero coefficient
    terms: BTreeMap<Vec<u16>, FieldElem>,
}

impl PartialEq for TruncMV {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl fmt::Debug for TruncMV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", self.ctx.to_packed(*c))?;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl TruncMV {
    /// Cap value meaning "no truncation".
    pub const NO_CAP: usize = usize::MAX;

    pub fn zero(ctx: &FieldCtx, nvars: usize, cap: usize) -> TruncMV {
        TruncMV {
            ctx: ctx.clone(),
            nvars,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &FieldCtx, nvars: usize, c: FieldElem, cap: usize) -> TruncMV {
        let mut t = TruncMV::zero(ctx, nvars, cap);
        if !ctx.is_zero(c) {
            t.terms.insert(vec![0; nvars], c);
        }
        t
    }

    pub fn variable(ctx: &FieldCtx, nvars: usize, i: usize, cap: usize) -> TruncMV {
        let mut t = TruncMV::zero(ctx, nvars, cap);
        if cap >= 1 {
            let mut e = vec![0u16; nvars];
            e[i] = 1;
            t.terms.insert(e, ctx.one());
        }
        t
    }

    /// The elementary symmetric polynomial `Esym_r` in `nvars` variables.
    pub fn esym(ctx: &FieldCtx, nvars: usize, r: usize, cap: usize) -> TruncMV {
        let mut t = TruncMV::zero(ctx, nvars, cap);
        if r > nvars || r > cap {
            return t;
        }
        let mut subset: Vec<usize> = (0..r).collect();
        loop {
            let mut e = vec![0u16; nvars];
            for &i in &subset {
                e[i] = 1;
            }
            t.terms.insert(e, ctx.one());
            // next r-subset in lexicographic order
            let mut i = r;
            loop {
                if i == 0 {
                    return t;
                }
                i -= 1;
                if subset[i] != i + nvars - r {
                    break;
                }
            }
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &FieldElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u16]) -> FieldElem {
        self.terms
            .get(exps)
            .copied()
            .unwrap_or_else(|| self.ctx.zero())
    }

    /// Adds `c * x^exps` in place (used by builders).
    pub fn add_term(&mut self, exps: Vec<u16>, c: FieldElem) {
        debug_assert_eq!(exps.len(), self.nvars);
        if self.ctx.is_zero(c) {
            return;
        }
        let total: usize = exps.iter().map(|&e| e as usize).sum();
        if total > self.cap {
            return;
        }
        let ctx = self.ctx.clone();
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = ctx.add(*o.get(), c);
                if ctx.is_zero(s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &TruncMV) -> TruncMV {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> TruncMV {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ctx.neg(*c);
        }
        out
    }

    pub fn sub(&self, other: &TruncMV) -> TruncMV {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElem) -> TruncMV {
        if self.ctx.is_zero(c) {
            return TruncMV::zero(&self.ctx, self.nvars, self.cap);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = self.ctx.mul(*v, c);
        }
        out
    }

    pub fn mul(&self, other: &TruncMV) -> TruncMV {
        let mut out = TruncMV::zero(&self.ctx, self.nvars, self.cap.min(other.cap));
        for (ea, ca) in &self.terms {
            let da: usize = ea.iter().map(|&e| e as usize).sum();
            for (eb, cb) in &other.terms {
                let db: usize = eb.iter().map(|&e| e as usize).sum();
                if da + db > out.cap {
                    continue;
                }
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(exps, self.ctx.mul(*ca, *cb));
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> TruncMV {
        let mut acc = TruncMV::constant(&self.ctx, self.nvars, self.ctx.one(), self.cap);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: &[FieldElem]) -> FieldElem {
        let ctx = &self.ctx;
        let mut acc = ctx.zero();
        for (exps, c) in &self.terms {
            let mut term = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = ctx.mul(term, ctx.pow(point[i], e as u64));
                }
            }
            acc = ctx.add(acc, term);
        }
        acc
    }

    /// The coefficient of `var^e`, as a polynomial with that exponent zeroed.
    pub fn coeff_of(&self, var: usize, e: usize) -> TruncMV {
        let mut out = TruncMV::zero(&self.ctx, self.nvars, self.cap);
        for (exps, c) in &self.terms {
            if exps[var] as usize == e {
                let mut ne = exps.clone();
                ne[var] = 0;
                out.add_term(ne, *c);
            }
        }
        out
    }

    /// Hasse derivative of order `i` with respect to `var`: the coefficient
    /// of `z^i` in the shift `var -> var + z`, i.e. `C(e, i)` rescaling.
    pub fn hasse_derivative(&self, var: usize, i: usize) -> TruncMV {
        let ctx = &self.ctx;
        let mut out = TruncMV::zero(ctx, self.nvars, self.cap);
        for (exps, c) in &self.terms {
            let e = exps[var] as usize;
            if e < i {
                continue;
            }
            let b = binomial_in_field(ctx, e as u64, i as u64);
            if ctx.is_zero(b) {
                continue;
            }
            let mut ne = exps.clone();
            ne[var] = (e - i) as u16;
            out.add_term(ne, ctx.mul(b, *c));
        }
        out
    }

    /// Substitution `var -> var + c`.
    pub fn shift_var(&self, var: usize, c: FieldElem) -> TruncMV {
        let ctx = &self.ctx;
        let mut out = TruncMV::zero(ctx, self.nvars, self.cap);
        for (exps, coef) in &self.terms {
            let e = exps[var] as usize;
            // (var + c)^e = sum_j C(e, j) c^(e-j) var^j
            for j in 0..=e {
                let b = binomial_in_field(ctx, e as u64, j as u64);
                let w = ctx.mul(b, ctx.pow(c, (e - j) as u64));
                if ctx.is_zero(w) {
                    continue;
                }
                let mut ne = exps.clone();
                ne[var] = j as u16;
                out.add_term(ne, ctx.mul(w, *coef));
            }
        }
        out
    }

    /// Substitutes a polynomial for a variable (same variable space).
    pub fn substitute(&self, var: usize, value: &TruncMV) -> TruncMV {
        let mut out = TruncMV::zero(&self.ctx, self.nvars, self.cap);
        for (exps, c) in &self.terms {
            let e = exps[var] as usize;
            let mut rest = exps.clone();
            rest[var] = 0;
            let mut term = TruncMV::zero(&self.ctx, self.nvars, self.cap);
            term.add_term(rest, *c);
            out = out.add(&term.mul(&value.pow(e)));
        }
        out
    }

    /// Reinterprets a univariate polynomial as a `TruncMV` in `nvars`
    /// variables (the polynomial's variable mapped to index `var`).
    pub fn from_unipoly(p: &UniPoly, nvars: usize, var: usize, cap: usize) -> TruncMV {
        let ctx = p.ctx();
        let mut out = TruncMV::zero(ctx, nvars, cap);
        for (i, &c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0u16; nvars];
            e[var] = i as u16;
            out.add_term(e, c);
        }
        out
    }

    /// Collapses to a univariate polynomial in `var`; all other exponents
    /// must be zero.
    pub fn to_unipoly(&self, var: usize) -> Result<UniPoly> {
        let mut coeffs = vec![self.ctx.zero(); self.degree_in(var) + 1];
        for (exps, c) in &self.terms {
            for (i, &e) in exps.iter().enumerate() {
                if i != var && e != 0 {
                    return Err(Error::DegenerateInput(
                        "polynomial depends on more than the requested variable".into(),
                    ));
                }
            }
            coeffs[exps[var] as usize] = *c;
        }
        Ok(UniPoly::new(&self.ctx, coeffs))
    }

    pub fn truncate_total(&self, d: usize) -> TruncMV {
        let mut out = TruncMV::zero(&self.ctx, self.nvars, d.min(self.cap));
        for (exps, c) in &self.terms {
            out.add_term(exps.clone(), *c);
        }
        out
    }

    /// Drops terms with `var`-degree above `d` (per-variable truncation).
    pub fn truncate_var(&self, var: usize, d: usize) -> TruncMV {
        let mut out = TruncMV::zero(&self.ctx, self.nvars, self.cap);
        for (exps, c) in &self.terms {
            if (exps[var] as usize) <= d {
                out.add_term(exps.clone(), *c);
            }
        }
        out
    }
}

/// Serde surface: `{vars, cap, terms:[{exps, coeff}]}` with coefficients as
/// packed integers.
#[derive(Serialize, Deserialize)]
pub struct TruncMVRepr {
    pub vars: usize,
    pub cap: Option<usize>,
    pub terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct TermRepr {
    pub exps: Vec<u16>,
    pub coeff: u64,
}

impl TruncMV {
    pub fn to_repr(&self) -> TruncMVRepr {
        TruncMVRepr {
            vars: self.nvars,
            cap: (self.cap != Self::NO_CAP).then_some(self.cap),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exps: e.clone(),
                    coeff: self.ctx.to_packed(*c),
                })
                .collect(),
        }
    }

    pub fn from_repr(ctx: &FieldCtx, repr: &TruncMVRepr) -> Result<TruncMV> {
        let cap = repr.cap.unwrap_or(Self::NO_CAP);
        let mut out = TruncMV::zero(ctx, repr.vars, cap);
        for t in &repr.terms {
            if t.exps.len() != repr.vars {
                return Err(Error::ParseError {
                    at: "terms".into(),
                    msg: "exponent vector length mismatch".into(),
                });
            }
            if t.coeff >= ctx.cardinality() {
                return Err(Error::ParseError {
                    at: "terms".into(),
                    msg: format!("coefficient {} out of range", t.coeff),
                });
            }
            out.add_term(t.exps.clone(), ctx.from_packed(t.coeff));
        }
        Ok(out)
    }
}
