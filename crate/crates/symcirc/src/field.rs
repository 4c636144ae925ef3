//! Exact arithmetic in prime fields `F_p` and extension fields `F_{p^k}`.
//!
//! Prime fields store elements as residues and multiply with `u64` mulmod
//! (`p < 2^31`). Extension fields are restricted to `q = p^k <= 2^16` and use
//! discrete-log tables with Zech logarithms, so every field operation is a
//! couple of table lookups. That covers every field the constructions are
//! exercised on; larger extensions are rejected at construction.
//!
//! Contexts are immutable and cheaply cloneable (`Arc` inside); elements are
//! plain `u64` codes interpreted by their context.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Sentinel code for the zero element in log-represented extension fields.
const ZERO_CODE: u64 = u64::MAX;

/// Largest supported extension-field cardinality (table-backed arithmetic).
pub const MAX_EXT_CARDINALITY: u64 = 1 << 16;

/// An element of a finite field, interpreted through its [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem(pub(crate) u64);

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == ZERO_CODE {
            write!(f, "elem(0)")
        } else {
            write!(f, "elem[{}]", self.0)
        }
    }
}

#[derive(Debug)]
enum Backend {
    /// Residue representation, `code` in `[0, p)`.
    Prime,
    /// Discrete-log representation: `code` is the exponent of a fixed
    /// generator, with [`ZERO_CODE`] for zero. Tables are `u16` so the whole
    /// backend stays cache-resident for every supported cardinality.
    Log {
        /// packed coefficient vector -> exponent (index 0 unused)
        log: Vec<u16>,
        /// exponent -> packed coefficient vector
        alog: Vec<u16>,
        /// `zech[d] = log_g(1 + g^d)`, `u16::MAX` when `1 + g^d = 0`
        zech: Vec<u16>,
        /// exponent of `-1` (0 in characteristic 2)
        neg_shift: u64,
    },
}

struct CtxInner {
    p: u64,
    k: usize,
    /// Monic defining polynomial, ascending, length `k + 1`. `[0, 1]` for `k = 1`.
    irred: Vec<u64>,
    q: u64,
    backend: Backend,
}

impl fmt::Debug for CtxInner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(q = {}^{})", self.p, self.k)
    }
}

/// A prime or extension field context. All element operations are methods on
/// the context; elements do not carry a back-reference.
#[derive(Clone, Debug)]
pub struct FieldCtx(Arc<CtxInner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.irred == other.0.irred)
    }
}
impl Eq for FieldCtx {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Dense polynomial arithmetic over `F_p` on raw residue vectors; only used
/// while building extension-field tables and checking irreducibility.
mod raw {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        rem(&mut prod, modulus, p);
        prod
    }

    /// Reduces `v` modulo the monic polynomial `m` in place (degree < deg m).
    pub fn rem(v: &mut Vec<u64>, m: &[u64], p: u64) {
        let dm = m.len() - 1;
        trim(v);
        while v.len() > dm {
            let c = *v.last().unwrap();
            let shift = v.len() - 1 - dm;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = shift + i;
                    let sub = (c * mi) % p;
                    v[idx] = (v[idx] + p - sub) % p;
                }
            }
            v.pop();
            trim(v);
        }
        v.resize(dm, 0);
    }

    pub fn pack(v: &[u64], p: u64) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    pub fn unpack(mut x: u64, p: u64, k: usize) -> Vec<u64> {
        let mut v = Vec::with_capacity(k);
        for _ in 0..k {
            v.push(x % p);
            x /= p;
        }
        v
    }
}

impl FieldCtx {
    /// Builds the context for a prime field `F_p`. Small primes get the
    /// same table-backed arithmetic as extensions; larger ones fall back to
    /// residue arithmetic.
    pub fn prime(p: u64) -> Result<FieldCtx> {
        if p >= 1 << 31 {
            return Err(Error::UnsupportedField(format!("p = {p} >= 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let backend = if p <= MAX_EXT_CARDINALITY {
            build_log_tables(p, 1, p, &[0, 1])
        } else {
            Backend::Prime
        };
        Ok(FieldCtx(Arc::new(CtxInner {
            p,
            k: 1,
            irred: vec![0, 1],
            q: p,
            backend,
        })))
    }

    /// Builds the context for `F_{p^k}`. When `irred` is omitted the
    /// lexicographically first monic irreducible of degree `k` is used, so
    /// the context is deterministic.
    pub fn extension(p: u64, k: usize, irred: Option<Vec<u64>>) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::UnsupportedField("extension degree 0".into()));
        }
        if k == 1 {
            return FieldCtx::prime(p);
        }
        let q = p
            .checked_pow(k as u32)
            .filter(|&q| q <= MAX_EXT_CARDINALITY)
            .ok_or_else(|| {
                Error::UnsupportedField(format!("q = {p}^{k} exceeds table-backed bound 2^16"))
            })?;
        let irred = match irred {
            Some(mut f) => {
                raw::trim(&mut f);
                if f.len() != k + 1 || *f.last().unwrap() % p != 1 {
                    return Err(Error::ParseError {
                        at: "defining polynomial".into(),
                        msg: format!("expected monic of degree {k}"),
                    });
                }
                let f: Vec<u64> = f.iter().map(|c| c % p).collect();
                if !poly_irreducible(&f, p) {
                    return Err(Error::NotIrreducible(p));
                }
                f
            }
            None => first_irreducible(p, k),
        };
        let backend = build_log_tables(p, k, q, &irred);
        Ok(FieldCtx(Arc::new(CtxInner {
            p,
            k,
            irred,
            q,
            backend,
        })))
    }

    /// Parses a field spec string: `p`, `p^k`, or `p^k:c0,c1,...,ck`.
    pub fn parse_spec(spec: &str) -> Result<FieldCtx> {
        let err = |msg: &str| Error::ParseError {
            at: format!("field spec `{spec}`"),
            msg: msg.into(),
        };
        let (base, irred) = match spec.split_once(':') {
            Some((b, i)) => {
                let coeffs: std::result::Result<Vec<i64>, _> =
                    i.split(',').map(|c| c.trim().parse::<i64>()).collect();
                (b, Some(coeffs.map_err(|_| err("bad irreducible coefficients"))?))
            }
            None => (spec, None),
        };
        let (p, k) = match base.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u64>().map_err(|_| err("bad characteristic"))?,
                k.trim().parse::<usize>().map_err(|_| err("bad extension degree"))?,
            ),
            None => (base.trim().parse::<u64>().map_err(|_| err("bad prime"))?, 1),
        };
        let irred = irred.map(|cs| {
            cs.into_iter()
                .map(|c| (c.rem_euclid(p as i64)) as u64)
                .collect()
        });
        if k == 1 {
            FieldCtx::prime(p)
        } else {
            FieldCtx::extension(p, k, irred)
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    /// Stable identifier of the field (characteristic, degree and defining
    /// polynomial); used as a cache key by plan and family caches.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x100000001b3);
        };
        feed(self.0.p);
        feed(self.0.k as u64);
        for &c in &self.0.irred {
            feed(c);
        }
        h
    }

    pub fn extension_degree(&self) -> usize {
        self.0.k
    }

    pub fn cardinality(&self) -> u64 {
        self.0.q
    }

    /// Defining polynomial (ascending coefficients, monic, length `k + 1`).
    pub fn defining_poly(&self) -> &[u64] {
        &self.0.irred
    }

    pub fn spec_string(&self) -> String {
        if self.0.k == 1 {
            format!("{}", self.0.p)
        } else {
            format!("{}^{}", self.0.p, self.0.k)
        }
    }

    pub fn zero(&self) -> FieldElem {
        match self.0.backend {
            Backend::Prime => FieldElem(0),
            Backend::Log { .. } => FieldElem(ZERO_CODE),
        }
    }

    pub fn one(&self) -> FieldElem {
        match self.0.backend {
            Backend::Prime => FieldElem(1),
            Backend::Log { .. } => FieldElem(0),
        }
    }

    pub fn is_zero(&self, a: FieldElem) -> bool {
        a == self.zero()
    }

    /// Embeds an integer via reduction mod `p`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let r = n.rem_euclid(self.0.p as i64) as u64;
        match &self.0.backend {
            Backend::Prime => FieldElem(r),
            Backend::Log { log, .. } => {
                if r == 0 {
                    FieldElem(ZERO_CODE)
                } else {
                    FieldElem(log[r as usize] as u64)
                }
            }
        }
    }

    /// The element with packed coefficient value `x = sum c_i p^i`, `x < q`.
    pub fn from_packed(&self, x: u64) -> FieldElem {
        debug_assert!(x < self.0.q);
        match &self.0.backend {
            Backend::Prime => FieldElem(x),
            Backend::Log { log, .. } => {
                if x == 0 {
                    FieldElem(ZERO_CODE)
                } else {
                    FieldElem(log[x as usize] as u64)
                }
            }
        }
    }

    /// Packed coefficient value of an element, `sum c_i p^i`.
    pub fn to_packed(&self, a: FieldElem) -> u64 {
        match &self.0.backend {
            Backend::Prime => a.0,
            Backend::Log { alog, .. } => {
                if a.0 == ZERO_CODE {
                    0
                } else {
                    alog[a.0 as usize] as u64
                }
            }
        }
    }

    /// Coefficient vector over `F_p` (length `k`).
    pub fn coeffs(&self, a: FieldElem) -> Vec<u64> {
        raw::unpack(self.to_packed(a), self.0.p, self.0.k)
    }

    /// Element from a coefficient vector over `F_p`.
    pub fn from_coeffs(&self, c: &[u64]) -> FieldElem {
        let mut v: Vec<u64> = c.iter().map(|&x| x % self.0.p).collect();
        v.resize(self.0.k, 0);
        self.from_packed(raw::pack(&v, self.0.p))
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.0.backend {
            Backend::Prime => {
                let s = a.0 + b.0;
                FieldElem(if s >= self.0.p { s - self.0.p } else { s })
            }
            Backend::Log { zech, .. } => {
                if a.0 == ZERO_CODE {
                    return b;
                }
                if b.0 == ZERO_CODE {
                    return a;
                }
                let n = self.0.q - 1;
                // g^a + g^b = g^a (1 + g^{b-a})
                let mut d = b.0 + n - a.0;
                if d >= n {
                    d -= n;
                }
                let z = zech[d as usize];
                if z == u16::MAX {
                    FieldElem(ZERO_CODE)
                } else {
                    let mut e = a.0 + z as u64;
                    if e >= n {
                        e -= n;
                    }
                    FieldElem(e)
                }
            }
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        match &self.0.backend {
            Backend::Prime => FieldElem(if a.0 == 0 { 0 } else { self.0.p - a.0 }),
            Backend::Log { neg_shift, .. } => {
                if a.0 == ZERO_CODE {
                    a
                } else {
                    FieldElem((a.0 + neg_shift) % (self.0.q - 1))
                }
            }
        }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.0.backend {
            Backend::Prime => FieldElem((a.0 * b.0) % self.0.p),
            Backend::Log { .. } => {
                if a.0 == ZERO_CODE || b.0 == ZERO_CODE {
                    FieldElem(ZERO_CODE)
                } else {
                    let n = self.0.q - 1;
                    let mut e = a.0 + b.0;
                    if e >= n {
                        e -= n;
                    }
                    FieldElem(e)
                }
            }
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match &self.0.backend {
            Backend::Prime => Ok(self.pow(a, self.0.p - 2)),
            Backend::Log { .. } => {
                let n = self.0.q - 1;
                Ok(FieldElem((n - a.0) % n))
            }
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        match &self.0.backend {
            Backend::Prime => {
                let mut base = a.0;
                let mut acc = 1u64;
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % self.0.p;
                    }
                    base = base * base % self.0.p;
                    e >>= 1;
                }
                FieldElem(acc)
            }
            Backend::Log { .. } => {
                if a.0 == ZERO_CODE {
                    return if e == 0 { self.one() } else { self.zero() };
                }
                let n = self.0.q - 1;
                FieldElem((a.0 as u128 * (e % n) as u128 % n as u128) as u64)
            }
        }
    }

    /// The `i`-th element in the fixed enumeration (packed coefficient
    /// vectors in ascending order), used wherever distinct points are needed.
    pub fn element(&self, i: u64) -> FieldElem {
        debug_assert!(i < self.0.q);
        self.from_packed(i)
    }

    /// `n` pairwise distinct elements in the fixed enumeration order.
    pub fn distinct_points(&self, n: usize) -> Result<Vec<FieldElem>> {
        if (n as u64) > self.0.q {
            return Err(Error::FieldTooSmall {
                needed: n as u64,
                have: self.0.q,
            });
        }
        Ok((0..n as u64).map(|i| self.element(i)).collect())
    }

    /// Uniformly random element.
    pub fn rand(&self, rng: &mut impl rand::Rng) -> FieldElem {
        self.element(rng.gen_range(0..self.0.q))
    }

    /// Uniformly random nonzero element.
    pub fn rand_nonzero(&self, rng: &mut impl rand::Rng) -> FieldElem {
        self.element(rng.gen_range(1..self.0.q))
    }

    pub fn elem_to_string(&self, a: FieldElem) -> String {
        format!("{}", self.to_packed(a))
    }

    /// Smallest extension of the same characteristic whose degree is a
    /// multiple of this field's degree and whose cardinality is at least
    /// `needed`; used to lift constructions off fields that are too small.
    pub fn extension_with_cardinality(&self, needed: u64) -> Result<FieldCtx> {
        let p = self.0.p;
        let k = self.0.k;
        if self.0.q >= needed {
            return Ok(self.clone());
        }
        let mut kk = k;
        loop {
            kk += k;
            match p.checked_pow(kk as u32) {
                Some(q) if q <= MAX_EXT_CARDINALITY => {
                    if q >= needed {
                        return FieldCtx::extension(p, kk, None);
                    }
                }
                _ => {
                    return Err(Error::FieldTooSmall {
                        needed,
                        have: self.0.q,
                    })
                }
            }
        }
    }
}

/// True when `f` (monic, ascending, coefficients reduced) has no monic factor
/// of degree `1..=deg(f)/2`; trial division at desk scale.
fn poly_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        // all monic polynomials of degree d
        let count = p.pow(d as u32);
        for key in 0..count {
            let mut g = raw::unpack(key, p, d);
            g.push(1);
            let mut r = f.to_vec();
            raw::rem(&mut r, &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
    let count = p.pow(k as u32);
    for key in 0..count {
        let mut f = raw::unpack(key, p, k);
        f.push(1);
        if poly_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

fn build_log_tables(p: u64, k: usize, q: u64, irred: &[u64]) -> Backend {
    let n = q - 1;
    let prime_factors = {
        let mut fs = Vec::new();
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                fs.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            fs.push(m);
        }
        fs
    };
    let pow_raw = |a: &[u64], mut e: u64| -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = vec![0u64; k];
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = raw::mulmod(&acc, &base, irred, p);
            }
            base = raw::mulmod(&base, &base, irred, p);
            e >>= 1;
        }
        acc
    };
    // generator search in enumeration order (q = 2 has the trivial group)
    let mut generator = if q == 2 { Some(vec![1u64]) } else { None };
    'outer: for cand in 2..q {
        if generator.is_some() {
            break;
        }
        let c = raw::unpack(cand, p, k);
        for &f in &prime_factors {
            let e = pow_raw(&c, n / f);
            if raw::pack(&e, p) == 1 {
                continue 'outer;
            }
        }
        generator = Some(c);
        break;
    }
    let g = generator.expect("multiplicative group of a finite field is cyclic");

    let mut log = vec![0u16; q as usize];
    let mut alog = vec![0u16; n as usize];
    let mut cur = vec![0u64; k];
    cur[0] = 1;
    for i in 0..n {
        let packed = raw::pack(&cur, p) as u16;
        alog[i as usize] = packed;
        log[packed as usize] = i as u16;
        cur = raw::mulmod(&cur, &g, irred, p);
    }
    debug_assert_eq!(raw::pack(&cur, p), 1, "generator order must be q - 1");

    let mut zech = vec![u16::MAX; n as usize];
    for d in 0..n {
        let mut v = raw::unpack(alog[d as usize] as u64, p, k);
        v[0] = (v[0] + 1) % p;
        let packed = raw::pack(&v, p);
        if packed != 0 {
            zech[d as usize] = log[packed as usize];
        }
    }
    let neg_shift = if p == 2 { 0 } else { n / 2 };
    Backend::Log {
        log,
        alog,
        zech,
        neg_shift,
    }
}

/// An embedding of a small field into an extension of the same
/// characteristic whose degree is a multiple of the source degree.
pub struct Embedding {
    pub from: FieldCtx,
    pub to: FieldCtx,
    /// forward[packed source value] = target element
    forward: Vec<FieldElem>,
    /// target packed value -> packed source value (only for subfield members)
    backward: std::collections::HashMap<u64, u64>,
}

impl Embedding {
    /// Finds the deterministic embedding sending the source generator `x` to
    /// the first root of the source's defining polynomial in the target.
    pub fn new(from: &FieldCtx, to: &FieldCtx) -> Result<Embedding> {
        if from.characteristic() != to.characteristic()
            || to.extension_degree() % from.extension_degree() != 0
        {
            return Err(Error::UnsupportedField(
                "no subfield embedding between these fields".into(),
            ));
        }
        if from == to {
            let forward: Vec<FieldElem> =
                (0..from.cardinality()).map(|i| from.from_packed(i)).collect();
            let backward = forward.iter().map(|e| (to.to_packed(*e), to.to_packed(*e))).collect();
            return Ok(Embedding {
                from: from.clone(),
                to: to.clone(),
                forward,
                backward,
            });
        }
        // root of the source defining polynomial in the target field
        let def: Vec<FieldElem> = from
            .defining_poly()
            .iter()
            .map(|&c| to.from_int(c as i64))
            .collect();
        let mut theta = None;
        for i in 0..to.cardinality() {
            let x = to.element(i);
            let mut acc = to.zero();
            for &c in def.iter().rev() {
                acc = to.add(to.mul(acc, x), c);
            }
            if to.is_zero(acc) {
                theta = Some(x);
                break;
            }
        }
        let theta = theta.ok_or_else(|| {
            Error::UnsupportedField("defining polynomial has no root in target".into())
        })?;
        let k = from.extension_degree();
        let mut pows = Vec::with_capacity(k);
        let mut cur = to.one();
        for _ in 0..k {
            pows.push(cur);
            cur = to.mul(cur, theta);
        }
        let p = from.characteristic();
        let mut forward = Vec::with_capacity(from.cardinality() as usize);
        let mut backward = std::collections::HashMap::new();
        for packed in 0..from.cardinality() {
            let coeffs = raw::unpack(packed, p, k);
            let mut img = to.zero();
            for (i, &c) in coeffs.iter().enumerate() {
                img = to.add(img, to.mul(to.from_int(c as i64), pows[i]));
            }
            forward.push(img);
            backward.insert(to.to_packed(img), packed);
        }
        Ok(Embedding {
            from: from.clone(),
            to: to.clone(),
            forward,
            backward,
        })
    }

    pub fn lift(&self, a: FieldElem) -> FieldElem {
        self.forward[self.from.to_packed(a) as usize]
    }

    /// Maps back; `None` when the element lies outside the embedded subfield.
    pub fn project(&self, a: FieldElem) -> Option<FieldElem> {
        self.backward
            .get(&self.to.to_packed(a))
            .map(|&packed| self.from.from_packed(packed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_field_construction() {
        assert_eq!(FieldCtx::prime(7).unwrap().cardinality(), 7);
        assert_eq!(FieldCtx::prime(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldCtx::prime(10007).unwrap().cardinality(), 10007);
    }

    #[test]
    fn extension_field_construction() {
        // x^3 + x + 1 over F_2: no root in F_2 and no quadratic factor
        let f8 = FieldCtx::extension(2, 3, Some(vec![1, 1, 0, 1])).unwrap();
        assert_eq!(f8.cardinality(), 8);
        // x^2 + 1 = (x + 1)^2 over F_2
        assert_eq!(
            FieldCtx::extension(2, 2, Some(vec![1, 0, 1])).unwrap_err(),
            Error::NotIrreducible(2)
        );
        let f3 = FieldCtx::extension(3, 1, None).unwrap();
        assert_eq!(f3.cardinality(), 3);
    }

    #[test]
    fn basic_arithmetic() {
        let f7 = FieldCtx::prime(7).unwrap();
        // inv(3) = 5 since 3 * 5 = 15 = 1 mod 7
        assert_eq!(f7.inv(f7.from_int(3)).unwrap(), f7.from_int(5));
        assert_eq!(f7.add(f7.from_int(6), f7.from_int(5)), f7.from_int(4));
        assert_eq!(f7.inv(f7.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn frobenius_fixes_elements() {
        // a^q = a for all a, in particular for the generator x of F_8
        let f8 = FieldCtx::extension(2, 3, Some(vec![1, 1, 0, 1])).unwrap();
        let x = f8.from_packed(2); // the class of x
        assert_eq!(f8.pow(x, 8), x);
        for i in 0..8 {
            let a = f8.element(i);
            assert_eq!(f8.pow(a, 8), a);
        }
    }

    #[test]
    fn distinct_points_basics() {
        let f7 = FieldCtx::prime(7).unwrap();
        let pts = f7.distinct_points(3).unwrap();
        assert_eq!(pts, vec![f7.from_int(0), f7.from_int(1), f7.from_int(2)]);
        let f5 = FieldCtx::prime(5).unwrap();
        assert!(matches!(
            f5.distinct_points(6),
            Err(Error::FieldTooSmall { needed: 6, have: 5 })
        ));
        let f8 = FieldCtx::extension(2, 3, None).unwrap();
        let pts = f8.distinct_points(5).unwrap();
        for i in 0..pts.len() {
            for j in 0..i {
                assert_ne!(pts[i], pts[j]);
            }
        }
        assert_eq!(pts, f8.distinct_points(5).unwrap());
    }

    fn check_axioms(ctx: &FieldCtx, trials: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let a = ctx.rand(&mut rng);
            let b = ctx.rand(&mut rng);
            let c = ctx.rand(&mut rng);
            assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
            assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
            assert_eq!(
                ctx.mul(a, ctx.add(b, c)),
                ctx.add(ctx.mul(a, b), ctx.mul(a, c))
            );
            assert_eq!(ctx.add(a, b), ctx.add(b, a));
            assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
            assert_eq!(ctx.sub(a, a), ctx.zero());
            if !ctx.is_zero(a) {
                assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.one());
            }
            // Frobenius is additive in characteristic p
            let p = ctx.characteristic();
            assert_eq!(
                ctx.pow(ctx.add(a, b), p),
                ctx.add(ctx.pow(a, p), ctx.pow(b, p))
            );
        }
    }

    #[test]
    fn field_axioms_randomized() {
        for ctx in [
            FieldCtx::prime(7).unwrap(),
            FieldCtx::prime(10007).unwrap(),
            FieldCtx::extension(2, 12, None).unwrap(),
            FieldCtx::extension(3, 4, None).unwrap(),
            FieldCtx::extension(2, 3, None).unwrap(),
        ] {
            check_axioms(&ctx, 10_000, 42);
        }
    }

    #[test]
    fn log_backend_matches_raw_polynomial_arithmetic() {
        let p = 3u64;
        let k = 2usize;
        let ctx = FieldCtx::extension(p, k, None).unwrap();
        let irred = ctx.defining_poly().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = ctx.rand(&mut rng);
            let b = ctx.rand(&mut rng);
            let ra = raw::unpack(ctx.to_packed(a), p, k);
            let rb = raw::unpack(ctx.to_packed(b), p, k);
            let prod = raw::mulmod(&ra, &rb, &irred, p);
            assert_eq!(ctx.to_packed(ctx.mul(a, b)), raw::pack(&prod, p));
            let sum: Vec<u64> = ra.iter().zip(&rb).map(|(x, y)| (x + y) % p).collect();
            assert_eq!(ctx.to_packed(ctx.add(a, b)), raw::pack(&sum, p));
        }
    }

    #[test]
    fn parse_spec_forms() {
        assert_eq!(FieldCtx::parse_spec("10007").unwrap().cardinality(), 10007);
        assert_eq!(FieldCtx::parse_spec("2^4").unwrap().cardinality(), 16);
        let f8 = FieldCtx::parse_spec("2^3:1,1,0,1").unwrap();
        assert_eq!(f8.defining_poly(), &[1, 1, 0, 1]);
        assert!(FieldCtx::parse_spec("nope").is_err());
    }

    #[test]
    fn embedding_roundtrip() {
        let small = FieldCtx::extension(3, 4, None).unwrap();
        let big = small.extension_with_cardinality(200).unwrap();
        assert_eq!(big.cardinality(), 6561);
        let emb = Embedding::new(&small, &big).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = small.rand(&mut rng);
            let b = small.rand(&mut rng);
            let la = emb.lift(a);
            let lb = emb.lift(b);
            assert_eq!(emb.project(la), Some(a));
            assert_eq!(emb.lift(small.mul(a, b)), big.mul(la, lb));
            assert_eq!(emb.lift(small.add(a, b)), big.add(la, lb));
        }
        // elements outside the subfield do not project
        let outside = (0..big.cardinality())
            .map(|i| big.element(i))
            .find(|&x| emb.project(x).is_none());
        assert!(outside.is_some());
    }
}
