//! Exact polynomial and truncated power-series arithmetic, plus every
//! classical oracle the circuit constructions are verified against.
//!
//! The [`Ring`] trait is the evaluation substrate: circuits evaluate over any
//! commutative ring with an embedding of the field constants — the field
//! itself, dense univariate (truncated) polynomial rings, or [`TruncMV`].

mod ring;
mod truncmv;
mod unipoly;

pub use ring::{esym_eval, FieldRing, Ring, TruncRing, UniSeriesRing};
pub use truncmv::{TruncMV, TruncMVRepr};
pub use unipoly::UniPoly;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

/// Binomial coefficient `C(n, k)` mapped into the field, computed with
/// Lucas' reduction so characteristic-`p` vanishing is exact.
pub fn binomial_in_field(ctx: &FieldCtx, n: u64, k: u64) -> FieldElem {
    let p = ctx.characteristic();
    if k > n {
        return ctx.zero();
    }
    let mut n = n;
    let mut k = k;
    let mut acc = ctx.one();
    while k > 0 || n > 0 {
        let nd = n % p;
        let kd = k % p;
        if kd > nd {
            return ctx.zero();
        }
        // C(nd, kd) mod p by the multiplicative formula; every divisor < p
        let mut digit = ctx.one();
        for i in 1..=kd {
            let num = ctx.from_int((nd - kd + i) as i64);
            let den = ctx.inv(ctx.from_int(i as i64)).expect("0 < i < p");
            digit = ctx.mul(digit, ctx.mul(num, den));
        }
        acc = ctx.mul(acc, digit);
        n /= p;
        k /= p;
    }
    acc
}

/// Determinant of the Sylvester matrix of `f` and `g` (both of degree >= 1),
/// by Gaussian elimination over the field. Row layout puts the `deg g`
/// shifted copies of `f` first, so that `Res(y - a, y - b) = a - b`.
pub fn sylvester_resultant(f: &UniPoly, g: &UniPoly) -> Result<FieldElem> {
    let ctx = f.ctx().clone();
    let a = f.degree().filter(|&d| d >= 1).ok_or(Error::DegreeZero)?;
    let b = g.degree().filter(|&d| d >= 1).ok_or(Error::DegreeZero)?;
    let n = a + b;
    let mut m = vec![vec![ctx.zero(); n]; n];
    for i in 0..b {
        for j in 0..=a {
            m[i][i + j] = f.coeff(a - j);
        }
    }
    for i in 0..a {
        for j in 0..=b {
            m[b + i][i + j] = g.coeff(b - j);
        }
    }
    Ok(determinant(&ctx, m))
}

/// Determinant by elimination with column pivoting; exact over a field.
pub fn determinant(ctx: &FieldCtx, mut m: Vec<Vec<FieldElem>>) -> FieldElem {
    let n = m.len();
    let mut det = ctx.one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !ctx.is_zero(m[r][col]));
        let Some(pivot) = pivot else {
            return ctx.zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = ctx.neg(det);
        }
        let pv = m[col][col];
        det = ctx.mul(det, pv);
        let pv_inv = ctx.inv(pv).expect("pivot nonzero");
        for r in col + 1..n {
            let factor = ctx.mul(m[r][col], pv_inv);
            if ctx.is_zero(factor) {
                continue;
            }
            for c in col..n {
                let sub = ctx.mul(factor, m[col][c]);
                m[r][c] = ctx.sub(m[r][c], sub);
            }
        }
    }
    det
}

/// Solves `A x = b` exactly over the field. Returns `None` when the system is
/// inconsistent; free variables (if any) are set to zero.
pub fn solve_linear(
    ctx: &FieldCtx,
    mut a: Vec<Vec<FieldElem>>,
    mut b: Vec<FieldElem>,
    unknowns: usize,
) -> Option<Vec<FieldElem>> {
    let rows = a.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; unknowns];
    let mut row = 0;
    for col in 0..unknowns {
        let Some(p) = (row..rows).find(|&r| !ctx.is_zero(a[r][col])) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = ctx.inv(a[row][col]).unwrap();
        for c in col..unknowns {
            a[row][c] = ctx.mul(a[row][c], inv);
        }
        b[row] = ctx.mul(b[row], inv);
        for r in 0..rows {
            if r != row && !ctx.is_zero(a[r][col]) {
                let f = a[r][col];
                for c in col..unknowns {
                    let sub = ctx.mul(f, a[row][c]);
                    a[r][c] = ctx.sub(a[r][c], sub);
                }
                let sub = ctx.mul(f, b[row]);
                b[r] = ctx.sub(b[r], sub);
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    for r in row..rows {
        if !ctx.is_zero(b[r]) && a[r].iter().all(|&x| ctx.is_zero(x)) {
            return None;
        }
    }
    let mut x = vec![ctx.zero(); unknowns];
    for col in 0..unknowns {
        if let Some(r) = pivot_of_col[col] {
            x[col] = b[r];
        }
    }
    Some(x)
}

/// Lifts the power-series root of `P(t, y)` at `y(0) = y0` to precision
/// `t^d` by quadratic Newton iteration in the truncated ring. Requires
/// `P(0, y0) = 0` and a nonvanishing first `y`-derivative there.
pub fn newton_lift(p: &TruncMV, y0: FieldElem, d: usize) -> Result<UniPoly> {
    let ctx = p.ctx().clone();
    let t_var = 0usize;
    let y_var = 1usize;
    assert_eq!(p.num_vars(), 2, "newton_lift expects a bivariate in (t, y)");
    if !ctx.is_zero(p.eval(&[ctx.zero(), y0])) {
        return Err(Error::NotARoot);
    }
    let py = p.hasse_derivative(y_var, 1);
    if ctx.is_zero(py.eval(&[ctx.zero(), y0])) {
        return Err(Error::SingularRoot);
    }

    let ring = UniSeriesRing::new(ctx.clone(), Some(d));
    // coefficients of y^j as truncated series in t
    let to_series = |q: &TruncMV| -> Vec<Vec<FieldElem>> {
        let ydeg = q.degree_in(y_var);
        (0..=ydeg)
            .map(|j| {
                let c = q.coeff_of(y_var, j);
                let mut v = vec![ctx.zero(); d + 1];
                for (exps, coef) in c.terms() {
                    let e = exps[t_var] as usize;
                    if e <= d {
                        v[e] = ctx.add(v[e], *coef);
                    }
                }
                v
            })
            .collect()
    };
    let p_coeffs = to_series(p);
    let py_coeffs = to_series(&py);
    let eval_at = |coeffs: &[Vec<FieldElem>], yv: &Vec<FieldElem>| -> Vec<FieldElem> {
        let mut acc = ring.zero();
        for c in coeffs.iter().rev() {
            acc = ring.mul(&acc, yv);
            acc = ring.add(&acc, c);
        }
        acc
    };

    let mut phi = ring.embed(y0);
    let steps = (usize::BITS - d.leading_zeros()) as usize + 2;
    for _ in 0..steps {
        let val = eval_at(&p_coeffs, &phi);
        let der = eval_at(&py_coeffs, &phi);
        let inv = ring
            .series_inverse(&der)
            .ok_or(Error::SingularRoot)?;
        let delta = ring.mul(&val, &inv);
        phi = ring.sub(&phi, &delta);
    }
    let check = eval_at(&p_coeffs, &phi);
    if !ring.is_zero(&check) {
        return Err(Error::NotARoot);
    }
    Ok(UniPoly::new(&ctx, phi))
}

/// The unique `Q` with `Q(Esym_1, ..., Esym_n) = P`, found by exact linear
/// algebra over monomials of weighted degree at most `d` (`z_i` carries
/// weight `i`).
pub fn symdecomp_oracle(
    p: &TruncMV,
    d: usize,
    rng: &mut impl rand::Rng,
) -> Result<TruncMV> {
    let ctx = p.ctx().clone();
    let n = p.num_vars();
    // randomized symmetry precheck: transposition evaluations
    for i in 0..n {
        for j in i + 1..n {
            for _ in 0..20 {
                let mut pt: Vec<FieldElem> = (0..n).map(|_| ctx.rand(rng)).collect();
                let v1 = p.eval(&pt);
                pt.swap(i, j);
                let v2 = p.eval(&pt);
                if v1 != v2 {
                    return Err(Error::NotSymmetric(format!(" in variables {i}, {j}")));
                }
            }
        }
    }

    // basis monomials: weighted degree sum(i * e_i) <= d
    let mut basis: Vec<Vec<u16>> = Vec::new();
    let mut stack = vec![(vec![0u16; n], 0usize, 0usize)];
    while let Some((exps, var, wdeg)) = stack.pop() {
        if var == n {
            basis.push(exps);
            continue;
        }
        let weight = var + 1;
        let mut e = 0;
        loop {
            let w = wdeg + weight * e as usize;
            if w > d {
                break;
            }
            let mut next = exps.clone();
            next[var] = e;
            stack.push((next, var + 1, w));
            e += 1;
        }
    }
    basis.sort();

    let esyms: Vec<TruncMV> = (1..=n).map(|i| TruncMV::esym(&ctx, n, i, d)).collect();
    let expansions: Vec<TruncMV> = basis
        .iter()
        .map(|exps| {
            let mut acc = TruncMV::constant(&ctx, n, ctx.one(), d);
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul(&esyms[i]);
                }
            }
            acc
        })
        .collect();

    // row index: every x-monomial appearing anywhere
    let mut all_monomials: std::collections::BTreeSet<Vec<u16>> = std::collections::BTreeSet::new();
    for t in expansions.iter().chain(std::iter::once(p)) {
        for (exps, _) in t.terms() {
            all_monomials.insert(exps.clone());
        }
    }
    let rows: Vec<Vec<u16>> = all_monomials.into_iter().collect();
    let row_idx: std::collections::HashMap<&Vec<u16>, usize> =
        rows.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut a = vec![vec![ctx.zero(); basis.len()]; rows.len()];
    for (col, exp) in expansions.iter().enumerate() {
        for (m, c) in exp.terms() {
            a[row_idx[m]][col] = *c;
        }
    }
    let mut b = vec![ctx.zero(); rows.len()];
    for (m, c) in p.terms() {
        b[row_idx[m]] = *c;
    }
    let sol = solve_linear(&ctx, a, b, basis.len()).ok_or(Error::InconsistentSystem)?;

    let mut q = TruncMV::zero(&ctx, n, d);
    for (exps, c) in basis.iter().zip(sol) {
        if !ctx.is_zero(c) {
            q.add_term(exps.clone(), c);
        }
    }
    Ok(q)
}
