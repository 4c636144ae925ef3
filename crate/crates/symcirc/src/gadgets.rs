//! Constant-depth circuit building blocks: interpolation-based coefficient
//! and homogeneous-part extraction, Hasse-derivative gadgets, the depth-3
//! elementary symmetric gadget, and truncated division elimination.
//!
//! Every gadget adds at most a fixed number of levels over its argument
//! circuit (asserted structurally in the tests); sizes grow with the
//! interpolation point counts instead.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::circuit::{Builder, Circuit, HomLayer, InputSel};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::polyring::{binomial_in_field, TruncMV, TruncRing, UniPoly};

/// Interpolation data for polynomials of degree at most `degree_bound`:
/// `degree_bound + 1` distinct points and, derived on demand, the recovery
/// weights expressing each coefficient as a combination of evaluations.
pub struct InterpPlan {
    ctx: FieldCtx,
    degree_bound: usize,
    points: Vec<FieldElem>,
    /// master polynomial `prod_j (t - a_j)`
    master: Vec<FieldElem>,
    /// `1 / prod_{k != j} (a_j - a_k)`
    denom_inv: Vec<FieldElem>,
}

static PLAN_CACHE: Lazy<Mutex<HashMap<(u64, usize), Arc<InterpPlan>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl InterpPlan {
    /// Memoized plan for the given degree bound; repeated gadget calls share
    /// one point set per `(field, D)`, and the point sets nest as `D` grows.
    pub fn for_degree(ctx: &FieldCtx, degree_bound: usize) -> Result<Arc<InterpPlan>> {
        let key = (ctx.fingerprint(), degree_bound);
        if let Some(plan) = PLAN_CACHE.lock().unwrap().get(&key) {
            return Ok(plan.clone());
        }
        let plan = Arc::new(InterpPlan::build(ctx, degree_bound)?);
        PLAN_CACHE
            .lock()
            .unwrap()
            .insert(key, plan.clone());
        Ok(plan)
    }

    fn build(ctx: &FieldCtx, degree_bound: usize) -> Result<InterpPlan> {
        let points = ctx.distinct_points(degree_bound + 1)?;
        // master = prod (t - a_j), ascending coefficients
        let mut master = vec![ctx.one()];
        for &a in &points {
            let mut next = vec![ctx.zero(); master.len() + 1];
            for (i, &c) in master.iter().enumerate() {
                next[i + 1] = ctx.add(next[i + 1], c);
                next[i] = ctx.sub(next[i], ctx.mul(a, c));
            }
            master = next;
        }
        // prod_{k != j} (a_j - a_k) = master'(a_j)
        let mut denom_inv = Vec::with_capacity(points.len());
        for &a in &points {
            let mut acc = ctx.zero();
            for (e, &c) in master.iter().enumerate().skip(1) {
                let coef = ctx.mul(ctx.from_int(e as i64), c);
                acc = ctx.add(acc, ctx.mul(coef, ctx.pow(a, (e - 1) as u64)));
            }
            denom_inv.push(ctx.inv(acc)?);
        }
        let plan = InterpPlan {
            ctx: ctx.clone(),
            degree_bound,
            points,
            master,
            denom_inv,
        };
        plan.verify()?;
        Ok(plan)
    }

    /// Checks the reconstruction identity `sum_j b_{i,j} a_j^e = [e == i]`;
    /// exhaustive at small degree bounds, sampled rows above (the Lagrange
    /// derivation is exact either way).
    fn verify(&self) -> Result<()> {
        let ctx = &self.ctx;
        let d = self.degree_bound;
        let rows: Vec<usize> = if d <= 48 {
            (0..=d).collect()
        } else {
            vec![0, 1, d / 2, d - 1, d]
        };
        for &i in &rows {
            let row = self.weight_row(i);
            for e in rows.iter().copied() {
                let mut acc = ctx.zero();
                for (j, &a) in self.points.iter().enumerate() {
                    acc = ctx.add(acc, ctx.mul(row[j], ctx.pow(a, e as u64)));
                }
                let expect = if e == i { ctx.one() } else { ctx.zero() };
                if acc != expect {
                    return Err(Error::InconsistentSystem);
                }
            }
        }
        Ok(())
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn points(&self) -> &[FieldElem] {
        &self.points
    }

    /// Lagrange basis polynomial at point `j` (ascending coefficients).
    fn lagrange_basis(&self, j: usize) -> Vec<FieldElem> {
        let ctx = &self.ctx;
        let a = self.points[j];
        // synthetic division of the master polynomial by (t - a)
        let n = self.master.len();
        let mut quot = vec![ctx.zero(); n - 1];
        let mut carry = ctx.zero();
        for i in (0..n - 1).rev() {
            carry = ctx.add(self.master[i + 1], ctx.mul(a, carry));
            quot[i] = carry;
        }
        let scale = self.denom_inv[j];
        for c in quot.iter_mut() {
            *c = ctx.mul(*c, scale);
        }
        quot
    }

    /// The weights `b_{i,j}` recovering coefficient `i` from evaluations.
    pub fn weight_row(&self, i: usize) -> Vec<FieldElem> {
        (0..self.points.len())
            .map(|j| {
                let basis = self.lagrange_basis(j);
                basis.get(i).copied().unwrap_or_else(|| self.ctx.zero())
            })
            .collect()
    }

    /// `(point, weight)` pairs extracting coefficient `i`.
    pub fn coeff_pairs(&self, i: usize) -> Vec<(FieldElem, FieldElem)> {
        self.points
            .iter()
            .copied()
            .zip(self.weight_row(i))
            .collect()
    }

    /// All coefficients of the degree-`<= D` polynomial taking the given
    /// values at the plan points.
    pub fn coefficients_from_values(&self, values: &[FieldElem]) -> Vec<FieldElem> {
        let ctx = &self.ctx;
        assert_eq!(values.len(), self.points.len());
        let mut coeffs = vec![ctx.zero(); self.points.len()];
        for (j, &v) in values.iter().enumerate() {
            if ctx.is_zero(v) {
                continue;
            }
            let basis = self.lagrange_basis(j);
            for (i, &c) in basis.iter().enumerate() {
                coeffs[i] = ctx.add(coeffs[i], ctx.mul(v, c));
            }
        }
        coeffs
    }

    /// `(point, weight)` pairs extracting the sum of coefficients `0..=d`.
    pub fn hom_le_pairs(&self, d: usize) -> Vec<(FieldElem, FieldElem)> {
        let ctx = &self.ctx;
        let top = d.min(self.degree_bound);
        (0..self.points.len())
            .map(|j| {
                let basis = self.lagrange_basis(j);
                let mut acc = ctx.zero();
                for i in 0..=top {
                    if let Some(&c) = basis.get(i) {
                        acc = ctx.add(acc, c);
                    }
                }
                (self.points[j], acc)
            })
            .collect()
    }
}

fn assert_flat(c: &Circuit) -> Circuit {
    c.materialize()
}

/// The coefficient of `var^i` in `c` viewed as a polynomial in the single
/// input `var`: evaluation at the plan points with recovery weights,
/// eliminating `var` from the input signature.
pub fn coeff_extract(c: &Circuit, var: &str, i: usize, degree_bound: usize) -> Result<Circuit> {
    let ctx = c.ctx().clone();
    let flat = assert_flat(c);
    let var_idx = flat
        .input_index(var)
        .ok_or_else(|| Error::MissingInput(var.into()))?;
    let actual = flat.syntactic_degree(&InputSel::name(var));
    if actual > degree_bound {
        return Err(Error::DegreeBoundExceeded {
            bound: degree_bound,
            actual,
        });
    }
    let mut b = Builder::new(&ctx);
    if i > degree_bound {
        // keep the signature (minus the eliminated variable) so callers can
        // evaluate uniformly
        for (k, d) in flat.inputs().iter().enumerate() {
            if k != var_idx {
                b.input(&d.name, d.group.as_deref());
            }
        }
        let z = b.int(0);
        return Ok(b.finish(vec![z]));
    }
    let plan = InterpPlan::for_degree(&ctx, degree_bound)?;
    let row = plan.weight_row(i);
    let mut terms = Vec::with_capacity(plan.points.len());
    for (j, &point) in plan.points.iter().enumerate() {
        let imap: Vec<u32> = flat
            .inputs()
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k == var_idx {
                    b.constant(point)
                } else {
                    b.input(&d.name, d.group.as_deref())
                }
            })
            .collect();
        let out = b.instantiate(&flat, &imap)[0];
        let w = b.constant(row[j]);
        terms.push(b.mul(vec![w, out]));
    }
    let sum = b.add(terms);
    Ok(b.finish(vec![sum]))
}

/// Homogeneous part of degree `i` in the selected inputs, by scaling the
/// selection at the plan points. The selection stays in the signature.
pub fn hom_extract(c: &Circuit, sel: &InputSel, i: usize, degree_bound: usize) -> Result<Circuit> {
    let actual = c.syntactic_degree(sel);
    if actual > degree_bound {
        return Err(Error::DegreeBoundExceeded {
            bound: degree_bound,
            actual,
        });
    }
    let plan = InterpPlan::for_degree(c.ctx(), degree_bound)?;
    let flat = assert_flat(c);
    let layer = HomLayer {
        scaled: sel.mask(flat.inputs()),
        pairs: plan.coeff_pairs(i),
        cap: Some(i),
        plus_const: c.ctx().zero(),
        offsets: None,
    };
    Ok(flat.with_layer(layer).materialize())
}

/// Sum of the homogeneous parts of degree `0..=d` in the selected inputs,
/// with one shared point set.
pub fn hom_le(c: &Circuit, sel: &InputSel, d: usize, degree_bound: usize) -> Result<Circuit> {
    Ok(hom_le_lazy(c, sel, d, degree_bound)?.materialize())
}

/// As [`hom_le`] but keeps the extraction as a deferred layer; the heavy
/// constructions evaluate these without materializing.
pub fn hom_le_lazy(c: &Circuit, sel: &InputSel, d: usize, degree_bound: usize) -> Result<Circuit> {
    let actual = c.syntactic_degree(sel);
    if actual > degree_bound {
        return Err(Error::DegreeBoundExceeded {
            bound: degree_bound,
            actual,
        });
    }
    let plan = InterpPlan::for_degree(c.ctx(), degree_bound)?;
    let flat = assert_flat(c);
    let layer = HomLayer {
        scaled: sel.mask(flat.inputs()),
        pairs: plan.hom_le_pairs(d),
        cap: Some(d.min(degree_bound)),
        plus_const: c.ctx().zero(),
        offsets: None,
    };
    Ok(flat.with_layer(layer))
}

/// Hasse derivative of order `i` with respect to the input `var`: shift
/// `var -> var + a_j` at the plan points and recover the coefficient of the
/// shift variable. `var` stays an input.
pub fn hasse_gadget(c: &Circuit, var: &str, i: usize, degree_bound: usize) -> Result<Circuit> {
    let ctx = c.ctx().clone();
    let flat = assert_flat(c);
    let var_idx = flat
        .input_index(var)
        .ok_or_else(|| Error::MissingInput(var.into()))?;
    let actual = flat.syntactic_degree(&InputSel::name(var));
    if actual > degree_bound {
        return Err(Error::DegreeBoundExceeded {
            bound: degree_bound,
            actual,
        });
    }
    let mut b = Builder::new(&ctx);
    if i > degree_bound {
        for d in flat.inputs() {
            b.input(&d.name, d.group.as_deref());
        }
        let z = b.int(0);
        return Ok(b.finish(vec![z]));
    }
    let plan = InterpPlan::for_degree(&ctx, degree_bound)?;
    let row = plan.weight_row(i);
    let mut terms = Vec::with_capacity(plan.points.len());
    for (j, &point) in plan.points.iter().enumerate() {
        let imap: Vec<u32> = flat
            .inputs()
            .iter()
            .enumerate()
            .map(|(k, decl)| {
                let input = b.input(&decl.name, decl.group.as_deref());
                if k == var_idx {
                    let a = b.constant(point);
                    b.add(vec![input, a])
                } else {
                    input
                }
            })
            .collect();
        let out = b.instantiate(&flat, &imap)[0];
        let w = b.constant(row[j]);
        terms.push(b.mul(vec![w, out]));
    }
    let sum = b.add(terms);
    Ok(b.finish(vec![sum]))
}

/// Depth-3 circuit for `Esym_r(y_0, ..., y_{m-1})`: a linear layer
/// `1 + a_j y_i`, a product layer over `i`, and the recovery combination.
pub fn esym_gadget(ctx: &FieldCtx, m: usize, r: usize) -> Result<Circuit> {
    if r > m {
        return Err(Error::IndexOutOfRange { index: r, max: m });
    }
    let plan = InterpPlan::for_degree(ctx, m)?;
    let row = plan.weight_row(r);
    let mut b = Builder::new(ctx);
    let inputs: Vec<u32> = (0..m).map(|i| b.input(&format!("y{i}"), Some("ys"))).collect();
    let one = b.int(1);
    let mut terms = Vec::with_capacity(plan.points.len());
    for (j, &point) in plan.points.iter().enumerate() {
        let factors: Vec<u32> = inputs
            .iter()
            .map(|&y| {
                let a = b.constant(point);
                let ay = b.mul(vec![a, y]);
                b.add(vec![one, ay])
            })
            .collect();
        let mut args = factors;
        args.push(b.constant(row[j]));
        terms.push(b.mul(args));
    }
    let sum = b.add(terms);
    Ok(b.finish(vec![sum]))
}

/// Truncated division: a circuit for the degree-`<= d` part (with respect to
/// the selected inputs) of `num / den`, valid when `den` evaluates to a
/// nonzero constant `c0` at the selection's origin. Uses the expansion
/// `num/den = num * c0^{-1} * sum_k (1 - den/c0)^k` flattened through one
/// shared extraction, so only a constant number of levels is added.
pub fn strassen_divide(
    num: &Circuit,
    den: &Circuit,
    d: usize,
    sel: &InputSel,
) -> Result<Circuit> {
    let ctx = num.ctx().clone();
    let num = assert_flat(num);
    let den = assert_flat(den);

    // den at the selection's origin must be a nonzero constant
    let den_mask = sel.mask(den.inputs());
    let nv = den.inputs().len();
    let ring = TruncRing::new(ctx.clone(), nv, TruncMV::NO_CAP);
    let assign: Vec<crate::circuit::Val<TruncRing>> = (0..nv)
        .map(|i| {
            if den_mask[i] {
                crate::circuit::Val::F(ctx.zero())
            } else {
                crate::circuit::Val::R(ring.var(i))
            }
        })
        .collect();
    let origin = den.eval(&ring, &assign)?.pop().unwrap();
    if origin.total_degree() > 0 {
        return Err(Error::DenominatorVanishesAtOrigin);
    }
    let c0 = origin.coeff(&vec![0u16; nv]);
    if ctx.is_zero(c0) {
        return Err(Error::DenominatorVanishesAtOrigin);
    }
    let c0_inv = ctx.inv(c0)?;

    // Hom_{<=d}(num/den) = sum_i (-1)^i C(d+1, i+1) c0^{-(i+1)} Hom_{<=d}(num * den^i)
    let deg_num = num.syntactic_degree(sel);
    let deg_den = den.syntactic_degree(sel);
    let bound = deg_num + d * deg_den;
    let plan = InterpPlan::for_degree(&ctx, bound)?;
    let pairs = plan.hom_le_pairs(d);

    let mut b = Builder::new(&ctx);
    // instantiate the scaled copies of num and den per point, with weights
    // folded into the flat sum
    let mut terms = Vec::new();
    for &(point, gamma) in &pairs {
        let scaled_inputs = |b: &mut Builder, c: &Circuit| -> Vec<u32> {
            let mask = sel.mask(c.inputs());
            c.inputs()
                .iter()
                .enumerate()
                .map(|(k, decl)| {
                    let input = b.input(&decl.name, decl.group.as_deref());
                    if mask[k] {
                        let p = b.constant(point);
                        b.mul(vec![p, input])
                    } else {
                        input
                    }
                })
                .collect()
        };
        let ni = scaled_inputs(&mut b, &num);
        let num_out = b.instantiate(&num, &ni)[0];
        let di = scaled_inputs(&mut b, &den);
        let den_out = b.instantiate(&den, &di)[0];
        let mut cpow = c0_inv;
        for i in 0..=d {
            // weight = gamma * (-1)^i * C(d+1, i+1) * c0^{-(i+1)}
            let mut w = ctx.mul(gamma, cpow);
            let binom = binomial_in_field(&ctx, (d + 1) as u64, (i + 1) as u64);
            w = ctx.mul(w, binom);
            if i % 2 == 1 {
                w = ctx.neg(w);
            }
            let mut args = vec![num_out];
            args.extend(std::iter::repeat(den_out).take(i));
            args.push(b.constant(w));
            terms.push(b.mul(args));
            cpow = ctx.mul(cpow, c0_inv);
        }
    }
    let sum = b.add(terms);
    Ok(b.finish(vec![sum]))
}

/// Builds a plain circuit computing a given polynomial (one Mul per term,
/// one Add on top); handy for turning oracle data into circuit inputs.
pub fn poly_to_circuit(p: &TruncMV, names: &[(&str, Option<&str>)]) -> Circuit {
    let ctx = p.ctx().clone();
    let mut b = Builder::new(&ctx);
    let inputs: Vec<u32> = names
        .iter()
        .map(|(n, g)| b.input(n, *g))
        .collect();
    let mut terms = Vec::new();
    for (exps, &c) in p.terms() {
        let mut args = vec![b.constant(c)];
        for (i, &e) in exps.iter().enumerate() {
            args.extend(std::iter::repeat(inputs[i]).take(e as usize));
        }
        terms.push(b.mul(args));
    }
    if terms.is_empty() {
        terms.push(b.int(0));
    }
    let out = b.add(terms);
    b.finish(vec![out])
}

/// Circuit evaluating a univariate polynomial at its single input.
pub fn unipoly_to_circuit(p: &UniPoly, var: &str, group: Option<&str>) -> Circuit {
    let ctx = p.ctx().clone();
    let mut b = Builder::new(&ctx);
    let x = b.input(var, group);
    let mut terms = Vec::new();
    for (e, &c) in p.coeffs().iter().enumerate() {
        if ctx.is_zero(c) {
            continue;
        }
        let mut args = vec![b.constant(c)];
        args.extend(std::iter::repeat(x).take(e));
        terms.push(b.mul(args));
    }
    if terms.is_empty() {
        terms.push(b.int(0));
    }
    let out = b.add(terms);
    b.finish(vec![out])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Val;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f7() -> FieldCtx {
        FieldCtx::prime(7).unwrap()
    }
    fn fbig() -> FieldCtx {
        FieldCtx::prime(10007).unwrap()
    }

    #[test]
    fn plan_reconstruction_frozen() {
        let ctx = f7();
        let plan = InterpPlan::for_degree(&ctx, 2).unwrap();
        assert_eq!(
            plan.points(),
            &[ctx.from_int(0), ctx.from_int(1), ctx.from_int(2)]
        );
        // row for i = 0 picks out f(0)
        assert_eq!(
            plan.weight_row(0),
            vec![ctx.one(), ctx.zero(), ctx.zero()]
        );
        // reconstruction of f = t^2 gives coefficients (0, 0, 1)
        let evals: Vec<FieldElem> = plan
            .points()
            .iter()
            .map(|&a| ctx.mul(a, a))
            .collect();
        for i in 0..=2 {
            let row = plan.weight_row(i);
            let mut acc = ctx.zero();
            for (w, v) in row.iter().zip(&evals) {
                acc = ctx.add(acc, ctx.mul(*w, *v));
            }
            let expect = if i == 2 { ctx.one() } else { ctx.zero() };
            assert_eq!(acc, expect);
        }
        // hand-derived middle row of the inverse 3x3 Vandermonde over F_7
        assert_eq!(
            plan.weight_row(2),
            vec![ctx.from_int(4), ctx.from_int(6), ctx.from_int(4)]
        );
    }

    #[test]
    fn plan_degenerate_and_too_small() {
        let ctx = f7();
        let plan = InterpPlan::for_degree(&ctx, 0).unwrap();
        assert_eq!(plan.weight_row(0), vec![ctx.one()]);
        let f5 = FieldCtx::prime(5).unwrap();
        assert!(matches!(
            InterpPlan::for_degree(&f5, 5),
            Err(Error::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn coeff_extract_examples() {
        let ctx = fbig();
        // c = (1 + y)^2, coefficient of y^1 is 2
        let mut b = Builder::new(&ctx);
        let y = b.input("y", None);
        let one = b.int(1);
        let s = b.add(vec![one, y]);
        let c = {
            let m = b.mul(vec![s, s]);
            b.finish(vec![m])
        };
        let ex = coeff_extract(&c, "y", 1, 2).unwrap();
        assert!(ex.inputs().is_empty());
        assert_eq!(ex.eval_field(&[]).unwrap()[0], ctx.from_int(2));

        // target degree beyond the bound: zero circuit
        let zc = coeff_extract(&c, "y", 3, 4).unwrap();
        assert!(ctx.is_zero(zc.eval_field(&[]).unwrap()[0]));

        // c = prod_{i<=2} (1 + t y_i): coefficient of t^2 is Esym_2(y)
        let mut b = Builder::new(&ctx);
        let t = b.input("t", None);
        let ys: Vec<u32> = (0..3).map(|i| b.input(&format!("y{i}"), None)).collect();
        let one = b.int(1);
        let factors: Vec<u32> = ys
            .iter()
            .map(|&y| {
                let ty = b.mul(vec![t, y]);
                b.add(vec![one, ty])
            })
            .collect();
        let prod = b.mul(factors);
        let c = b.finish(vec![prod]);
        let esym2 = coeff_extract(&c, "t", 2, 3).unwrap();
        let v = esym2
            .eval_field(&[ctx.from_int(1), ctx.from_int(2), ctx.from_int(3)])
            .unwrap()[0];
        assert_eq!(v, ctx.from_int(11));
    }

    #[test]
    fn hom_extract_examples() {
        let ctx = fbig();
        // c = x^2 + x y + 3: Hom_2 in all vars = x^2 + x y
        let mut b = Builder::new(&ctx);
        let x = b.input("x", None);
        let y = b.input("y", None);
        let x2 = b.mul(vec![x, x]);
        let xy = b.mul(vec![x, y]);
        let three = b.int(3);
        let out = b.add(vec![x2, xy, three]);
        let c = b.finish(vec![out]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hom2 = hom_extract(&c, &InputSel::All, 2, 2).unwrap();
        let hom0 = hom_extract(&c, &InputSel::All, 0, 2).unwrap();
        let le_all = hom_le(&c, &InputSel::All, 2, 2).unwrap();
        for _ in 0..20 {
            let pt = [ctx.rand(&mut rng), ctx.rand(&mut rng)];
            let expect = ctx.add(
                ctx.mul(pt[0], pt[0]),
                ctx.mul(pt[0], pt[1]),
            );
            assert_eq!(hom2.eval_field(&pt).unwrap()[0], expect);
            // Hom_0 is the constant term
            assert_eq!(hom0.eval_field(&pt).unwrap()[0], ctx.from_int(3));
            // hom_le to the full degree reproduces c
            assert_eq!(
                le_all.eval_field(&pt).unwrap()[0],
                c.eval_field(&pt).unwrap()[0]
            );
        }
    }

    #[test]
    fn hasse_gadget_matches_oracle() {
        for ctx in [fbig(), FieldCtx::extension(2, 4, None).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            // c = y^3, order 2 -> 3y ; over F_2: y^2 with orders 1, 2
            let mut b = Builder::new(&ctx);
            let y = b.input("y", None);
            let y3 = b.mul(vec![y, y, y]);
            let c = b.finish(vec![y3]);
            let h2 = hasse_gadget(&c, "y", 2, 3).unwrap();
            for _ in 0..10 {
                let v = ctx.rand(&mut rng);
                assert_eq!(
                    h2.eval_field(&[v]).unwrap()[0],
                    ctx.mul(ctx.from_int(3), v)
                );
            }

            // random circuits against the polynomial oracle, symbolically
            for _ in 0..50 {
                let deg = rng.gen_range(0..5usize);
                let coeffs: Vec<FieldElem> = (0..=deg).map(|_| ctx.rand(&mut rng)).collect();
                let p = UniPoly::new(&ctx, coeffs);
                let c = unipoly_to_circuit(&p, "y", None);
                let i = rng.gen_range(0..4usize);
                let g = hasse_gadget(&c, "y", i, deg.max(1)).unwrap();
                let expect = p.hasse_derivative(i);
                // symbolic comparison over the truncated ring
                let ring = TruncRing::new(ctx.clone(), 1, TruncMV::NO_CAP);
                let got = g.eval(&ring, &[Val::R(ring.var(0))]).unwrap()[0].clone();
                let expect_mv = TruncMV::from_unipoly(&expect, 1, 0, TruncMV::NO_CAP);
                assert_eq!(got, expect_mv);
            }
        }
    }

    #[test]
    fn hasse_gadget_char2_examples() {
        // the gadget needs q >= D + 1 distinct shift points, so characteristic
        // 2 runs in F_4; the Hasse values are characteristic facts either way
        let ctx = FieldCtx::extension(2, 2, None).unwrap();
        let mut b = Builder::new(&ctx);
        let y = b.input("y", None);
        let y2 = b.mul(vec![y, y]);
        let c = b.finish(vec![y2]);
        let h1 = hasse_gadget(&c, "y", 1, 2).unwrap();
        let h2 = hasse_gadget(&c, "y", 2, 2).unwrap();
        for i in 0..4 {
            let v = ctx.element(i);
            assert!(ctx.is_zero(h1.eval_field(&[v]).unwrap()[0]));
            assert_eq!(h2.eval_field(&[v]).unwrap()[0], ctx.one());
        }
        // F_2 itself cannot host the 3 interpolation points
        let f2 = FieldCtx::prime(2).unwrap();
        let mut b = Builder::new(&f2);
        let y = b.input("y", None);
        let y2 = b.mul(vec![y, y]);
        let c2 = b.finish(vec![y2]);
        assert!(matches!(
            hasse_gadget(&c2, "y", 1, 2),
            Err(Error::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn esym_gadget_matches_oracle() {
        let ctx = fbig();
        let ring = crate::polyring::FieldRing(ctx.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        // frozen: m = 3, r = 2 at (1, 2, 3) -> 11
        let g = esym_gadget(&ctx, 3, 2).unwrap();
        assert_eq!(
            g.eval_field(&[ctx.from_int(1), ctx.from_int(2), ctx.from_int(3)])
                .unwrap()[0],
            ctx.from_int(11)
        );
        // r = 0 -> constant 1; r = m -> product
        for m in 1..=8usize {
            for r in 0..=m {
                let g = esym_gadget(&ctx, m, r).unwrap();
                for _ in 0..12 {
                    let vals: Vec<FieldElem> = (0..m).map(|_| ctx.rand(&mut rng)).collect();
                    let expect = crate::polyring::esym_eval(&ring, &vals, r).unwrap();
                    assert_eq!(g.eval_field(&vals).unwrap()[0], expect);
                }
            }
        }
    }

    #[test]
    fn esym_gadget_depth_uniform() {
        let ctx = fbig();
        let d0 = esym_gadget(&ctx, 3, 0).unwrap().stats().depth;
        for m in 2..=8usize {
            for r in 0..=m {
                assert_eq!(esym_gadget(&ctx, m, r).unwrap().stats().depth, d0);
            }
        }
    }

    #[test]
    fn strassen_divide_examples() {
        let ctx = fbig();
        // num = 1, den = 1 - t, d = 3: geometric series 1 + t + t^2 + t^3
        let one_c = {
            let mut b = Builder::new(&ctx);
            let t = b.input("t", Some("ts"));
            let zero = b.int(0);
            let tz = b.mul(vec![zero, t]);
            let one = b.int(1);
            let out = b.add(vec![one, tz]);
            b.finish(vec![out])
        };
        let den = {
            let mut b = Builder::new(&ctx);
            let t = b.input("t", Some("ts"));
            let m1 = b.int(-1);
            let mt = b.mul(vec![m1, t]);
            let one = b.int(1);
            let out = b.add(vec![one, mt]);
            b.finish(vec![out])
        };
        let q = strassen_divide(&one_c, &den, 3, &InputSel::group("ts")).unwrap();
        let ring = TruncRing::new(ctx.clone(), 1, 3);
        let got = q.eval(&ring, &[Val::R(ring.var(0))]).unwrap()[0].clone();
        let mut expect = TruncMV::zero(&ctx, 1, 3);
        for e in 0..=3u16 {
            expect.add_term(vec![e], ctx.one());
        }
        assert_eq!(got, expect);

        // num = den -> 1
        let q = strassen_divide(&den, &den, 2, &InputSel::group("ts")).unwrap();
        let got = q.eval(&ring, &[Val::R(ring.var(0))]).unwrap()[0].clone();
        assert_eq!(got, TruncMV::constant(&ctx, 1, ctx.one(), 3));

        // num = t, den = 1 + t, d = 2 -> t - t^2
        let num_t = {
            let mut b = Builder::new(&ctx);
            let t = b.input("t", Some("ts"));
            let m = b.mul(vec![t]);
            b.finish(vec![m])
        };
        let den2 = {
            let mut b = Builder::new(&ctx);
            let t = b.input("t", Some("ts"));
            let one = b.int(1);
            let out = b.add(vec![one, t]);
            b.finish(vec![out])
        };
        let q = strassen_divide(&num_t, &den2, 2, &InputSel::group("ts")).unwrap();
        let got = q.eval(&ring, &[Val::R(ring.var(0))]).unwrap()[0].clone();
        let mut expect = TruncMV::zero(&ctx, 1, 3);
        expect.add_term(vec![1], ctx.one());
        expect.add_term(vec![2], ctx.from_int(-1));
        assert_eq!(got, expect);

        // vanishing denominator at the origin is rejected
        assert!(matches!(
            strassen_divide(&one_c, &num_t, 2, &InputSel::group("ts")),
            Err(Error::DenominatorVanishesAtOrigin)
        ));
    }

    #[test]
    fn strassen_output_times_den_is_num_mod_truncation() {
        let ctx = fbig();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..30 {
            let d = rng.gen_range(1..4usize);
            // random num and den with nonzero constant term
            let nd = rng.gen_range(0..3usize);
            let dd = rng.gen_range(0..3usize);
            let num_p = UniPoly::new(&ctx, (0..=nd).map(|_| ctx.rand(&mut rng)).collect());
            let mut den_c: Vec<FieldElem> = (0..=dd).map(|_| ctx.rand(&mut rng)).collect();
            den_c[0] = ctx.rand_nonzero(&mut rng);
            let den_p = UniPoly::new(&ctx, den_c);
            let num = unipoly_to_circuit(&num_p, "t", Some("ts"));
            let den = unipoly_to_circuit(&den_p, "t", Some("ts"));
            let q = strassen_divide(&num, &den, d, &InputSel::group("ts")).unwrap();
            let ring = TruncRing::new(ctx.clone(), 1, d);
            let qv = q.eval(&ring, &[Val::R(ring.var(0))]).unwrap()[0].clone();
            let denv = TruncMV::from_unipoly(&den_p, 1, 0, d);
            let numv = TruncMV::from_unipoly(&num_p, 1, 0, d);
            assert_eq!(qv.mul(&denv), numv);
        }
    }

    #[test]
    fn gadget_depth_deltas_bounded() {
        let ctx = fbig();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..20 {
            let deg = rng.gen_range(1..5usize);
            let coeffs: Vec<FieldElem> = (0..=deg).map(|_| ctx.rand(&mut rng)).collect();
            let p = UniPoly::new(&ctx, coeffs);
            let c = unipoly_to_circuit(&p, "y", Some("g"));
            let d0 = c.stats().depth;
            for (g, name) in [
                (coeff_extract(&c, "y", 1, deg).unwrap(), "coeff"),
                (hom_extract(&c, &InputSel::group("g"), 1, deg).unwrap(), "hom"),
                (hom_le(&c, &InputSel::group("g"), deg, deg).unwrap(), "homle"),
                (hasse_gadget(&c, "y", 1, deg).unwrap(), "hasse"),
                (
                    strassen_divide(&c, &c, 2, &InputSel::group("g")).unwrap_or_else(|_| c.clone()),
                    "strassen",
                ),
            ] {
                let delta = g.stats().depth.saturating_sub(d0);
                assert!(delta <= 4, "{name} depth delta {delta} > 4");
            }
        }
    }

    #[test]
    fn coeff_extract_matches_symbolic_coefficients() {
        // 100 random circuits, degrees <= 6: extraction agrees with direct
        // TruncMV coefficient reads
        let ctx = fbig();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..100 {
            let dt = rng.gen_range(0..4usize);
            let dy = rng.gen_range(0..3usize);
            let mut p = TruncMV::zero(&ctx, 2, TruncMV::NO_CAP);
            for _ in 0..5 {
                p.add_term(
                    vec![rng.gen_range(0..=dt as u16), rng.gen_range(0..=dy as u16)],
                    ctx.rand(&mut rng),
                );
            }
            let c = poly_to_circuit(&p, &[("t", None), ("y", None)]);
            let i = rng.gen_range(0..=dt);
            let bound = c.syntactic_degree(&InputSel::name("t"));
            let ex = coeff_extract(&c, "t", i, bound.max(i)).unwrap();
            // symbolic compare in the remaining variable
            let ring = TruncRing::new(ctx.clone(), 2, TruncMV::NO_CAP);
            let got = ex.eval(&ring, &[Val::R(ring.var(1))]).unwrap()[0].clone();
            let expect = p.coeff_of(0, i);
            assert_eq!(got, expect);
        }
    }
}
