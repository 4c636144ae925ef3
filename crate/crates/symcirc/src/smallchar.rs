//! Factor powers of bivariate polynomials over small-characteristic fields:
//! given a circuit for `P(t, y)` monic in `y` with a planted factor `g` of
//! multiplicity `p^l * e` (`gcd(p, e) = 1`), produce `g(t, y)^{p^l}` modulo
//! `t^{d+1}` through the symbolic rational construction
//!
//! ```text
//! R(z) = z^{p^l} + sum_{m=0}^{2e(d+p^l)}
//!        [y^{p^l(e(m+1)-2)}]( H^{p^l}_y(P)(t, y+z)
//!            * (A(z) (y+z)^{p^l e} - P(t, y+z))^m ) / (e A(z)^{m+1})
//! ```
//!
//! with `A(z) = H^{p^l e}_y(P)(0, z)`; at a fiber root `z = phi(0)` the value
//! of `R` is the truncated `p^l`-th root power, and the factor power is
//! assembled from the elementary symmetric combinations of those values.
//! The random shift making a multivariate input monic with a well-separated
//! fiber is [`psi_shift`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Builder, Circuit, InputSel, RatioCircuit, Val};
use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx, FieldElem};
use crate::gadgets::InterpPlan;
use crate::polyring::{Ring, TruncMV, TruncRing, UniPoly, UniSeriesRing};

/// A factor-power instance: the defining circuit over inputs `(t, y)`, the
/// factor's fiber at `t = 0`, the multiplicity split and the truncation.
#[derive(Clone)]
pub struct FactorInstance {
    /// circuit for `P(t, y)`, monic in `y`
    pub circuit: Circuit,
    /// the factor's fiber `g(0, y)`: monic, square-free, divides `P(0, y)`
    pub fiber: UniPoly,
    /// multiplicity is `p^ell * e`, `gcd(p, e) = 1`
    pub ell: u32,
    pub e: u64,
    /// truncation degree in `t`
    pub d: usize,
}

impl FactorInstance {
    pub fn ctx(&self) -> &FieldCtx {
        self.circuit.ctx()
    }

    fn frobenius_power(&self) -> u64 {
        self.ctx().characteristic().pow(self.ell)
    }

    /// Symbolic image of `P` as a bivariate polynomial (exact).
    pub fn symbolic(&self) -> Result<TruncMV> {
        let ctx = self.ctx().clone();
        let ring = TruncRing::new(ctx, 2, TruncMV::NO_CAP);
        let t_idx = self
            .circuit
            .input_index("t")
            .ok_or_else(|| Error::MissingInput("t".into()))?;
        let assign: Vec<Val<TruncRing>> = (0..self.circuit.inputs().len())
            .map(|i| {
                if i == t_idx {
                    Val::R(ring.var(0))
                } else {
                    Val::R(ring.var(1))
                }
            })
            .collect();
        Ok(self.circuit.eval(&ring, &assign)?.pop().unwrap())
    }

    /// Instance invariants: monic in `y`, square-free split fiber structure
    /// at `t = 0`, and the declared fiber divides `P(0, y)`.
    pub fn validate(&self) -> Result<()> {
        let ctx = self.ctx().clone();
        let p = ctx.characteristic();
        if self.e % p == 0 || self.e == 0 {
            return Err(Error::BadMultiplicity);
        }
        let sym = self.symbolic()?;
        let ydeg = sym.degree_in(1);
        let lead = sym.coeff_of(1, ydeg);
        if lead.num_terms() != 1 || !ctx.is_zero(ctx.sub(lead.coeff(&[0, 0]), ctx.one())) {
            return Err(Error::DegenerateInput("P is not monic in y".into()));
        }
        let at0 = sym.coeff_of(0, 0).to_unipoly(1)?;
        if !self.fiber.is_monic() || !self.fiber.is_squarefree() {
            return Err(Error::DegenerateInput(
                "fiber must be monic and square-free".into(),
            ));
        }
        if !at0.divrem(&self.fiber)?.1.is_zero() {
            return Err(Error::DegenerateInput(
                "fiber does not divide P(0, y)".into(),
            ));
        }
        // fiber separation: the distinct-root count at t = 0 must match a
        // generic slice, otherwise power-series roots collide at the origin;
        // small base fields have no generic points, so the check lifts
        if !fiber_separated(&sym, &at0)? {
            return Err(Error::DegenerateInput(
                "the square-free part of P is not square-free at t = 0".into(),
            ));
        }
        Ok(())
    }
}

/// True when the generic t-slice of the bivariate `sym` has as many
/// distinct roots as the slice at `t = 0`. The slice point is drawn from an
/// extension when the base field is too small to have generic points; the
/// generic count is the maximum over several draws (collisions only ever
/// lower it).
fn fiber_separated(sym: &TruncMV, at0: &UniPoly) -> Result<bool> {
    let ctx = sym.ctx().clone();
    let (work, emb) = if ctx.cardinality() < 64 {
        let big = ctx.extension_with_cardinality(64)?;
        let emb = Embedding::new(&ctx, &big)?;
        (big, Some(emb))
    } else {
        (ctx.clone(), None)
    };
    let lift = |c: FieldElem| emb.as_ref().map_or(c, |e| e.lift(c));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let ydeg = sym.degree_in(1);
    let mut generic_rad = 0usize;
    for _ in 0..8 {
        let tau = work.rand_nonzero(&mut rng);
        let coeffs: Vec<FieldElem> = (0..=ydeg)
            .map(|ypow| {
                let c = sym.coeff_of(1, ypow).to_unipoly(0)?;
                let mut acc = work.zero();
                for (e, &cv) in c.coeffs().iter().enumerate() {
                    acc = work.add(acc, work.mul(lift(cv), work.pow(tau, e as u64)));
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let slice = UniPoly::new(&work, coeffs);
        if let Some(d) = slice.radical()?.degree() {
            generic_rad = generic_rad.max(d);
        }
    }
    let at0_lifted = UniPoly::new(&work, at0.coeffs().iter().map(|&c| lift(c)).collect());
    Ok(at0_lifted.radical()?.degree() == Some(generic_rad))
}

/// A shifted multivariate circuit: `x_i -> t x_i + a_i y + b_i`, normalized
/// monic in `y`, with the draw that passed the checks.
pub struct PsiShift {
    pub circuit: Circuit,
    pub a: Vec<FieldElem>,
    pub b: Vec<FieldElem>,
    pub attempts: usize,
}

/// Applies the substitution for one concrete draw; the result has inputs
/// `(x-group, t, y)`.
pub fn psi_shift_with(c: &Circuit, a: &[FieldElem], b_vals: &[FieldElem]) -> Result<Circuit> {
    let ctx = c.ctx().clone();
    let flat = c.materialize();
    let mut b = Builder::new(&ctx);
    let t = b.input("t", None);
    let y = b.input("y", None);
    let imap: Vec<u32> = flat
        .inputs()
        .iter()
        .enumerate()
        .map(|(i, decl)| {
            let x = b.input(&decl.name, Some("x"));
            let tx = b.mul(vec![t, x]);
            let ai = b.constant(a[i]);
            let ay = b.mul(vec![ai, y]);
            let bi = b.constant(b_vals[i]);
            b.add(vec![tx, ay, bi])
        })
        .collect();
    let out = b.instantiate(&flat, &imap)[0];
    Ok(b.finish(vec![out]))
}

/// Draws shift coefficients until the bivariate image (at random points for
/// the untouched variables) is monic in `y` of full degree with a
/// square-free separated fiber at `t = 0`; up to 32 attempts.
pub fn psi_shift(c: &Circuit, seed: u64) -> Result<PsiShift> {
    let ctx = c.ctx().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.inputs().len();
    let total_deg = c.syntactic_degree(&InputSel::All);
    const ATTEMPTS: usize = 32;
    for attempt in 1..=ATTEMPTS {
        let a: Vec<FieldElem> = (0..n).map(|_| ctx.rand(&mut rng)).collect();
        let b_vals: Vec<FieldElem> = (0..n).map(|_| ctx.rand(&mut rng)).collect();
        let shifted = psi_shift_with(c, &a, &b_vals)?;
        if shift_checks(&shifted, total_deg, &mut rng).unwrap_or(false) {
            // normalize monic in y: scale by the inverse leading constant
            let sym = bivariate_image(&shifted, &mut rng)?;
            let ydeg = sym.degree_in(1);
            let lead = sym.coeff_of(1, ydeg).coeff(&[0, 0]);
            let mut bb = Builder::new(&ctx);
            let imap: Vec<u32> = shifted
                .inputs()
                .iter()
                .map(|d| bb.input(&d.name, d.group.as_deref()))
                .collect();
            let out = bb.instantiate(&shifted, &imap)[0];
            let inv = bb.constant(ctx.inv(lead)?);
            let scaled = bb.mul(vec![inv, out]);
            return Ok(PsiShift {
                circuit: bb.finish(vec![scaled]),
                a,
                b: b_vals,
                attempts: attempt,
            });
        }
    }
    Err(Error::ShiftFailed(ATTEMPTS))
}

/// The `(t, y)` image of a shifted circuit with the `x`-inputs frozen at
/// random field points.
fn bivariate_image(shifted: &Circuit, rng: &mut impl Rng) -> Result<TruncMV> {
    let ctx = shifted.ctx().clone();
    let ring = TruncRing::new(ctx.clone(), 2, TruncMV::NO_CAP);
    let assign: Vec<Val<TruncRing>> = shifted
        .inputs()
        .iter()
        .map(|decl| match decl.name.as_str() {
            "t" => Val::R(ring.var(0)),
            "y" => Val::R(ring.var(1)),
            _ => Val::F(ctx.rand(rng)),
        })
        .collect();
    Ok(shifted.eval(&ring, &assign)?.pop().unwrap())
}

fn shift_checks(shifted: &Circuit, total_deg: usize, rng: &mut impl Rng) -> Result<bool> {
    let ctx = shifted.ctx().clone();
    let sym = bivariate_image(shifted, rng)?;
    let ydeg = sym.degree_in(1);
    if ydeg < total_deg {
        return Ok(false);
    }
    let lead = sym.coeff_of(1, ydeg);
    if lead.total_degree() > 0 || ctx.is_zero(lead.coeff(&[0, 0])) {
        return Ok(false);
    }
    // fiber separation at t = 0 against a generic slice
    let at0 = sym.coeff_of(0, 0).to_unipoly(1)?;
    if at0.is_zero() {
        return Ok(false);
    }
    fiber_separated(&sym, &at0)
}

/// The symbolic rational construction: numerator and denominator circuits
/// over inputs `(z, t)` with `R_den = A(z)^{M+1}`.
pub struct BuiltR {
    pub ratio: RatioCircuit,
    /// `A(z) = H^{p^l e}_y(P)(0, z)` as its own circuit
    pub alpha_circuit: Circuit,
    pub m_sum: usize,
}

pub fn build_r(inst: &FactorInstance) -> Result<BuiltR> {
    let ctx = inst.ctx().clone();
    let q = inst.frobenius_power();
    let e = inst.e;
    if e % ctx.characteristic() == 0 {
        return Err(Error::BadMultiplicity);
    }
    let cap_e = (q * e) as usize;
    let flat = inst.circuit.materialize();
    let t_idx = flat
        .input_index("t")
        .ok_or_else(|| Error::MissingInput("t".into()))?;
    let y_idx = flat
        .input_index("y")
        .ok_or_else(|| Error::MissingInput("y".into()))?;
    let nu = flat.syntactic_degree(&InputSel::name("y")).max(1);
    let hasse_plan = InterpPlan::for_degree(&ctx, nu)?;
    let e_inv = ctx.inv(ctx.from_int(e as i64))?;
    let m_sum = (2 * e as usize) * (inst.d + q as usize);

    let mut b = Builder::new(&ctx);
    let z = b.input("z", None);
    let t = b.input("t", None);

    // P instances: keyed by (shift constant, t frozen to zero?)
    let mut p_at: HashMap<(u64, bool), u32> = HashMap::new();
    let mut instantiate_at = |b: &mut Builder, shift: FieldElem, t_zero: bool| -> u32 {
        let key = (ctx.to_packed(shift), t_zero);
        if let Some(&id) = p_at.get(&key) {
            return id;
        }
        let imap: Vec<u32> = flat
            .inputs()
            .iter()
            .enumerate()
            .map(|(i, _)| {
                if i == y_idx {
                    let s = b.constant(shift);
                    b.add(vec![z, s])
                } else if i == t_idx {
                    if t_zero {
                        b.int(0)
                    } else {
                        t
                    }
                } else {
                    unreachable!("bivariate instance")
                }
            })
            .collect();
        let out = b.instantiate(&flat, &imap)[0];
        p_at.insert(key, out);
        out
    };

    // A(z) = H^{q e}_y(P)(0, z): weighted shifts with t frozen at 0
    let alpha_row = hasse_plan.weight_row(cap_e);
    let alpha_node = {
        let mut parts = Vec::new();
        for (jj, &aj) in hasse_plan.points().iter().enumerate() {
            let inst_n = instantiate_at(&mut b, aj, true);
            let w = b.constant(alpha_row[jj]);
            parts.push(b.mul(vec![w, inst_n]));
        }
        b.add(parts)
    };

    let hasse_row = hasse_plan.weight_row(q as usize);
    let mut h_at: HashMap<u64, u32> = HashMap::new();
    let mut g_at: HashMap<u64, u32> = HashMap::new();

    // leading term z^q * A^{M+1}
    let zpow = b.mul(vec![z; q as usize]);
    let mut lead_args = vec![zpow];
    lead_args.extend(std::iter::repeat(alpha_node).take(m_sum + 1));
    let mut terms = vec![b.mul(lead_args)];

    for m in 0..=m_sum {
        let need = (e as i64) * (m as i64 + 1) - 2;
        if need < 0 {
            continue;
        }
        let idx = (q as usize) * (need as usize);
        let d_m = nu + m * cap_e.max(nu);
        let plan = InterpPlan::for_degree(&ctx, d_m)?;
        let row = plan.weight_row(idx);
        for (j, &c_j) in plan.points().iter().enumerate() {
            let ckey = ctx.to_packed(c_j);
            let h_node = match h_at.get(&ckey) {
                Some(&id) => id,
                None => {
                    let mut parts = Vec::with_capacity(hasse_plan.points().len());
                    for (jj, &aj) in hasse_plan.points().iter().enumerate() {
                        let inst_n = instantiate_at(&mut b, ctx.add(c_j, aj), false);
                        let w = b.constant(hasse_row[jj]);
                        parts.push(b.mul(vec![w, inst_n]));
                    }
                    let id = b.add(parts);
                    h_at.insert(ckey, id);
                    id
                }
            };
            let g_node = match g_at.get(&ckey) {
                Some(&id) => id,
                None => {
                    // A(z) * c_j^{qe} - P(t, z + c_j): the power is taken in
                    // the fresh extraction variable, already evaluated at c_j
                    let cpow = b.constant(ctx.pow(c_j, cap_e as u64));
                    let apow = b.mul(vec![alpha_node, cpow]);
                    let inst_n = instantiate_at(&mut b, c_j, false);
                    let m1 = b.int(-1);
                    let neg = b.mul(vec![m1, inst_n]);
                    let id = b.add(vec![apow, neg]);
                    g_at.insert(ckey, id);
                    id
                }
            };
            // e^{-1} beta * H * G^m * A^{M - m}
            let w = ctx.mul(row[j], e_inv);
            let mut args = vec![b.constant(w), h_node];
            args.extend(std::iter::repeat(g_node).take(m));
            args.extend(std::iter::repeat(alpha_node).take(m_sum - m));
            terms.push(b.mul(args));
        }
    }
    let num_out = b.add(terms);
    let den_out = b.mul(vec![alpha_node; m_sum + 1]);
    let circuit = b.finish(vec![num_out, den_out, alpha_node]);
    let num = circuit.select_output(0);
    let den = circuit.select_output(1);
    let alpha_circuit = circuit.select_output(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0xa1fa);
    let ratio = RatioCircuit::new(num, den, &mut rng)?;
    Ok(BuiltR {
        ratio,
        alpha_circuit,
        m_sum,
    })
}

/// Report attached to a factor-power computation.
#[derive(Clone, Debug)]
pub struct FactorPowerReport {
    pub field_used: String,
    pub fiber_roots: usize,
    pub m_sum: usize,
    pub r_stats: crate::circuit::CircuitStats,
}

/// Computes `g(t, y)^{p^l}` modulo `t^{d+1}` for the instance's factor:
/// builds the rational construction, reads its values at the fiber roots
/// through elementary symmetric combinations (one product circuit with a
/// fresh extraction variable), clears the single denominator by truncated
/// inversion, and assembles the power. Lifts to an extension when the base
/// field cannot host the interpolation points or the fiber roots.
pub fn factor_power(inst: &FactorInstance) -> Result<(TruncMV, FactorPowerReport)> {
    inst.validate()?;
    let base = inst.ctx().clone();
    let q = inst.frobenius_power();
    let nu = inst
        .circuit
        .materialize()
        .syntactic_degree(&InputSel::name("y"))
        .max(1);
    let m_sum = (2 * inst.e as usize) * (inst.d + q as usize);
    // interpolation demand of the construction
    let needed = (nu * (m_sum + 1) + 1) as u64;

    // lift to the smallest extension of the base (by degree multiples) that
    // is large enough for the interpolation demand and splits the fiber
    let (work, emb) = {
        let p_char = base.characteristic();
        let k0 = base.extension_degree();
        let mut found = None;
        for j in 1..=(16 / k0.max(1)).max(1) {
            let kk = k0 * j;
            let Some(q) = p_char.checked_pow(kk as u32) else {
                break;
            };
            if q > crate::field::MAX_EXT_CARDINALITY {
                break;
            }
            if q < needed {
                continue;
            }
            let cand = if kk == k0 {
                base.clone()
            } else {
                FieldCtx::extension(p_char, kk, None)?
            };
            let emb = Embedding::new(&base, &cand)?;
            let fiber_lifted = UniPoly::new(
                &cand,
                inst.fiber.coeffs().iter().map(|&c| emb.lift(c)).collect(),
            );
            if fiber_lifted.roots_by_enumeration().len() == inst.fiber.degree().unwrap_or(0) {
                found = Some((cand, emb));
                break;
            }
        }
        found.ok_or(Error::FieldTooSmall {
            needed,
            have: base.cardinality(),
        })?
    };

    let lifted = FactorInstance {
        circuit: lift_circuit(&inst.circuit, &emb, &work),
        fiber: UniPoly::new(
            &work,
            inst.fiber.coeffs().iter().map(|&c| emb.lift(c)).collect(),
        ),
        ell: inst.ell,
        e: inst.e,
        d: inst.d,
    };
    let roots = lifted.fiber.roots_by_enumeration();
    debug_assert_eq!(roots.len(), lifted.fiber.degree().unwrap_or(0));

    let built = build_r(&lifted)?;
    let r_stats = built.ratio.num.stats();

    // pivot constants at the fiber roots must not vanish
    for &root in &roots {
        let a = built.alpha_circuit.eval_field(&[root, work.zero()])?[0];
        if work.is_zero(a) {
            return Err(Error::SharedRoots(
                "fiber root with vanishing pivot constant".into(),
            ));
        }
    }

    // one product circuit over a fresh extraction variable: the coefficient
    // of s^k is Esym_k({R_num(root)}) * (denominator pattern)
    let s_count = roots.len();
    let gamma = {
        let mut b = Builder::new(&work);
        let t = b.input("t", None);
        let s = b.input("s", None);
        let mut factors = Vec::with_capacity(s_count);
        for &root in &roots {
            let rc = b.constant(root);
            let imap_of = |b: &mut Builder, part: &Circuit, rc: u32, t: u32| -> u32 {
                let imap: Vec<u32> = part
                    .inputs()
                    .iter()
                    .map(|decl| match decl.name.as_str() {
                        "z" => rc,
                        "t" => t,
                        other => panic!("unexpected input {other}"),
                    })
                    .collect();
                b.instantiate(&part.materialize(), &imap)[0]
            };
            let num_j = imap_of(&mut b, &built.ratio.num, rc, t);
            let den_j = imap_of(&mut b, &built.ratio.den, rc, t);
            let snum = b.mul(vec![s, num_j]);
            factors.push(b.add(vec![den_j, snum]));
        }
        let prod = b.mul(factors);
        let pre = b.finish(vec![prod]);
        // extract all s-coefficients at s_count + 1 points
        let plan = InterpPlan::for_degree(&work, s_count)?;
        let mut bb = Builder::new(&work);
        let t_in = bb.input("t", None);
        let mut outs = Vec::with_capacity(s_count + 1);
        let mut at_point: Vec<u32> = Vec::new();
        for &pt in plan.points().iter() {
            let pc = bb.constant(pt);
            let imap: Vec<u32> = pre
                .inputs()
                .iter()
                .map(|decl| match decl.name.as_str() {
                    "t" => t_in,
                    "s" => pc,
                    other => panic!("unexpected input {other}"),
                })
                .collect();
            at_point.push(bb.instantiate(&pre, &imap)[0]);
        }
        for k in 0..=s_count {
            let row = plan.weight_row(k);
            let terms: Vec<u32> = at_point
                .iter()
                .enumerate()
                .map(|(a, &wp)| {
                    let c = bb.constant(row[a]);
                    bb.mul(vec![c, wp])
                })
                .collect();
            outs.push(bb.add(terms));
        }
        bb.finish(outs)
    };

    // evaluate the extraction outputs over K[t]/t^{d+1}
    let ring = UniSeriesRing::new(work.clone(), Some(inst.d));
    let gamma_vals = gamma.eval(&ring, &[Val::R(ring.var())])?;
    let b_val = &gamma_vals[0]; // Esym_0 pattern: product of denominators
    let b_inv = ring
        .series_inverse(b_val)
        .ok_or(Error::SharedRoots("denominator vanishes at t = 0".into()))?;

    // g^{p^l} = Hom_{<= d, t}[ sum_k (-1)^k Esym_k({R_j}) y^{p^l (|S|-k)} ]
    let mut result = TruncMV::zero(&work, 2, TruncMV::NO_CAP);
    for k in 0..=s_count {
        let mut coeff = ring.mul(&gamma_vals[k], &b_inv);
        if k % 2 == 1 {
            coeff = ring.neg(&coeff);
        }
        let ypow = (q as usize) * (s_count - k);
        for (tp, &cv) in coeff.iter().enumerate() {
            result.add_term(vec![tp as u16, ypow as u16], cv);
        }
    }

    // project back to the base field
    let mut out = TruncMV::zero(&base, 2, TruncMV::NO_CAP);
    for (exps, &c) in result.terms() {
        let proj = emb.project(c).ok_or_else(|| {
            Error::DegenerateInput("factor power left the base field".into())
        })?;
        out.add_term(exps.clone(), proj);
    }
    Ok((
        out,
        FactorPowerReport {
            field_used: work.spec_string(),
            fiber_roots: s_count,
            m_sum,
            r_stats,
        },
    ))
}

/// Rebuilds a circuit over an extension field through an embedding.
pub fn lift_circuit(c: &Circuit, emb: &Embedding, target: &FieldCtx) -> Circuit {
    let flat = c.materialize();
    let mut b = Builder::new(target);
    let imap: Vec<u32> = flat
        .inputs()
        .iter()
        .map(|d| b.input(&d.name, d.group.as_deref()))
        .collect();
    let core = &flat.core;
    let mut map: Vec<u32> = Vec::with_capacity(core.gates.len());
    for g in core.gates.iter() {
        use crate::circuit::Gate;
        let id = match *g {
            Gate::Input(i) => imap[i as usize],
            Gate::Const(ci) => b.constant(emb.lift(core.consts[ci as usize])),
            Gate::Add { off, len } => {
                let xs: Vec<u32> = core.args[off as usize..(off + len) as usize]
                    .iter()
                    .map(|&a| map[a as usize])
                    .collect();
                b.add(xs)
            }
            Gate::Mul { off, len } => {
                let xs: Vec<u32> = core.args[off as usize..(off + len) as usize]
                    .iter()
                    .map(|&a| map[a as usize])
                    .collect();
                b.mul(xs)
            }
        };
        map.push(id);
    }
    let outs = flat.outputs.iter().map(|&o| map[o as usize]).collect();
    b.finish(outs)
}
