//! Seeded instance generators shared by the test suites and the fuzz
//! harness. Everything is planted: ground truth is known by construction,
//! never discovered by factoring.

use rand::Rng;

use crate::circuit::Circuit;
use crate::field::{FieldCtx, FieldElem};
use crate::gadgets::poly_to_circuit;
use crate::polyring::{TruncMV, UniPoly};
use crate::smallchar::FactorInstance;

pub fn rand_monic(ctx: &FieldCtx, deg: usize, rng: &mut impl Rng) -> UniPoly {
    let mut coeffs: Vec<FieldElem> = (0..deg).map(|_| ctx.rand(rng)).collect();
    coeffs.push(ctx.one());
    UniPoly::new(ctx, coeffs)
}

/// `n` pairwise distinct random elements.
pub fn distinct_elems(ctx: &FieldCtx, n: usize, rng: &mut impl Rng) -> Vec<FieldElem> {
    assert!((n as u64) <= ctx.cardinality());
    let mut out: Vec<FieldElem> = Vec::with_capacity(n);
    while out.len() < n {
        let x = ctx.rand(rng);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// A planted non-squarefree GCD pair: `f = d * cf`, `g = d * cg` where the
/// planted divisor `d` carries the requested root multiplicity and the
/// cofactors share no root with each other or with `d`.
pub struct PlantedGcd {
    pub f: UniPoly,
    pub g: UniPoly,
    pub gcd: UniPoly,
}

/// Plants a pair whose gcd contains a root of multiplicity `mult` (pass the
/// characteristic to exercise the classically hard case); extra simple roots
/// pad the degrees by `pad_f` / `pad_g`.
pub fn planted_gcd_pair(
    ctx: &FieldCtx,
    mult: usize,
    pad_f: usize,
    pad_g: usize,
    rng: &mut impl Rng,
) -> PlantedGcd {
    let roots = distinct_elems(ctx, 2 + pad_f + pad_g, rng);
    let a = roots[0];
    let shared = UniPoly::from_roots(ctx, &vec![a; mult]);
    let cf = UniPoly::from_roots(ctx, &roots[2..2 + pad_f]);
    let cg = UniPoly::from_roots(
        ctx,
        &roots[2 + pad_f..2 + pad_f + pad_g]
            .iter()
            .copied()
            .collect::<Vec<_>>(),
    );
    PlantedGcd {
        f: shared.mul(&cf),
        g: shared.mul(&cg),
        gcd: shared,
    }
}

/// A planted simple-root instance: `P = (y - phi(t)) * Q(t, y)` with
/// `Q(0, phi(0)) != 0`; the circuit takes inputs `(t, y)` with `t` grouped.
pub struct PlantedRoot {
    pub circuit: Circuit,
    pub poly: TruncMV,
    pub phi: UniPoly,
    pub y0: FieldElem,
}

pub fn planted_simple_root(ctx: &FieldCtx, rng: &mut impl Rng) -> PlantedRoot {
    loop {
        let phi_deg = rng.gen_range(1..4usize);
        let phi = UniPoly::new(ctx, (0..=phi_deg).map(|_| ctx.rand(rng)).collect());
        let y0 = phi.eval(ctx.zero());
        let mut q = TruncMV::zero(ctx, 2, TruncMV::NO_CAP);
        for et in 0..2u16 {
            for ey in 0..3u16 {
                q.add_term(vec![et, ey], ctx.rand(rng));
            }
        }
        if ctx.is_zero(q.eval(&[ctx.zero(), y0])) {
            continue;
        }
        let y_minus_phi = TruncMV::variable(ctx, 2, 1, TruncMV::NO_CAP)
            .sub(&TruncMV::from_unipoly(&phi, 2, 0, TruncMV::NO_CAP));
        let poly = y_minus_phi.mul(&q);
        let circuit = poly_to_circuit(&poly, &[("t", Some("t")), ("y", None)]);
        return PlantedRoot {
            circuit,
            poly,
            phi,
            y0,
        };
    }
}

/// A planted symmetric decomposition: `Q` of weighted degree `<= d`
/// composed through the elementary symmetric polynomials.
pub struct PlantedSymdec {
    pub p_circuit: Circuit,
    pub p_poly: TruncMV,
    pub q_poly: TruncMV,
    pub n: usize,
    pub d: usize,
}

pub fn planted_symdec(ctx: &FieldCtx, n: usize, d: usize, rng: &mut impl Rng) -> PlantedSymdec {
    let mut q_poly = TruncMV::zero(ctx, n, d);
    for _ in 0..(d + 2) {
        let mut exps = vec![0u16; n];
        let mut w = 0usize;
        for i in 0..n {
            let room = (d - w) / (i + 1);
            let e = rng.gen_range(0..=room as u16);
            exps[i] = e;
            w += (i + 1) * e as usize;
        }
        q_poly.add_term(exps, ctx.rand(rng));
    }
    let esyms: Vec<TruncMV> = (1..=n).map(|i| TruncMV::esym(ctx, n, i, d)).collect();
    let mut p_poly = TruncMV::zero(ctx, n, d);
    for (exps, c) in q_poly.terms() {
        let mut t = TruncMV::constant(ctx, n, *c, d);
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                t = t.mul(&esyms[i]);
            }
        }
        p_poly = p_poly.add(&t);
    }
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let name_refs: Vec<(&str, Option<&str>)> = names.iter().map(|s| (s.as_str(), None)).collect();
    let p_circuit = poly_to_circuit(&p_poly, &name_refs);
    PlantedSymdec {
        p_circuit,
        p_poly,
        q_poly,
        n,
        d,
    }
}

/// A planted factor-power instance plus its ground truth.
pub struct PlantedFactor {
    pub instance: FactorInstance,
    /// `g(t, y)^{p^l}` truncated at `t^{d+1}`
    pub truth: TruncMV,
}

/// Square-free monic fiber polynomials of each degree over tiny fields are
/// drawn from the full enumeration; larger fields use distinct random roots.
fn random_squarefree_fiber(
    ctx: &FieldCtx,
    deg: usize,
    avoid: &UniPoly,
    rng: &mut impl Rng,
) -> Option<UniPoly> {
    for _ in 0..200 {
        let cand = if ctx.cardinality() > 3 * deg as u64 {
            UniPoly::from_roots(ctx, &distinct_elems(ctx, deg, rng))
        } else {
            rand_monic(ctx, deg, rng)
        };
        if !cand.is_squarefree() {
            continue;
        }
        if avoid.degree() >= Some(1) {
            let shared = cand.euclid_gcd(avoid).ok()?;
            if shared.degree() != Some(0) {
                continue;
            }
        }
        return Some(cand);
    }
    None
}

/// Plants `P = g^{p^l e} * h` with coprime square-free fibers; `g` carries
/// random `t`-perturbation below its `y`-degree.
pub fn planted_factor_instance(
    ctx: &FieldCtx,
    ell: u32,
    e: u64,
    max_factor_deg: usize,
    d: usize,
    rng: &mut impl Rng,
) -> Option<PlantedFactor> {
    let p = ctx.characteristic();
    let mult = (p.pow(ell) * e) as usize;
    let deg_g = rng.gen_range(1..=max_factor_deg);
    let fiber_g = random_squarefree_fiber(ctx, deg_g, &UniPoly::one(ctx), rng)?;
    // g = fiber + t * (lower-degree perturbations)
    let mut g = TruncMV::from_unipoly(&fiber_g, 2, 1, TruncMV::NO_CAP);
    let t_deg = rng.gen_range(1..=2usize);
    for i in 1..=t_deg {
        for j in 0..deg_g {
            let mut exps = vec![0u16; 2];
            exps[0] = i as u16;
            exps[1] = j as u16;
            g.add_term(exps, ctx.rand(rng));
        }
    }
    // optional cofactor with a coprime fiber
    let mut poly = TruncMV::constant(ctx, 2, ctx.one(), TruncMV::NO_CAP);
    for _ in 0..mult {
        poly = poly.mul(&g);
    }
    if rng.gen_bool(0.7) {
        let deg_h = rng.gen_range(1..=2usize);
        let fiber_h = random_squarefree_fiber(ctx, deg_h, &fiber_g, rng)?;
        let mut h = TruncMV::from_unipoly(&fiber_h, 2, 1, TruncMV::NO_CAP);
        if rng.gen_bool(0.5) {
            h.add_term(vec![1, 0], ctx.rand(rng));
        }
        poly = poly.mul(&h);
    }
    let circuit = poly_to_circuit(&poly, &[("t", None), ("y", None)]);
    let instance = FactorInstance {
        circuit,
        fiber: fiber_g,
        ell,
        e,
        d,
    };
    instance.validate().ok()?;
    // ground truth: g^{p^l} truncated
    let q = p.pow(ell) as usize;
    let mut truth = TruncMV::constant(ctx, 2, ctx.one(), TruncMV::NO_CAP);
    for _ in 0..q {
        truth = truth.mul(&g);
    }
    Some(PlantedFactor {
        instance,
        truth: truth.truncate_var(0, d),
    })
}
